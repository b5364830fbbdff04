/**
 * Dense-block cost model and the deterministic surrogate accuracy.
 *
 * Cost conventions match the dispatcher side exactly so results agree
 * bit-for-bit: a convolution counts 2*kh*kw*Cin*Cout*Hout*Wout FLOPs,
 * the classifier counts 2*in*classes, batch norm / ReLU / pooling count
 * zero. The stem is a 3x3 stride-1 convolution with 2x (growth of block
 * 1) outputs; transitions are a 1x1 convolution with unchanged channels
 * followed by 2x2 average pooling with floor halving.
 */

export interface SearchSpace {
  layerRanges: [number, number][];
  growthRanges: [number, number][];
  inputHeight: number;
  inputWidth: number;
  inputChannels: number;
  numClasses: number;
}

/** (numLayers, growthRate) per block. */
export type DecodedGenotype = [number, number][];

export const REFERENCE_LAYER_SHAPE = [6, 12, 24, 16];

export function fromKey(key: number[]): DecodedGenotype {
  if (key.length % 2 !== 0) {
    throw new Error("decoded key length must be even");
  }
  if (!key.every((v) => Number.isInteger(v) && v >= 1)) {
    throw new Error("decoded key must contain positive integers");
  }
  const blocks: DecodedGenotype = [];
  for (let i = 0; i < key.length; i += 2) {
    blocks.push([key[i], key[i + 1]]);
  }
  return blocks;
}

export function genotypeFlops(decoded: DecodedGenotype, space: SearchSpace): number {
  if (decoded.length !== space.layerRanges.length) {
    throw new Error("decoded genotype does not match space block count");
  }
  let h = space.inputHeight;
  let w = space.inputWidth;
  let channels = space.inputChannels;
  let total = 0;

  const stemOut = 2 * decoded[0][1];
  total += 2 * 3 * 3 * channels * stemOut * h * w;
  channels = stemOut;

  decoded.forEach(([numLayers, growth], b) => {
    if (h < 1 || w < 1) {
      throw new Error(`spatial size collapsed to ${h}x${w} before block ${b}`);
    }
    for (let i = 0; i < numLayers; i++) {
      total += 2 * 3 * 3 * channels * growth * h * w;
      channels += growth;
    }
    if (b < decoded.length - 1) {
      total += 2 * 1 * 1 * channels * channels * h * w;
      h = Math.floor(h / 2);
      w = Math.floor(w / 2);
    }
  });

  total += 2 * channels * space.numClasses;
  return total;
}

/** Total-variation distance in [0, 1] from the reference layer proportions. */
export function layerImbalance(decoded: DecodedGenotype): number {
  const layers = decoded.map(([n]) => n);
  const ref = REFERENCE_LAYER_SHAPE.slice(0, layers.length);
  const total = layers.reduce((a, b) => a + b, 0);
  const refTotal = ref.reduce((a, b) => a + b, 0);
  let sum = 0;
  for (let i = 0; i < layers.length; i++) {
    sum += Math.abs(layers[i] / total - ref[i] / refTotal);
  }
  return 0.5 * sum;
}

export interface SurrogateConstants {
  base: number;
  gain: number;
  penalty: number;
  flopsHalf: number;
}

export const DEFAULT_CONSTANTS: SurrogateConstants = {
  base: 0.6,
  gain: 0.38,
  penalty: 0.04,
  flopsHalf: 1.5e9,
};

export function surrogateAccuracy(
  decoded: DecodedGenotype,
  space: SearchSpace,
  constants: SurrogateConstants = DEFAULT_CONSTANTS,
): number {
  const flops = genotypeFlops(decoded, space);
  let acc = constants.base + constants.gain * (1 - Math.exp(-flops / constants.flopsHalf));
  acc -= constants.penalty * layerImbalance(decoded);
  return Math.min(Math.max(acc, 0), 1);
}

/**
 * Pull surrogate_* constants out of a flat "key = value" config file so a
 * worker can be pointed at the same experiment config as the search driver.
 * Other keys are ignored here; the driver validates them.
 */
export function constantsFromConfig(text: string): SurrogateConstants {
  const constants = { ...DEFAULT_CONSTANTS };
  const keyMap: Record<string, keyof SurrogateConstants> = {
    surrogate_base: "base",
    surrogate_gain: "gain",
    surrogate_penalty: "penalty",
    surrogate_flops_half: "flopsHalf",
  };
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (line === "" || line.startsWith("#")) {
      continue;
    }
    const eq = line.indexOf("=");
    if (eq < 0) {
      continue;
    }
    const key = line.slice(0, eq).trim();
    const field = keyMap[key];
    if (field === undefined) {
      continue;
    }
    const value = Number(line.slice(eq + 1).trim());
    if (!Number.isFinite(value)) {
      throw new Error(`config key ${key} is not a number`);
    }
    constants[field] = value;
  }
  return constants;
}

export function parseSpace(raw: unknown): SearchSpace {
  const d = raw as Record<string, unknown>;
  const ranges = (name: string): [number, number][] => {
    const value = d[name];
    if (!Array.isArray(value) || !value.every(
      (r) => Array.isArray(r) && r.length === 2 && r.every(Number.isInteger),
    )) {
      throw new Error(`space.${name} must be a list of integer pairs`);
    }
    return value.map((r) => [r[0], r[1]]);
  };
  const integer = (name: string): number => {
    const value = d[name];
    if (!Number.isInteger(value) || (value as number) < 1) {
      throw new Error(`space.${name} must be a positive integer`);
    }
    return value as number;
  };
  const space: SearchSpace = {
    layerRanges: ranges("layerRanges"),
    growthRanges: ranges("growthRanges"),
    inputHeight: integer("inputHeight"),
    inputWidth: integer("inputWidth"),
    inputChannels: integer("inputChannels"),
    numClasses: integer("numClasses"),
  };
  if (space.layerRanges.length === 0 || space.layerRanges.length !== space.growthRanges.length) {
    throw new Error("space must have matching, non-empty range lists");
  }
  return space;
}
