/**
 * Single-slot evaluation worker.
 *
 * Listens on a TCP port, answers PING with PONG and EVALUATE with a
 * RESULT carrying the surrogate accuracy for the requested genotype.
 * Malformed frames get an ERROR reply and the offending connection is
 * closed; the server itself keeps serving. At most one evaluation runs
 * at a time across all connections.
 */

import * as fs from "fs";
import * as net from "net";
import { fileURLToPath } from "url";

import {
  FrameDecoder,
  Message,
  ProtocolError,
  TYPE_EVALUATE,
  TYPE_PING,
  TYPE_PONG,
  encodeFrame,
  errorMessage,
  resultMessage,
} from "./protocol.js";
import {
  DEFAULT_CONSTANTS,
  SurrogateConstants,
  constantsFromConfig,
  fromKey,
  parseSpace,
  surrogateAccuracy,
} from "./surrogate.js";

export interface WorkerOptions {
  host?: string;
  port?: number;
  delayMs?: number;
  constants?: SurrogateConstants;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export class WorkerService {
  private readonly server: net.Server;
  private readonly delayMs: number;
  private readonly constants: SurrogateConstants;
  private slot: Promise<void> = Promise.resolve();

  constructor(options: WorkerOptions = {}) {
    this.delayMs = options.delayMs ?? 0;
    this.constants = options.constants ?? DEFAULT_CONSTANTS;
    this.server = net.createServer((socket) => this.serveConnection(socket));
  }

  listen(host = "127.0.0.1", port = 0): Promise<net.AddressInfo> {
    return new Promise((resolve, reject) => {
      this.server.once("error", reject);
      this.server.listen(port, host, () => {
        resolve(this.server.address() as net.AddressInfo);
      });
    });
  }

  close(): Promise<void> {
    return new Promise((resolve) => this.server.close(() => resolve()));
  }

  private serveConnection(socket: net.Socket): void {
    const decoder = new FrameDecoder();
    let pending: Promise<void> = Promise.resolve();
    socket.on("error", () => socket.destroy());
    socket.on("data", (chunk) => {
      let messages: Message[];
      try {
        messages = decoder.push(chunk);
      } catch (err) {
        const detail = err instanceof ProtocolError ? err.message : String(err);
        pending = pending.then(() => {
          socket.write(encodeFrame(errorMessage(null, detail)));
          socket.end();
        });
        return;
      }
      for (const message of messages) {
        pending = pending.then(async () => {
          const reply = await this.handle(message);
          if (!socket.destroyed) {
            socket.write(encodeFrame(reply));
          }
        });
      }
    });
  }

  private handle(message: Message): Promise<Message> {
    if (message.type === TYPE_PING) {
      return Promise.resolve({ type: TYPE_PONG });
    }
    if (message.type === TYPE_EVALUATE) {
      const jobId = typeof message.jobId === "number" ? message.jobId : null;
      const run = this.slot.then(async () => {
        const decoded = fromKey(asIntegerList(message.genotype));
        const space = parseSpace(message.space);
        if (this.delayMs > 0) {
          await sleep(this.delayMs);
        }
        return surrogateAccuracy(decoded, space, this.constants);
      });
      this.slot = run.then(
        () => undefined,
        () => undefined,
      );
      return run.then(
        (accuracy) => resultMessage(jobId as number, accuracy, 1),
        (err) => errorMessage(jobId, `evaluation failed: ${err instanceof Error ? err.message : err}`),
      );
    }
    const jobId = typeof message.jobId === "number" ? message.jobId : null;
    return Promise.resolve(errorMessage(jobId, `unsupported type '${message.type}'`));
  }
}

function asIntegerList(raw: unknown): number[] {
  if (!Array.isArray(raw) || !raw.every(Number.isInteger)) {
    throw new Error("genotype must be a list of integers");
  }
  return raw as number[];
}

interface CliArgs {
  host: string;
  port: number;
  delayMs: number;
  configPath: string | null;
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { host: "127.0.0.1", port: 0, delayMs: 0, configPath: null };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    switch (flag) {
      case "--host":
        args.host = value;
        break;
      case "--port":
        args.port = Number(value);
        break;
      case "--delay":
        args.delayMs = Math.round(Number(value) * 1000);
        break;
      case "--config":
        args.configPath = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!Number.isInteger(args.port) || args.port < 0 || args.port > 65535) {
    throw new Error(`invalid port ${args.port}`);
  }
  return args;
}

async function main(): Promise<void> {
  let args: CliArgs;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    process.exit(2);
  }
  const constants = args.configPath
    ? constantsFromConfig(fs.readFileSync(args.configPath, "utf-8"))
    : DEFAULT_CONSTANTS;
  const service = new WorkerService({ delayMs: args.delayMs, constants });
  const address = await service.listen(args.host, args.port);
  process.stderr.write(`listening on ${address.address}:${address.port}\n`);
}

if (process.argv[1] && fileURLToPath(import.meta.url) === fs.realpathSync(process.argv[1])) {
  main().catch((err) => {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    process.exit(1);
  });
}
