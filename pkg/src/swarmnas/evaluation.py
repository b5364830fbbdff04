"""Objective evaluation: memoization cache, early stopping, and evaluators.

Accuracy comes from a pluggable evaluator keyed by the decoded integer
genotype so that float positions meaning the same network are trained at
most once. FLOPs are always computed analytically on the caller side.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field

import numpy as np

from . import densenet
from .encoding import DecodedGenotype, SearchSpace, clamp, decode
from .errors import CacheCorruptError, EvaluationError

# Per-block layer proportions of the largest network in the default space
# (6, 12, 24, 16); deviation from these feeds the surrogate's penalty term.
REFERENCE_LAYER_SHAPE = (6, 12, 24, 16)

DEFAULT_FLOPS_SCALE = 1e9


@dataclass(frozen=True)
class EvaluationRecord:
    key: tuple[int, ...]
    accuracy: float
    best_epoch: int
    evaluator_id: str


class EvaluationCache:
    """Thread-safe accuracy memo keyed by decoded genotype.

    Concurrent requests for the same key block until the first computation
    finishes, so each key is evaluated at most once.
    """

    def __init__(self):
        self._records: dict[tuple[int, ...], EvaluationRecord] = {}
        self._lock = threading.Lock()
        self._pending: dict[tuple[int, ...], threading.Event] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key) -> bool:
        return tuple(key) in self._records

    def get(self, key) -> EvaluationRecord | None:
        return self._records.get(tuple(key))

    def put(self, record: EvaluationRecord) -> None:
        with self._lock:
            self._records[record.key] = record

    def records(self) -> list[EvaluationRecord]:
        return list(self._records.values())

    def get_or_compute(self, key, compute) -> EvaluationRecord:
        """Return the cached record for key, running compute() once if absent."""
        key = tuple(int(v) for v in key)
        while True:
            with self._lock:
                record = self._records.get(key)
                if record is not None:
                    self.hits += 1
                    return record
                event = self._pending.get(key)
                if event is None:
                    event = threading.Event()
                    self._pending[key] = event
                    owner = True
                    self.misses += 1
                else:
                    owner = False
            if owner:
                try:
                    record = compute()
                    with self._lock:
                        self._records[key] = record
                finally:
                    with self._lock:
                        self._pending.pop(key, None)
                    event.set()
                return record
            event.wait()


def save_cache(cache: EvaluationCache, path) -> None:
    """One record per line: comma-joined key, accuracy, best epoch, evaluator id."""
    records = sorted(cache.records(), key=lambda r: r.key)
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            key = ",".join(str(v) for v in r.key)
            fh.write(f"{key}\t{r.accuracy!r}\t{r.best_epoch}\t{r.evaluator_id}\n")


def load_cache(path) -> EvaluationCache:
    """Load a persisted cache; a missing file yields an empty cache."""
    cache = EvaluationCache()
    if not os.path.exists(path):
        return cache
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise CacheCorruptError(path, line_number, f"expected 4 fields, got {len(parts)}")
            try:
                key = tuple(int(v) for v in parts[0].split(","))
                accuracy = float(parts[1])
                best_epoch = int(parts[2])
            except ValueError as exc:
                raise CacheCorruptError(path, line_number, str(exc)) from None
            cache.put(EvaluationRecord(key, accuracy, best_epoch, parts[3]))
    return cache


@dataclass(frozen=True)
class TrainingCurve:
    per_epoch_accuracy: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_epoch_accuracy", tuple(float(v) for v in self.per_epoch_accuracy))
        if any(not 0.0 <= v <= 1.0 for v in self.per_epoch_accuracy):
            raise ValueError("accuracies must lie in [0, 1]")


def early_stop_train(curve: TrainingCurve, max_epochs: int, patience: int = 10) -> tuple[float, int]:
    """Scan epochs tracking the best accuracy; stop once it stalls past patience.

    Epochs are 1-based. Returns (best accuracy, stop epoch).
    """
    if not curve.per_epoch_accuracy:
        raise ValueError("training curve is empty")
    if max_epochs > len(curve.per_epoch_accuracy):
        raise ValueError("max_epochs exceeds curve length")
    best_acc, best_epoch = 0.0, 0
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        acc = curve.per_epoch_accuracy[epoch - 1]
        if acc > best_acc:
            best_acc, best_epoch = acc, epoch
        elif epoch - best_epoch > patience:
            break
    return best_acc, epoch


@dataclass
class SurrogateEvaluator:
    """Deterministic stand-in for training: FLOPs-saturating accuracy model.

    accuracy = base + gain * (1 - exp(-flops / flops_half)) - penalty * imbalance,
    clipped to [0, 1]; imbalance is the total-variation distance between the
    network's per-block layer proportions and the reference shape's.
    """

    base: float = 0.60
    gain: float = 0.38
    penalty: float = 0.04
    flops_half: float = 1.5e9
    evaluator_id: str = "surrogate"

    def accuracy(self, decoded: DecodedGenotype, space: SearchSpace) -> float:
        total_flops = densenet.genotype_flops(decoded, space)
        acc = self.base + self.gain * (1.0 - math.exp(-total_flops / self.flops_half))
        acc -= self.penalty * layer_imbalance(decoded)
        return min(max(acc, 0.0), 1.0)

    def __call__(self, decoded: DecodedGenotype, space: SearchSpace) -> tuple[float, int]:
        return self.accuracy(decoded, space), 1


def layer_imbalance(decoded: DecodedGenotype) -> float:
    """Total-variation distance in [0, 1] from the reference layer proportions."""
    layers = [n for n, _ in decoded.per_block]
    ref = REFERENCE_LAYER_SHAPE[: len(layers)]
    total = sum(layers)
    ref_total = sum(ref)
    return 0.5 * sum(abs(n / total - r / ref_total) for n, r in zip(layers, ref))


def zdt1(position) -> tuple[float, float]:
    """Two-objective benchmark with analytic front f2 = 1 - sqrt(f1).

    Returns the negated objective pair so larger is better.
    """
    x = np.asarray(position, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("position must be a vector of length >= 2")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("coordinates must lie in [0, 1]")
    f1 = float(x[0])
    g = 1.0 + 9.0 * float(np.sum(x[1:])) / (len(x) - 1)
    f2 = g * (1.0 - math.sqrt(f1 / g))
    return (-f1, -f2)


def evaluate(
    genotype,
    space: SearchSpace,
    evaluator,
    cache: EvaluationCache,
    flops_scale: float = DEFAULT_FLOPS_SCALE,
) -> tuple[float, float]:
    """(accuracy, -flops/scale) for one position, memoized on the decoded key."""
    decoded = decode(clamp(genotype, space), space)

    def compute():
        try:
            accuracy, best_epoch = evaluator(decoded, space)
        except Exception as exc:
            raise EvaluationError(str(exc), genotype=decoded.key) from exc
        return EvaluationRecord(decoded.key, accuracy, best_epoch, getattr(evaluator, "evaluator_id", "local"))

    record = cache.get_or_compute(decoded.key, compute)
    total_flops = densenet.genotype_flops(decoded, space)
    return (record.accuracy, -total_flops / flops_scale)


def evaluate_batch(
    genotypes,
    space: SearchSpace,
    evaluator,
    cache: EvaluationCache,
    flops_scale: float = DEFAULT_FLOPS_SCALE,
) -> list[tuple[float, float]]:
    """Batch evaluation preserving order; distinct decoded keys evaluated once.

    If the evaluator exposes evaluate_many, all uncached distinct keys are
    sent as one batch (the remote dispatch path); otherwise each key is
    computed through the cache serially.
    """
    decoded_list = [decode(clamp(g, space), space) for g in genotypes]
    evaluate_many = getattr(evaluator, "evaluate_many", None)
    if evaluate_many is not None:
        missing: list[DecodedGenotype] = []
        seen = set()
        for d in decoded_list:
            if d.key not in cache and d.key not in seen:
                seen.add(d.key)
                missing.append(d)
        cache.hits += len(decoded_list) - len(missing)
        cache.misses += len(missing)
        if missing:
            outcomes = evaluate_many(missing, space)
            for d, (accuracy, best_epoch) in zip(missing, outcomes):
                cache.put(EvaluationRecord(d.key, accuracy, best_epoch, getattr(evaluator, "evaluator_id", "remote")))
        results = []
        for d in decoded_list:
            record = cache.get(d.key)
            results.append((record.accuracy, -densenet.genotype_flops(d, space) / flops_scale))
        return results
    return [evaluate(g, space, evaluator, cache, flops_scale) for g in genotypes]
