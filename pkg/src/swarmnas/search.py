"""Top-level search estimator wiring the swarm engine to an evaluator.

Follows the scikit-learn estimator convention: constructor stores
parameters verbatim, `fit` validates and runs the search, fitted state
lands in trailing-underscore attributes, and `get_params`/`set_params`
come from BaseEstimator.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import evaluation
from .dispatch import Dispatcher, RemoteEvaluator
from .encoding import SearchSpace, clamp, decode, default_space
from .evaluation import EvaluationCache, SurrogateEvaluator, zdt1
from .mopso import RunResult, Swarm

EVALUATOR_NAMES = ("surrogate", "zdt1", "remote")


def _check_positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


class MultiObjectiveSwarmSearch(BaseEstimator):
    """Particle-swarm search for the (accuracy, -FLOPs) Pareto front.

    Parameters
    ----------
    population : swarm size.
    generations : number of evolutionary iterations.
    evaluator : "surrogate", "zdt1", "remote", or an evaluator object
        (callable decoded, space -> (accuracy, best_epoch), optionally with
        an evaluate_many batch hook).
    seed : RNG seed; mandatory for reproducible runs.
    space : SearchSpace for architecture evaluators; defaults to the
        four-block CIFAR-style space.
    epsilon : per-objective tolerance of the final archive.
    flops_scale : divisor applied to FLOPs before negation.
    zdt_dimensions : dimensionality of the benchmark position vector.
    workers : worker clients for the "remote" evaluator.
    cache : optional pre-loaded EvaluationCache.
    leader_max_size : leader archive bound; defaults to the population size.
    """

    def __init__(
        self,
        population=20,
        generations=20,
        evaluator="surrogate",
        seed=None,
        space=None,
        epsilon=(0.01, 0.05),
        flops_scale=evaluation.DEFAULT_FLOPS_SCALE,
        zdt_dimensions=30,
        workers=None,
        cache=None,
        leader_max_size=None,
    ):
        self.population = population
        self.generations = generations
        self.evaluator = evaluator
        self.seed = seed
        self.space = space
        self.epsilon = epsilon
        self.flops_scale = flops_scale
        self.zdt_dimensions = zdt_dimensions
        self.workers = workers
        self.cache = cache
        self.leader_max_size = leader_max_size

    def fit(self, X=None, y=None):
        population = _check_positive_int(self.population, "population")
        generations = self.generations
        if not isinstance(generations, (int, np.integer)) or generations < 0:
            raise ValueError(f"generations must be a non-negative integer, got {generations!r}")
        if self.seed is None:
            raise ValueError("seed is required; wall-clock seeding is not supported")
        rng = np.random.default_rng(int(self.seed))

        space = self.space if self.space is not None else default_space()
        self.space_ = space
        self.cache_ = self.cache if self.cache is not None else EvaluationCache()

        if self.evaluator == "zdt1":
            dim = _check_positive_int(self.zdt_dimensions, "zdt_dimensions")
            lower, upper = np.zeros(dim), np.ones(dim)
            batch_evaluate = lambda positions: [zdt1(p) for p in positions]
            self.is_architecture_search_ = False
        else:
            evaluator = self._resolve_evaluator()
            lower, upper = space.bounds()
            batch_evaluate = lambda positions: evaluation.evaluate_batch(
                positions, space, evaluator, self.cache_, float(self.flops_scale)
            )
            self.is_architecture_search_ = True

        swarm = Swarm(
            lower=lower,
            upper=upper,
            pop_size=population,
            max_generations=int(generations),
            evaluate=batch_evaluate,
            rng=rng,
            epsilon=tuple(float(e) for e in self.epsilon),
            leader_max_size=self.leader_max_size,
        )
        result: RunResult = swarm.run()
        self.archive_ = result.archive
        self.history_ = result.history
        self.n_evaluator_calls_ = self.cache_.misses
        return self

    def _resolve_evaluator(self):
        if self.evaluator == "surrogate":
            return SurrogateEvaluator()
        if self.evaluator == "remote":
            if not self.workers:
                raise ValueError("remote evaluator requires a non-empty workers list")
            space = self.space if self.space is not None else default_space()
            return RemoteEvaluator(Dispatcher(list(self.workers), space))
        if callable(self.evaluator) or hasattr(self.evaluator, "evaluate_many"):
            return self.evaluator
        raise ValueError(f"unknown evaluator {self.evaluator!r}; expected one of {EVALUATOR_NAMES}")

    def pareto_front_(self) -> list[tuple[float, ...]]:
        return self.archive_.objectives()

    def decoded_archive_(self):
        """(decoded genotype, objectives) pairs for architecture searches."""
        out = []
        for genotype, obj in self.archive_.entries:
            decoded = decode(clamp(np.asarray(genotype), self.space_), self.space_)
            out.append((decoded, obj))
        return out
