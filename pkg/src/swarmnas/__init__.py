"""Multi-objective particle-swarm search over dense-block CNN genotypes."""

from .dominance import EpsilonArchive, LeaderArchive, crowding_distances, dominates, epsilon_dominates, pareto_filter
from .encoding import DecodedGenotype, SearchSpace, clamp, decode, default_space, init_population, random_genotype
from .search import MultiObjectiveSwarmSearch

__all__ = [
    "DecodedGenotype",
    "EpsilonArchive",
    "LeaderArchive",
    "MultiObjectiveSwarmSearch",
    "SearchSpace",
    "clamp",
    "crowding_distances",
    "decode",
    "default_space",
    "dominates",
    "epsilon_dominates",
    "init_population",
    "pareto_filter",
    "random_genotype",
]

__version__ = "0.1.0"
