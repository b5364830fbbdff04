"""OMOPSO-style multi-objective particle swarm loop.

The engine is agnostic of what a position means: it flies real vectors
inside box bounds and delegates objective evaluation to a batch callable
`evaluate(positions) -> list of objective tuples` (all objectives
maximized). Leaders live in a crowding-truncated archive; final solutions
accumulate in an epsilon-dominance archive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dominance import EpsilonArchive, LeaderArchive, dominates

# Coefficient ranges of the velocity update, resampled per particle per step.
INERTIA_RANGE = (0.1, 0.5)
ACCEL_RANGE = (1.5, 2.0)
NONUNIFORM_B = 5.0


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_objectives: tuple[float, ...]
    current_objectives: tuple[float, ...]


@dataclass
class SwarmState:
    particles: list[Particle]
    leaders: LeaderArchive
    final_archive: EpsilonArchive
    generation: int = 0


@dataclass
class RunResult:
    archive: EpsilonArchive
    history: list[list[tuple[object, tuple[float, ...]]]]  # per-generation archive snapshots


def _clip(position, lower, upper):
    return np.minimum(np.maximum(position, lower), upper)


def update_particle(
    particle: Particle,
    leader_position: np.ndarray,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
) -> None:
    """v' = w v + c1 r1 (pbest - x) + c2 r2 (leader - x); x' clamped into bounds."""
    if leader_position.shape != particle.position.shape:
        raise ValueError("leader dimension does not match particle dimension")
    w = rng.uniform(*INERTIA_RANGE)
    c1 = rng.uniform(*ACCEL_RANGE)
    c2 = rng.uniform(*ACCEL_RANGE)
    r1 = rng.random()
    r2 = rng.random()
    particle.velocity = (
        w * particle.velocity
        + c1 * r1 * (particle.pbest_position - particle.position)
        + c2 * r2 * (leader_position - particle.position)
    )
    particle.position = _clip(particle.position + particle.velocity, lower, upper)


def _nonuniform_delta(rng, span, generation, max_generations):
    # Michalewicz decay: reaches exactly 0 at the final generation
    t = min(generation / max_generations, 1.0) if max_generations > 0 else 1.0
    return span * (1.0 - rng.random() ** ((1.0 - t) ** NONUNIFORM_B))


def mutate_by_thirds(
    particles: list[Particle],
    generation: int,
    max_generations: int,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
) -> None:
    """First third untouched, second third uniform, rest non-uniform mutation."""
    n = len(particles)
    third = n // 3
    dim = len(lower)
    prob = 1.0 / dim
    for idx, particle in enumerate(particles):
        if idx < third:
            continue
        pos = particle.position.copy()
        if idx < 2 * third:
            for d in range(dim):
                if rng.random() < prob:
                    pos[d] = rng.uniform(lower[d], upper[d])
        else:
            for d in range(dim):
                if rng.random() < prob:
                    if rng.random() < 0.5:
                        pos[d] += _nonuniform_delta(rng, upper[d] - pos[d], generation, max_generations)
                    else:
                        pos[d] -= _nonuniform_delta(rng, pos[d] - lower[d], generation, max_generations)
        particle.position = _clip(pos, lower, upper)


def update_pbest(particle: Particle, rng: np.random.Generator) -> None:
    """Replace on domination; incomparable outcomes resolved by fair coin."""
    current, best = particle.current_objectives, particle.pbest_objectives
    if dominates(current, best):
        replace = True
    elif dominates(best, current) or current == best:
        replace = False
    else:
        replace = rng.random() < 0.5
    if replace:
        particle.pbest_position = particle.position.copy()
        particle.pbest_objectives = current


@dataclass
class Swarm:
    """The evolutionary loop, generic over position semantics."""

    lower: np.ndarray
    upper: np.ndarray
    pop_size: int
    max_generations: int
    evaluate: object  # callable: list[np.ndarray] -> list[tuple[float, ...]]
    rng: np.random.Generator
    epsilon: tuple[float, ...] = (0.01, 0.05)
    leader_max_size: int | None = None
    state: SwarmState = field(init=False)

    def __post_init__(self):
        if self.pop_size < 1:
            raise ValueError("population size must be >= 1")
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.leader_max_size is None:
            self.leader_max_size = self.pop_size
        self._initialize()

    def _initialize(self):
        dim = len(self.lower)
        positions = [self.rng.uniform(self.lower, self.upper) for _ in range(self.pop_size)]
        objectives = self.evaluate(positions)
        particles = [
            Particle(
                position=pos,
                velocity=np.zeros(dim),
                pbest_position=pos.copy(),
                pbest_objectives=tuple(obj),
                current_objectives=tuple(obj),
            )
            for pos, obj in zip(positions, objectives)
        ]
        leaders = LeaderArchive(max_size=self.leader_max_size)
        leaders.update([(p.position.copy(), p.current_objectives) for p in particles])
        archive = EpsilonArchive(epsilon=self.epsilon)
        for entry in leaders.entries:
            archive.insert(entry.genotype, entry.objectives)
        self.state = SwarmState(particles=particles, leaders=leaders, final_archive=archive)

    def run_generation(self) -> SwarmState:
        state = self.state
        for particle in state.particles:
            leader = state.leaders.select_leader(self.rng)
            update_particle(particle, np.asarray(leader.genotype), self.rng, self.lower, self.upper)
        mutate_by_thirds(
            state.particles, state.generation, self.max_generations, self.rng, self.lower, self.upper
        )
        objectives = self.evaluate([p.position for p in state.particles])
        for particle, obj in zip(state.particles, objectives):
            particle.current_objectives = tuple(obj)
            update_pbest(particle, self.rng)
        state.leaders.update([(p.position.copy(), p.current_objectives) for p in state.particles])
        for entry in state.leaders.entries:
            state.final_archive.insert(entry.genotype, entry.objectives)
        state.generation += 1
        return state

    def run(self) -> RunResult:
        history = []
        while self.state.generation < self.max_generations:
            self.run_generation()
            snapshot = [
                (np.array(g, copy=True), obj) for g, obj in self.state.final_archive.entries
            ]
            history.append(snapshot)
        return RunResult(archive=self.state.final_archive, history=history)
