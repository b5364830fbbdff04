import math

import numpy as np
import pytest

from swarmnas.dominance import LeaderArchive, dominates
from swarmnas.errors import NoLeadersError
from swarmnas.evaluation import zdt1
from swarmnas.mopso import (
    Particle,
    Swarm,
    mutate_by_thirds,
    update_particle,
    update_pbest,
)


class ScriptedRng:
    """Fixed-value stand-in for update_particle's coefficient draws."""

    def __init__(self, uniforms, randoms):
        self.uniforms = list(uniforms)
        self.randoms = list(randoms)

    def uniform(self, lo, hi):
        return self.uniforms.pop(0)

    def random(self):
        return self.randoms.pop(0)


def make_particle(position, velocity, pbest=None):
    position = np.asarray(position, dtype=float)
    return Particle(
        position=position.copy(),
        velocity=np.asarray(velocity, dtype=float),
        pbest_position=np.asarray(pbest if pbest is not None else position, dtype=float),
        pbest_objectives=(0.0, 0.0),
        current_objectives=(0.0, 0.0),
    )


WIDE = (np.array([-100.0]), np.array([100.0]))


class TestSelectLeader:
    def make_archive(self, crowdings):
        from swarmnas.dominance import LeaderEntry

        archive = LeaderArchive(max_size=10)
        archive.entries = [LeaderEntry(i, (float(i), float(-i)), c) for i, c in enumerate(crowdings)]
        return archive

    def test_singleton(self):
        archive = self.make_archive([1.0])
        rng = np.random.default_rng(0)
        assert archive.select_leader(rng).genotype == 0

    def test_empty_raises(self):
        with pytest.raises(NoLeadersError):
            LeaderArchive(max_size=5).select_leader(np.random.default_rng(0))

    def test_infinite_crowding_wins_every_tournament(self):
        archive = self.make_archive([math.inf, 0.1])
        rng = np.random.default_rng(1)
        wins = sum(archive.select_leader(rng).genotype == 0 for _ in range(10_000))
        # entry 0 wins whenever it appears: 3 of 4 equally likely pairings
        assert abs(wins / 10_000 - 0.75) < 0.03

    def test_equal_crowding_is_fair(self):
        archive = self.make_archive([0.5, 0.5])
        rng = np.random.default_rng(2)
        wins = sum(archive.select_leader(rng).genotype == 0 for _ in range(10_000))
        assert abs(wins / 10_000 - 0.5) < 0.03


class TestUpdateParticle:
    def test_attraction_vanishes_at_consensus(self):
        p = make_particle([10.0], [1.0])
        rng = ScriptedRng(uniforms=[0.3, 1.6, 1.7], randoms=[0.4, 0.9])
        update_particle(p, np.array([10.0]), rng, *WIDE)
        assert p.position[0] == pytest.approx(10.0 + 0.3 * 1.0)

    def test_zero_velocity_consensus_fixed_point(self):
        p = make_particle([10.0], [0.0])
        rng = ScriptedRng(uniforms=[0.3, 1.6, 1.7], randoms=[0.4, 0.9])
        update_particle(p, np.array([10.0]), rng, *WIDE)
        assert p.position[0] == 10.0
        assert p.velocity[0] == 0.0

    def test_scripted_formula_evaluation(self):
        p = make_particle([10.0], [1.0], pbest=[12.0])
        rng = ScriptedRng(uniforms=[0.2, 1.5, 1.5], randoms=[1.0, 1.0])
        update_particle(p, np.array([14.0]), rng, *WIDE)
        assert p.velocity[0] == pytest.approx(9.2)
        assert p.position[0] == pytest.approx(19.2)

    def test_position_clamped(self):
        p = make_particle([10.0], [1.0], pbest=[12.0])
        rng = ScriptedRng(uniforms=[0.2, 1.5, 1.5], randoms=[1.0, 1.0])
        update_particle(p, np.array([14.0]), rng, np.array([0.0]), np.array([15.0]))
        assert p.position[0] == 15.0

    def test_dimension_mismatch(self):
        p = make_particle([10.0], [1.0])
        with pytest.raises(ValueError):
            update_particle(p, np.array([1.0, 2.0]), np.random.default_rng(0), *WIDE)


class TestMutateByThirds:
    def bounds(self, dim):
        return np.zeros(dim), np.ones(dim) * 10

    def test_first_third_untouched(self):
        rng = np.random.default_rng(3)
        lower, upper = self.bounds(4)
        particles = [make_particle([5.0] * 4, [0.0] * 4) for _ in range(9)]
        before = [p.position.copy() for p in particles]
        mutate_by_thirds(particles, 1, 10, rng, lower, upper)
        for i in range(3):
            assert np.array_equal(particles[i].position, before[i])

    def test_parts_of_three(self):
        rng = np.random.default_rng(4)
        lower, upper = self.bounds(2)
        particles = [make_particle([5.0, 5.0], [0.0, 0.0]) for _ in range(3)]
        before = particles[0].position.copy()
        mutate_by_thirds(particles, 1, 10, rng, lower, upper)
        assert np.array_equal(particles[0].position, before)

    def test_nonuniform_decays_to_zero_at_horizon(self):
        rng = np.random.default_rng(5)
        lower, upper = self.bounds(4)
        for _ in range(50):
            particle = make_particle([5.0, 2.0, 8.0, 5.0], [0.0] * 4)
            before = particle.position.copy()
            mutate_by_thirds([particle], 10, 10, rng, lower, upper)
            assert np.all(np.abs(particle.position - before) < 1e-9)

    def test_results_stay_in_bounds(self):
        rng = np.random.default_rng(6)
        lower, upper = self.bounds(4)
        particles = [make_particle([9.9, 0.1, 5.0, 5.0], [0.0] * 4) for _ in range(12)]
        mutate_by_thirds(particles, 1, 10, rng, lower, upper)
        for p in particles:
            assert np.all(p.position >= lower) and np.all(p.position <= upper)


class TestUpdatePbest:
    def test_dominating_current_replaces(self):
        p = make_particle([1.0], [0.0], pbest=[2.0])
        p.pbest_objectives = (0.8, -2.0)
        p.current_objectives = (0.9, -1.0)
        update_pbest(p, np.random.default_rng(0))
        assert p.pbest_objectives == (0.9, -1.0)
        assert p.pbest_position[0] == 1.0

    def test_equal_objectives_kept(self):
        p = make_particle([1.0], [0.0], pbest=[2.0])
        p.pbest_objectives = (0.8, -2.0)
        p.current_objectives = (0.8, -2.0)
        update_pbest(p, np.random.default_rng(0))
        assert p.pbest_position[0] == 2.0

    def test_incomparable_replaced_half_the_time(self):
        rng = np.random.default_rng(7)
        replaced = 0
        for _ in range(10_000):
            p = make_particle([1.0], [0.0], pbest=[2.0])
            p.pbest_objectives = (0.8, -1.0)
            p.current_objectives = (0.9, -2.0)
            update_pbest(p, rng)
            replaced += p.pbest_objectives == (0.9, -2.0)
        assert abs(replaced / 10_000 - 0.5) < 0.03


def zdt_swarm(pop, gens, seed, dim=6):
    counter = {"requests": 0, "batches": 0}

    def evaluate(positions):
        counter["requests"] += len(positions)
        counter["batches"] += 1
        return [zdt1(p) for p in positions]

    swarm = Swarm(
        lower=np.zeros(dim),
        upper=np.ones(dim),
        pop_size=pop,
        max_generations=gens,
        evaluate=evaluate,
        rng=np.random.default_rng(seed),
        epsilon=(0.01, 0.01),
    )
    return swarm, counter


class TestSwarmLoop:
    def test_generation_request_budget(self):
        swarm, counter = zdt_swarm(20, 20, seed=8)
        after_init = counter["requests"]
        assert after_init == 20
        swarm.run()
        assert counter["requests"] - after_init == 400
        assert counter["batches"] == 21

    def test_zero_generations_reports_initial_archive(self):
        swarm, _ = zdt_swarm(10, 0, seed=9)
        initial = list(swarm.state.final_archive.objectives())
        result = swarm.run()
        assert result.history == []
        assert result.archive.objectives() == initial

    def test_fixed_seed_bit_reproducible(self):
        a = zdt_swarm(4, 2, seed=10)[0].run()
        b = zdt_swarm(4, 2, seed=10)[0].run()
        assert a.archive.objectives() == b.archive.objectives()
        assert len(a.history) == len(b.history) == 2
        for ga, gb in zip(a.archive.entries, b.archive.entries):
            assert np.array_equal(ga[0], gb[0])

    def test_positions_always_within_bounds(self):
        swarm, _ = zdt_swarm(9, 15, seed=11)
        for _ in range(15):
            swarm.run_generation()
            for p in swarm.state.particles:
                assert np.all(p.position >= 0.0) and np.all(p.position <= 1.0)

    def test_pbest_never_worsens(self):
        swarm, _ = zdt_swarm(9, 10, seed=12)
        previous = [p.pbest_objectives for p in swarm.state.particles]
        for _ in range(10):
            swarm.run_generation()
            current = [p.pbest_objectives for p in swarm.state.particles]
            for old, new in zip(previous, current):
                assert not dominates(old, new)
            previous = current

    def test_archive_quality_non_degrading(self):
        swarm, _ = zdt_swarm(12, 12, seed=13)
        presented: list[tuple] = []
        for _ in range(12):
            state = swarm.run_generation()
            presented.extend(e.objectives for e in state.leaders.entries)
            for obj in state.final_archive.objectives():
                assert not any(dominates(seen, obj) for seen in presented)

    def test_history_snapshot_counts(self):
        assert len(zdt_swarm(20, 20, seed=14)[0].run().history) == 20
        assert len(zdt_swarm(50, 10, seed=14)[0].run().history) == 10
