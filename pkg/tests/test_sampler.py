import numpy as np
import pytest
from scipy import stats as sstats

from noplan.bitmap import CSpaceBitmap, GridSpec, TWO_PI, cell_to_config, lin_to_multi, multi_to_lin
from noplan.errors import Exhausted, ValidationError
from noplan.kinematics import (
    BaseInObstacle,
    ObstacleHit,
    PreparedObstacles,
    RigidSE2,
    SelfHit,
    SerialChain,
)
from noplan.sampler import (
    SamplerParams,
    SampleSet,
    cells_implied_by,
    propagate,
    sample_obstacle_cells,
)

from support import square, three_band_scene


def torus(dims):
    n = len(dims)
    return GridSpec(tuple(dims), (True,) * n, (0.0,) * n, (TWO_PI,) * n)


class TestSampleSet:
    def test_draws_cover_everything_once(self):
        rng = np.random.default_rng(0)
        ss = SampleSet(100)
        drawn = [ss.draw(rng) for _ in range(100)]
        assert sorted(drawn) == list(range(100))
        with pytest.raises(Exhausted):
            ss.draw(rng)

    def test_remove_once(self):
        ss = SampleSet(10)
        assert ss.remove(4)
        assert not ss.remove(4)
        assert len(ss) == 9
        assert 4 not in ss

    def test_removed_never_drawn(self):
        rng = np.random.default_rng(1)
        ss = SampleSet(30)
        for i in range(0, 30, 3):
            ss.remove(i)
        drawn = [ss.draw(rng) for _ in range(len(ss))]
        assert sorted(drawn) == [i for i in range(30) if i % 3 != 0]

    def test_small_pool_uses_int32(self):
        assert SampleSet(100).pool.dtype == np.int32

    def test_remove_bulk_matches_loop(self):
        rng = np.random.default_rng(2)
        for trial in range(20):
            n = int(rng.integers(5, 200))
            a = SampleSet(n)
            b = SampleSet(n)
            pre = rng.integers(0, n, size=n // 4)
            for x in pre:
                a.remove(int(x))
                b.remove(int(x))
            req = rng.integers(0, n, size=int(rng.integers(1, 2 * n)))
            got = a.remove_bulk(req)
            expect = sorted({int(x) for x in req if b.remove(int(x))})
            assert sorted(got.tolist()) == expect
            assert len(a) == len(b)
            remaining_a = sorted(a.pool[: len(a)].tolist())
            remaining_b = sorted(b.pool[: len(b)].tolist())
            assert remaining_a == remaining_b

    def test_remove_bulk_with_duplicates(self):
        ss = SampleSet(10)
        got = ss.remove_bulk(np.array([3, 3, 3, 7]))
        assert sorted(got.tolist()) == [3, 7]
        assert len(ss) == 8

    def test_pool_consistent_after_bulk(self):
        rng = np.random.default_rng(3)
        ss = SampleSet(64)
        ss.remove_bulk(rng.integers(0, 64, 40))
        drawn = [ss.draw(rng) for _ in range(len(ss))]
        assert len(set(drawn)) == len(drawn)

    def test_first_draw_is_uniform(self):
        rng = np.random.default_rng(4)
        n, trials = 10, 4000
        counts = np.zeros(n)
        for _ in range(trials):
            counts[SampleSet(n).draw(rng)] += 1
        assert sstats.chisquare(counts).pvalue > 1e-3

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            SampleSet(0)


def agreement_oracle(spec, multi, lo, hi):
    """All linear indices whose multi-index agrees with ``multi`` on axes
    lo..hi inclusive, by brute enumeration."""
    out = []
    for lin in range(spec.size):
        m = lin_to_multi(spec, lin)
        if all(m[a] == multi[a] for a in range(lo, hi + 1)):
            out.append(lin)
    return out


class TestCausePropagation:
    chain4 = SerialChain((0, 0), [0.4, 0.3, 0.2, 0.1])

    def test_first_link_hit_frees_all_later_axes(self):
        spec = torus([36, 36, 36, 36])
        got = cells_implied_by(self.chain4, spec, (5, 7, 11, 13), ObstacleHit(1, 0))
        assert got.size == 46656
        sample = [lin_to_multi(spec, int(x)) for x in got[:: 4000]]
        assert all(m[0] == 5 for m in sample)

    def test_obstacle_hit_matches_enumeration(self):
        spec = torus([5, 4, 3, 2])
        multi = (2, 1, 0, 1)
        for link in (1, 2, 3, 4):
            got = cells_implied_by(self.chain4, spec, multi, ObstacleHit(link, 0))
            assert sorted(got.tolist()) == agreement_oracle(spec, multi, 0, link - 1)

    def test_self_hit_matches_enumeration(self):
        spec = torus([5, 4, 3, 2])
        multi = (3, 2, 1, 0)
        for a, b in [(1, 3), (1, 4), (2, 4)]:
            got = cells_implied_by(self.chain4, spec, multi, SelfHit(a, b))
            assert sorted(got.tolist()) == agreement_oracle(spec, multi, a - 1, b - 1)

    def test_last_link_hit_implies_only_the_cell(self):
        spec = torus([5, 4, 3, 2])
        got = cells_implied_by(self.chain4, spec, (1, 2, 2, 1), ObstacleHit(4, 0))
        assert got.tolist() == [multi_to_lin(spec, (1, 2, 2, 1))]

    def test_rigid_contact_implies_only_the_cell(self):
        robot = RigidSE2(square(0, 0, 0.5), (0, 0))
        spec = GridSpec(
            (6, 5, 8), (False, False, True), (0.0, 0.0, 0.0), (6.0, 5.0, TWO_PI)
        )
        got = cells_implied_by(robot, spec, (2, 3, 4), ObstacleHit(1, 0))
        assert got.tolist() == [multi_to_lin(spec, (2, 3, 4))]

    def test_buried_reference_sweeps_rotation(self):
        robot = RigidSE2(square(0, 0, 0.5), (0, 0))
        spec = GridSpec(
            (6, 5, 8), (False, False, True), (0.0, 0.0, 0.0), (6.0, 5.0, TWO_PI)
        )
        got = cells_implied_by(robot, spec, (2, 3, 4), BaseInObstacle(0))
        assert sorted(got.tolist()) == agreement_oracle(spec, (2, 3, 4), 0, 1)
        assert got.size == 8

    def test_propagate_marks_and_depletes(self):
        spec = torus([6, 6, 6])
        chain = SerialChain((0, 0), [0.5, 0.3, 0.2])
        bm = CSpaceBitmap(spec)
        ss = SampleSet(spec.size)
        count = propagate(bm, ss, chain, (2, 3, 4), ObstacleHit(2, 0))
        assert count == 6
        assert bm.free_count() == spec.size - 6
        assert len(ss) == spec.size - 6
        assert propagate(bm, ss, chain, (2, 3, 4), ObstacleHit(2, 0)) == 0

    def test_propagate_skips_already_visited(self):
        spec = torus([6, 6, 6])
        chain = SerialChain((0, 0), [0.5, 0.3, 0.2])
        bm = CSpaceBitmap(spec)
        ss = SampleSet(spec.size)
        stale = multi_to_lin(spec, (2, 3, 0))
        ss.remove(stale)
        count = propagate(bm, ss, chain, (2, 3, 4), ObstacleHit(2, 0))
        assert count == 5
        assert bm.is_free(stale)


def all_hit_scene():
    """One-link arm inside a ring of obstacles: every configuration collides."""
    chain = SerialChain((0, 0), [(1.0, 0.05)])
    obstacles = [square(0.0, 0.0, 1.2)]
    return chain, PreparedObstacles(obstacles), torus([64])


class TestSamplingIteration:
    def test_quota_counts_direct_hits_exactly(self):
        chain, obs, spec = all_hit_scene()
        bm = CSpaceBitmap(spec)
        ss = SampleSet(spec.size)
        stats = sample_obstacle_cells(
            bm, ss, chain, obs, SamplerParams(7, 2), np.random.default_rng(0)
        )
        assert stats.hits == 7
        assert stats.checks >= stats.hits
        assert bm.free_count() < spec.size

    def test_marked_cells_really_collide(self):
        # first-link hits wipe whole columns, so only one direct hit per
        # obstacle band is possible; the quota must stay at three
        sc = three_band_scene(36)
        bm = CSpaceBitmap(sc.grid)
        ss = SampleSet(sc.grid.size)
        rng = np.random.default_rng(5)
        stats = sample_obstacle_cells(
            bm, ss, sc.robot, sc.prepared(), SamplerParams(3, 4), rng
        )
        assert stats.propagated > 0
        marked = [lin for lin in range(sc.grid.size) if not bm.is_free(lin)]
        assert len(marked) >= 3 * 36
        for lin in marked:
            q = cell_to_config(sc.grid, lin_to_multi(sc.grid, lin))
            assert sc.robot.collision_check(q, sc.prepared()).colliding

    def test_deterministic_for_a_seed(self):
        # obstacle reachable only by the second link: every hit pins a
        # single cell, so different seeds mark different subsets
        chain = SerialChain((0, 0), [(1.0, 0.02), (0.55, 0.02)])
        obs = PreparedObstacles([square(1.2, 0.0, 0.06)])
        spec = torus([36, 36])

        def run(seed):
            bm = CSpaceBitmap(spec)
            ss = SampleSet(spec.size)
            stats = sample_obstacle_cells(
                bm, ss, chain, obs, SamplerParams(4, 2), np.random.default_rng(seed)
            )
            return bm.digest(), stats.hits, stats.checks, stats.propagated

        assert run(11) == run(11)
        assert run(11) != run(12)

    def test_exhaustion_carries_partial_stats(self):
        chain = SerialChain((0, 0), [(1.0, 0.05)])
        spec = torus([16])
        bm = CSpaceBitmap(spec)
        ss = SampleSet(spec.size)
        with pytest.raises(Exhausted) as err:
            sample_obstacle_cells(
                bm, ss, chain, PreparedObstacles([]), SamplerParams(1, 2),
                np.random.default_rng(0),
            )
        assert err.value.stats.hits == 0
        assert err.value.stats.checks == 16
        assert bm.free_count() == 16

    def test_neighbor_budget_bounded_by_moore_size(self):
        chain, obs, _ = all_hit_scene()
        spec = torus([8, 8])
        bm = CSpaceBitmap(spec)
        ss = SampleSet(spec.size)
        with pytest.raises(ValidationError):
            sample_obstacle_cells(
                bm, ss, chain, obs, SamplerParams(1, 9), np.random.default_rng(0)
            )

    def test_zero_neighbor_checks_allowed(self):
        chain, obs, spec = all_hit_scene()
        bm = CSpaceBitmap(spec)
        ss = SampleSet(spec.size)
        stats = sample_obstacle_cells(
            bm, ss, chain, obs, SamplerParams(3, 0), np.random.default_rng(0)
        )
        assert stats.hits == 3

    def test_params_validated(self):
        with pytest.raises(ValidationError):
            SamplerParams(0, 5)
        with pytest.raises(ValidationError):
            SamplerParams(10, -1)
