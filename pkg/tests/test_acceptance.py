"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Lines are collected in ``conftest.ACCEPTANCE_LINES`` and shown in the
terminal summary. Frozen counts come from the HiGHS oracle in tests/oracles.
"""

import functools
import itertools
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from cspoly.curve import Angle, FrequencySet, build_angle_grid, frequency_count_closed_form, frequency_set
from cspoly.faces import (arc_face_property, edge_upper_bound, estimate_face_fraction, is_face,
                          many_faces_count_bound, verify_direct_sum_law, verify_two_neighborly)
from cspoly.linalg import check_moment_independence
from cspoly.polytopes import ClusterSpec, DirectSumSpec, ManyFacesSpec, NeighborlySpec
from cspoly.recovery import CorruptionModel, build_code, run_campaign

import conftest
from conftest import edge_report, instance

Q24 = ManyFacesSpec(2, 1, 24)
# Every recovery campaign run by this module, for the face-condition implication.
CAMPAIGNS = []


@contextmanager
def criterion(n, title, limit):
    """Record ``criterion n: PASS|FAIL`` with details and wall time; enforce ``limit`` seconds."""
    details = []
    ok = False
    start = time.perf_counter()
    try:
        yield details
        elapsed = time.perf_counter() - start
        details.append(f"{elapsed:.1f}s < {limit}s")
        assert elapsed < limit, f"criterion {n} took {elapsed:.1f}s, limit {limit}s"
        ok = True
    finally:
        if not ok and not any("s < " in d for d in details):
            details.append(f"{time.perf_counter() - start:.1f}s")
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title} [{'; '.join(details)}]"
        conftest.ACCEPTANCE_LINES[n] = line
        print(line)


@functools.lru_cache(maxsize=None)
def neighborly_report(m):
    return verify_two_neighborly(instance(NeighborlySpec(m)))


@functools.lru_cache(maxsize=None)
def q24_exhaustive():
    return estimate_face_fraction(instance(Q24), 2, mode="exhaustive")


def test_criterion_01_cross_polytope():
    with criterion(1, "P_0 is the 6-dim cross-polytope", 10) as out:
        p0 = instance(NeighborlySpec(0))
        assert (p0.num_vertices, p0.observed_dim) == (12, 6)
        rep = edge_report(NeighborlySpec(0))
        assert rep.edges == 60 and rep.inconclusive == 0
        swept = mismatched = 0
        for mask in range(1, 2**12):
            S = [i for i in range(12) if mask >> i & 1]
            rule = not any(int(p0.antipodal[i]) in S for i in S)
            swept += 1
            mismatched += is_face(p0, S).is_face != rule
        out.append(f"edges {rep.edges}, {swept} subsets, {mismatched} mismatches")
        assert swept == 4095
        assert mismatched == 0


def test_criterion_02_two_neighborly():
    with criterion(2, "P_1, P_2 are 2-neighborly of dim 10, 14", 600) as out:
        for m, dim, pairs in [(1, 10, 612), (2, 14, 5724)]:
            inst = instance(NeighborlySpec(m))
            rep = neighborly_report(m)
            out.append(f"m={m}: dim {inst.observed_dim}, {rep.passed}/{rep.required}")
            assert inst.observed_dim == 4 * m + 6 == dim
            assert rep.required == rep.passed == pairs
            assert rep.failed == rep.inconclusive == 0


def test_criterion_03_frequency_count():
    with criterion(3, "closed-form frequency count matches enumeration", 1) as out:
        checked = 0
        for k in range(1, 13):
            base = FrequencySet.odd_up_to(6 * k - 1)
            for m in range(9):
                brute = {f * 5**j for j in range(m + 1) for f in range(1, 6 * k, 2)}
                assert frequency_count_closed_form(k, m) == len(brute) == len(frequency_set(base, 5, m))
                checked += 1
        out.append(f"{checked} (k, m) pairs")


def test_criterion_04_moment_curve_independence():
    with criterion(4, "2k grid points on the moment curve are independent", 30) as out:
        q = 120
        grid = build_angle_grid(q)
        worst = math.inf
        for k in range(1, 7):
            rng = np.random.default_rng([0, k])
            for _ in range(200):
                classes = rng.permutation(q // 2)[:2 * k]
                idx = [int(c) + (q // 2) * int(rng.integers(2)) for c in classes]
                res = check_moment_independence(k, [grid[i] for i in idx])
                assert res.independent
                ratio = res.min_singular_value / res.max_singular_value
                worst = min(worst, ratio)
                assert ratio > 1e-8
        out.append(f"1200 draws, worst sigma_min/sigma_max {worst:.3g}")


def test_criterion_05_many_faces_fraction():
    with criterion(5, "P_{2,1,24}: N=120, dim 22, not-a-face fraction <= 0.8", 900) as out:
        inst = instance(Q24)
        assert (inst.num_vertices, inst.observed_dim, inst.predicted_dim) == (120, 22, 22)
        rep = q24_exhaustive()
        frac = Fraction(rep.failures, rep.trials)
        out.append(f"{rep.failures}/{rep.trials} ordered pairs = {float(frac):.5f}")
        assert rep.inconclusive == 0
        assert rep.trials == 120 * 120
        assert frac <= Fraction(4, 5)


def test_criterion_06_many_faces_edge_count():
    with criterion(6, "P_{2,1,24} edge count >= 1380", 900) as out:
        rep = q24_exhaustive()
        lower = many_faces_count_bound(120, 2, 1)
        out.append(f"{rep.distinct_k_faces} edges vs bound {lower}")
        assert lower == math.comb(120, 2) - Fraction(4, 5) * 120**2 / 2 == 1380
        # HiGHS oracle count.
        assert rep.distinct_k_faces == 7080
        assert rep.distinct_k_faces >= lower


def test_criterion_07_cluster_edges():
    with criterion(7, "cluster instances have >= N(N-s-1)/2 edges", 300) as out:
        for m, s, bound in [(0, 2, 20), (1, 3, 576)]:
            inst = instance(ClusterSpec(m, s))
            N = inst.num_vertices
            rep = edge_report(ClusterSpec(m, s))
            out.append(f"(m={m}, s={s}): {rep.edges} >= {bound}")
            assert N * (N - s - 1) // 2 == bound
            assert rep.edges >= bound


def test_criterion_08_direct_sum_law():
    with criterion(8, "sum law on two copies of P_{2,1,8}", 600) as out:
        rep = verify_direct_sum_law(instance(DirectSumSpec(2, 1, 8, 2)), trials=500, seed=0)
        out.append(f"500 samples, {rep.mismatches} mismatches, {rep.inconclusive} inconclusive")
        assert rep.mismatches == 0
        assert rep.inconclusive == 0


def test_criterion_09_arc_faces():
    with criterion(9, "in-arc subsets on grids are faces", 300) as out:
        for k, grid, arc in [(2, 100, 2 * math.pi / 3 - 0.05), (3, 120, math.pi / 2)]:
            rep = arc_face_property(k, grid, arc, k, trials=200, seed=0)
            out.append(f"k={k}: {rep.faces}/{rep.trials}, {rep.inconclusive} inconclusive")
            assert rep.failures == 0
            assert rep.inconclusive == rep.solver_failures == 0
            assert rep.faces == rep.trials


def test_criterion_10_recovery():
    with criterion(10, "P_1 code corrects k <= 2 errors; face condition implies recovery", 300) as out:
        p1 = instance(NeighborlySpec(1))
        code = build_code(p1)
        assert (code.length, code.kernel_dim) == (18, 8)
        for k in range(3):
            camp = run_campaign(code, CorruptionModel(k, seed=0), p1, trials=100)
            CAMPAIGNS.append(camp)
            assert camp.recovered == 100
        q24 = instance(Q24)
        CAMPAIGNS.append(run_campaign(build_code(q24), CorruptionModel(6, seed=0), q24, trials=100))
        trials = sum(c.trials - c.skipped for c in CAMPAIGNS)
        exceptions = sum(c.inconsistent for c in CAMPAIGNS)
        out.append(f"300/300 recovered; {trials} trials, {exceptions} implication exceptions")
        assert exceptions == 0
        assert all(c.face_unknown == 0 for c in CAMPAIGNS)


def test_criterion_11_edge_upper_bound():
    with criterion(11, "counted edges <= N^2/2 (1 - 2^-d)", 600) as out:
        counts = {
            "P_0": (instance(NeighborlySpec(0)), edge_report(NeighborlySpec(0)).edges),
            "P_1": (instance(NeighborlySpec(1)), neighborly_report(1).edges),
            "P_2": (instance(NeighborlySpec(2)), neighborly_report(2).edges),
            "cluster(0,2)": (instance(ClusterSpec(0, 2)), edge_report(ClusterSpec(0, 2)).edges),
            "cluster(1,3)": (instance(ClusterSpec(1, 3)), edge_report(ClusterSpec(1, 3)).edges),
            "P_{2,1,24}": (instance(Q24), q24_exhaustive().distinct_k_faces),
        }
        for name, (inst, edges) in counts.items():
            bound = edge_upper_bound(inst.num_vertices, inst.observed_dim)
            assert Fraction(edges) <= bound, name
        out.append(f"{len(counts)} instances")
