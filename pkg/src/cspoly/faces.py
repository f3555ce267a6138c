"""Face oracle and the verification campaigns built on it.

``is_face(P, S)`` decides whether the vertex subset ``S`` is exactly the vertex
set of a proper face of ``P``: is there ``(c, gamma)`` with ``<c, v> = gamma``
on ``S`` and ``<c, v> < gamma`` on every other vertex?  The LP that is
actually solved is the Farkas alternative of that system,

    find  lam >= 0 (off S), nu (on S)  with
          sum lam_j v_j = sum nu_i v_i,  sum lam = 1,  sum nu = 1,

i.e. "does the convex hull of the other vertices meet the affine hull of S".
It has ``d + 2`` rows instead of one row per vertex. When it is infeasible the
phase-I multipliers are a separating functional; it is rescaled to slack 1 and
re-checked by direct substitution before a certificate is returned.

Campaign functions take a ``mapper`` (``map``-like callable) so the caller can
farm oracle calls out to a pool. Results are gathered in input order, so the
reports do not depend on the mapper.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial
from statistics import NormalDist
from typing import Callable, Iterable, Sequence

import numpy as np

from .linalg import affine_rank
from .lp import FEAS_TOL, LinearProgram, LpStatus, solve
from .polytopes import (ClusterSpec, DirectSumSpec, ManyFacesSpec, NeighborlySpec,
                        PolytopeInstance, block_instance, moment_curve_polytope)

CERT_TOL = 1e-7
WITNESS_TOL = 1e-10
TIGHT_FEAS_TOL = 1e-11
DEFAULT_PAIR_CAP = 200_000
CONFIDENCE = 0.99

FACE = "face"
NOT_FACE = "not-face"
FAILED = "failed"

Mapper = Callable[[Callable, Iterable], Iterable]


class OracleFailure(RuntimeError):
    """The LP solver could not decide a face query."""


@dataclass(frozen=True)
class FaceCertificate:
    """Supporting functional ``(functional, offset)`` in the instance's coordinates."""

    functional: np.ndarray
    offset: float
    min_slack_ratio: float
    max_equality_residual: float

    is_face = True


@dataclass(frozen=True)
class NotFace:
    reason: str
    witness_residual: float = 0.0

    is_face = False


def _subset_mask(inst: PolytopeInstance, subset: Iterable[int]) -> np.ndarray:
    idx = sorted(set(int(i) for i in subset))
    if not idx:
        raise ValueError("subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= inst.num_vertices:
        raise ValueError(f"subset {idx} out of range for {inst.num_vertices} vertices")
    mask = np.zeros(inst.num_vertices, dtype=bool)
    mask[idx] = True
    return mask


def has_antipodal_pair(inst: PolytopeInstance, subset: Iterable[int]) -> bool:
    s = set(int(i) for i in subset)
    return any(int(inst.antipodal[i]) in s for i in s)


def certify(inst: PolytopeInstance, subset: Iterable[int], functional, offset) -> FaceCertificate:
    """Measure how well ``(functional, offset)`` supports exactly ``subset``.

    Works on the raw vertex matrix only, independent of how the functional was
    found.
    """
    mask = _subset_mask(inst, subset)
    c = np.asarray(functional, dtype=float)
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        return FaceCertificate(c, float(offset), -math.inf, math.inf)
    vals = inst.vertices @ c
    resid = float(np.max(np.abs(vals[mask] - offset))) / norm
    slack = float(np.min(offset - vals[~mask], initial=math.inf)) / norm
    return FaceCertificate(c, float(offset), slack, resid)


def is_face(inst: PolytopeInstance, subset: Iterable[int],
            tol: float = CERT_TOL) -> FaceCertificate | NotFace:
    """Decide whether ``subset`` is the vertex set of a proper face of ``inst``.

    Either answer is re-checked by substitution: a certificate must separate,
    and a not-a-face witness must put a convex combination of the other
    vertices within ``WITNESS_TOL`` of the subset's affine hull. Answers that
    fail the check are re-solved at a tighter LP tolerance before giving up
    with :class:`OracleFailure`.
    """
    mask = _subset_mask(inst, subset)
    if has_antipodal_pair(inst, np.flatnonzero(mask)):
        return NotFace("antipodal pair")
    if mask.all():
        raise OracleFailure("subset covers every vertex")
    problems = []
    for feas_tol in (FEAS_TOL, TIGHT_FEAS_TOL):
        try:
            return _decide(inst, mask, tol, feas_tol)
        except OracleFailure as exc:
            problems.append(f"at feasibility tolerance {feas_tol:g}: {exc}")
    raise OracleFailure("; ".join(problems))


def _decide(inst: PolytopeInstance, mask: np.ndarray, tol: float,
            feas_tol: float) -> FaceCertificate | NotFace:
    W = inst.lp_coordinates
    d = W.shape[1]
    rest, sub = W[~mask].T, W[mask].T
    nr, ns = rest.shape[1], sub.shape[1]
    A = np.zeros((d + 2, nr + ns))
    A[:d, :nr] = rest
    A[:d, nr:] = -sub
    A[d, :nr] = 1.0
    A[d + 1, nr:] = 1.0
    b = np.zeros(d + 2)
    b[d:] = 1.0
    lb = np.concatenate([np.zeros(nr), np.full(ns, -np.inf)])
    out = solve(LinearProgram(np.zeros(nr + ns), A_eq=A, b_eq=b, lb=lb,
                              ub=np.full(nr + ns, np.inf)), feas_tol=feas_tol)
    if out.status is LpStatus.OPTIMAL:
        gap = hull_gap(inst.vertices[~mask], inst.vertices[mask], out.x[:nr])
        if gap > WITNESS_TOL:
            raise OracleFailure(f"not-a-face witness misses the affine hull by {gap:.3e}")
        return NotFace("hull of other vertices meets the affine span", gap)
    if out.status is not LpStatus.INFEASIBLE or out.farkas is None:
        raise OracleFailure(f"face LP ended with {out.status.value}: {out.message}")
    y = out.farkas
    w, alpha, beta = y[:d], y[d], y[d + 1]
    margin = alpha + beta
    if not margin > 0:
        raise OracleFailure("separating multipliers have no margin")
    # Back to raw coordinates: <c, v> = <w, v @ basis>.
    cert = certify(inst, np.flatnonzero(mask), inst.span_basis @ (w / margin), beta / margin)
    if not (cert.min_slack_ratio > 0 and cert.max_equality_residual <= tol):
        raise OracleFailure(
            f"certificate failed re-verification: slack ratio {cert.min_slack_ratio:.3e}, "
            f"equality residual {cert.max_equality_residual:.3e}")
    return cert


def hull_gap(others: np.ndarray, subset_points: np.ndarray, weights: np.ndarray) -> float:
    """Distance from a convex combination of ``others`` to the affine hull of ``subset_points``.

    ``weights`` are clipped at zero and renormalized, so only their pattern
    matters.
    """
    lam = np.maximum(np.asarray(weights, dtype=float), 0.0)
    total = lam.sum()
    if not total > 0:
        return math.inf
    point = (lam / total) @ others
    base = subset_points[0]
    diff = point - base
    if subset_points.shape[0] > 1:
        D = (subset_points[1:] - base).T
        coef, *_ = np.linalg.lstsq(D, diff, rcond=None)
        diff = diff - D @ coef
    return float(np.linalg.norm(diff))


def supporting_hyperplane_exists(inst: PolytopeInstance, subset: Iterable[int]) -> bool:
    """Is ``subset`` contained in some proper face (possibly with extra vertices)?

    Solves ``<c, v> = 1`` on the subset and ``<c, v> <= 1`` elsewhere; the
    origin is interior, so every proper supporting hyperplane can be scaled to
    offset 1.
    """
    mask = _subset_mask(inst, subset)
    W = inst.lp_coordinates
    d = W.shape[1]
    out = solve(LinearProgram(np.zeros(d), A_ub=W[~mask], b_ub=np.ones(int((~mask).sum())),
                              A_eq=W[mask], b_eq=np.ones(int(mask.sum())),
                              lb=np.full(d, -np.inf), ub=np.full(d, np.inf)))
    if out.status is LpStatus.NUMERICAL_FAILURE:
        raise OracleFailure(out.message)
    return out.status is LpStatus.OPTIMAL


def face_dimension(inst: PolytopeInstance, subset: Iterable[int]) -> int:
    """Affine dimension of the subset's points."""
    idx = sorted(set(int(i) for i in subset))
    return affine_rank(inst.vertices[idx])


def is_simplex(inst: PolytopeInstance, subset: Iterable[int]) -> bool:
    idx = set(int(i) for i in subset)
    return face_dimension(inst, idx) == len(idx) - 1


def classify(inst: PolytopeInstance, subset: Sequence[int]) -> str:
    """``FACE``, ``NOT_FACE`` or ``FAILED``; picklable worker for mappers."""
    try:
        return FACE if is_face(inst, subset).is_face else NOT_FACE
    except OracleFailure:
        return FAILED


def classify_many(inst: PolytopeInstance, subsets: Sequence[Sequence[int]],
                  mapper: Mapper = map) -> list[str]:
    """Classify subsets in order; antipodal subsets are settled without an LP."""
    out: list[str | None] = [None] * len(subsets)
    todo = []
    for i, s in enumerate(subsets):
        if has_antipodal_pair(inst, s):
            out[i] = NOT_FACE
        else:
            todo.append(i)
    for i, status in zip(todo, mapper(partial(classify, inst), [tuple(subsets[i]) for i in todo])):
        out[i] = status
    return out


# ---------------------------------------------------------------- statistics

def wilson_interval(successes: int, trials: int, level: float = CONFIDENCE) -> tuple[float, float]:
    if trials <= 0:
        return (0.0, 1.0)
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # Endpoints are exact at the extremes; the formula rounds them inward.
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return (lo, hi)


def edge_upper_bound(N: int, d: int) -> Fraction:
    """Upper bound ``N**2/2 * (1 - 2**-d)`` on the edges of a symmetric d-polytope."""
    return Fraction(N * N, 2) * (1 - Fraction(1, 2**d))


def face_upper_bound(N: int, d: int, k: int) -> Fraction:
    """Upper bound on (k-1)-faces of a symmetric d-polytope, valid for ``k <= d/2``."""
    return Fraction(N, N - 1) * (1 - Fraction(1, 2**d)) * math.comb(N, k)


def many_faces_failure_bound(k: int, m: int) -> float:
    """Probability bound ``(1 - 5**(1-k))**m`` for a random k-tuple not spanning a face."""
    return float((1 - Fraction(1, 5 ** (k - 1))) ** m)


def many_faces_count_bound(N: int, k: int, m: int) -> Fraction:
    """Lower bound ``C(N,k) - (1 - 5**(1-k))**m * N**k / k!`` on (k-1)-faces."""
    return math.comb(N, k) - (1 - Fraction(1, 5 ** (k - 1))) ** m * Fraction(N**k, math.factorial(k))


def direct_sum_success_bound(k: int, m: int, r: int) -> float | None:
    """Lower bound on the face probability of r random vertices of r copies; None if vacuous."""
    if k < 2:
        return None
    ratio = Fraction(5 ** (k - 1), 5 ** (k - 1) - 1)
    if not (r < math.factorial(k + 1) and r < ratio**m):
        return None
    bound = (1 - Fraction(r, math.factorial(k + 1))) * (1 - r * (1 - Fraction(1, 5 ** (k - 1))) ** m)
    return float(bound) if bound > 0 else None


# --------------------------------------------------------------- campaigns

def _pairs(inst: PolytopeInstance):
    return list(itertools.combinations(range(inst.num_vertices), 2))


@dataclass
class EdgeReport:
    num_vertices: int
    dim: int
    edges: int
    non_edges: int
    inconclusive: int
    oracle_calls: int
    upper_bound: float
    bound_holds: bool
    outcomes: dict = field(repr=False, default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("outcomes")
        return d


def enumerate_edges(inst: PolytopeInstance, cap: int = DEFAULT_PAIR_CAP,
                    mapper: Mapper = map) -> EdgeReport:
    """Run the oracle on every vertex pair and count edges."""
    pairs = _pairs(inst)
    calls = sum(1 for i, j in pairs if inst.antipodal[i] != j)
    if calls > cap:
        raise ValueError(f"{calls} oracle calls exceed the cap of {cap}; "
                         "use the sampling estimate instead")
    status = classify_many(inst, pairs, mapper)
    outcomes = dict(zip(pairs, status))
    edges = status.count(FACE)
    bound = edge_upper_bound(inst.num_vertices, inst.observed_dim)
    return EdgeReport(inst.num_vertices, inst.observed_dim, edges, status.count(NOT_FACE),
                      status.count(FAILED), calls, float(bound), edges <= bound, outcomes)


def edge_lower_bound(inst: PolytopeInstance) -> Fraction | None:
    """Lower bound on the edge count claimed for the instance's family, if any."""
    spec = inst.spec
    N = inst.num_vertices
    if isinstance(spec, NeighborlySpec):
        return Fraction(N * (N - 2), 2)
    if isinstance(spec, ClusterSpec):
        return Fraction(N * (N - spec.s - 1), 2)
    if isinstance(spec, ManyFacesSpec) and spec.k >= 2:
        return many_faces_count_bound(N, 2, spec.m)
    return None


def edge_report_status(inst: PolytopeInstance, report: EdgeReport) -> tuple[str, dict]:
    """Check counted edges against the upper bound and the family's lower bound.

    Undecided pairs could go either way, so a bound only fails when it fails
    for every resolution of them.
    """
    lo_count, hi_count = report.edges, report.edges + report.inconclusive
    upper = edge_upper_bound(inst.num_vertices, inst.observed_dim)
    lower = edge_lower_bound(inst)
    checks = {"upper_bound": float(upper), "upper_bound_holds": lo_count <= upper,
              "lower_bound": None if lower is None else float(lower),
              "lower_bound_holds": None if lower is None else hi_count >= lower}
    if lo_count > upper or (lower is not None and hi_count < lower):
        return "FAIL", checks
    if hi_count > upper or (lower is not None and lo_count < lower):
        return "INCONCLUSIVE", checks
    return "PASS", checks


def exempt_pair(inst: PolytopeInstance, i: int, j: int) -> bool:
    """Pairs not required to be edges: antipodal, or from antipodal clusters."""
    if inst.antipodal[i] == j:
        return True
    ci, cj = inst.labels[i].cluster, inst.labels[j].cluster
    if ci is None or cj is None:
        return False
    return inst.labels[int(inst.antipodal[i])].cluster == cj


@dataclass
class NeighborlyReport:
    status: str
    required: int
    passed: int
    failed: int
    inconclusive: int
    exempt: int
    exempt_edges: int
    edges: int
    witnesses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def verify_two_neighborly(inst: PolytopeInstance, cap: int = DEFAULT_PAIR_CAP,
                          mapper: Mapper = map, edges: EdgeReport | None = None) -> NeighborlyReport:
    """Check that every required vertex pair spans an edge."""
    edges = edges or enumerate_edges(inst, cap, mapper)
    required = passed = failed = inconc = exempt = exempt_edges = 0
    witnesses = []
    for (i, j), st in edges.outcomes.items():
        if exempt_pair(inst, i, j):
            exempt += 1
            exempt_edges += st == FACE
            continue
        required += 1
        if st == FACE:
            passed += 1
        elif st == NOT_FACE:
            failed += 1
            if len(witnesses) < 20:
                witnesses.append([i, j])
        else:
            inconc += 1
    status = "FAIL" if failed else ("INCONCLUSIVE" if inconc else "PASS")
    return NeighborlyReport(status, required, passed, failed, inconc, exempt, exempt_edges,
                            edges.edges, witnesses)


MODES = ("with-replacement", "without-replacement", "exhaustive")


@dataclass
class FaceReport:
    """Monte Carlo (or exhaustive) not-a-face fraction for k-tuples of vertices."""

    k: int
    mode: str
    seed: int
    trials: int
    faces: int
    failures: int
    inconclusive: int
    failure_fraction: float
    confidence_level: float
    ci_low: float
    ci_high: float
    failure_bound: float | None
    bound_holds: bool | None
    distinct_k_faces: int | None = None
    face_count_lower_bound: float | None = None
    face_count_upper_bound: float | None = None
    face_count_bounds_hold: bool | None = None

    @property
    def status(self) -> str:
        """FAIL only when a bound is refuted: exactly, or at the confidence level."""
        exact = self.mode == "exhaustive"
        refuted = False
        if self.bound_holds is False:
            # A zero bound is refuted by any single failure.
            refuted = exact or self.failure_bound == 0 or self.ci_low > self.failure_bound
        if self.face_count_bounds_hold is False and exact:
            refuted = True
        if refuted:
            return "FAIL"
        undecided = self.bound_holds is False or self.face_count_bounds_hold is False
        return "INCONCLUSIVE" if undecided or self.inconclusive else "PASS"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        return d


def _failure_bound(inst: PolytopeInstance, k: int) -> float | None:
    spec = inst.spec
    if isinstance(spec, ManyFacesSpec) and 1 <= k <= spec.k:
        return many_faces_failure_bound(k, spec.m)
    return None


def _sample_tuples(rng: np.random.Generator, N: int, k: int, trials: int, mode: str):
    if mode == "with-replacement":
        return [tuple(int(x) for x in rng.integers(0, N, size=k)) for _ in range(trials)]
    return [tuple(int(x) for x in rng.choice(N, size=k, replace=False)) for _ in range(trials)]


def estimate_face_fraction(inst: PolytopeInstance, k: int, trials: int = 1000, seed: int = 0,
                           mode: str = "with-replacement", mapper: Mapper = map,
                           cap: int = DEFAULT_PAIR_CAP) -> FaceReport:
    """Fraction of random k-tuples whose convex hull is not a face.

    Tuples drawn with replacement are collapsed to their support set first.
    ``mode="exhaustive"`` runs over all ``N**k`` ordered tuples instead of
    sampling (``trials`` and ``seed`` are then ignored).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    N = inst.num_vertices
    if mode == "exhaustive":
        supports = list(itertools.combinations_with_replacement(range(N), k))
        if len(supports) > cap:
            raise ValueError(f"{len(supports)} supports exceed the cap of {cap}")
        unique = sorted({tuple(sorted(set(t))) for t in supports})
        status = dict(zip(unique, classify_many(inst, unique, mapper)))
        # Weight each multiset by its number of orderings.
        faces = fails = inconc = 0
        for t in supports:
            w = _orderings(t)
            st = status[tuple(sorted(set(t)))]
            faces += w * (st == FACE)
            fails += w * (st == NOT_FACE)
            inconc += w * (st == FAILED)
        trials_eff = N**k
        distinct = sum(1 for t, st in status.items() if len(t) == k and st == FACE)
    else:
        if trials <= 0:
            raise ValueError("trials must be positive")
        if mode == "without-replacement" and k > N:
            raise ValueError("k exceeds the number of vertices")
        rng = np.random.default_rng(seed)
        tuples = _sample_tuples(rng, N, k, trials, mode)
        supports = [tuple(sorted(set(t))) for t in tuples]
        unique = sorted(set(supports))
        status = dict(zip(unique, classify_many(inst, unique, mapper)))
        seq = [status[s] for s in supports]
        faces, fails, inconc = seq.count(FACE), seq.count(NOT_FACE), seq.count(FAILED)
        trials_eff = trials
        distinct = None

    decided = faces + fails
    frac = fails / decided if decided else 0.0
    lo, hi = wilson_interval(fails, decided)
    bound = _failure_bound(inst, k)
    if bound is None:
        holds = None
    elif mode == "exhaustive" or bound == 0:
        holds = frac <= bound
    else:
        holds = hi <= bound
    report = FaceReport(k, mode, seed, trials_eff, faces, fails, inconc, frac, CONFIDENCE, lo, hi,
                        bound, holds, distinct)

    # Face-count bounds: exact in exhaustive mode, CI-based when sampling k-subsets.
    d = inst.observed_dim
    if mode == "exhaustive":
        count_lo = count_hi = distinct
    elif mode == "without-replacement":
        total = math.comb(N, k)
        count_lo, count_hi = (1 - hi) * total, (1 - lo) * total
    else:
        count_lo = count_hi = None
    if count_lo is not None:
        holds = True
        if bound is not None:
            lower = many_faces_count_bound(N, k, inst.spec.m)
            report.face_count_lower_bound = float(lower)
            holds &= count_hi >= lower
        if 2 * k <= d and N > 1:
            upper = face_upper_bound(N, d, k)
            report.face_count_upper_bound = float(upper)
            holds &= count_lo <= upper
        report.face_count_bounds_hold = bool(holds)
    return report


def _orderings(t: tuple) -> int:
    counts = {}
    for x in t:
        counts[x] = counts.get(x, 0) + 1
    out = math.factorial(len(t))
    for c in counts.values():
        out //= math.factorial(c)
    return out


@dataclass
class SumLawReport:
    trials: int
    seed: int
    mismatches: int
    inconclusive: int
    agree_face: int
    agree_not_face: int
    mismatch_witnesses: list = field(default_factory=list)
    rtuple_trials: int = 0
    rtuple_faces: int = 0
    rtuple_face_fraction: float | None = None
    rtuple_ci_low: float | None = None
    rtuple_ci_high: float | None = None
    rtuple_bound: float | None = None
    rtuple_bound_holds: bool | None = None

    @property
    def status(self) -> str:
        if self.mismatches:
            return "FAIL"
        return "INCONCLUSIVE" if self.inconclusive else "PASS"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        return d


def verify_direct_sum_law(Q: PolytopeInstance, trials: int = 500, seed: int = 0,
                          sizes: Sequence[int] = (2, 3), mapper: Mapper = map) -> SumLawReport:
    """Compare the oracle on Q against the blockwise AND of per-copy oracles.

    A vertex subset of a direct sum spans a face exactly when, in every block
    it touches, its vertices span a face of that copy.
    """
    if Q.num_blocks < 1:
        raise ValueError("Q needs block structure")
    if trials <= 0:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    N = Q.num_vertices
    blocks = [block_instance(Q, b) for b in range(Q.num_blocks)]
    local = {}
    for b in range(Q.num_blocks):
        for li, g in enumerate(Q.block_indices(b)):
            local[int(g)] = (b, li)

    subsets = []
    for _ in range(trials):
        size = int(rng.choice(list(sizes)))
        subsets.append(tuple(sorted({int(x) for x in rng.integers(0, N, size=size)})))
    q_status = classify_many(Q, subsets, mapper)

    # Block queries, deduplicated and issued in a fixed order.
    block_queries = {}
    for s in subsets:
        parts = {}
        for g in s:
            b, li = local[g]
            parts.setdefault(b, []).append(li)
        block_queries[s] = tuple((b, tuple(sorted(v))) for b, v in sorted(parts.items()))
    per_block = sorted({bq for qs in block_queries.values() for bq in qs})
    bq_status = {}
    for b in range(Q.num_blocks):
        mine = [sub for bb, sub in per_block if bb == b]
        for sub, st in zip(mine, classify_many(blocks[b], mine, mapper)):
            bq_status[(b, sub)] = st

    report = SumLawReport(trials, seed, 0, 0, 0, 0)
    for s, qs in zip(subsets, q_status):
        parts = [bq_status[bq] for bq in block_queries[s]]
        if qs == FAILED or FAILED in parts:
            report.inconclusive += 1
            continue
        expected = FACE if all(p == FACE for p in parts) else NOT_FACE
        if expected != qs:
            report.mismatches += 1
            if len(report.mismatch_witnesses) < 20:
                report.mismatch_witnesses.append(list(s))
        elif qs == FACE:
            report.agree_face += 1
        else:
            report.agree_not_face += 1

    spec = Q.spec
    if isinstance(spec, DirectSumSpec):
        r = spec.r
        tuples = [tuple(sorted({int(x) for x in rng.integers(0, N, size=r)})) for _ in range(trials)]
        unique = sorted(set(tuples))
        st = dict(zip(unique, classify_many(Q, unique, mapper)))
        seq = [st[t] for t in tuples]
        faces, fails = seq.count(FACE), seq.count(NOT_FACE)
        decided = faces + fails
        lo, hi = wilson_interval(faces, decided)
        report.rtuple_trials = trials
        report.rtuple_faces = faces
        report.rtuple_face_fraction = faces / decided if decided else None
        report.rtuple_ci_low, report.rtuple_ci_high = lo, hi
        report.rtuple_bound = direct_sum_success_bound(spec.k, spec.m, r)
        if report.rtuple_bound is not None:
            report.rtuple_bound_holds = hi >= report.rtuple_bound
    return report


@dataclass
class ArcReport:
    k: int
    grid_size: int
    arc_length: float
    subset_size: int
    trials: int
    seed: int
    faces: int
    failures: int
    inconclusive: int
    solver_failures: int
    failure_witnesses: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.failures:
            return "FAIL"
        return "INCONCLUSIVE" if self.inconclusive or self.solver_failures else "PASS"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        return d


def arc_length_limit(k: int) -> float:
    """Largest arc length accepted for subsets on the k-th moment curve."""
    if k == 1:
        return 2 * math.pi
    if k == 2:
        return 2 * math.pi / 3
    return math.pi / 2


def _arc_worker(inst: PolytopeInstance, subset: tuple) -> str:
    st = classify(inst, subset)
    if st != NOT_FACE:
        return st
    try:
        return "inconclusive" if supporting_hyperplane_exists(inst, subset) else NOT_FACE
    except OracleFailure:
        return FAILED


def arc_face_property(k: int, grid_size: int, arc_length: float, subset_size: int,
                      trials: int = 200, seed: int = 0, mapper: Mapper = map) -> ArcReport:
    """Sample subsets of grid points inside random open arcs; check they span faces.

    Works on the convex hull of ``U_k`` over a ``grid_size``-point grid. A
    subset that fails the strict oracle but lies on a supporting hyperplane
    together with other grid points is counted as inconclusive.
    """
    if grid_size % 2:
        raise ValueError("grid size must be even")
    if not 1 <= subset_size <= k:
        raise ValueError("subset size must lie in [1, k]")
    if not 0 < arc_length <= arc_length_limit(k) + 1e-15:
        raise ValueError(f"arc length {arc_length} exceeds the tested limit {arc_length_limit(k)}")
    inst = moment_curve_polytope(k, grid_size)
    rng = np.random.default_rng(seed)
    span = arc_length / (2 * math.pi)
    grid = np.arange(grid_size) / grid_size
    subsets = []
    while len(subsets) < trials:
        start = rng.random()
        offs = (grid - start) % 1.0
        inside = np.flatnonzero((offs > 0) & (offs < span))
        if inside.size < subset_size:
            continue
        subsets.append(tuple(sorted(int(i) for i in rng.choice(inside, subset_size, replace=False))))
    status = list(mapper(partial(_arc_worker, inst), subsets))
    rep = ArcReport(k, grid_size, arc_length, subset_size, trials, seed,
                    status.count(FACE), status.count(NOT_FACE), status.count("inconclusive"),
                    status.count(FAILED))
    rep.failure_witnesses = [list(s) for s, st in zip(subsets, status) if st == NOT_FACE][:20]
    return rep


def angle_strings(inst: PolytopeInstance, subset: Iterable[int]) -> list[str]:
    return [str(inst.labels[i].angle) for i in subset]
