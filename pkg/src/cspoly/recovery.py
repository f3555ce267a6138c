"""Error correction by l1 decoding over codes built from centrally symmetric polytopes.

A polytope with antipodal vertex pairs ``+-v_1, ..., +-v_M`` defines the
linear map ``e_i -> v_i``; its kernel is the code. A codeword ``c`` corrupted
to ``a = c + e`` is decoded by minimizing ``||x - a||_1`` over the code. The
decoder is guaranteed to return ``c`` whenever the vertices ``+v_i`` for
``c_i > a_i`` and ``-v_i`` for ``c_i < a_i`` span a face of the polytope.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable

import numpy as np

from .faces import FACE, FAILED, NOT_FACE, classify
from .linalg import DEFAULT_REL_TOL, kernel_basis, rank_with_tolerance
from .lp import LinearProgram, LpStatus, solve
from .polytopes import PolytopeInstance

RECOVERY_TOL = 1e-6
OBJECTIVE_TOL = 1e-7

Mapper = Callable[[Callable, Iterable], Iterable]


class DecodeFailure(RuntimeError):
    """The decoding LP did not reach a verified optimum."""


@dataclass(frozen=True)
class CodeInstance:
    """Code given by the kernel of ``e_i -> generator[:, i]``.

    ``representatives[i]`` is the vertex index behind coordinate ``i``; its
    antipode stands for ``-generator[:, i]``.
    """

    generator: np.ndarray
    kernel: np.ndarray
    representatives: tuple[int, ...]
    redundancy: int

    @property
    def length(self) -> int:
        return self.generator.shape[1]

    @property
    def kernel_dim(self) -> int:
        return self.kernel.shape[1]

    @property
    def degenerate(self) -> bool:
        return self.kernel_dim == 0

    def summary(self) -> dict:
        return {"length": self.length, "redundancy": self.redundancy,
                "kernel_dim": self.kernel_dim, "degenerate": self.degenerate}


def representatives(instance: PolytopeInstance) -> list[int]:
    """One vertex per antipodal pair: the one whose angle lies in [0, pi)."""
    half = Fraction(1, 2)
    reps = [i for i, lab in enumerate(instance.labels) if lab.angle.turn < half]
    if 2 * len(reps) != instance.num_vertices:
        raise ValueError("vertex labels do not split into antipodal halves")
    return reps


def code_from_generator(generator, reps: Iterable[int] | None = None,
                        rel_tol: float = DEFAULT_REL_TOL) -> CodeInstance:
    G = np.array(generator, dtype=float)
    M = G.shape[1]
    reps = tuple(range(M)) if reps is None else tuple(int(r) for r in reps)
    rank = rank_with_tolerance(G, rel_tol)
    K = kernel_basis(G, rel_tol)
    G.setflags(write=False)
    K.setflags(write=False)
    return CodeInstance(G, K, reps, rank)


def build_code(instance: PolytopeInstance, rel_tol: float = DEFAULT_REL_TOL) -> CodeInstance:
    """Code whose columns are the representative vertices of ``instance``."""
    reps = representatives(instance)
    return code_from_generator(instance.vertices[reps].T, reps, rel_tol)


def random_gaussian_code(length: int, redundancy: int, seed: int = 0) -> CodeInstance:
    """Baseline code from a Gaussian ``redundancy x length`` generator."""
    if not 0 < redundancy <= length:
        raise ValueError("need 0 < redundancy <= length")
    rng = np.random.default_rng(seed)
    return code_from_generator(rng.standard_normal((redundancy, length)))


@dataclass(frozen=True)
class Decoded:
    x: np.ndarray
    objective: float
    pivots: int


def l1_decode(code: CodeInstance, a) -> Decoded:
    """Nearest codeword to ``a`` in the l1 norm.

    Solves ``min sum(p + q)`` subject to ``K z + p - q = a``, ``p, q >= 0``,
    which has the same optimum as the absolute-value form and starts from a
    feasible basis.
    """
    a = np.asarray(a, dtype=float).ravel()
    M = code.length
    if a.size != M:
        raise ValueError(f"received word has length {a.size}, expected {M}")
    if code.degenerate:
        return Decoded(np.zeros(M), float(np.abs(a).sum()), 0)
    K = code.kernel
    r = K.shape[1]
    I = np.eye(M)
    A = np.hstack([K, I, -I])
    cost = np.concatenate([np.zeros(r), np.ones(2 * M)])
    lb = np.concatenate([np.full(r, -np.inf), np.zeros(2 * M)])
    out = solve(LinearProgram(cost, A_eq=A, b_eq=a, lb=lb, ub=np.full(r + 2 * M, np.inf)))
    if out.status is not LpStatus.OPTIMAL:
        raise DecodeFailure(f"decoding LP ended with {out.status.value}: {out.message}")
    x = K @ out.x[:r]
    objective = float(np.abs(x - a).sum())
    if abs(objective - out.objective) > OBJECTIVE_TOL * (1 + objective):
        raise DecodeFailure(f"LP objective {out.objective} disagrees with ||x - a||_1 = {objective}")
    return Decoded(x, objective, out.pivots)


@dataclass(frozen=True)
class CorruptionModel:
    """``k`` corrupted coordinates with random or all-positive signs.

    Magnitudes are ``magnitude`` exactly, or uniform on ``magnitude_range``
    when that is given.
    """

    k: int
    signs: str = "random"
    magnitude: float = 1.0
    magnitude_range: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.signs not in ("random", "fixed"):
            raise ValueError("signs must be 'random' or 'fixed'")
        if self.magnitude_range is not None:
            lo, hi = self.magnitude_range
            if not 0 < lo <= hi:
                raise ValueError("magnitude range must satisfy 0 < lo <= hi")
        elif not self.magnitude > 0:
            raise ValueError("magnitude must be positive")


@dataclass
class RecoveryTrialResult:
    trial: int
    status: str
    support: list = field(default_factory=list)
    signs: list = field(default_factory=list)
    recovered: bool | None = None
    face_condition: bool | None = None
    consistent: bool = True
    error_inf: float | None = None
    decoded_l1: float | None = None
    codeword_l1: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def face_condition_subset(code: CodeInstance, instance: PolytopeInstance,
                          codeword: np.ndarray, received: np.ndarray) -> list[int]:
    """Vertex indices of ``+v_i`` (``c_i > a_i``) and ``-v_i`` (``c_i < a_i``)."""
    out = []
    for i, rep in enumerate(code.representatives):
        if codeword[i] > received[i]:
            out.append(rep)
        elif codeword[i] < received[i]:
            out.append(int(instance.antipodal[rep]))
    return sorted(out)


def recovery_trial(code: CodeInstance, model: CorruptionModel,
                   instance: PolytopeInstance | None, trial: int) -> RecoveryTrialResult:
    """One seeded corruption and decode; RNG is derived from ``(model.seed, trial)``.

    With ``instance=None`` the face condition is not evaluated.
    """
    if code.degenerate:
        return RecoveryTrialResult(trial, "skipped-degenerate")
    M = code.length
    if model.k > M:
        raise ValueError(f"cannot corrupt {model.k} of {M} coordinates")
    rng = np.random.default_rng([model.seed, trial])
    g = rng.standard_normal(code.kernel_dim)
    c = code.kernel @ (g / np.linalg.norm(g))
    support = np.sort(rng.choice(M, size=model.k, replace=False))
    if model.signs == "random":
        signs = rng.choice([-1.0, 1.0], size=model.k)
    else:
        signs = np.ones(model.k)
    if model.magnitude_range is not None:
        mags = rng.uniform(*model.magnitude_range, size=model.k)
    else:
        mags = np.full(model.k, model.magnitude)
    a = c.copy()
    a[support] += signs * mags

    face = None
    status = "ok"
    if instance is not None:
        subset = face_condition_subset(code, instance, c, a)
        if not subset:
            face = True
        else:
            verdict = classify(instance, subset)
            face = None if verdict == FAILED else verdict == FACE
            if verdict == FAILED:
                status = "oracle-failed"
    decoded = l1_decode(code, a)
    err = float(np.max(np.abs(decoded.x - c), initial=0.0))
    recovered = err <= RECOVERY_TOL
    return RecoveryTrialResult(
        trial, status, [int(i) for i in support], [int(s) for s in signs], recovered, face,
        not (face is True and not recovered), err, decoded.objective, float(np.abs(c - a).sum()))


@dataclass
class RecoveryCampaign:
    code: dict
    model: dict
    trials: int
    skipped: int
    recovered: int
    face_true: int
    face_false: int
    face_unknown: int
    inconsistent: int
    recovered_without_face: int
    results: list = field(repr=False, default_factory=list)

    @property
    def status(self) -> str:
        if self.inconsistent:
            return "FAIL"
        return "DEGENERATE" if self.skipped == self.trials and self.trials else "PASS"

    def to_dict(self, with_trials: bool = False) -> dict:
        d = asdict(self)
        d["status"] = self.status
        if with_trials:
            d["results"] = [r.to_dict() for r in self.results]
        else:
            d.pop("results")
        return d


def run_campaign(code: CodeInstance, model: CorruptionModel, instance: PolytopeInstance | None,
                 trials: int, mapper: Mapper = map) -> RecoveryCampaign:
    """Run ``trials`` seeded recovery trials; results are kept in trial order."""
    if trials < 0:
        raise ValueError("trials must be non-negative")
    results = list(mapper(partial(recovery_trial, code, model, instance), range(trials)))
    done = [r for r in results if r.status != "skipped-degenerate"]
    return RecoveryCampaign(
        code=code.summary(),
        model=asdict(model),
        trials=trials,
        skipped=trials - len(done),
        recovered=sum(bool(r.recovered) for r in done),
        face_true=sum(r.face_condition is True for r in done),
        face_false=sum(r.face_condition is False for r in done),
        face_unknown=sum(r.face_condition is None for r in done),
        inconsistent=sum(not r.consistent for r in done),
        recovered_without_face=sum(bool(r.recovered) and r.face_condition is False for r in done),
        results=results,
    )
