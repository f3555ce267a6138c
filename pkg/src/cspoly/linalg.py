"""SVD-based rank, kernel and independence checks with explicit tolerances."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .curve import Angle, eval_moment_curve

DEFAULT_REL_TOL = 1e-8


def _checked(M) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise ValueError("matrix is empty")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def _check_tol(rel_tol: float):
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")


def singular_values(M) -> np.ndarray:
    return np.linalg.svd(_checked(M), compute_uv=False)


def rank_with_tolerance(M, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Number of singular values above ``rel_tol`` times the largest one."""
    _check_tol(rel_tol)
    sv = singular_values(M)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > rel_tol * sv[0]))


def kernel_basis(M, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Orthonormal columns spanning the numerical null space of ``M``.

    Returns an array of shape ``(cols, cols - rank)``; it has zero columns when
    ``M`` has full column rank.
    """
    _check_tol(rel_tol)
    M = _checked(M)
    _, sv, vt = np.linalg.svd(M, full_matrices=True)
    rank = 0 if sv[0] == 0.0 else int(np.count_nonzero(sv > rel_tol * sv[0]))
    return vt[rank:].T.copy()


def row_space_basis(M, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Orthonormal columns spanning the row space of ``M`` (shape ``(cols, rank)``)."""
    _check_tol(rel_tol)
    M = _checked(M)
    _, sv, vt = np.linalg.svd(M, full_matrices=False)
    rank = 0 if sv[0] == 0.0 else int(np.count_nonzero(sv > rel_tol * sv[0]))
    return vt[:rank].T.copy()


def affine_rank(points, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Affine dimension of a point set (rows), via the rank of differences."""
    P = _checked(points)
    if P.shape[0] == 1:
        return 0
    diffs = P[1:] - P[0]
    if not np.any(diffs):
        return 0
    return rank_with_tolerance(diffs, rel_tol)


class IndependenceCheck(NamedTuple):
    independent: bool
    min_singular_value: float
    max_singular_value: float


def check_moment_independence(k: int, points: Sequence[Angle],
                              rel_tol: float = DEFAULT_REL_TOL) -> IndependenceCheck:
    """Are the moment-curve points ``U_k(t)`` for ``t in points`` linearly independent?

    Inputs must be distinct and pairwise non-antipodal, at most ``2k`` of them;
    this is checked exactly on the angles before anything is evaluated.
    """
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    if len(points) > 2 * k:
        raise ValueError(f"at most 2k = {2 * k} points allowed, got {len(points)}")
    if len(set(points)) != len(points):
        raise ValueError("points must be distinct")
    seen = set(points)
    for t in points:
        if t.antipode() in seen:
            raise ValueError(f"points {t} and {t.antipode()} are antipodal")
    M = np.array([eval_moment_curve(k, t) for t in points])
    sv = singular_values(M)
    rank = int(np.count_nonzero(sv > rel_tol * sv[0])) if sv[0] > 0 else 0
    return IndependenceCheck(rank == len(points), float(sv[-1]), float(sv[0]))
