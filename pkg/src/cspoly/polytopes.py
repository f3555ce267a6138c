"""Explicit vertex sets of the centrally symmetric curve polytopes.

Four families are built here, all as labeled V-representations:

* ``NeighborlySpec(m)``: the curve with frequencies ``3**j * {1, 3, 5}``
  (j <= m) sampled at ``4 * 3**(m+1)`` equally spaced angles.
* ``ClusterSpec(m, s, spread)``: the same curve sampled at ``4 * 3**m``
  clusters of ``s`` nearby angles.
* ``ManyFacesSpec(k, m, n)``: frequencies ``5**j * {1, 3, ..., 6k-1}``
  sampled at ``n * 5**m`` equally spaced angles.
* ``DirectSumSpec(k, m, n, r)``: ``r`` copies of the previous polytope placed
  in complementary coordinate blocks.

Coordinates are deduplicated: one (cos, sin) pair per distinct frequency.
:func:`expand_redundant` rebuilds the stacked, repeated-coordinate embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .curve import (Angle, FrequencySet, antipodal_indices, build_angle_grid, build_cluster_grid,
                    curve_points, default_cluster_spread, frequency_count_closed_form,
                    frequency_set)
from .linalg import DEFAULT_REL_TOL, rank_with_tolerance, row_space_basis

NEIGHBORLY_BASE = FrequencySet((1, 3, 5))


@dataclass(frozen=True)
class NeighborlySpec:
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be non-negative")


@dataclass(frozen=True)
class ClusterSpec:
    m: int
    s: int
    spread: Fraction = field(default_factory=default_cluster_spread)

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.s < 1:
            raise ValueError("cluster size s must be at least 1")
        object.__setattr__(self, "spread", Fraction(self.spread))


@dataclass(frozen=True)
class ManyFacesSpec:
    k: int
    m: int
    n: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.n < 2 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n}")


@dataclass(frozen=True)
class DirectSumSpec:
    k: int
    m: int
    n: int
    r: int

    def __post_init__(self):
        ManyFacesSpec(self.k, self.m, self.n)
        if self.r < 1:
            raise ValueError(f"number of copies r must be at least 1, got {self.r}")

    @property
    def block(self) -> ManyFacesSpec:
        return ManyFacesSpec(self.k, self.m, self.n)


ConstructionSpec = Union[NeighborlySpec, ClusterSpec, ManyFacesSpec, DirectSumSpec]


@dataclass(frozen=True)
class VertexLabel:
    block: int
    angle: Angle
    cluster: int | None = None


@dataclass(eq=False)
class PolytopeInstance:
    """A centrally symmetric polytope given by its labeled vertices.

    ``vertices`` is read-only; rows are vertices. ``block_columns[b]`` is the
    column range of block ``b`` and ``frequency_sets[b]`` its frequencies, so
    column ``block_columns[b][0] + 2*i`` is ``cos(f_i t)``.
    """

    vertices: np.ndarray
    labels: tuple[VertexLabel, ...]
    antipodal: np.ndarray
    frequency_sets: tuple[FrequencySet, ...]
    block_columns: tuple[tuple[int, int], ...]
    predicted_dim: int
    observed_dim: int
    spec: ConstructionSpec | None = None
    redundant_dim: int | None = None
    name: str = ""

    def __post_init__(self):
        self.vertices = np.array(self.vertices, dtype=float)
        self.vertices.setflags(write=False)
        self.antipodal = np.asarray(self.antipodal, dtype=int)
        self.antipodal.setflags(write=False)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def num_blocks(self) -> int:
        return len(self.block_columns)

    def block_of(self, i: int) -> int:
        return self.labels[i].block

    def block_indices(self, block: int) -> np.ndarray:
        return np.array([i for i, lab in enumerate(self.labels) if lab.block == block], dtype=int)

    @cached_property
    def span_basis(self) -> np.ndarray:
        """Orthonormal columns spanning the linear span of the vertices."""
        return row_space_basis(self.vertices)

    @cached_property
    def lp_coordinates(self) -> np.ndarray:
        """Vertices expressed in :attr:`span_basis`.

        The span is the affine hull here because the vertex set is centrally
        symmetric, so this is a full-dimensional model of the same polytope.
        """
        return self.vertices @ self.span_basis

    def check_invariants(self, tol: float = 1e-12) -> None:
        """Raise ``AssertionError`` if any structural invariant fails."""
        n = self.num_vertices
        a = self.antipodal
        assert a.shape == (n,), "antipodal map has the wrong length"
        assert np.all(a[a] == np.arange(n)), "antipodal map is not an involution"
        assert np.all(a != np.arange(n)), "antipodal map has a fixed point"
        assert np.max(np.abs(self.vertices[a] + self.vertices), initial=0.0) <= tol, \
            "antipodal vertices are not negatives of each other"
        assert len(self.labels) == n
        assert min_pairwise_distance(self.vertices) > 1e-9, "duplicate vertices"

    def summary(self) -> dict:
        return {
            "name": self.name,
            "num_vertices": self.num_vertices,
            "ambient_dim": self.ambient_dim,
            "redundant_dim": self.redundant_dim,
            "predicted_dim": self.predicted_dim,
            "observed_dim": self.observed_dim,
            "expected_num_vertices": expected_vertex_count(self.spec) if self.spec else None,
            "vertex_count_ok": (expected_vertex_count(self.spec) == self.num_vertices
                                if self.spec else None),
            "blocks": self.num_blocks,
            "frequency_sets": [list(F) for F in self.frequency_sets],
        }


def min_pairwise_distance(V: np.ndarray) -> float:
    V = np.asarray(V, dtype=float)
    if V.shape[0] < 2:
        return float("inf")
    sq = np.sum(V * V, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * V @ V.T
    np.fill_diagonal(d2, np.inf)
    return float(np.sqrt(max(d2.min(), 0.0)))


def spec_frequencies(spec: ConstructionSpec) -> FrequencySet:
    if isinstance(spec, (NeighborlySpec, ClusterSpec)):
        return frequency_set(NEIGHBORLY_BASE, 3, spec.m)
    if isinstance(spec, ManyFacesSpec):
        return frequency_set(FrequencySet.odd_up_to(6 * spec.k - 1), 5, spec.m)
    if isinstance(spec, DirectSumSpec):
        return spec_frequencies(spec.block)
    raise TypeError(f"unknown spec {spec!r}")


def expected_vertex_count(spec: ConstructionSpec) -> int:
    if isinstance(spec, NeighborlySpec):
        return 4 * 3 ** (spec.m + 1)
    if isinstance(spec, ClusterSpec):
        return 4 * spec.s * 3**spec.m
    if isinstance(spec, ManyFacesSpec):
        return spec.n * 5**spec.m
    if isinstance(spec, DirectSumSpec):
        return spec.r * spec.n * 5**spec.m
    raise TypeError(f"unknown spec {spec!r}")


def predicted_dimension(spec: ConstructionSpec) -> int:
    """Closed-form intrinsic dimension for each family."""
    if isinstance(spec, (NeighborlySpec, ClusterSpec)):
        return 4 * spec.m + 6
    if isinstance(spec, ManyFacesSpec):
        return 2 * frequency_count_closed_form(spec.k, spec.m)
    if isinstance(spec, DirectSumSpec):
        return spec.r * predicted_dimension(spec.block)
    raise TypeError(f"unknown spec {spec!r}")


def dimension_is_exact(spec: ConstructionSpec) -> bool:
    """Whether :func:`predicted_dimension` is attained; otherwise it is an upper bound.

    A cluster grid with ``s <= 2`` has too few antipodal pairs per level to
    span every frequency.
    """
    if isinstance(spec, NeighborlySpec):
        return True
    if isinstance(spec, ClusterSpec):
        return spec.s >= 3
    if isinstance(spec, ManyFacesSpec):
        return spec.n > 2 * (6 * spec.k - 1)
    if isinstance(spec, DirectSumSpec):
        return dimension_is_exact(spec.block)
    raise TypeError(f"unknown spec {spec!r}")


def redundant_dimension(spec: ConstructionSpec) -> int:
    """Dimension of the stacked embedding (repeated coordinates kept)."""
    if isinstance(spec, (NeighborlySpec, ClusterSpec)):
        return 6 * (spec.m + 1)
    if isinstance(spec, ManyFacesSpec):
        return 6 * spec.k * (spec.m + 1)
    if isinstance(spec, DirectSumSpec):
        return spec.r * redundant_dimension(spec.block)
    raise TypeError(f"unknown spec {spec!r}")


def spec_name(spec: ConstructionSpec) -> str:
    if isinstance(spec, NeighborlySpec):
        return f"neighborly(m={spec.m})"
    if isinstance(spec, ClusterSpec):
        return f"cluster(m={spec.m},s={spec.s},spread={spec.spread})"
    if isinstance(spec, ManyFacesSpec):
        return f"many-faces(k={spec.k},m={spec.m},n={spec.n})"
    if isinstance(spec, DirectSumSpec):
        return f"direct-sum(k={spec.k},m={spec.m},n={spec.n},r={spec.r})"
    raise TypeError(f"unknown spec {spec!r}")


def spec_angles(spec: ConstructionSpec) -> list[Angle]:
    if isinstance(spec, NeighborlySpec):
        return build_angle_grid(4 * 3 ** (spec.m + 1))
    if isinstance(spec, ClusterSpec):
        return build_cluster_grid(spec.m, spec.s, spec.spread)
    if isinstance(spec, ManyFacesSpec):
        return build_angle_grid(spec.n * 5**spec.m)
    raise TypeError(f"no single angle set for {spec!r}")


def curve_polytope(freqs: FrequencySet, angles: Sequence[Angle], *, predicted_dim: int | None = None,
                   clusters: Sequence[int] | None = None, spec=None, redundant_dim=None,
                   name: str = "", rel_tol: float = DEFAULT_REL_TOL) -> PolytopeInstance:
    """conv of the curve points for ``angles`` (must be antipode-closed)."""
    angles = list(angles)
    V = curve_points(freqs, angles)
    labels = tuple(VertexLabel(0, a, None if clusters is None else int(clusters[i]))
                   for i, a in enumerate(angles))
    observed = rank_with_tolerance(V, rel_tol)
    inst = PolytopeInstance(
        vertices=V, labels=labels, antipodal=antipodal_indices(angles),
        frequency_sets=(freqs,), block_columns=((0, V.shape[1]),),
        predicted_dim=observed if predicted_dim is None else predicted_dim,
        observed_dim=observed, spec=spec, redundant_dim=redundant_dim, name=name)
    inst.check_invariants()
    return inst


def moment_curve_polytope(k: int, q: int) -> PolytopeInstance:
    """conv of ``U_k`` over the ``q``-point grid."""
    freqs = FrequencySet.odd_up_to(2 * k - 1)
    return curve_polytope(freqs, build_angle_grid(q), name=f"moment-curve(k={k},q={q})")


def _cluster_ids(angles: Sequence[Angle], m: int, s: int) -> list[int]:
    # Cluster c is centered at c / (4 * 3**m) of a turn.
    q = 4 * 3**m
    return [round(a.turn * q) % q for a in angles]


def construct(spec: ConstructionSpec, rel_tol: float = DEFAULT_REL_TOL) -> PolytopeInstance:
    """Build the polytope described by ``spec``."""
    if isinstance(spec, DirectSumSpec):
        block = construct(spec.block, rel_tol)
        inst = direct_sum([block] * spec.r, rel_tol)
        inst.spec = spec
        inst.predicted_dim = predicted_dimension(spec)
        inst.redundant_dim = redundant_dimension(spec)
        inst.name = spec_name(spec)
        return inst
    angles = spec_angles(spec)
    clusters = _cluster_ids(angles, spec.m, spec.s) if isinstance(spec, ClusterSpec) else None
    return curve_polytope(spec_frequencies(spec), angles, predicted_dim=predicted_dimension(spec),
                          clusters=clusters, spec=spec, redundant_dim=redundant_dimension(spec),
                          name=spec_name(spec), rel_tol=rel_tol)


def project_to_block(inst: PolytopeInstance, block: int = 0,
                     frequencies: Sequence[int] | None = None,
                     rel_tol: float = DEFAULT_REL_TOL) -> PolytopeInstance:
    """Image under the coordinate projection onto some frequencies of one block.

    Rows are kept one-to-one with the input (no deduplication), so labels and
    the antipodal map carry over unchanged.
    """
    if not 0 <= block < inst.num_blocks:
        raise ValueError(f"block {block} out of range")
    freqs = inst.frequency_sets[block]
    wanted = list(freqs) if frequencies is None else list(frequencies)
    missing = [f for f in wanted if f not in freqs]
    if missing or not wanted:
        raise ValueError(f"frequencies {missing or wanted} not available in block {block}")
    start = inst.block_columns[block][0]
    pos = {f: i for i, f in enumerate(freqs)}
    cols = []
    for f in sorted(set(wanted)):
        cols += [start + 2 * pos[f], start + 2 * pos[f] + 1]
    V = inst.vertices[:, cols]
    sub = FrequencySet.of(wanted)
    observed = rank_with_tolerance(V, rel_tol)
    return PolytopeInstance(
        vertices=V, labels=inst.labels, antipodal=inst.antipodal.copy(),
        frequency_sets=(sub,), block_columns=((0, V.shape[1]),),
        predicted_dim=observed, observed_dim=observed, spec=None,
        name=f"{inst.name}|block{block}{list(sub)}")


def direct_sum(instances: Sequence[PolytopeInstance],
               rel_tol: float = DEFAULT_REL_TOL) -> PolytopeInstance:
    """Convex hull of the inputs placed in complementary coordinate blocks."""
    instances = list(instances)
    if not instances:
        raise ValueError("direct_sum needs at least one polytope")
    total_rows = sum(p.num_vertices for p in instances)
    total_cols = sum(p.ambient_dim for p in instances)
    V = np.zeros((total_rows, total_cols))
    labels, antipodal, freq_sets, block_cols = [], [], [], []
    r0 = c0 = 0
    block = 0
    for p in instances:
        for b in range(p.num_blocks):
            s, e = p.block_columns[b]
            block_cols.append((c0 + s, c0 + e))
            freq_sets.append(p.frequency_sets[b])
        V[r0:r0 + p.num_vertices, c0:c0 + p.ambient_dim] = p.vertices
        labels += [VertexLabel(block + lab.block, lab.angle, lab.cluster) for lab in p.labels]
        antipodal += list(p.antipodal + r0)
        r0 += p.num_vertices
        c0 += p.ambient_dim
        block += p.num_blocks
    observed = rank_with_tolerance(V, rel_tol)
    inst = PolytopeInstance(
        vertices=V, labels=tuple(labels), antipodal=np.array(antipodal),
        frequency_sets=tuple(freq_sets), block_columns=tuple(block_cols),
        predicted_dim=sum(p.predicted_dim for p in instances), observed_dim=observed,
        redundant_dim=(sum(p.redundant_dim for p in instances)
                       if all(p.redundant_dim for p in instances) else None),
        name=" + ".join(p.name for p in instances))
    inst.check_invariants()
    return inst


def block_instance(inst: PolytopeInstance, block: int) -> PolytopeInstance:
    """The copy sitting in one block of a direct sum, with its own indexing."""
    rows = inst.block_indices(block)
    if rows.size == 0:
        raise ValueError(f"no vertices in block {block}")
    s, e = inst.block_columns[block]
    local = {int(g): i for i, g in enumerate(rows)}
    V = inst.vertices[np.ix_(rows, np.arange(s, e))]
    observed = rank_with_tolerance(V)
    return PolytopeInstance(
        vertices=V, labels=tuple(VertexLabel(0, inst.labels[g].angle, inst.labels[g].cluster)
                                 for g in rows),
        antipodal=np.array([local[int(inst.antipodal[g])] for g in rows]),
        frequency_sets=(inst.frequency_sets[block],), block_columns=((0, e - s),),
        predicted_dim=observed, observed_dim=observed, name=f"{inst.name}[{block}]")


def expand_redundant(inst: PolytopeInstance) -> np.ndarray:
    """Stacked embedding with repeated coordinates written out.

    Per block: ``(U(t), U(g t), ..., U(g**m t))`` with ``g = 3`` and
    ``U = U_3`` for the neighborly and cluster families, ``g = 5`` and
    ``U = U_3k`` for the many-faces family. Needs ``inst.spec``.
    """
    spec = inst.spec
    if isinstance(spec, (NeighborlySpec, ClusterSpec)):
        base, mult, m = list(NEIGHBORLY_BASE), 3, spec.m
    elif isinstance(spec, (ManyFacesSpec, DirectSumSpec)):
        base, mult, m = list(range(1, 6 * spec.k, 2)), 5, spec.m
    else:
        raise ValueError("redundant embedding needs a construction spec")
    parts = []
    for b in range(inst.num_blocks):
        s, _ = inst.block_columns[b]
        pos = {f: i for i, f in enumerate(inst.frequency_sets[b])}
        rows = inst.block_indices(b)
        block = np.zeros((inst.num_vertices, 2 * len(base) * (m + 1)))
        col = 0
        for j in range(m + 1):
            for f in base:
                src = s + 2 * pos[f * mult**j]
                block[rows, col:col + 2] = inst.vertices[np.ix_(rows, [src, src + 1])]
                col += 2
        parts.append(block)
    return np.hstack(parts)
