"""Symmetric moment curve, odd frequency sets and exact angle grids.

Angles are stored as exact fractions of a full turn. Floating point only shows
up when a curve point is evaluated, so antipodes, fibers of ``t -> 3t`` and
grid membership are all decided with integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, order=True)
class Angle:
    """The point ``2*pi*numerator/denominator`` of the circle R/2piZ."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        if not 0 <= self.numerator < self.denominator:
            raise ValueError("numerator must lie in [0, denominator)")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError(f"{self.numerator}/{self.denominator} is not reduced")

    @classmethod
    def from_turn(cls, turn: Fraction | int | str) -> "Angle":
        """Build from a fraction of a full turn, reduced modulo 1."""
        turn = Fraction(turn) % 1
        return cls(turn.numerator, turn.denominator)

    @classmethod
    def parse(cls, text: str) -> "Angle":
        """Inverse of :meth:`__str__`: accepts ``"j/q"`` (and ``"j"``)."""
        return cls.from_turn(Fraction(text.strip()))

    @property
    def turn(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def radians(self) -> float:
        return 2.0 * math.pi * self.numerator / self.denominator

    def antipode(self) -> "Angle":
        return Angle.from_turn(self.turn + Fraction(1, 2))

    def times(self, factor: int) -> "Angle":
        return Angle.from_turn(self.turn * factor)

    def shift(self, delta: Fraction) -> "Angle":
        return Angle.from_turn(self.turn + delta)

    def is_antipodal_to(self, other: "Angle") -> bool:
        return self.antipode() == other

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class FrequencySet:
    """Strictly increasing odd positive frequencies."""

    freqs: tuple[int, ...]

    def __post_init__(self):
        freqs = tuple(int(f) for f in self.freqs)
        object.__setattr__(self, "freqs", freqs)
        if not freqs:
            raise ValueError("frequency set must be nonempty")
        for f in freqs:
            if f <= 0 or f % 2 == 0:
                raise ValueError(f"frequency {f} is not a positive odd integer")
        if any(a >= b for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be strictly increasing")

    @classmethod
    def of(cls, values: Iterable[int]) -> "FrequencySet":
        return cls(tuple(sorted(set(values))))

    @classmethod
    def odd_up_to(cls, top: int) -> "FrequencySet":
        """All odd integers in ``[1, top]``."""
        return cls(tuple(range(1, top + 1, 2)))

    def __len__(self) -> int:
        return len(self.freqs)

    def __iter__(self):
        return iter(self.freqs)

    def __contains__(self, f) -> bool:
        return f in self.freqs

    @property
    def dimension(self) -> int:
        return 2 * len(self.freqs)


def eval_moment_curve(k: int, t: Angle) -> np.ndarray:
    """``(cos t, sin t, cos 3t, sin 3t, ..., cos (2k-1)t, sin (2k-1)t)``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return eval_composite(FrequencySet.odd_up_to(2 * k - 1), t)


def eval_composite(freqs: FrequencySet, t: Angle) -> np.ndarray:
    """Cosine/sine pair for every frequency, in the order of ``freqs``."""
    return curve_points(freqs, [t])[0]


def curve_points(freqs: FrequencySet, angles: Sequence[Angle]) -> np.ndarray:
    """Rows are curve points for ``angles``; columns alternate cos, sin.

    Each phase ``f*t`` is reduced modulo a full turn in exact arithmetic before
    the trigonometric call, so ``t`` and ``t + pi`` give exact negatives.
    """
    out = np.empty((len(angles), 2 * len(freqs)))
    for r, t in enumerate(angles):
        for c, f in enumerate(freqs):
            phase = (f * t.numerator) % t.denominator
            out[r, 2 * c], out[r, 2 * c + 1] = _cos_sin(phase, t.denominator)
    return out


def _cos_sin(num: int, den: int) -> tuple[float, float]:
    # Fold into the first half-turn so antipodal phases differ only by sign.
    if 2 * num >= den:
        c, s = _cos_sin_half(2 * num - den, 2 * den)
        return -c, -s
    return _cos_sin_half(2 * num, 2 * den)


def _cos_sin_half(num: int, den: int) -> tuple[float, float]:
    x = 2.0 * math.pi * num / den
    return math.cos(x), math.sin(x)


def frequency_set(base: FrequencySet, multiplier: int, m: int) -> FrequencySet:
    """Sorted union of ``multiplier**j * base`` for ``j = 0..m``."""
    if multiplier < 3 or multiplier % 2 == 0:
        raise ValueError("multiplier must be an odd integer >= 3")
    if m < 0:
        raise ValueError("m must be non-negative")
    return FrequencySet.of(f * multiplier**j for j in range(m + 1) for f in base)


def frequency_count_closed_form(k: int, m: int) -> int:
    """Size of the union of ``5**j * K`` (j <= m), K the odd numbers in [1, 6k-1].

    Multiples of 5 in K collide with the next level down, and there are
    ``(3k+2)//5`` of them.
    """
    if k < 1 or m < 0:
        raise ValueError("need k >= 1 and m >= 0")
    return 3 * k * (m + 1) - m * ((3 * k + 2) // 5)


def build_angle_grid(q: int) -> list[Angle]:
    """``q`` equally spaced angles ``j/q`` of a turn; index ``j + q/2`` is the antipode of ``j``."""
    if q < 2 or q % 2:
        raise ValueError(f"grid size must be a positive even integer, got {q}")
    return [Angle.from_turn(Fraction(j, q)) for j in range(q)]


def default_cluster_spread() -> Fraction:
    """1/1000 of the 4-point base grid spacing, as a fraction of a turn."""
    return Fraction(1, 4000)


def build_cluster_grid(m: int, s: int, spread: Fraction | None = None) -> list[Angle]:
    """Clusters of ``s`` angles around a 4-point grid, pulled back ``m`` times under ``t -> 3t``.

    ``spread`` is the within-cluster step at the base level (fraction of a
    turn); each pull-back divides it by 3. Returned angles are sorted.
    """
    if m < 0 or s < 1:
        raise ValueError("need m >= 0 and s >= 1")
    spread = default_cluster_spread() if spread is None else Fraction(spread)
    if spread <= 0:
        raise ValueError("cluster spread must be positive")
    if s * spread >= Fraction(1, 8):
        raise ValueError(
            f"clusters overlap: s*spread = {s * spread} must be below half the base spacing 1/8")
    offsets = [(i - Fraction(s - 1, 2)) * spread for i in range(s)]
    level = sorted({Fraction(c, 4) + off for c in range(4) for off in offsets})
    for _ in range(m):
        level = sorted({((t % 1) + j) / 3 for t in level for j in range(3)})
    return sorted(Angle.from_turn(t) for t in level)


def antipodal_indices(angles: Sequence[Angle]) -> np.ndarray:
    """Index of each angle's antipode; raises if the set is not antipode-closed."""
    where = {a: i for i, a in enumerate(angles)}
    if len(where) != len(angles):
        raise ValueError("duplicate angles")
    try:
        return np.array([where[a.antipode()] for a in angles], dtype=int)
    except KeyError as exc:
        raise ValueError(f"angle set is not centrally symmetric: {exc.args[0]} missing") from None
