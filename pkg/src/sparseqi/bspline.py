"""Cardinal B-splines, their 1-periodic dyadic dilates, and tensor products.

The cardinal spline of even order ``ell`` is the ``ell``-fold convolution of
the indicator of ``[0, 1)``: a nonnegative piecewise polynomial of degree
``ell - 1`` supported on ``[0, ell]`` whose integer translates sum to one.
Piece coefficients are computed once, exactly (repeated antidifferentiation
with `Fraction` arithmetic), and frozen into a float table for Horner
evaluation in the hot loops.

Periodic dilates: ``N_k`` is the 1-periodic extension of ``x -> M(ell * 2**k
* x)``, and ``N_{k,s}(x) = N_k(x - s*h)`` with mesh ``h = 1 / (ell * 2**k)``.
The shift index ``s`` lives in ``{0, ..., ell * 2**k - 1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor

import numpy as np

__all__ = [
    "CardinalSpline",
    "PeriodicSpline",
    "InvalidOrder",
    "IndexOutOfRange",
    "DimensionMismatch",
    "cardinal_spline",
    "piece_table",
    "eval_cardinal",
    "eval_cardinal_exact",
    "eval_periodic",
    "eval_tensor",
    "mesh_size",
    "shifts_per_level",
]


class InvalidOrder(ValueError):
    """Spline order must be an even integer >= 2."""


class IndexOutOfRange(ValueError):
    """Shift index outside {0, ..., ell * 2**k - 1}."""


class DimensionMismatch(ValueError):
    """Lengths of level/shift/point vectors disagree."""


def _check_order(ell: int) -> None:
    if ell < 2 or ell % 2:
        raise InvalidOrder(f"order must be even and >= 2, got {ell}")


def shifts_per_level(ell: int, k: int) -> int:
    """Number of shifts at level ``k``: ``ell * 2**k``."""
    return ell << k


def mesh_size(ell: int, k: int) -> Fraction:
    """Exact mesh ``h = 1 / (ell * 2**k)`` of level ``k``."""
    return Fraction(1, ell << k)


@dataclass(frozen=True)
class CardinalSpline:
    """Exact piecewise-polynomial table of the cardinal spline of order ``ell``.

    ``pieces[j][i]`` is the coefficient of ``t**i`` on ``[j, j+1)`` in the
    local variable ``t = x - j``.
    """

    ell: int
    pieces: tuple[tuple[Fraction, ...], ...]


def _convolve_pieces(pieces: list[tuple[Fraction, ...]]) -> list[tuple[Fraction, ...]]:
    # One convolution with the unit indicator: new(x) = A(x) - A(x - 1)
    # where A is the running antiderivative of the current spline.
    anti: list[tuple[Fraction, ...]] = []
    running = Fraction(0)
    for piece in pieces:
        integ = [running] + [c / (i + 1) for i, c in enumerate(piece)]
        anti.append(tuple(integ))
        running = sum(integ)
    total = running  # integral over the full support; equals 1
    n = len(pieces)
    out: list[tuple[Fraction, ...]] = []
    width = len(anti[0])
    for j in range(n + 1):
        upper = anti[j] if j < n else (total,) + (Fraction(0),) * (width - 1)
        lower = anti[j - 1] if j >= 1 else (Fraction(0),) * width
        out.append(tuple(u - l for u, l in zip(upper, lower)))
    return out


@lru_cache(maxsize=None)
def cardinal_spline(ell: int) -> CardinalSpline:
    _check_order(ell)
    pieces: list[tuple[Fraction, ...]] = [(Fraction(1),)]
    for _ in range(ell - 1):
        pieces = _convolve_pieces(pieces)
    return CardinalSpline(ell, tuple(pieces))


@lru_cache(maxsize=None)
def piece_table(ell: int) -> np.ndarray:
    """Float piece table, Horner-ready: ``table[j]`` holds the coefficients of
    the piece on ``[j, j+1)`` from highest degree down to the constant."""
    spline = cardinal_spline(ell)
    table = np.zeros((ell, ell), dtype=np.float64)
    for j, piece in enumerate(spline.pieces):
        for i, c in enumerate(piece):
            table[j, ell - 1 - i] = float(c)
    table.setflags(write=False)
    return table


def eval_cardinal_exact(ell: int, x: Fraction) -> Fraction:
    """Exact value of the cardinal spline at a rational point."""
    _check_order(ell)
    x = Fraction(x)
    if x <= 0 or x >= ell:
        return Fraction(0)
    j = int(x)
    t = x - j
    acc = Fraction(0)
    for c in reversed(cardinal_spline(ell).pieces[j]):
        acc = acc * t + c
    return acc


def eval_cardinal(ell: int, x: float) -> float:
    """Value of the cardinal spline of order ``ell`` at ``x`` (0 off support)."""
    _check_order(ell)
    if x <= 0.0 or x >= ell:
        return 0.0
    j = int(floor(x))
    t = x - j
    acc = 0.0
    for c in piece_table(ell)[j]:
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class PeriodicSpline:
    """The 1-periodic dilate ``N_{k,s}`` of the cardinal spline of order ``ell``."""

    ell: int
    k: int
    s: int

    def __post_init__(self) -> None:
        _check_order(self.ell)
        if self.k < 0:
            raise IndexOutOfRange(f"level must be >= 0, got {self.k}")
        if not 0 <= self.s < shifts_per_level(self.ell, self.k):
            raise IndexOutOfRange(
                f"shift {self.s} outside range(0, {shifts_per_level(self.ell, self.k)})"
            )


def eval_periodic(ps: PeriodicSpline, x: float) -> float:
    """Value of ``N_{k,s}`` at ``x`` (any real; evaluation wraps mod 1)."""
    scale = shifts_per_level(ps.ell, ps.k)
    # N_{k,s}(x) = M((x mod 1) * scale - s wrapped into [0, scale))
    u = (x * scale - ps.s) % scale
    return eval_cardinal(ps.ell, u) if u < ps.ell else 0.0


def eval_tensor(ell: int, k, s, x) -> float:
    """Product of univariate periodic spline values, one factor per axis."""
    if not (len(k) == len(s) == len(x)):
        raise DimensionMismatch(
            f"level/shift/point lengths disagree: {len(k)}, {len(s)}, {len(x)}"
        )
    acc = 1.0
    for kj, sj, xj in zip(k, s, x):
        acc *= eval_periodic(PeriodicSpline(ell, kj, sj), xj)
        if acc == 0.0:
            return 0.0
    return acc
