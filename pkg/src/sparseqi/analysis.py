"""Measurement instruments: torus norms, block norms, differences, rate fits.

Integral norms on the torus use the uniform tensor lattice (the trapezoid
rule collapses to the lattice mean for periodic integrands) for dimension up
to three, and scrambled low-discrepancy sampling above that.  Reductions run
in a fixed chunking order, so repeated runs give identical values.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import comb, inf, isinf
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import qmc

from .bspline import piece_table
from .kernels import eval_blocks_on_grid
from .quasi_interp import HierCoeffs, QIScheme, SampleCache, as_batch_function, decompose

__all__ = [
    "ResolutionTooLow",
    "DegenerateFit",
    "NormSpec",
    "RateFit",
    "FieldDifference",
    "default_resolution",
    "lq_norm",
    "recovery_error",
    "sobolev_norm_fourier",
    "lp_block_norm",
    "besov_block_norm",
    "difference",
    "fit_rate",
]

logger = logging.getLogger(__name__)

_CHUNK = 1 << 19  # points per evaluation slab; fixed so reductions are reproducible


class ResolutionTooLow(ValueError):
    """Quadrature resolution below the aliasing guard for the level measured."""


class DegenerateFit(ValueError):
    """Rate fit impossible: too few levels or errors that do not decay."""


@dataclass(frozen=True)
class NormSpec:
    """Descriptor of a norm used in error tables and reports."""

    kind: str  # "Lp" | "SobolevMixed" | "BesovBlock" | "LPBlock"
    p: float
    r: float | None = None
    theta: float | None = None

    def __post_init__(self) -> None:
        kinds = ("Lp", "SobolevMixed", "BesovBlock", "LPBlock")
        if self.kind not in kinds:
            raise ValueError(f"kind must be one of {kinds}")
        if self.kind == "SobolevMixed" and self.p != 2:
            raise ValueError("the exact mixed Sobolev path requires p = 2")
        if self.kind == "BesovBlock":
            if self.p <= 0:
                raise ValueError("BesovBlock needs p > 0")
        elif self.p <= 1:
            raise ValueError(f"{self.kind} quadrature needs p > 1")

    @property
    def label(self) -> str:
        p = "inf" if isinf(self.p) else f"{self.p:g}"
        bits = [self.kind, f"p={p}"]
        if self.r is not None:
            bits.append(f"r={self.r:g}")
        if self.theta is not None:
            t = "inf" if isinf(self.theta) else f"{self.theta:g}"
            bits.append(f"theta={t}")
        return ",".join(bits)


@dataclass(frozen=True)
class RateFit:
    """Fitted decay model ``error(m) ~ C * 2**(-rho*m) * m**beta``."""

    rho: float
    beta: float
    C: float
    residual: float
    range: tuple[int, int]
    model: str

    def predict(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.float64)
        return self.C * 2.0 ** (-self.rho * m) * m**self.beta

    def to_json(self) -> dict:
        return {
            "rho": self.rho,
            "beta": self.beta,
            "C": self.C,
            "residual": self.residual,
            "range": list(self.range),
            "model": self.model,
        }


# ---------------------------------------------------------------------------
# fields and quadrature
# ---------------------------------------------------------------------------


class _FunctionField:
    """Adapter giving any torus function grid and scattered evaluation."""

    def __init__(self, f, d: int):
        self.d = d
        self._eval_axes = getattr(f, "eval_on_axes", None)
        self._batch = as_batch_function(f, d)

    def eval_points(self, P: np.ndarray) -> np.ndarray:
        return self._batch(np.asarray(P, dtype=np.float64))

    def eval_on_axes(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        if self._eval_axes is not None:
            return np.asarray(self._eval_axes(axes), dtype=np.float64)
        shape = tuple(len(a) for a in axes)
        out = np.empty(shape).ravel()
        mesh = np.stack(
            np.meshgrid(*axes, indexing="ij"), axis=-1
        ).reshape(-1, self.d)
        for start in range(0, mesh.shape[0], _CHUNK):
            out[start : start + _CHUNK] = self._batch(mesh[start : start + _CHUNK])
        return out.reshape(shape)


class FieldDifference:
    """Pointwise difference of two torus fields (e.g. f minus its recovery)."""

    def __init__(self, a, b, d: int | None = None):
        d = d if d is not None else getattr(a, "d", getattr(b, "d", None))
        if d is None:
            raise ValueError("cannot infer dimension; pass d explicitly")
        self.d = d
        self._a = _FunctionField(a, d)
        self._b = _FunctionField(b, d)

    def eval_points(self, P):
        return self._a.eval_points(P) - self._b.eval_points(P)

    def eval_on_axes(self, axes):
        return self._a.eval_on_axes(axes) - self._b.eval_on_axes(axes)


def default_resolution(d: int, m: int) -> int:
    """Points per axis (d <= 3) or sample count (d > 3) for level-m residuals."""
    if d <= 2:
        return 2 ** (m + 3)
    if d == 3:
        return 2 ** (m + 2)
    return 200_000


def _power_mean_norm(values: np.ndarray, q: float) -> float:
    a = np.abs(values)
    if isinf(q):
        return float(a.max())
    return float(np.mean(a**q) ** (1.0 / q))


def _quasi_norm_on_lattice(field, d: int, q: float, resolution: int) -> float:
    axes = [np.arange(resolution) / resolution] * d
    values = _FunctionField(field, d).eval_on_axes(axes)
    return _power_mean_norm(values, q)


def _quasi_norm_sampled(field, d: int, q: float, n: int, seed: int) -> float:
    sampler = qmc.Sobol(d, scramble=True, seed=seed)
    pts = sampler.random(n)
    vals = _FunctionField(field, d).eval_points(pts)
    a = np.abs(vals)
    if isinf(q):
        return float(a.max())
    powers = a**q
    batches = np.array_split(powers, 32)
    means = np.array([b.mean() for b in batches])
    est = float(powers.mean())
    stderr = float(means.std(ddof=1) / np.sqrt(len(means)))
    logger.info(
        "low-discrepancy L%s estimate: mean power %.6e, batch stderr %.2e (n=%d)",
        q, est, stderr, n,
    )
    return est ** (1.0 / q)


def lq_norm(
    f,
    q: float,
    d: int,
    resolution: int | None = None,
    *,
    min_level: int | None = None,
    seed: int = 0,
) -> float:
    """Integral quasi-norm of a torus function.

    ``f`` may be a callable, an object with ``eval_on_axes``/``eval_points``
    (hierarchical combinations, trigonometric polynomials, field
    differences), and ``q = inf`` returns the max over the sample set.

    ``min_level`` arms the aliasing guard: when measuring residuals of a
    level-``m`` recovery the lattice must have at least ``2**(m+2)`` points
    per axis.

    Raises:
        ResolutionTooLow: the guard is armed and the resolution is below it.
    """
    if not (q > 1):
        raise ValueError(f"need q > 1, got {q}")
    if resolution is None:
        resolution = default_resolution(d, min_level if min_level is not None else 4)
    if min_level is not None and d <= 3 and resolution < 2 ** (min_level + 2):
        raise ResolutionTooLow(
            f"resolution {resolution} per axis is below 2**(m+2) = {2 ** (min_level + 2)}"
            f" required for level-{min_level} residuals"
        )
    if d <= 3:
        return _quasi_norm_on_lattice(f, d, q, resolution)
    return _quasi_norm_sampled(f, d, q, resolution, seed)


def recovery_error(f, hc: HierCoeffs, q: float, resolution: int | None = None, *, seed: int = 0) -> float:
    """L_q distance between ``f`` and the recovered combination ``hc``."""
    residual = FieldDifference(f, hc, d=hc.d)
    return lq_norm(residual, q, hc.d, resolution, min_level=hc.max_level, seed=seed)


# ---------------------------------------------------------------------------
# Fourier-side Sobolev norm (exact, p = 2)
# ---------------------------------------------------------------------------


def sobolev_norm_fourier(coeffs, r: float) -> float:
    """Mixed Sobolev norm from finitely many Fourier coefficients (p = 2).

    ``coeffs`` maps frequency vectors to complex coefficients (an object with
    a ``modes`` mapping, such as a trigonometric polynomial, also works).
    """
    modes = getattr(coeffs, "modes", coeffs)
    total = 0.0
    for s, c in modes.items():
        weight = 1.0
        for sj in s:
            weight *= 1.0 + sj * sj
        total += abs(c) ** 2 * weight**r
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# block norms
# ---------------------------------------------------------------------------


def _resolve_block_resolution(d: int, m: int, resolution: int | None) -> int:
    resolution = default_resolution(d, m) if resolution is None else resolution
    if d <= 3 and resolution < 2 ** (m + 2):
        raise ResolutionTooLow(
            f"resolution {resolution} below 2**(m+2) for block levels up to {m}"
        )
    return resolution


def lp_block_norm(
    f,
    scheme: QIScheme,
    r: float,
    p: float,
    m: int,
    *,
    d: int,
    resolution: int | None = None,
    cache: SampleCache | None = None,
) -> float:
    """L_p norm of the level-weighted square function of the detail blocks.

    Forms ``sqrt(sum_k |2**(r|k|) q_k(f)|**2)`` pointwise on the quadrature
    lattice, truncated at total level ``m``, and integrates.
    """
    if not (1 < p < inf):
        raise ValueError(f"need p in (1, inf), got {p}")
    if d > 3:
        raise ValueError("block norms are quadrature-based and limited to d <= 3")
    resolution = _resolve_block_resolution(d, m, resolution)
    hc = decompose(scheme, f, m, d, cache=cache)
    axes = [np.arange(resolution) / resolution] * d
    table = piece_table(scheme.ell)
    square = np.zeros(tuple(len(a) for a in axes))
    for k, C in hc.block_items():
        field = eval_blocks_on_grid(axes, [(k, C)], scheme.ell, table)
        square += (4.0 ** (r * sum(k))) * field * field
    return _power_mean_norm(np.sqrt(square), p)


def besov_block_norm(
    f,
    scheme: QIScheme,
    r: float,
    p: float,
    theta: float,
    m: int,
    *,
    d: int,
    resolution: int | None = None,
    cache: SampleCache | None = None,
) -> float:
    """Besov-style aggregation of per-block L_p norms, truncated at level ``m``.

    ``(sum_k (2**(r|k|) ||q_k(f)||_p)**theta)**(1/theta)``; ``theta = inf``
    takes the supremum over blocks instead.  ``p`` and ``theta`` may be any
    positive exponents (including infinity).
    """
    if p <= 0 or theta <= 0:
        raise ValueError("need p > 0 and theta > 0")
    if d > 3:
        raise ValueError("block norms are quadrature-based and limited to d <= 3")
    resolution = _resolve_block_resolution(d, m, resolution)
    hc = decompose(scheme, f, m, d, cache=cache)
    axes = [np.arange(resolution) / resolution] * d
    table = piece_table(scheme.ell)
    weighted = []
    for k, C in hc.block_items():
        field = eval_blocks_on_grid(axes, [(k, C)], scheme.ell, table)
        weighted.append(2.0 ** (r * sum(k)) * _power_mean_norm(field, p))
    if isinf(theta):
        return float(max(weighted))
    return float(np.sum(np.array(weighted) ** theta) ** (1.0 / theta))


# ---------------------------------------------------------------------------
# mixed differences
# ---------------------------------------------------------------------------


def difference(f, ell: int, u: Iterable[int], h: Sequence[float], x: Sequence[float]) -> float:
    """Mixed order-``ell`` difference of ``f`` along the axes in ``u``.

    ``u`` holds zero-based axis indices; the empty set returns ``f(x)``.
    Arguments are passed to ``f`` unreduced, so non-periodic windows behave
    as written.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    h = np.atleast_1d(np.asarray(h, dtype=np.float64))
    d = x.size
    axes = sorted(set(int(a) for a in u))
    if any(a < 0 or a >= d for a in axes):
        raise ValueError(f"axis subset {axes} out of range for dimension {d}")
    batch = as_batch_function(f, d)
    if not axes:
        return float(batch(x.reshape(1, d))[0])
    points = []
    weights = []
    for js in itertools.product(range(ell + 1), repeat=len(axes)):
        w = 1.0
        pt = x.copy()
        for a, j in zip(axes, js):
            w *= (-1.0) ** (ell - j) * comb(ell, j)
            pt[a] += j * h[a]
        points.append(pt)
        weights.append(w)
    vals = batch(np.array(points))
    return float(np.dot(weights, vals))


# ---------------------------------------------------------------------------
# rate fitting
# ---------------------------------------------------------------------------


def fit_rate(
    errors: Mapping[int, float],
    model: str = "dyadic_logpow",
    *,
    beta: float | None = None,
    drop_lowest: int | None = None,
) -> RateFit:
    """Least-squares fit of ``log2 error`` against ``m`` (and ``log2 m``).

    ``model`` is ``"pure_dyadic"`` (no log-power term) or ``"dyadic_logpow"``
    with ``beta`` free unless fixed via the keyword.  By default the two
    smallest levels are dropped as pre-asymptotic, but never below the four
    levels a fit requires.

    Raises:
        DegenerateFit: fewer than four levels (after dropping), any
            non-positive error, or an error sequence that never decays.
    """
    if model not in ("pure_dyadic", "dyadic_logpow"):
        raise ValueError(f"unknown model {model!r}")
    ms = np.array(sorted(errors), dtype=np.float64)
    errs = np.array([errors[int(mv)] for mv in ms], dtype=np.float64)
    if ms.size < 4:
        raise DegenerateFit(f"need at least 4 levels, got {ms.size}")
    if np.any(errs <= 0):
        raise DegenerateFit("errors must be positive")
    drop = min(2, ms.size - 4) if drop_lowest is None else int(drop_lowest)
    if ms.size - drop < 4:
        raise DegenerateFit(f"only {ms.size - drop} levels left after dropping {drop}")
    ms = ms[drop:]
    errs = errs[drop:]
    if np.all(np.diff(errs) >= 0):
        raise DegenerateFit("errors are non-decreasing over the fitted range")

    y = np.log2(errs)
    free_beta = model == "dyadic_logpow" and beta is None
    fixed_beta = 0.0 if model == "pure_dyadic" else (beta or 0.0)
    if model == "pure_dyadic" and beta not in (None, 0.0):
        raise ValueError("pure_dyadic admits no log-power term")
    if free_beta and ms[0] < 1:
        raise ValueError("log-power fit needs levels m >= 1")

    cols = [np.ones_like(ms), -ms]
    target = y if free_beta else y - fixed_beta * np.log2(np.maximum(ms, 1.0))
    if free_beta:
        cols.append(np.log2(ms))
    A = np.stack(cols, axis=1)
    sol, *_ = np.linalg.lstsq(A, target, rcond=None)
    c0, rho = float(sol[0]), float(sol[1])
    beta_hat = float(sol[2]) if free_beta else float(fixed_beta)
    fit = RateFit(
        rho=rho,
        beta=beta_hat,
        C=float(2.0**c0),
        residual=0.0,
        range=(int(ms[0]), int(ms[-1])),
        model=model if not free_beta else "dyadic_logpow(free)",
    )
    predicted = fit.predict(ms)
    residual = float(np.max(np.abs(errs / predicted - 1.0)))
    return RateFit(fit.rho, fit.beta, fit.C, residual, fit.range, fit.model)
