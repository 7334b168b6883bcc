"""Test functions with known or controllable mixed smoothness.

Trigonometric polynomials carry their Fourier coefficients explicitly, so
Sobolev norms are exact and evaluation on tensor grids is separable whenever
the mode set is a full box (all constructors here produce boxes).  The
witness builders return hierarchical combinations that vanish identically on
the sample grid they are built against; vanishing is always re-verified
numerically by the callers that rely on it.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence

import numpy as np

from .quasi_interp import HierCoeffs, QIScheme
from .smolyak import grid_level_gap

__all__ = [
    "TrigFunction",
    "bernoulli_partial",
    "random_mixed_smooth",
    "witness_g1",
    "witness_g2",
    "builtin_function",
    "g1_level_offset",
    "g2_level_offset",
]

_TWO_PI = 2.0 * np.pi
_POINT_CHUNK = 1 << 22  # cap on points*modes per scattered evaluation slab
_SMOOTH_MARGIN = 0.05  # fixed spectral safety margin of the random fixtures


class TrigFunction:
    """A real or complex trigonometric polynomial on the torus.

    ``modes`` maps frequency vectors ``s`` to coefficients of ``exp(2*pi*i*
    (s, x))``.  With the ``real`` flag the coefficients must be conjugate
    symmetric and evaluation returns real values.
    """

    def __init__(self, d: int, modes: Mapping[Sequence[int], complex], real: bool = False):
        self.d = d
        self.modes: dict[tuple[int, ...], complex] = {}
        for s, c in modes.items():
            key = tuple(int(v) for v in s)
            if len(key) != d:
                raise ValueError(f"mode {key} has wrong dimension (expected {d})")
            c = complex(c)
            if c != 0:
                self.modes[key] = c
        self.real = bool(real)
        if self.real:
            for s, c in self.modes.items():
                mirror = tuple(-v for v in s)
                if abs(self.modes.get(mirror, 0j) - c.conjugate()) > 1e-12 * max(1.0, abs(c)):
                    raise ValueError(f"realness flag set but mode {s} breaks conjugate symmetry")
        self._box_cache = None

    # -- structure ----------------------------------------------------------

    def _box(self):
        """(per-axis sorted frequency arrays, coefficient array) for box mode sets."""
        if self._box_cache is None:
            axes = [np.array(sorted({s[j] for s in self.modes})) for j in range(self.d)]
            size = 1
            for a in axes:
                size *= len(a)
            if size != len(self.modes):
                self._box_cache = False
            else:
                C = np.zeros(tuple(len(a) for a in axes), dtype=np.complex128)
                lookup = [{int(v): i for i, v in enumerate(a)} for a in axes]
                for s, c in self.modes.items():
                    C[tuple(lk[v] for lk, v in zip(lookup, s))] = c
                self._box_cache = (axes, C)
        return self._box_cache

    def _mode_arrays(self):
        S = np.array(list(self.modes.keys()), dtype=np.float64).reshape(len(self.modes), self.d)
        c = np.array(list(self.modes.values()), dtype=np.complex128)
        return S, c

    # -- evaluation -----------------------------------------------------------

    def eval_on_axes(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        box = self._box()
        if box is False:
            shape = tuple(len(a) for a in axes)
            mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
            return self.eval_points(mesh).reshape(shape)
        freq_axes, C = box
        if not self.modes:
            return np.zeros(tuple(len(a) for a in axes))
        field = C
        for j in range(self.d):
            E = np.exp(_TWO_PI * 1j * np.outer(np.asarray(axes[j]), freq_axes[j]))
            field = np.tensordot(E, field, axes=([1], [j]))
        field = np.transpose(field, axes=tuple(range(self.d - 1, -1, -1)))
        return field.real if self.real else field

    def eval_points_complex(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=np.float64))
        if not self.modes:
            return np.zeros(P.shape[0], dtype=np.complex128)
        box = self._box()
        if box is not False:
            freq_axes, C = box
            out = None
            for j in range(self.d):
                E = np.exp(_TWO_PI * 1j * np.outer(P[:, j], freq_axes[j]))
                if j == 0:
                    out = E @ C.reshape(len(freq_axes[0]), -1)
                    out = out.reshape((P.shape[0],) + C.shape[1:])
                else:
                    out = np.einsum("nk,nk...->n...", E, out)
            return out
        S, c = self._mode_arrays()
        chunk = max(1, _POINT_CHUNK // max(1, len(c)))
        out = np.empty(P.shape[0], dtype=np.complex128)
        for start in range(0, P.shape[0], chunk):
            block = P[start : start + chunk]
            out[start : start + chunk] = np.exp(_TWO_PI * 1j * (block @ S.T)) @ c
        return out

    def eval_points(self, P: np.ndarray) -> np.ndarray:
        vals = self.eval_points_complex(P)
        return vals.real if self.real else vals

    def __call__(self, x) -> float | complex:
        pt = np.atleast_1d(np.asarray(x, dtype=np.float64)).reshape(1, self.d)
        return self.eval_points(pt)[0]

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "real": self.real,
            "modes": [
                {"s": list(s), "re": c.real, "im": c.imag} for s, c in sorted(self.modes.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TrigFunction":
        modes = {
            tuple(int(v) for v in entry["s"]): complex(entry["re"], entry["im"])
            for entry in data["modes"]
        }
        return cls(int(data["d"]), modes, real=bool(data.get("real", False)))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def bernoulli_partial(r: float, K: int, d: int) -> TrigFunction:
    """Tensor product of truncated power-decay kernels.

    Univariate factor: ``1 + 2 * sum_{k<=K} k**(-r) cos(2*pi*k*x - r*pi/2)``,
    tensorized over ``d`` axes.  The frequency convention is ``2*pi*k`` on
    the unit torus.
    """
    if K < 1:
        raise ValueError("need K >= 1")
    phase = np.exp(-0.5j * np.pi * r)
    uni: dict[int, complex] = {0: 1.0 + 0j}
    for k in range(1, K + 1):
        uni[k] = k ** (-r) * phase
        uni[-k] = uni[k].conjugate()
    modes: dict[tuple[int, ...], complex] = {}
    for s in itertools.product(sorted(uni), repeat=d):
        c = 1.0 + 0j
        for v in s:
            c *= uni[v]
        modes[s] = c
    return TrigFunction(d, modes, real=True)


def _symmetric_signs(K: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Random +-1 array over the frequency box with sign[-s] == sign[s]."""
    shape = (2 * K + 1,) * d
    raw = rng.choice(np.array([-1.0, 1.0]), size=shape)
    grids = np.indices(shape) - K
    first_nonzero = np.zeros(shape, dtype=np.int8)
    for axis_vals in grids:
        undecided = first_nonzero == 0
        first_nonzero = np.where(undecided, np.sign(axis_vals).astype(np.int8), first_nonzero)
    mirrored = raw[(slice(None, None, -1),) * d]
    return np.where(first_nonzero >= 0, raw, mirrored)


def random_mixed_smooth(r_eff: float, K: int, d: int, seed: int) -> TrigFunction:
    """Random real trigonometric polynomial of effective mixed smoothness ``r_eff``.

    Coefficients are random signs times the product envelope
    ``(1 + |s_j|)**(-(r_eff + 1/2 + margin))`` over the full frequency box,
    normalized so the exact mixed Sobolev norm at exponent ``r_eff`` is one.
    The same seed always produces the same function.
    """
    if r_eff <= 0:
        raise ValueError("need r_eff > 0")
    if K < 1:
        raise ValueError("need K >= 1")
    rng = np.random.default_rng(seed)
    freqs = np.arange(-K, K + 1)
    envelope_1d = (1.0 + np.abs(freqs)) ** (-(r_eff + 0.5 + _SMOOTH_MARGIN))
    mag = envelope_1d
    for _ in range(d - 1):
        mag = np.multiply.outer(mag, envelope_1d)
    coeff = _symmetric_signs(K, d, rng) * mag

    weight_1d = (1.0 + freqs.astype(np.float64) ** 2) ** r_eff
    w = weight_1d
    for _ in range(d - 1):
        w = np.multiply.outer(w, weight_1d)
    norm = float(np.sqrt(np.sum(coeff**2 * w)))
    coeff = coeff / norm

    modes: dict[tuple[int, ...], complex] = {}
    for idx in itertools.product(range(2 * K + 1), repeat=d):
        modes[tuple(int(freqs[i]) for i in idx)] = complex(coeff[idx])
    return TrigFunction(d, modes, real=True)


def builtin_function(name: str, d: int) -> TrigFunction:
    """Named fixtures for the command-line front end."""
    if name == "sine":
        uni = {1: -0.5j, -1: 0.5j}
        modes: dict[tuple[int, ...], complex] = {}
        for s in itertools.product((-1, 1), repeat=d):
            c = 1.0 + 0j
            for v in s:
                c *= uni[v]
            modes[s] = c
        return TrigFunction(d, modes, real=True)
    raise KeyError(f"unknown builtin function {name!r}; have ['sine']")


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


def g1_level_offset(ell: int, d: int) -> int:
    """Smallest level surplus making the spread witness vanish on the grid."""
    return 1 + d * (grid_level_gap(ell) - 1)


def g2_level_offset(ell: int, d: int) -> int:
    """Smallest level surplus making the single-bump witness vanish on the grid."""
    return grid_level_gap(ell)


def witness_g1(
    scheme: QIScheme, d: int, m: int, r: float, *, level_offset: int | None = None
) -> HierCoeffs:
    """Spread witness: every block at one total level, disjoint supports per block.

    Blocks sit at total level ``m + level_offset`` with shifts spaced ``ell``
    apart, scaled by ``2**(-r*M) * M**(-(d-1)/2)`` (unit scale; callers
    rescale).  With the default offset the function vanishes at every sample
    grid point of level ``m``.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    offset = g1_level_offset(scheme.ell, d) if level_offset is None else level_offset
    M = m + offset
    amp = 2.0 ** (-r * M) * float(M) ** (-(d - 1) / 2.0)
    ell = scheme.ell
    blocks: dict[tuple[int, ...], np.ndarray] = {}
    for k in _compositions(M, d):
        C = np.zeros(tuple(ell << kj for kj in k))
        C[(slice(None, None, ell),) * d] = amp
        blocks[k] = C
    return HierCoeffs(d, ell, M, blocks, scheme_id=scheme.scheme_id)


def witness_g2(
    scheme: QIScheme, d: int, m: int, r: float, p: float, *, level_offset: int | None = None
) -> HierCoeffs:
    """Single-bump witness: one spline at level ``(M, 0, ..., 0)``, scale
    ``2**(-(r - 1/p) * M)``.  Vanishes on the level-``m`` sample grid with the
    default offset."""
    if m < 1:
        raise ValueError("need m >= 1")
    if not 1 < p < np.inf:
        raise ValueError("need p in (1, inf)")
    offset = g2_level_offset(scheme.ell, d) if level_offset is None else level_offset
    M = m + offset
    ell = scheme.ell
    k_star = (M,) + (0,) * (d - 1)
    C = np.zeros(tuple(ell << kj for kj in k_star))
    C[(0,) * d] = 2.0 ** (-(r - 1.0 / p) * M)
    return HierCoeffs(d, ell, M, {k_star: C}, scheme_id=scheme.scheme_id)


def _compositions(total: int, d: int):
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, d - 1):
            yield (first,) + rest
