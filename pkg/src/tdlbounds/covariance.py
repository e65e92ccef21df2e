"""Tap covariance of the bandlimited tapped-delay-line channel.

Tap ``l`` of the channel bandlimited to ``(-B, B)`` is

    h_l = (1/2B) * integral_{-B}^{B} H(f) exp(j 2 pi l f / 2B) df

so that, under uncorrelated scattering,

    E{h_l h_p*} = iint_{[-1/2, 1/2]^2} conj(R_H(2B (x1 - x2)))
                  * exp(j 2 pi (l x1 - p x2)) dx1 dx2.

Changing variables to the difference ``d = x1 - x2`` and integrating the
other coordinate in closed form leaves a 1D integral over ``d`` in
``[-1, 1]`` with a piecewise-analytic kernel.  That integral is evaluated by
composite Gauss-Legendre quadrature whose panels are narrow enough to
resolve the ``exp(j 2 pi l d)`` oscillation, and refined by panel doubling
until two successive estimates agree.

The conjugate in the integrand comes from ``E{H(f1) H*(f2)}`` equalling
``R_H(f2 - f1)`` under the ``exp(+j 2 pi f tau)`` convention used by
``channel_autocorr``; with it, positive delays land on positive tap indices.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._quadrature import panel_rule
from .errors import QuadratureAccuracyError, RangeError, UnsupportedOperationError
from .pdp import PdpKind, channel_autocorr, pdp_value

RTOL = 1e-8
ATOL = 1e-12
MAX_PANELS = 1 << 16
EIG_CLAMP = 1e-10


@dataclass(frozen=True)
class TapGrid:
    """Sampling bandwidth ``B`` and the tap index window ``[-L1, L2]``."""

    bandwidth: float
    L1: int
    L2: int

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        if int(self.L1) != self.L1 or int(self.L2) != self.L2 or self.L1 < 0 or self.L2 < 0:
            raise ValueError(f"L1 and L2 must be nonnegative integers, got ({self.L1}, {self.L2})")
        object.__setattr__(self, "L1", int(self.L1))
        object.__setattr__(self, "L2", int(self.L2))

    @property
    def L(self):
        return self.L1 + self.L2 + 1

    @property
    def Ts(self):
        return 0.5 / self.bandwidth

    @property
    def taps(self):
        return np.arange(-self.L1, self.L2 + 1)

    @property
    def delays(self):
        return self.taps * self.Ts


@dataclass
class TapCovariance:
    """Covariance ``R_h`` of the tap vector ``[h_{-L1}, ..., h_{L2}]``.

    ``eigenvalues`` are sorted in descending order and clamped at zero;
    ``clamp_count`` records how many small negative values were clamped.
    """

    grid: TapGrid
    matrix: np.ndarray
    eigenvalues: np.ndarray = field(init=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)
    clamp_count: int = field(init=False)
    min_raw_eigenvalue: float = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.grid.L, self.grid.L):
            raise ValueError(f"matrix shape {m.shape} does not match L={self.grid.L}")
        m = 0.5 * (m + m.conj().T)
        self.matrix = m
        w, v = np.linalg.eigh(m)
        order = np.argsort(w)[::-1]
        w, v = w[order], v[:, order]
        self.min_raw_eigenvalue = float(w.min())
        neg = w < 0
        self.clamp_count = int(np.count_nonzero(neg))
        self.eigenvalues = np.where(neg, 0.0, w)
        self.eigenvectors = v

    @property
    def total_energy(self):
        return float(np.trace(self.matrix).real)

    @property
    def diagonal(self):
        return self.matrix.diagonal().real.copy()

    def to_json(self):
        g = self.grid
        return json.dumps({
            "bandwidth": g.bandwidth, "L1": g.L1, "L2": g.L2,
            "taps": g.taps.tolist(),
            "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix],
            "eigenvalues": self.eigenvalues.tolist(),
            "clamp_count": self.clamp_count,
        })

    def to_csv(self):
        """Row-major ``l,p,re,im`` records."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "p", "re", "im"])
        taps = self.grid.taps
        for i, l in enumerate(taps):
            for j, p in enumerate(taps):
                z = self.matrix[i, j]
                w.writerow([int(l), int(p), f"{z.real:.17g}", f"{z.imag:.17g}"])
        return buf.getvalue()


def _difference_kernel(m, d):
    """Integral of exp(j 2 pi m x2) over the x2-slice of the unit square at
    fixed difference d; shape (len(m), len(d))."""
    m = np.atleast_1d(m)[:, None]
    d = np.asarray(d)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        sign = np.where(m % 2 == 0, 1.0, -1.0)
        osc = (np.exp(-2j * np.pi * m * d) - 1.0) / (2j * np.pi * m)
        k = np.where(d >= 0, sign * osc, -sign * osc)
    return np.where(m == 0, 1.0 - np.abs(d), k)


def _initial_panels(spec, B, kmax):
    # each panel covers at most a quarter period of exp(j 2 pi k d), and the
    # R_H(2B d) factor is resolved on its own delay scale
    n = max(8, 4 * kmax, math.ceil(8 * B * spec.delay_extent))
    return int(min(n, MAX_PANELS))


def _base(spec, B, taps, nodes):
    rh = np.conj(channel_autocorr(spec, 2 * B * nodes))
    return rh[None, :] * np.exp(2j * np.pi * np.outer(taps, nodes))


def _rows(spec, B, taps, others, n_panels):
    """Covariances E{h_l h_p*} for l in ``taps`` and p in ``others``."""
    neg, wneg = panel_rule(-1.0, 0.0, n_panels)
    pos, wpos = panel_rule(0.0, 1.0, n_panels)
    nodes = np.concatenate([neg, pos])
    weights = np.concatenate([wneg, wpos])
    base = _base(spec, B, taps, nodes) * weights[None, :]
    diff = taps[:, None] - others[None, :]
    lo = int(diff.min())
    kern = _difference_kernel(np.arange(lo, int(diff.max()) + 1), nodes)
    out = np.empty(diff.shape, dtype=complex)
    for i in range(len(taps)):
        out[i] = kern[diff[i] - lo] @ base[i]
    return out


def _adaptive(spec, B, taps, others, rtol, atol, context):
    taps = np.asarray(taps, dtype=int)
    others = np.asarray(others, dtype=int)
    kmax = int(max(np.abs(taps).max(), np.abs(others).max(),
                   np.abs(taps[:, None] - others[None, :]).max()))
    n = _initial_panels(spec, B, kmax)
    prev = _rows(spec, B, taps, others, n)
    err = np.inf
    while True:
        if 2 * n > MAX_PANELS:
            raise QuadratureAccuracyError(
                f"tap covariance quadrature did not converge {context}",
                estimate=prev, error_bound=float(np.max(err)))
        n *= 2
        cur = _rows(spec, B, taps, others, n)
        err = np.abs(cur - prev)
        tol = np.maximum(rtol * np.abs(cur), atol)
        if np.all(err <= tol):
            return cur
        prev = cur


def tap_cross_covariance(spec, B, l, p, rtol=RTOL, atol=ATOL):
    """``E{h_l h_p*}`` for the channel bandlimited to ``(-B, B)``."""
    if not B > 0:
        raise ValueError("bandwidth must be positive")
    v = _adaptive(spec, B, [l], [p], rtol, atol, context=f"at (l, p)=({l}, {p})")
    return complex(v[0, 0])


def _energies(spec, B, taps, rtol=RTOL, atol=ATOL):
    taps = np.asarray(taps, dtype=int)
    kmax = int(np.abs(taps).max())
    n = _initial_panels(spec, B, kmax)

    def diag(n):
        # real part only: the two halves of d are complex conjugates
        nodes, weights = panel_rule(0.0, 1.0, n)
        vals = _base(spec, B, taps, nodes) * ((1.0 - nodes) * weights)[None, :]
        return 2.0 * vals.sum(axis=1).real

    prev = diag(n)
    while True:
        if 2 * n > MAX_PANELS:
            raise QuadratureAccuracyError(
                "tap energy quadrature did not converge", estimate=prev, error_bound=np.inf)
        n *= 2
        cur = diag(n)
        if np.all(np.abs(cur - prev) <= np.maximum(rtol * np.abs(cur), atol)):
            return cur
        prev = cur


def tap_energy(spec, B, l, rtol=RTOL, atol=ATOL):
    """Average tap energy ``E{|h_l|^2}``."""
    v = tap_cross_covariance(spec, B, l, l, rtol, atol)
    assert abs(v.imag) < 1e-10, v
    return max(v.real, 0.0)


def tap_energies(spec, B, taps, rtol=RTOL, atol=ATOL):
    """Vectorised ``tap_energy`` over an array of tap indices."""
    if not B > 0:
        raise ValueError("bandwidth must be positive")
    return np.maximum(_energies(spec, B, taps, rtol, atol), 0.0)


def wideband_tap_energy(spec, B, l):
    """Tap energy in the wideband limit, ``P_h(l / 2B) / 2B``."""
    if spec.kind is PdpKind.DELTA:
        raise UnsupportedOperationError("the delta profile has no pointwise density")
    return pdp_value(spec, np.asarray(l) / (2.0 * B)) / (2.0 * B)


def build_covariance(spec, grid, rtol=RTOL, atol=ATOL):
    """Assemble the ``L x L`` tap covariance over ``grid``."""
    taps = grid.taps
    B = grid.bandwidth
    m = _adaptive(spec, B, taps, taps, rtol, atol, context=f"on window ({grid.L1}, {grid.L2})")
    return TapCovariance(grid, m)


def search_cap(spec, B):
    return math.ceil(40 * B * spec.tau_ds) + 80


def min_window(spec, B, threshold=0.9, min_side=1):
    """Smallest window ``(L1, L2)`` whose taps hold at least ``threshold`` of
    the channel energy (which sums to one over all taps).

    Among windows of the minimal length ``L = L1 + L2 + 1``, the one holding
    the most energy is returned; exact ties go to the smaller ``L1``.
    ``min_side`` is the least number of taps required on each side of tap 0.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if min_side < 0:
        raise ValueError("min_side must be nonnegative")
    cap = search_cap(spec, B)
    K = min(cap, max(16, 2 * min_side, math.ceil(4 * B * spec.delay_extent)))
    while True:
        taps = np.arange(-K, K + 1)
        cum = np.concatenate([[0.0], np.cumsum(tap_energies(spec, B, taps))])
        found = _search(cum, K, threshold, min_side)
        if found is not None:
            return found
        if K >= cap:
            raise RangeError(f"no window within |l| <= {cap} captures {threshold:g} of the energy")
        K = min(cap, 2 * K)


def _search(cum, K, threshold, min_side):
    # every window of length <= K + 1 fits inside [-K, K]
    for L in range(2 * min_side + 1, K + 2):
        L1 = np.arange(min_side, L - min_side)
        L2 = L - 1 - L1
        captured = cum[K + L2 + 1] - cum[K - L1]
        ok = captured >= threshold
        if ok.any():
            best = captured[ok].max()
            pick = np.flatnonzero(ok & (captured >= best - 1e-9))[0]
            return int(L1[pick]), int(L2[pick])
    return None
