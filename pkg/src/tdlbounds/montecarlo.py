"""Monte Carlo check of the bounds with LS and LMMSE tap estimators.

Each trial draws ``h ~ CN(0, R_h)`` and ``w ~ CN(0, sigma_w2 I)`` from its
own substream keyed by ``(seed, trial index)``, observes ``y = X h + w``
with the pilot (and hence ``X``) held fixed, and records the squared error
``sum_l |h_l - h_hat_l|^2`` of every requested estimator.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .bounds import SoundingConfig, _shifted_columns
from .errors import ConditioningError
from .pilots import PilotKind, pilot_for_window, rng_for

ESTIMATORS = ("ls", "mmse")
_TRIAL_STREAM = 1


def _cn(rng, shape):
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def channel_factor(Rh):
    """``U sqrt(Lambda)`` with ``R_h = U Lambda U^H`` (clamped eigenvalues)."""
    return Rh.eigenvectors * np.sqrt(Rh.eigenvalues)[None, :]


def draw_channel(Rh, rng):
    """One draw of ``h ~ CN(0, R_h)``."""
    return channel_factor(Rh) @ _cn(rng, (Rh.grid.L,))


def build_convolution_matrix(x, grid, N):
    """``N x L`` matrix with row ``i`` (``i = 1..N``) and tap column ``l``
    holding ``x_{i-l}``."""
    return _shifted_columns(x, grid, N)


def synthesize_observation(X, h, sigma_w2, rng):
    """``y = X h + w`` with ``w`` circular complex normal of variance ``sigma_w2``."""
    y = X @ h
    if sigma_w2 > 0:
        y = y + math.sqrt(sigma_w2) * _cn(rng, y.shape)
    return y


class LeastSquares:
    """QR-based LS solver for a fixed ``X``."""

    def __init__(self, X):
        X = np.asarray(X)
        self.q, self.r = linalg.qr(X, mode="economic")
        d = np.abs(np.diag(self.r))
        if X.shape[0] < X.shape[1] or d.min() <= 1e-12 * max(d.max(), 1e-300):
            raise ConditioningError("convolution matrix is rank deficient",
                                    float(d.min() ** 2) if d.size else 0.0)

    def __call__(self, y):
        return linalg.solve_triangular(self.r, self.q.conj().T @ y)

    @property
    def gain(self):
        """``(X^H X)^-1 X^H`` as an ``L x N`` matrix."""
        return linalg.solve_triangular(self.r, self.q.conj().T)

    def error_trace(self):
        """``tr((X^H X)^-1)``."""
        ri = linalg.solve_triangular(self.r, np.eye(self.r.shape[0]))
        return float(np.sum(np.abs(ri) ** 2))


class Lmmse:
    """``h_hat = R_h X^H (X R_h X^H + sigma_w2 I)^-1 y`` for a fixed ``X``."""

    def __init__(self, X, R, sigma_w2):
        X = np.asarray(X)
        R = np.asarray(R)
        A = X @ R @ X.conj().T + sigma_w2 * np.eye(X.shape[0])
        try:
            c = linalg.cho_factor(A, lower=True)
        except linalg.LinAlgError:
            lam = float(np.linalg.eigvalsh(A).min())
            raise ConditioningError("X R_h X^H + sigma_w2 I is not positive definite", lam) from None
        self.gain = linalg.cho_solve(c, X @ R).conj().T  # R X^H A^-1 (A and R Hermitian)
        self.error_trace = float(np.trace(R - self.gain @ X @ R).real)

    def __call__(self, y):
        return self.gain @ y


def ls_estimate(X, y):
    """Least-squares taps ``argmin ||y - X h||``."""
    return LeastSquares(X)(y)


def ls_theoretical_mse(X, sigma_w2):
    """``sigma_w2 tr((X^H X)^-1)``, the exact LS MSE for fixed ``X``."""
    return sigma_w2 * LeastSquares(X).error_trace()


def mmse_estimate(X, y, Rh, sigma_w2):
    R = Rh.matrix if hasattr(Rh, "matrix") else Rh
    return Lmmse(X, R, sigma_w2)(y)


def mmse_theoretical_mse(X, Rh, sigma_w2):
    """Bayesian MSE of the LMMSE estimator for fixed ``X``."""
    R = Rh.matrix if hasattr(Rh, "matrix") else Rh
    return Lmmse(X, R, sigma_w2).error_trace


@dataclass(frozen=True)
class TrialConfig:
    cfg: SoundingConfig
    grid: object
    n_trials: int
    pilot_kind: PilotKind = PilotKind.ZADOFF_CHU
    pilot_seed: int = 0
    seed: int = 0
    estimators: tuple = ESTIMATORS
    redraw_pilot: bool = False

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        est = tuple(e.lower() for e in self.estimators)
        unknown = set(est) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown estimator(s): {', '.join(sorted(unknown))}")
        if "ls" in est and self.cfg.N < self.grid.L:
            raise ValueError(f"LS needs N >= L ({self.cfg.N} < {self.grid.L})")
        object.__setattr__(self, "estimators", est)
        object.__setattr__(self, "pilot_kind", PilotKind.parse(self.pilot_kind))


@dataclass
class EstimatorStats:
    mse: float
    stderr: float
    theory: float
    errors: np.ndarray = field(repr=False)  # per-trial squared error
    bias_vectors: np.ndarray = field(default=None, repr=False)


@dataclass
class SimResult:
    snr_db: float
    trials: int
    stats: dict
    wall_time: float

    def __getitem__(self, name):
        return self.stats[name]

    def csv_rows(self):
        return [[f"{self.snr_db:.12g}", name, f"{s.mse:.12g}", f"{s.stderr:.12g}", str(self.trials)]
                for name, s in self.stats.items()]


SIM_HEADER = ["snr_db", "estimator", "mse", "stderr", "trials"]


def sim_results_csv(results):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SIM_HEADER)
    for r in results:
        w.writerows(r.csv_rows())
    return buf.getvalue()


def _mean_stderr(errs):
    n = len(errs)
    mean = math.fsum(errs) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((e - mean) ** 2 for e in errs) / (n - 1)
    return mean, math.sqrt(var / n)


def _apply(A, V):
    # row-wise A @ v through einsum's own loops, so a trial's result does not
    # depend on how many trials share the call (batched BLAS kernels do)
    return np.einsum("ij,tj->ti", A, V)


def _run_chunk(tc, Rh, factor, X, gains, lo, hi):
    L, N = tc.grid.L, tc.cfg.N
    sw = math.sqrt(tc.cfg.sigma_w2)
    Z = np.empty((hi - lo, L), dtype=complex)
    W = np.empty((hi - lo, N), dtype=complex)
    seeds = []
    for i, t in enumerate(range(lo, hi)):
        rng = rng_for(tc.seed, _TRIAL_STREAM, t)
        Z[i] = _cn(rng, (L,))
        W[i] = _cn(rng, (N,))
        if tc.redraw_pilot:
            seeds.append(int(rng.integers(2**63)))
    H = _apply(factor, Z)
    out = {}
    if tc.redraw_pilot:
        for name in tc.estimators:
            err = np.empty((hi - lo, L), dtype=complex)
            for i, ps in enumerate(seeds):
                Xi = _pilot_matrix(tc, pilot_seed=ps)
                y = _apply(Xi, H[i:i + 1]) + sw * W[i:i + 1]
                err[i] = _apply(_solver(name, Xi, Rh, tc.cfg.sigma_w2).gain, y)[0] - H[i]
            out[name] = err
        return out
    Y = _apply(X, H) + sw * W
    for name, G in gains.items():
        out[name] = _apply(G, Y) - H
    return out


def _solver(name, X, Rh, sigma_w2):
    return LeastSquares(X) if name == "ls" else Lmmse(X, Rh.matrix, sigma_w2)


def _pilot_matrix(tc, pilot_seed=None):
    seed = tc.pilot_seed if pilot_seed is None else pilot_seed
    x = pilot_for_window(tc.pilot_kind, tc.cfg.N, tc.grid, tc.cfg.Px, seed)
    return build_convolution_matrix(x, tc.grid, tc.cfg.N)


def run_trials(tc, Rh, pilot=None, workers=1, chunk=2048, keep_vectors=False):
    """Run ``tc.n_trials`` independent trials and aggregate per estimator.

    ``pilot`` overrides the generated pilot.  The result does not depend on
    ``workers`` or ``chunk``: every trial owns its random substream and the
    aggregation sums per-trial errors with ``math.fsum``.
    """
    t0 = time.perf_counter()
    X = (build_convolution_matrix(pilot, tc.grid, tc.cfg.N) if pilot is not None
         else _pilot_matrix(tc))
    factor = channel_factor(Rh)
    solvers = {} if tc.redraw_pilot else {
        name: _solver(name, X, Rh, tc.cfg.sigma_w2) for name in tc.estimators}
    gains = {name: s.gain for name, s in solvers.items()}
    bounds = [(lo, min(lo + chunk, tc.n_trials)) for lo in range(0, tc.n_trials, chunk)]

    def job(b):
        return _run_chunk(tc, Rh, factor, X, gains, b[0], b[1])

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, bounds))
    else:
        parts = [job(b) for b in bounds]

    stats = {}
    for name in tc.estimators:
        vec = np.concatenate([p[name] for p in parts])
        errs = np.sum(np.abs(vec) ** 2, axis=1)
        mean, se = _mean_stderr(errs.tolist())
        if tc.redraw_pilot:
            theory = math.nan
        elif name == "ls":
            theory = tc.cfg.sigma_w2 * solvers["ls"].error_trace()
        else:
            theory = solvers["mmse"].error_trace
        stats[name] = EstimatorStats(mean, se, theory, errs, vec if keep_vectors else None)
    snr_db = 10 * math.log10(tc.cfg.snr) if 0 < tc.cfg.snr < math.inf else math.inf
    return SimResult(snr_db, tc.n_trials, stats, time.perf_counter() - t0)
