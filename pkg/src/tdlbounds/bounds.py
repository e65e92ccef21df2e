"""Cramer-Rao and Bayesian Cramer-Rao bounds on the tap-estimation MSE.

Deterministic channel (CRB side)::

    J[l, p] = (1/sigma_w2) Re{ sum_{m=1}^{N} conj(x_{m-l}) x_{m-p} }
    MSE >= tr(J^-1)                     (finite sample)
    J[l, p] ~ (N/sigma_w2) R_x[p-l]     (large N, Toeplitz)
    tr(J^-1) / L -> Ts (sigma_w2/N) int df / S_x(f)    (L -> inf)
    beta = L / (N SNR)                  (white pilot)

Rayleigh channel ``h ~ CN(0, R_h)`` (BCRB side)::

    J_B = N SNR I + R_h^-1
    bbeta = tr(J_B^-1) = sum_i lambda_i / (N SNR lambda_i + 1)
    bbeta_w = L / (N SNR + 2B / P_h(0))    (wideband, uncorrelated taps)

Trace-of-inverse computations use Cholesky or the Hermitian eigenbasis;
no explicit inverse is formed outside the test oracles.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg

from .errors import ConditioningError, DomainError, RangeError


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SoundingConfig:
    """Observation length ``N``, pilot power ``Px``, noise variance
    ``sigma_w2`` and bandwidth ``B``; ``snr = Px / sigma_w2``."""

    N: int
    Px: float = 1.0
    sigma_w2: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.Px > 0:
            raise ValueError("Px must be positive")
        if not self.sigma_w2 >= 0:
            raise ValueError("sigma_w2 must be nonnegative")
        if not self.B > 0:
            raise ValueError("B must be positive")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_snr(cls, N, snr, Px=1.0, B=1.0):
        if not snr > 0:
            raise ValueError("snr must be positive")
        return cls(N, Px, Px / snr, B)

    @classmethod
    def from_snr_db(cls, N, snr_db, Px=1.0, B=1.0):
        return cls.from_snr(N, float(db_to_linear(snr_db)), Px, B)

    @property
    def snr(self):
        return self.Px / self.sigma_w2 if self.sigma_w2 > 0 else math.inf

    @property
    def fs(self):
        return 2.0 * self.B

    @property
    def Ts(self):
        return 0.5 / self.B


# -- CRB side ---------------------------------------------------------------

def fim_from_pilot(x, grid, cfg):
    """Finite-sample Fisher information matrix (real, ``L x L``)."""
    X = _shifted_columns(x, grid, cfg.N)
    G = (X.conj().T @ X).real
    # BLAS does not promise a bitwise symmetric product
    return 0.5 * (G + G.T) / cfg.sigma_w2


def _shifted_columns(x, grid, N):
    # column for tap l holds x_{m-l}, m = 1..N
    lo, hi = 1 - grid.L2, N + grid.L1
    if not x.covers(lo, hi):
        raise RangeError(
            f"pilot covers n in [{x.first}, {x.last}], the model needs [{lo}, {hi}]")
    s = x.window(lo, hi)
    m = np.arange(1, N + 1)
    idx = m[:, None] - grid.taps[None, :] - lo
    return s[idx]


def fim_toeplitz(lags, cfg, L):
    """Large-``N`` FIM: symmetric Toeplitz with first row ``(N/sigma_w2) R_x[0..L-1]``."""
    lags = np.real(np.asarray(lags, dtype=complex))
    if len(lags) < L:
        raise RangeError(f"need {L} lags, got {len(lags)}")
    return linalg.toeplitz(lags[:L]) * (cfg.N / cfg.sigma_w2)


def crb_trace(J):
    """``tr(J^-1)`` for a symmetric positive definite ``J``."""
    J = np.asarray(J)
    try:
        c = linalg.cholesky(J, lower=True)
    except linalg.LinAlgError:
        lam = float(np.linalg.eigvalsh(J).min())
        raise ConditioningError(
            f"FIM is not positive definite (min eigenvalue {lam:.3e})", lam) from None
    ci = linalg.solve_triangular(c, np.eye(len(J)), lower=True)
    if not np.all(np.isfinite(ci)):
        lam = float(np.linalg.eigvalsh(J).min())
        raise ConditioningError("FIM is numerically singular", lam)
    # tr(J^-1) = ||C^-1||_F^2 for J = C C^H
    return float(np.sum(np.abs(ci) ** 2))


def asymptotic_per_tap_crb(psd, cfg):
    """``Ts (sigma_w2/N) int_{-fs/2}^{fs/2} df / S_x(f)``: the large-``L``
    limit of ``tr(J^-1)/L`` for pilot spectrum ``psd``."""
    fs = cfg.fs
    probe = np.linspace(-fs / 2, fs / 2, 1025)
    vals = np.asarray([psd(f) for f in probe], dtype=float)
    if np.any(~(vals > 0)):
        bad = probe[np.argmin(vals)]
        raise DomainError(f"pilot spectrum is not positive (S({bad:g}) = {vals.min():g})")

    def inv(f):
        v = psd(f)
        if not v > 0:
            raise DomainError(f"pilot spectrum is not positive at f={f:g}")
        return 1.0 / v

    val, _ = integrate.quad(inv, -fs / 2, fs / 2, epsrel=1e-10, epsabs=0, limit=500)
    return cfg.Ts * cfg.sigma_w2 / cfg.N * val


def crb_beta(L, cfg):
    """``L / (N SNR)``."""
    if L < 1:
        raise ValueError("L must be at least 1")
    return L / (cfg.N * cfg.snr)


# -- BCRB side --------------------------------------------------------------

def bcrb_trace(Rh, cfg):
    """``tr((N SNR I + R_h^-1)^-1)`` from the eigenvalues of ``R_h``.

    Written as ``sum lambda / (N SNR lambda + 1)`` so zero eigenvalues drop out.
    """
    lam = _eigenvalues(Rh)
    a = cfg.N * cfg.snr
    return float(np.sum(lam / (a * lam + 1.0)))


def bcrb_direct(Rh, cfg):
    """Same quantity by a linear solve, ``tr(R_h (I + N SNR R_h)^-1)``.

    Independent of the eigendecomposition; valid for singular ``R_h``.
    """
    R = Rh.matrix if hasattr(Rh, "matrix") else np.asarray(Rh)
    a = cfg.N * cfg.snr
    M = np.eye(len(R)) + a * R
    return float(np.trace(linalg.solve(M, R, assume_a="her")).real)


def _eigenvalues(Rh):
    if hasattr(Rh, "eigenvalues"):
        return np.asarray(Rh.eigenvalues)
    lam = np.linalg.eigvalsh(np.asarray(Rh))
    return np.where(lam < 0, 0.0, lam)


def bcrb_taylor_check(Rh, cfg, terms):
    """Partial sum, through order ``terms``, of the Neumann series

        tr(J_B^-1) = (1/(N SNR)) sum_k tr((-R_h^-1 / (N SNR))^k)

    with each trace taken in the eigenbasis.  Requires every eigenvalue of
    ``R_h`` to exceed ``1/(N SNR)``.
    """
    if terms < 0:
        raise ValueError("terms must be nonnegative")
    lam = _eigenvalues(Rh)
    a = cfg.N * cfg.snr
    bad = np.flatnonzero(~(lam > 1.0 / a))
    if bad.size:
        i = int(bad[0])
        raise DomainError(
            f"series diverges: eigenvalue lambda_{i + 1} = {lam[i]:.3e} "
            f"is not above 1/(N SNR) = {1.0 / a:.3e}")
    ratio = -1.0 / (a * lam)
    k = np.arange(terms + 1)[:, None]
    return float(np.sum(ratio[None, :] ** k) / a)


def bcrb_wideband(L, cfg, Ph0):
    """``L / (N SNR + 2B / P_h(0))``."""
    if not Ph0 > 0:
        raise ValueError("Ph0 must be positive")
    return L / (cfg.N * cfg.snr + 2.0 * cfg.B / Ph0)


# -- curves -----------------------------------------------------------------

@dataclass
class BoundCurve:
    """Per-SNR bound values; every array is indexed like ``snr_db``."""

    snr_db: np.ndarray
    beta: np.ndarray
    bcrb_exact: np.ndarray
    bcrb_eigen: np.ndarray
    bcrb_wideband: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def snr(self):
        return db_to_linear(self.snr_db)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["snr_db", "beta", "bcrb", "bcrb_wideband"])
        for row in zip(self.snr_db, self.beta, self.bcrb_eigen, self.bcrb_wideband):
            w.writerow([f"{v:.12g}" for v in row])
        return buf.getvalue()

    def to_json(self):
        return json.dumps({
            "meta": self.meta,
            "rows": [
                {"snr_db": float(s), "beta": float(b), "bcrb": float(e),
                 "bcrb_exact": float(x), "bcrb_wideband": float(w)}
                for s, b, e, x, w in zip(self.snr_db, self.beta, self.bcrb_eigen,
                                         self.bcrb_exact, self.bcrb_wideband)
            ],
        })


def bound_curve(Rh, snr_db, N, Ph0=None, Px=1.0):
    """Evaluate every bound over ``snr_db`` for the covariance ``Rh``.

    ``Ph0`` (the PDP peak) enables the wideband column; without it that
    column is NaN.
    """
    grid = Rh.grid
    snr_db = np.atleast_1d(np.asarray(snr_db, dtype=float))
    L = grid.L
    rows = []
    for s in snr_db:
        cfg = SoundingConfig.from_snr_db(N, s, Px, grid.bandwidth)
        rows.append((
            crb_beta(L, cfg),
            bcrb_direct(Rh, cfg),
            bcrb_trace(Rh, cfg),
            bcrb_wideband(L, cfg, Ph0) if Ph0 else math.nan,
        ))
    beta, exact, eigen, wide = (np.array(c) for c in zip(*rows))
    meta = {"L1": grid.L1, "L2": grid.L2, "B": grid.bandwidth, "N": N, "Px": Px}
    return BoundCurve(snr_db, beta, exact, eigen, wide, meta)
