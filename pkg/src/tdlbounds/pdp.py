"""Power delay profiles and their channel autocorrelation functions.

All four physical profiles are parameterised by the rms delay spread
``tau_ds``, read as the standard deviation of the delay density.  The
truncated exponential additionally needs the maximum delay ``tau_m``; its
decay constant ``tau_0`` is calibrated so that its standard deviation is
``tau_ds`` as well.

``channel_autocorr`` uses the ``exp(+j 2 pi f tau)`` kernel:

    R_H(f) = integral P_h(tau) exp(+j 2 pi f tau) dtau
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import CalibrationError, UnsupportedOperationError

SQRT12 = math.sqrt(12.0)
DEFAULT_TE_SPAN = 6.0


class PdpKind(str, enum.Enum):
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    TRUNC_EXPONENTIAL = "trunc_exponential"
    DELTA = "delta"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"e": "exponential", "g": "gaussian", "u": "uniform",
                   "te": "trunc_exponential", "deltatest": "delta",
                   "delta_test": "delta"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown PDP kind {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class PdpSpec:
    """A power delay profile.

    Parameters
    ----------
    kind : PdpKind or str
    tau_ds : float
        rms delay spread in seconds.
    tau_m : float, optional
        Maximum delay of the truncated exponential; defaults to
        ``6 * tau_ds``.  Ignored by the other kinds.

    ``tau_0`` is filled in by calibration for the truncated exponential and
    is ``None`` otherwise.
    """

    kind: PdpKind
    tau_ds: float = 1.0
    tau_m: Optional[float] = None
    tau_0: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        kind = PdpKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if not self.tau_ds > 0:
            raise ValueError(f"tau_ds must be positive, got {self.tau_ds}")
        object.__setattr__(self, "tau_ds", float(self.tau_ds))
        if kind is PdpKind.TRUNC_EXPONENTIAL:
            tau_m = DEFAULT_TE_SPAN * self.tau_ds if self.tau_m is None else float(self.tau_m)
            object.__setattr__(self, "tau_m", tau_m)
            if self.tau_0 is None:
                object.__setattr__(self, "tau_0", calibrate_te(self.tau_ds, tau_m))
        else:
            object.__setattr__(self, "tau_m", None)
            object.__setattr__(self, "tau_0", None)

    @classmethod
    def from_json(cls, obj):
        """Build from ``{"kind": ..., "tau_ds": ..., "tau_m": ...}``."""
        if isinstance(obj, str):
            return cls(obj)
        unknown = set(obj) - {"kind", "tau_ds", "tau_m"}
        if unknown:
            raise ValueError(f"unknown PDP field(s): {', '.join(sorted(unknown))}")
        if "kind" not in obj:
            raise ValueError("PDP JSON needs a 'kind' field")
        return cls(obj["kind"], float(obj.get("tau_ds", 1.0)), obj.get("tau_m"))

    def to_json(self):
        out = {"kind": self.kind.value, "tau_ds": self.tau_ds}
        if self.kind is PdpKind.TRUNC_EXPONENTIAL:
            out["tau_m"] = self.tau_m
            out["tau_0"] = self.tau_0
        return out

    @property
    def uniform_width(self):
        return self.tau_ds * SQRT12

    @property
    def delay_extent(self):
        """Delay scale over which ``R_H`` varies; sizes quadrature panels."""
        k = self.kind
        if k is PdpKind.DELTA:
            return 0.0
        if k is PdpKind.UNIFORM:
            return self.uniform_width
        if k is PdpKind.TRUNC_EXPONENTIAL:
            return max(self.tau_m, 2 * math.pi * self.tau_ds)
        return 2 * math.pi * self.tau_ds


def pdp_value(spec, tau):
    """Delay density ``P_h(tau)`` in 1/seconds (vectorised over ``tau``)."""
    tau = np.asarray(tau, dtype=float)
    k = spec.kind
    s = spec.tau_ds
    if k is PdpKind.DELTA:
        raise UnsupportedOperationError("the delta profile has no pointwise density")
    if k is PdpKind.EXPONENTIAL:
        out = np.where(tau >= 0, np.exp(-np.maximum(tau, 0.0) / s) / s, 0.0)
    elif k is PdpKind.GAUSSIAN:
        out = np.exp(-tau**2 / (2 * s * s)) / (s * math.sqrt(2 * math.pi))
    elif k is PdpKind.UNIFORM:
        width = spec.uniform_width
        out = np.where((tau >= 0) & (tau < width), 1.0 / width, 0.0)
    else:
        t0, tm = spec.tau_0, spec.tau_m
        norm = -t0 * math.expm1(-tm / t0)
        inside = (tau >= 0) & (tau < tm)
        out = np.where(inside, np.exp(-np.clip(tau, 0.0, tm) / t0) / norm, 0.0)
    return out if out.ndim else float(out)


def channel_autocorr(spec, f):
    """Channel autocorrelation ``R_H(f)`` (vectorised over ``f``)."""
    f = np.asarray(f, dtype=float)
    k = spec.kind
    s = spec.tau_ds
    w = 2j * np.pi * f
    if k is PdpKind.DELTA:
        out = np.ones_like(f, dtype=complex)
    elif k is PdpKind.EXPONENTIAL:
        out = 1.0 / (1.0 - w * s)
    elif k is PdpKind.GAUSSIAN:
        out = np.exp(-2 * np.pi**2 * f**2 * s * s).astype(complex)
    elif k is PdpKind.UNIFORM:
        width = spec.uniform_width
        out = np.exp(1j * np.pi * f * width) * np.sinc(f * width)
    else:
        t0, tm = spec.tau_0, spec.tau_m
        a = 1.0 / t0 - w
        out = -np.expm1(-a * tm) / (a * t0 * -math.expm1(-tm / t0))
    return out if out.ndim else complex(out)


def pdp_peak(spec):
    """``P_h(0)``, the density at zero delay."""
    return float(pdp_value(spec, 0.0))


def _sinhc_minus_one(x):
    # sinh(x)/x - 1 without cancellation for small x
    if x < 0.1:
        x2 = x * x
        return x2 / 6 * (1 + x2 / 20 * (1 + x2 / 42 * (1 + x2 / 72)))
    return math.sinh(x) / x - 1.0


def te_std(tau_0, tau_m):
    """Standard deviation of the exponential density of scale ``tau_0``
    truncated to ``[0, tau_m]``."""
    half = 0.5 * tau_m / tau_0
    if half > 350:
        return tau_0
    g = _sinhc_minus_one(half)
    g = g * (g + 2.0)  # (sinh(x)/x)^2 - 1
    return tau_0 * math.sqrt(g / (1.0 + g))


def calibrate_te(tau_ds, tau_m):
    """Decay constant ``tau_0`` giving the truncated exponential on
    ``[0, tau_m]`` a standard deviation of ``tau_ds``.

    The standard deviation grows monotonically from 0 (``tau_0 -> 0``) to the
    uniform limit ``tau_m / sqrt(12)`` (``tau_0 -> inf``), so a solution exists
    only for ``tau_m > sqrt(12) * tau_ds``.
    """
    if not (tau_ds > 0 and tau_m > 0):
        raise CalibrationError("tau_ds and tau_m must be positive")
    ceiling = tau_m / SQRT12
    if not ceiling > tau_ds * (1 + 1e-9):
        raise CalibrationError(
            f"truncated exponential cannot reach std {tau_ds:g} with tau_m={tau_m:g}; "
            f"need tau_m > sqrt(12)*tau_ds = {SQRT12 * tau_ds:.12g}")

    def resid(log_t0):
        return te_std(math.exp(log_t0), tau_m) / tau_ds - 1.0

    lo = math.log(tau_ds)
    hi = lo + 1.0
    while resid(hi) < 0:
        hi += 2.0
        if hi - lo > 60:
            raise CalibrationError(
                f"tau_m={tau_m:g} is too close to the uniform limit sqrt(12)*tau_ds; "
                "calibration is near-singular")
    log_t0 = optimize.brentq(resid, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    t0 = math.exp(log_t0)
    if abs(resid(log_t0)) > 1e-10:
        raise CalibrationError(f"calibration residual {resid(log_t0):.3e} exceeds 1e-10")
    return t0
