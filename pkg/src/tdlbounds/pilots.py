"""Channel-sounding pilot sequences, their sample autocorrelation and the
folded power spectrum of the sample sequence.

Samples are addressed by their time index ``n``; ``PilotSequence.first``
is the index of ``samples[0]``.  The convolution model

    y_n = sum_{l=-L1}^{L2} h_l x_{n-l} + w_n,    n = 1..N

reads ``x_n`` for ``n`` in ``[1 - L2, N + L1]``, which is what
:func:`pilot_for_window` generates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, RangeError


class PilotKind(str, enum.Enum):
    CONSTANT_MODULUS = "constant_modulus"
    GAUSSIAN_WHITE = "gaussian_white"
    ZADOFF_CHU = "zadoff_chu"
    EXTERNAL = "external"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"cm": "constant_modulus", "random_phase": "constant_modulus",
                   "gaussian": "gaussian_white", "white": "gaussian_white",
                   "zc": "zadoff_chu"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True, eq=False)
class PilotSequence:
    samples: np.ndarray
    Px: float
    fs: float = 1.0
    kind: PilotKind = PilotKind.EXTERNAL
    first: int = 1

    @property
    def last(self):
        return self.first + len(self.samples) - 1

    def __len__(self):
        return len(self.samples)

    def covers(self, lo, hi):
        return self.first <= lo and hi <= self.last

    def window(self, lo, hi):
        """Samples ``x_lo .. x_hi`` inclusive."""
        if not self.covers(lo, hi):
            raise RangeError(
                f"pilot covers n in [{self.first}, {self.last}], need [{lo}, {hi}]")
        return self.samples[lo - self.first: hi - self.first + 1]

    def mean_power(self):
        return float(np.mean(np.abs(self.samples) ** 2))


def rng_for(seed, *stream):
    """Counter-based generator for substream ``stream`` of ``seed``.

    Each (seed, stream) pair maps to its own Philox key, so draws do not
    depend on which other substreams were used or in what order.
    """
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def zadoff_chu(length, period=None, root=1):
    """Unit-modulus Zadoff-Chu sequence of the given ``period``, repeated
    cyclically to ``length`` samples.  Its periodic autocorrelation vanishes
    at every nonzero lag."""
    period = length if period is None else int(period)
    if period < 1:
        raise ValueError("period must be positive")
    if np.gcd(root, period) != 1:
        raise ValueError(f"root {root} must be coprime with period {period}")
    n = np.arange(length) % period
    return np.exp(-1j * np.pi * root * n * (n + period % 2) / period)


def gen_pilot(kind, length_needed, Px=1.0, seed=0, *, fs=1.0, first=1, period=None):
    """Generate ``length_needed`` pilot samples starting at index ``first``.

    ``constant_modulus`` draws phases uniformly on ``[0, 2 pi)`` with
    ``|x_n|^2 = Px``; ``gaussian_white`` draws circular complex normal
    samples of variance ``Px``; ``zadoff_chu`` is deterministic (``seed`` is
    unused) and periodic with ``period`` (default: the length).
    """
    kind = PilotKind.parse(kind)
    if length_needed < 1:
        raise ValueError("length_needed must be at least 1")
    if not Px > 0:
        raise ValueError("Px must be positive")
    amp = np.sqrt(Px)
    if kind is PilotKind.CONSTANT_MODULUS:
        phase = 2 * np.pi * rng_for(seed).random(length_needed)
        x = amp * np.exp(1j * phase)
    elif kind is PilotKind.GAUSSIAN_WHITE:
        z = rng_for(seed).standard_normal((length_needed, 2))
        x = amp * (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2)
    elif kind is PilotKind.ZADOFF_CHU:
        # phase origin at n = 1 keeps the sequence the same whatever ``first`` is
        n0 = (first - 1) % (period or length_needed)
        seq = zadoff_chu(n0 + length_needed, period or length_needed)
        x = amp * seq[n0:]
    else:
        raise ValueError("external pilots are loaded with read_pilot_csv")
    return PilotSequence(x, float(Px), float(fs), kind, int(first))


def pilot_for_window(kind, N, grid, Px=1.0, seed=0):
    """Pilot covering every sample the ``N``-row convolution model reads.

    Zadoff-Chu pilots get period ``N`` so the shifted columns of the
    convolution matrix are exactly orthogonal.
    """
    kind = PilotKind.parse(kind)
    first = 1 - grid.L2
    length = N + grid.L1 + grid.L2
    period = N if kind is PilotKind.ZADOFF_CHU else None
    return gen_pilot(kind, length, Px, seed, fs=2 * grid.bandwidth, first=first, period=period)


def read_pilot_csv(path, Px=None, fs=1.0, first=1):
    """Load an external pilot: one ``re,im`` pair per line.  ``Px`` defaults to
    the empirical mean power."""
    data = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns 're,im', got {data.shape[1]}")
    x = data[:, 0] + 1j * data[:, 1]
    px = float(np.mean(np.abs(x) ** 2)) if Px is None else float(Px)
    return PilotSequence(x, px, float(fs), PilotKind.EXTERNAL, int(first))


def write_pilot_csv(path, pilot):
    np.savetxt(path, np.column_stack([pilot.samples.real, pilot.samples.imag]),
               delimiter=",", fmt="%.17g")


def sample_autocorr(x, maxlag):
    """``R[k] = (1/M) sum_m x_m^* x_{m+k}`` over the ``M = len - k`` valid
    products, for ``k = 0..maxlag``."""
    s = x.samples if isinstance(x, PilotSequence) else np.asarray(x, dtype=complex)
    n = len(s)
    if maxlag < 0 or not maxlag < n / 2:
        raise RangeError(f"maxlag must be in [0, {n / 2}), got {maxlag}")
    out = np.empty(maxlag + 1, dtype=complex)
    for k in range(maxlag + 1):
        out[k] = np.vdot(s[: n - k], s[k:]) / (n - k)
    return out


def folded_psd(lags, f, fs, two_sided=False):
    """Truncated DTFT of the lag sequence, ``sum_k R[k] exp(-j 2 pi f k / fs)``.

    By default ``lags`` is one-sided, ``R[0..K]``, with the negative lags
    implied by Hermitian symmetry.  With ``two_sided=True`` it is the explicit
    odd-length array ``R[-K..K]`` and is checked for Hermitian symmetry.
    """
    lags = np.asarray(lags, dtype=complex)
    f = np.asarray(f, dtype=float)
    if lags.ndim != 1 or len(lags) == 0:
        raise ContractViolationError("lag sequence must be a nonempty 1D array")
    if np.any(np.abs(f) > fs / 2 * (1 + 1e-12)):
        raise RangeError("frequency outside [-fs/2, fs/2]")
    scale = max(float(np.abs(lags).max()), 1e-300)
    if two_sided:
        if len(lags) % 2 != 1:
            raise ContractViolationError("two-sided lag sequence must have odd length")
        if np.abs(lags - np.conj(lags[::-1])).max() > 1e-12 * scale:
            raise ContractViolationError("lag sequence is not Hermitian symmetric")
        full = lags
    else:
        if abs(lags[0].imag) > 1e-12 * scale:
            raise ContractViolationError("lag 0 must be real")
        full = np.concatenate([np.conj(lags[:0:-1]), lags])
    K = (len(full) - 1) // 2
    k = np.arange(-K, K + 1)
    val = np.exp(-2j * np.pi * np.multiply.outer(f, k) / fs) @ full
    if np.max(np.abs(np.imag(val)), initial=0.0) > 1e-9 * max(np.abs(full).sum(), 1.0):
        raise ContractViolationError("DTFT is not real; lag sequence is not Hermitian")
    out = np.real(val)
    return out if out.ndim else float(out)
