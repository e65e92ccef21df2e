"""
Pilot spectra and the CRB
=========================

For long observations the Fisher information of the tap vector becomes a
Toeplitz matrix built from the pilot autocorrelation, and the per-tap
bound tends to an integral of ``1 / S_x(f)``.  A flat spectrum minimises
that integral for a given power.
"""

import math

import numpy as np

from tdlbounds import (SoundingConfig, TapGrid, asymptotic_per_tap_crb, crb_trace,
                       fim_from_pilot, fim_toeplitz, folded_psd, gen_pilot, pilot_for_window,
                       sample_autocorr)

# %%
# Constant-modulus and Gaussian pilots are white: lag 0 carries the power
for kind in ("constant_modulus", "gaussian_white"):
    x = gen_pilot(kind, 100_000, Px=1.0, seed=1)
    r = sample_autocorr(x, 4)
    print(kind, np.round(np.abs(r), 4))

# %%
# ... and their folded spectrum is flat
f = np.linspace(-0.5, 0.5, 5)
print(folded_psd(sample_autocorr(gen_pilot("gaussian_white", 100_000, seed=2), 8), f, fs=1.0))

# %%
# Finite-sample FIM against its Toeplitz approximation
grid = TapGrid(1.0, 3, 6)
cfg = SoundingConfig(20_000)
x = pilot_for_window("gaussian_white", cfg.N, grid, seed=3)
J = fim_from_pilot(x, grid, cfg)
T = fim_toeplitz(sample_autocorr(x, grid.L - 1), cfg, grid.L)
print("max |J - T| / diag:", np.abs(J - T).max() / J[0, 0])

# %%
# Colouring the spectrum costs accuracy: S(f) = 1 + a cos(2 pi f / fs)
cfg = SoundingConfig(100)
for a in (0.0, 0.25, 0.5, 0.9):
    v = asymptotic_per_tap_crb(lambda f: 1 + a * math.cos(2 * math.pi * f / cfg.fs), cfg)
    print(f"a={a:<4} per-tap bound x N SNR = {v * cfg.N * cfg.snr:.4f}")

# %%
# The Toeplitz trace per tap converges to that integral as L grows
lim = asymptotic_per_tap_crb(lambda f: 1 + 0.5 * math.cos(2 * math.pi * f / cfg.fs), cfg)
for L in (8, 64, 512):
    lags = np.zeros(L)
    lags[:2] = [1.0, 0.25]
    print(L, crb_trace(fim_toeplitz(lags, cfg, L)) / L / lim)
