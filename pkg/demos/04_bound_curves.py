"""
CRB and Bayesian CRB versus SNR
===============================

Treating the taps as deterministic unknowns gives ``beta = L / (N SNR)``,
the same for every channel.  A Rayleigh prior with covariance ``R_h`` gives
the Bayesian bound ``sum lambda / (N SNR lambda + 1)``, which saturates at
the channel energy at low SNR and joins ``beta`` at high SNR.
"""

import numpy as np

from tdlbounds import PdpSpec, TapGrid, bound_curve, build_covariance, pdp_peak

snr_db = np.arange(-20, 41, 10)
N = 100
kinds = ["exponential", "gaussian", "uniform", "trunc_exponential"]

# %%
# Windows large enough for every profile in the 90% table
for B, window in ((1.0, (3, 6)), (10.0, (33, 63))):
    print(f"B={B:g}, window {window}")
    for kind in kinds:
        spec = PdpSpec(kind)
        R = build_covariance(spec, TapGrid(B, *window))
        curve = bound_curve(R, snr_db, N, Ph0=pdp_peak(spec))
        print(f"  {kind:>18} bcrb:", " ".join(f"{v:.2e}" for v in curve.bcrb_eigen))
    print(f"  {'beta':>18}     :", " ".join(f"{v:.2e}" for v in curve.beta))

# %%
# The wideband closed form replaces R_h by a diagonal built from the
# profile peak; compare it with the exact value
spec = PdpSpec("exponential")
R = build_covariance(spec, TapGrid(10.0, 33, 63))
curve = bound_curve(R, snr_db, N, Ph0=pdp_peak(spec))
print(curve.to_csv())

# %%
# The low-SNR floor is the captured energy
print("trace R_h:", R.total_energy, " bcrb at -120 dB:",
      bound_curve(R, [-120], N).bcrb_eigen[0])
