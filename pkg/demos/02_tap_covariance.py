"""
Tap covariance and the wideband approximation
=============================================

The taps of a bandlimited channel are correlated: the sinc pulses of
nearby taps overlap in delay.  When the bandwidth is large compared with
the coherence bandwidth, the correlation fades and each tap's energy
approaches ``P_h(l / 2B) / 2B``.  This script looks at how good that
picture is.
"""

import numpy as np

from tdlbounds import PdpSpec, TapGrid, build_covariance, wideband_tap_energy

np.set_printoptions(precision=4, suppress=True, linewidth=110)

# %%
# Narrowband (B = 1): strong correlation between neighbouring taps
R = build_covariance(PdpSpec("exponential"), TapGrid(1.0, 1, 5))
print(np.abs(R.matrix))
print("eigenvalues:", R.eigenvalues)
print("trace:", R.total_energy)

# %%
# Wideband (B = 10): the diagonal follows the sampled profile, except at a
# jump in the profile (tap 0 here), where the tap sits half on each side
spec = PdpSpec("exponential")
R = build_covariance(spec, TapGrid(10.0, 5, 30))
wide = wideband_tap_energy(spec, 10.0, R.grid.taps)
for l, e, w in zip(R.grid.taps[:12], R.diagonal[:12], wide[:12]):
    print(f"{l:4d} {e:.5f} {w:.5f}")
off = np.abs(R.matrix - np.diag(np.diag(R.matrix))).max()
print("largest off-diagonal / largest diagonal:", off / R.diagonal.max())

# %%
# A smooth profile has no jump, and the approximation holds everywhere
spec = PdpSpec("gaussian")
R = build_covariance(spec, TapGrid(10.0, 33, 33))
err = np.abs(R.diagonal - wideband_tap_energy(spec, 10.0, R.grid.taps)).max()
print("gaussian max error / max energy:", err / R.diagonal.max())

# %%
# The matrix is available as CSV for external tools
print(build_covariance(PdpSpec("uniform"), TapGrid(1.0, 0, 1)).to_csv())
