"""
How many taps does a bandlimited channel need?
==============================================

Sample a multipath channel at ``2B`` and every delay spreads over the
neighbouring taps through a sinc.  Here we count the taps needed to keep 90%
of the channel energy for four delay profiles at two bandwidths.
"""

import time

import numpy as np

from tdlbounds import PdpSpec, min_window, tap_energies

# times are in units of the rms delay spread, so B is B * tau_ds
kinds = ["exponential", "gaussian", "uniform", "trunc_exponential"]

# %%
# Tap energies at B = 1: the exponential profile peaks at tap 0 and decays,
# the Gaussian one is centred on zero delay and so spreads both ways
taps = np.arange(-4, 9)
for kind in kinds:
    e = tap_energies(PdpSpec(kind), 1.0, taps)
    print(f"{kind:>18}", " ".join(f"{v:.3f}" for v in e))

# %%
# Energy over all taps sums to one, but the sinc tails converge slowly
spec = PdpSpec("exponential")
for K in (10, 40, 160):
    print(K, tap_energies(spec, 1.0, np.arange(-K, K + 1)).sum())

# %%
# Minimal windows (L1, L2), i.e. taps -L1..L2, holding 90% of the energy
for B in (1.0, 10.0):
    t0 = time.perf_counter()
    row = {k: min_window(PdpSpec(k), B, threshold=0.9) for k in kinds}
    print(f"B={B:g}:", row, f"({time.perf_counter() - t0:.1f} s)")

# %%
# A single-path channel needs only tap 0 once the window may be one-sided
print(min_window(PdpSpec("delta"), 1.0, threshold=0.999, min_side=0))
