"""Performance bounds for pilot-based estimation of bandlimited
frequency-selective channels under a tapped-delay-line model."""

__version__ = "0.1.0"

from .bounds import (BoundCurve, SoundingConfig, asymptotic_per_tap_crb, bcrb_direct,
                     bcrb_taylor_check, bcrb_trace, bcrb_wideband, bound_curve, crb_beta,
                     crb_trace, fim_from_pilot, fim_toeplitz)
from .covariance import (TapCovariance, TapGrid, build_covariance, min_window,
                         tap_cross_covariance, tap_energies, tap_energy, wideband_tap_energy)
from .errors import (CalibrationError, ConditioningError, ContractViolationError, DomainError,
                     QuadratureAccuracyError, RangeError, TdlBoundsError,
                     UnsupportedOperationError)
from .montecarlo import (SimResult, TrialConfig, build_convolution_matrix, draw_channel,
                         ls_estimate, ls_theoretical_mse, mmse_estimate, mmse_theoretical_mse,
                         run_trials, synthesize_observation)
from .pdp import PdpKind, PdpSpec, calibrate_te, channel_autocorr, pdp_peak, pdp_value
from .pilots import (PilotKind, PilotSequence, folded_psd, gen_pilot, pilot_for_window,
                     read_pilot_csv, sample_autocorr, write_pilot_csv)
