import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import oracles
from tdlbounds import (CalibrationError, PdpKind, PdpSpec, UnsupportedOperationError,
                       calibrate_te, channel_autocorr, pdp_value)
from tdlbounds.pdp import te_std

KINDS = ("exponential", "gaussian", "uniform", "trunc_exponential")


def _moments(spec):
    if spec.kind is PdpKind.TRUNC_EXPONENTIAL:
        a, b = 0.0, spec.tau_m
    else:
        a, b = (spec.tau_ds * v for v in oracles.support(spec.kind.value))
    m = []
    for k in range(3):
        g = lambda t: t**k * pdp_value(spec, t)
        cuts = [a, 0.0, b] if a < 0 else [a, b]  # split so odd moments are not cancelled
        v = sum(integrate.quad(g, lo, hi, epsabs=0, epsrel=1e-12, limit=400)[0]
                for lo, hi in zip(cuts[:-1], cuts[1:]))
        if spec.kind is PdpKind.EXPONENTIAL:
            v += integrate.quad(g, b, np.inf, epsabs=0, epsrel=1e-10)[0]
        m.append(v)
    return m


class TestDensity:
    def test_exponential_peak(self):
        assert pdp_value(PdpSpec("exponential"), 0.0) == 1.0

    def test_uniform_outside_support(self):
        assert pdp_value(PdpSpec("uniform"), -0.1) == 0.0

    def test_gaussian_peak(self):
        assert pdp_value(PdpSpec("gaussian"), 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)

    def test_delta_has_no_density(self):
        with pytest.raises(UnsupportedOperationError):
            pdp_value(PdpSpec("delta"), 0.0)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("tau_ds", [1.0, 2.5e-7])
    def test_unit_mass_and_std(self, kind, tau_ds):
        spec = PdpSpec(kind, tau_ds)
        m0, m1, m2 = _moments(spec)
        assert m0 == pytest.approx(1.0, abs=1e-9)
        std = math.sqrt(m2 / m0 - (m1 / m0) ** 2)
        assert std == pytest.approx(tau_ds, rel=1e-6)

    def test_json_round_trip(self):
        spec = PdpSpec.from_json({"kind": "trunc_exponential", "tau_ds": 1.0, "tau_m": 5.0})
        assert spec.tau_0 == pytest.approx(calibrate_te(1.0, 5.0))
        again = PdpSpec.from_json({k: v for k, v in spec.to_json().items() if k != "tau_0"})
        assert again == spec

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown PDP kind"):
            PdpSpec("rayleigh")

    def test_te_default_span(self):
        assert PdpSpec("trunc_exponential", 2.0).tau_m == 12.0


class TestAutocorr:
    @pytest.mark.parametrize("kind", KINDS + ("delta",))
    def test_unit_at_zero(self, kind):
        assert channel_autocorr(PdpSpec(kind), 0.0) == pytest.approx(1.0 + 0j, abs=1e-15)

    def test_exponential_value(self):
        # frozen from oracles.fourier_quad: 0.49999999999999967 + 0.5j
        assert channel_autocorr(PdpSpec("exponential"), 1 / (2 * math.pi)) == pytest.approx(0.5 + 0.5j, abs=1e-14)

    def test_gaussian_value(self):
        # oracles.fourier_quad gives 2.675288018894051e-09 (quadrature accurate to ~3e-17 abs)
        v = channel_autocorr(PdpSpec("gaussian"), 1.0)
        assert v.real == pytest.approx(2.675288018894051e-09, abs=1e-16)
        assert v == pytest.approx(math.exp(-2 * math.pi**2), rel=1e-14)

    def test_delta_is_one(self):
        f = np.linspace(-50, 50, 11)
        np.testing.assert_array_equal(channel_autocorr(PdpSpec("delta"), f), np.ones(11))

    @pytest.mark.parametrize("kind", KINDS)
    def test_matches_quadrature(self, kind):
        spec = PdpSpec(kind)
        f = np.linspace(-20, 20, 81)
        got = channel_autocorr(spec, f)
        want = np.array([oracles.fourier_quad(kind, fi, spec.tau_m, spec.tau_0) for fi in f])
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-8)

    @pytest.mark.parametrize("kind", KINDS)
    @settings(max_examples=60, deadline=None)
    @given(f=st.floats(-1e3, 1e3, allow_nan=False))
    def test_hermitian_and_bounded(self, kind, f):
        spec = PdpSpec(kind)
        a, b = channel_autocorr(spec, f), channel_autocorr(spec, -f)
        assert a == pytest.approx(np.conj(b), abs=1e-14)
        assert abs(a) <= 1 + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(f=st.floats(-5, 5, allow_nan=False), s=st.floats(0.01, 10))
    def test_gaussian_real_positive(self, f, s):
        v = channel_autocorr(PdpSpec("gaussian", s), f)
        assert v.imag == 0 and v.real >= 0


class TestCalibration:
    def test_long_span_recovers_exponential(self):
        assert calibrate_te(1.0, 1000.0) == pytest.approx(1.0, rel=1e-12)

    def test_uniform_limit_is_infeasible(self):
        with pytest.raises(CalibrationError, match="sqrt\\(12\\)"):
            calibrate_te(1.0, math.sqrt(12))

    def test_below_uniform_limit(self):
        with pytest.raises(CalibrationError):
            calibrate_te(1.0, 2.0)

    def test_near_singular_reported(self):
        with pytest.raises(CalibrationError):
            calibrate_te(1.0, math.sqrt(12) * (1 + 1e-12))

    def test_span_five(self):
        # frozen from oracles.te_scan(1.0, 5.0)
        assert calibrate_te(1.0, 5.0) == pytest.approx(1.1593271916432597, rel=1e-9)

    @pytest.mark.parametrize("tau_m", [3.5, 4.0, 6.0, 10.0, 40.0])
    def test_std_residual(self, tau_m):
        t0 = calibrate_te(1.0, tau_m)
        assert te_std(t0, tau_m) == pytest.approx(1.0, rel=1e-10)
        assert oracles.te_std_quad(t0, tau_m) == pytest.approx(1.0, rel=1e-9)

    def test_scales_with_delay_spread(self):
        assert calibrate_te(3e-6, 18e-6) == pytest.approx(3e-6 * calibrate_te(1.0, 6.0), rel=1e-9)
