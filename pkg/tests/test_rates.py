import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from spdcrate import rates
from spdcrate.beams import rayleigh_range
from spdcrate.errors import FilterTooWide, NonPositiveInput, WrongRegime
from spdcrate.phasematch import pm_bandwidth

from _params import PPKTP, bibo_cfg, ppktp_cfg, ppln_cfg


def _quiet(fn, *a, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*a, **kw)


def _with_L(cfg, L):
    return replace(cfg, L_z=L)


def _with_d(cfg, d):
    return replace(cfg, d_eff=d)


# ------------------------------------------------------------ examples

def test_ppln_type0_table_value():
    r = _quiet(rates.rate_sm_type01, ppln_cfg())
    assert r.per_milliwatt == pytest.approx(94.86e6, rel=5e-3)
    assert r.regime == rates.Regime.SINGLE_MODE


def test_ppktp_type2_table_value():
    r = _quiet(rates.rate_sm_type2, ppktp_cfg())
    assert r.per_milliwatt == pytest.approx(23.58e6, rel=1e-2)


def test_bibo_total_table_value():
    r = rates.rate_total_type1(bibo_cfg())
    assert r.per_milliwatt == pytest.approx(53.87e6, rel=1e-2)
    assert r.regime == rates.Regime.MULTIMODE_TOTAL


@pytest.mark.parametrize("fn, make", [
    (rates.rate_sm_type01, ppln_cfg), (rates.rate_sm_type2, ppktp_cfg), (rates.rate_total_type1, bibo_cfg),
])
def test_zero_power_gives_zero(fn, make):
    r = _quiet(fn, make(power=0.0))
    assert r.pairs_per_second == 0.0


def test_per_milliwatt_independent_of_power():
    a = _quiet(rates.rate_sm_type01, ppln_cfg(power=3e-3))
    b = _quiet(rates.rate_sm_type01, ppln_cfg(power=1e-3))
    assert a.per_milliwatt == pytest.approx(b.per_milliwatt, rel=1e-14)
    assert a.pairs_per_second == pytest.approx(3 * b.pairs_per_second, rel=1e-14)


def test_halving_delta_ng_doubles_type2():
    cfg = ppktp_cfg()
    a = _quiet(rates.rate_sm_type2, cfg).per_milliwatt
    b = _quiet(rates.rate_sm_type2, replace(cfg, delta_ng=cfg.delta_ng / 2)).per_milliwatt
    assert b / a == pytest.approx(2.0, rel=1e-12)


# ------------------------------------------------------------ regimes

def test_type01_rejects_type2():
    with pytest.raises(WrongRegime):
        rates.rate_sm_type01(ppktp_cfg())


def test_type01_needs_kappa():
    with pytest.raises(WrongRegime):
        _quiet(rates.rate_sm_type01, replace(ppln_cfg(), kappa=0.0))


def test_type2_rejects_type0():
    with pytest.raises(WrongRegime):
        rates.rate_sm_type2(ppln_cfg())


def test_type2_needs_delta_ng():
    with pytest.raises(WrongRegime):
        rates.rate_sm_type2(replace(ppktp_cfg(), delta_ng=0.0))


def test_type2_warns_on_small_delta_ng():
    with pytest.warns(UserWarning, match="delta_ng"):
        rates.rate_sm_type2(replace(ppktp_cfg(), delta_ng=5e-3))


def test_collimation_warning():
    with pytest.warns(UserWarning, match="Rayleigh"):
        rates.rate_sm_type01(ppln_cfg(sigma_p=5e-6))


def test_total_rejects_type2():
    with pytest.raises(WrongRegime):
        rates.rate_total_type1(ppktp_cfg())


# ------------------------------------------------------------ scaling

SLOPE_TOL = 1e-6


def _log_slope(fn, cfg, L0):
    L = np.array([L0, 10 * L0])
    r = [_quiet(fn, _with_L(cfg, x)).pairs_per_second for x in L]
    return math.log(r[1] / r[0]) / math.log(10.0)


@pytest.mark.parametrize("fn, make, L0, exponent", [
    (rates.rate_sm_type01, ppln_cfg, 4e-3, 1.5),
    (rates.rate_sm_type2, ppktp_cfg, 2e-3, 1.0),
    (rates.rate_total_type1, bibo_cfg, 1e-4, 0.5),
])
def test_length_exponents(fn, make, L0, exponent):
    assert abs(_log_slope(fn, make(), L0) - exponent) < SLOPE_TOL


def test_narrowband_length_exponent():
    cfg = ppln_cfg()
    bw = 1e-4 * pm_bandwidth(rates.expansion_for(_with_L(cfg, 40e-3)), 40e-3)
    r = [rates.rate_narrowband_filtered(_with_L(cfg, L), bw).pairs_per_second for L in (4e-3, 40e-3)]
    assert abs(math.log10(r[1] / r[0]) - 2.0) < SLOPE_TOL


@pytest.mark.parametrize("fn, make", [
    (rates.rate_sm_type01, ppln_cfg), (rates.rate_sm_type2, ppktp_cfg), (rates.rate_total_type1, bibo_cfg),
])
@settings(max_examples=25, deadline=None)
@given(scale=st.floats(0.1, 10.0))
def test_linear_in_power_and_deff_squared(fn, make, scale):
    cfg = make()
    base = _quiet(fn, cfg).pairs_per_second
    p = _quiet(fn, cfg.with_power(scale * cfg.beam.power)).pairs_per_second
    d = _quiet(fn, _with_d(cfg, scale * cfg.d_eff)).pairs_per_second
    assert abs(math.log(p / base) - math.log(scale)) < SLOPE_TOL * max(1.0, abs(math.log(scale)))
    assert abs(math.log(d / base) - 2 * math.log(scale)) < SLOPE_TOL * max(1.0, abs(math.log(scale)))


@pytest.mark.parametrize("fn, make", [(rates.rate_sm_type01, ppln_cfg), (rates.rate_sm_type2, ppktp_cfg)])
def test_first_order_qpm_factor_exact(fn, make):
    poled = make()
    unpoled = replace(poled, poling=replace(poled.poling, enabled=False))
    ratio = _quiet(fn, poled).pairs_per_second / _quiet(fn, unpoled).pairs_per_second
    assert ratio == pytest.approx(4 / math.pi**2, rel=1e-14)


def test_qpm_not_applied_twice():
    cfg = ppln_cfg()
    folded = replace(cfg, d_eff_includes_qpm=True)
    ratio = _quiet(rates.rate_sm_type01, folded).pairs_per_second / _quiet(rates.rate_sm_type01, cfg).pairs_per_second
    assert ratio == pytest.approx(math.pi**2 / 4, rel=1e-14)


# ------------------------------------------------------------ quadrature oracle

def test_integrand_peak():
    cfg = ppln_cfg()
    wp = cfg.omega_p
    assert rates.rate_integrand(cfg, wp / 2) == pytest.approx(wp**2 / 4, rel=1e-15)


def test_type01_closed_form_matches_quadrature():
    cfg = ppln_cfg()
    closed = _quiet(rates.rate_sm_type01, cfg).pairs_per_second
    quad = rates.rate_sm_quadrature(cfg).pairs_per_second
    assert 0.99 <= quad / closed <= 1.01


def test_type1_bibo_closed_form_matches_quadrature():
    cfg = bibo_cfg(sigma_p=50e-6, sigma_1=50e-6)
    closed = _quiet(rates.rate_sm_type01, cfg).pairs_per_second
    quad = _quiet(rates.rate_sm_quadrature, cfg).pairs_per_second
    assert 0.99 <= quad / closed <= 1.01


def test_type2_closed_form_is_upper_bound_within_seven_percent():
    cfg = ppktp_cfg()
    closed = _quiet(rates.rate_sm_type2, cfg).pairs_per_second
    quad = _quiet(rates.rate_sm_quadrature, cfg).pairs_per_second
    assert 1.0 <= closed / quad <= 1.07


def test_mode_sum_converges_to_quadrature():
    cfg = ppln_cfg()
    quad = rates.rate_sm_quadrature(cfg).pairs_per_second
    bw = pm_bandwidth(rates.expansion_for(cfg), cfg.L_z)
    spacing = bw / 400
    det = np.arange(-400 * 60, 400 * 60 + 1) * spacing
    assert rates.rate_sm_mode_sum(cfg, det, spacing) == pytest.approx(quad, rel=1e-3)


# ------------------------------------------------------------ narrowband

def test_narrowband_linear_in_bandwidth_and_below_full_rate():
    cfg = ppln_cfg()
    natural = pm_bandwidth(rates.expansion_for(cfg), cfg.L_z)
    quad = rates.rate_sm_quadrature(cfg).pairs_per_second
    r1 = rates.rate_narrowband_filtered(cfg, 1e-3 * natural).pairs_per_second
    r2 = rates.rate_narrowband_filtered(cfg, 2e-3 * natural).pairs_per_second
    assert r2 / r1 == pytest.approx(2.0, rel=1e-14)
    for frac in (1e-4, 1e-3, 5e-3, 0.05, 0.1):
        r = _quiet(rates.rate_narrowband_filtered, cfg, frac * natural).pairs_per_second
        assert r < quad


def test_narrowband_independent_of_kappa():
    cfg = ppln_cfg()
    bw = 1e-3 * pm_bandwidth(rates.expansion_for(cfg), cfg.L_z)
    a = rates.rate_narrowband_filtered(cfg, bw).pairs_per_second
    b = rates.rate_narrowband_filtered(replace(cfg, kappa=2 * cfg.kappa), bw).pairs_per_second
    assert a == b


def test_narrowband_filter_too_wide():
    cfg = ppln_cfg()
    natural = pm_bandwidth(rates.expansion_for(cfg), cfg.L_z)
    with pytest.raises(FilterTooWide):
        rates.rate_narrowband_filtered(cfg, 0.2 * natural)
    with pytest.warns(UserWarning):
        rates.rate_narrowband_filtered(cfg, 0.05 * natural)


# ------------------------------------------------------------ multimode ratio

def test_multimode_ratio_at_a_equal_sigma_squared():
    sigma_p, lam, n_p = 50e-6, 800e-9, 2.0
    L = sigma_p**2 * 4 * math.pi * n_p / lam
    r = rates.multimode_ratio(sigma_p, L, lam, n_p)
    assert r.exact == pytest.approx(4 / (1 + math.sqrt(2)) ** 2, rel=1e-12)
    assert r.exact == pytest.approx(0.686, abs=5e-4)


def test_multimode_ratio_thin_crystal_agreement():
    r = rates.multimode_ratio(500e-6, 1e-3, 405e-9, 1.822)
    assert r.thin_crystal < 1e-3
    assert r.exact == pytest.approx(r.thin_crystal, rel=1e-2)


def test_multimode_ratio_tends_to_zero():
    assert rates.multimode_ratio(1e-3, 1e-9, 405e-9, 1.8).exact < 1e-9


def test_multimode_ratio_rejects_nonpositive():
    with pytest.raises(NonPositiveInput):
        rates.multimode_ratio(0.0, 1e-3, 405e-9, 1.8)


@settings(max_examples=60, deadline=None)
@given(sigma=st.floats(20e-6, 500e-6), L=st.floats(0.5e-3, 30e-3), lam=st.floats(350e-9, 1100e-9),
       n=st.floats(1.4, 2.4))
def test_total_exceeds_single_mode(sigma, L, lam, n):
    # both closed forms assume a collimated pump; tight focus makes the single-mode form optimistic
    assume(rayleigh_range(sigma, lam) > L)
    cfg = bibo_cfg(sigma_p=sigma, sigma_1=sigma, lambda_p=lam, L_z=L, n1=n, n2=n, np=n)
    total = rates.rate_total_type1(cfg).pairs_per_second
    sm = _quiet(rates.rate_sm_type01, cfg).pairs_per_second
    assert total >= sm


# ------------------------------------------------------------ focusing and waveguides

def test_focused_factor_limits():
    assert rates.focused_relative_factor(1e-6) / 1e-6 == pytest.approx(1.0, rel=1e-10)
    assert rates.focused_relative_factor(1.0) == pytest.approx(math.pi / 4, rel=1e-15)
    assert rates.focused_relative_factor(1e12) == pytest.approx(math.pi / 2, rel=1e-10)
    with pytest.raises(NonPositiveInput):
        rates.focused_relative_factor(0.0)


def test_waveguide_from_mode_field_diameters():
    bulk = _quiet(rates.rate_sm_type2, ppktp_cfg())
    wg = _quiet(rates.waveguide_rate, ppktp_cfg(sigma_p=1.0, sigma_1=1.0), mfd_pump=4 * PPKTP["sigma_p"],
                mfd_signal=7.5e-6)
    assert wg.per_milliwatt == pytest.approx(bulk.per_milliwatt, rel=1e-12)


def test_waveguide_identity_without_mfd():
    cfg = ppln_cfg()
    assert _quiet(rates.waveguide_rate, cfg) == _quiet(rates.rate_sm_type01, cfg)
