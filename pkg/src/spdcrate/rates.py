"""Absolute pair-generation rates for bulk crystals and waveguides.

Closed forms are the primary results; :func:`rate_sm_quadrature` integrates
the underlying frequency integral numerically and serves as their oracle.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0

from ._numeric import require_positive, sinc
from .beams import BeamConfig, overlap_factor, rayleigh_range, sigma_from_mfd
from .errors import ConfigError, FilterTooWide, QuadratureNonConvergent, WrongRegime
from .phasematch import PhaseMatchExpansion, PolingConfig, expansion_coeffs, pm_bandwidth, qpm_rate_factor

PHI_MULTIMODE = 0.335
MILLIWATT = 1e-3
QUAD_RTOL = 1e-6


class SpdcType(str, enum.Enum):
    TYPE0 = "type0"
    TYPE1 = "type1"
    TYPE2 = "type2"


class Regime(str, enum.Enum):
    SINGLE_MODE = "SingleMode"
    MULTIMODE_TOTAL = "MultiModeTotal"
    NARROW_FILTERED = "NarrowFiltered"
    PEAK_RESONANCE = "PeakResonance"


@dataclass(frozen=True)
class SpdcConfig:
    n1: float
    n2: float
    np: float
    ng1: float
    ng2: float
    d_eff: float
    L_z: float
    beam: BeamConfig
    kappa: float = 0.0
    delta_ng: float | None = None
    poling: PolingConfig = field(default_factory=PolingConfig)
    spdc_type: SpdcType = SpdcType.TYPE0
    degenerate: bool = True
    d_eff_includes_qpm: bool = False
    phi: float = PHI_MULTIMODE

    def __post_init__(self):
        object.__setattr__(self, "spdc_type", SpdcType(self.spdc_type))
        require_positive(d_eff=self.d_eff, L_z=self.L_z, n1=self.n1, n2=self.n2, np=self.np,
                         ng1=self.ng1, ng2=self.ng2, phi=self.phi)
        if self.delta_ng is None:
            object.__setattr__(self, "delta_ng", np.abs(self.ng1 - self.ng2))
        if np.any(np.asarray(self.kappa) < 0):
            raise ConfigError("kappa must be >= 0")

    @property
    def omega_p(self) -> float:
        return self.beam.omega_p

    def with_power(self, power: float) -> "SpdcConfig":
        return replace(self, beam=replace(self.beam, power=power))


@dataclass(frozen=True)
class RateResult:
    pairs_per_second: float
    per_milliwatt: float
    regime: Regime
    provenance: str


def qpm_factor(cfg: SpdcConfig) -> float:
    """Rate multiplier from poling; 1 when disabled or already folded into d_eff."""
    if not cfg.poling.enabled or cfg.d_eff_includes_qpm:
        return 1.0
    return qpm_rate_factor(cfg.poling.order)


def _result(per_watt: float, power: float, regime: Regime, provenance: str) -> RateResult:
    return RateResult(per_watt * power, per_watt * MILLIWATT, regime, provenance)


def _index_factor(cfg: SpdcConfig) -> float:
    return cfg.ng1 * cfg.ng2 / (cfg.n1**2 * cfg.n2**2)


def _check_collimated(cfg: SpdcConfig):
    z_r = rayleigh_range(cfg.beam.sigma_p, cfg.beam.lambda_p)
    if np.any(z_r <= cfg.L_z):
        warnings.warn(f"Rayleigh range {np.min(z_r):.3g} m <= L_z {np.max(cfg.L_z):.3g} m; "
                      "collimated form is optimistic",
                      stacklevel=3)


def rate_sm_type01(cfg: SpdcConfig) -> RateResult:
    """Single-mode rate for degenerate type-0 / type-I."""
    if cfg.spdc_type == SpdcType.TYPE2 or not cfg.degenerate:
        raise WrongRegime("rate_sm_type01 needs degenerate type-0 or type-I")
    if not np.all(np.asarray(cfg.kappa) > 0):
        raise WrongRegime("degenerate type-0/I needs kappa > 0")
    _check_collimated(cfg)
    b = cfg.beam
    per_watt = (
        math.sqrt(2.0 / math.pi**3) * 2.0 / (3.0 * EPS0 * C_LIGHT**3)
        * _index_factor(cfg) / cfg.np
        * cfg.d_eff**2 * cfg.omega_p**2 / np.sqrt(cfg.kappa)
        * overlap_factor(b.sigma_p, b.sigma_1) / b.sigma_p**2
        * cfg.L_z**1.5
        * qpm_factor(cfg)
    )
    return _result(per_watt, b.power, Regime.SINGLE_MODE, "closed form, degenerate type-0/I")


def rate_sm_type2(cfg: SpdcConfig) -> RateResult:
    """Single-mode rate for type-II; an upper bound on the full integral."""
    if cfg.spdc_type != SpdcType.TYPE2:
        raise WrongRegime("rate_sm_type2 needs type-II")
    if not np.all(np.asarray(cfg.delta_ng) > 0):
        raise WrongRegime("type-II needs delta_ng > 0")
    if np.any(np.asarray(cfg.delta_ng) < 1e-2):
        warnings.warn("delta_ng < 1e-2: linear phase-matching term may not dominate", stacklevel=2)
    b = cfg.beam
    per_watt = (
        1.0 / (math.pi * EPS0 * C_LIGHT**2)
        * _index_factor(cfg) / cfg.np
        * cfg.d_eff**2 * cfg.omega_p**2 / cfg.delta_ng
        * overlap_factor(b.sigma_p, b.sigma_1) / b.sigma_p**2
        * cfg.L_z
        * qpm_factor(cfg)
    )
    return _result(per_watt, b.power, Regime.SINGLE_MODE, "closed form, type-II (upper bound)")


def expansion_for(cfg: SpdcConfig) -> PhaseMatchExpansion:
    if cfg.spdc_type == SpdcType.TYPE2:
        return PhaseMatchExpansion(cfg.omega_p / 2.0, cfg.delta_ng / C_LIGHT, cfg.kappa)
    return expansion_coeffs(cfg.ng1, cfg.ng2, cfg.kappa, cfg.kappa, degenerate=True,
                            center_omega_1=cfg.omega_p / 2.0)


def integrand_prefactor(cfg: SpdcConfig) -> float:
    """Per-watt factor multiplying int d(omega_1) omega_1 omega_2 sinc^2(dk L/2).

    Built from |E_p|^2 = P / (c pi sigma_p^2 eps0 n_p) and chi = 2 d_eff.
    """
    b = cfg.beam
    e2_per_watt = 1.0 / (C_LIGHT * math.pi * b.sigma_p**2 * EPS0 * cfg.np)
    chi = 2.0 * cfg.d_eff
    return (
        e2_per_watt * chi**2 * cfg.L_z**2 / (2.0 * math.pi * C_LIGHT**2)
        * _index_factor(cfg)
        * overlap_factor(b.sigma_p, b.sigma_1)
        * qpm_factor(cfg)
    )


def rate_integrand(cfg: SpdcConfig, omega_1):
    """omega_1 (omega_p - omega_1) sinc^2(dk L/2) with dk from the Taylor expansion."""
    exp = expansion_for(cfg)
    w = np.asarray(omega_1, dtype=float)
    return w * (cfg.omega_p - w) * sinc(exp.delta_k(w) * cfg.L_z / 2.0) ** 2


def _phase_breakpoints(a1: float, a2: float, lo: float, hi: float) -> np.ndarray:
    """Points in [lo, hi] where a2 x^2 + a1 x crosses a multiple of pi."""
    pts = [lo, hi]
    if a2 != 0:
        xv = -a1 / (2.0 * a2)
        if lo < xv < hi:
            pts.append(xv)
    pts = sorted(pts)
    out = list(pts)
    for u, v in zip(pts[:-1], pts[1:]):
        fu, fv = a2 * u * u + a1 * u, a2 * v * v + a1 * v
        m_lo, m_hi = sorted((fu, fv))
        ms = np.arange(math.ceil(m_lo / math.pi), math.floor(m_hi / math.pi) + 1) * math.pi
        if ms.size == 0:
            continue
        if a2 == 0:
            xs = ms / a1
        else:
            disc = np.sqrt(np.maximum(a1 * a1 + 4.0 * a2 * ms, 0.0))
            cand = np.stack([(-a1 + disc) / (2 * a2), (-a1 - disc) / (2 * a2)])
            inside = (cand >= u) & (cand <= v)
            xs = cand[inside]
        out.extend(xs.tolist())
    return np.unique(np.asarray(out))


def _quad_phase_integral(f, a1, a2, lo, hi, rtol=QUAD_RTOL):
    """Integrate f over [lo, hi], splitting at every pi step of the sinc phase."""
    pts = _phase_breakpoints(a1, a2, lo, hi)
    total = 0.0
    err = 0.0
    for u, v in zip(pts[:-1], pts[1:]):
        if v <= u:
            continue
        val, e = integrate.quad(f, u, v, epsabs=0.0, epsrel=1e-11, limit=100)
        total += val
        err += e
    if not total > 0 or err > rtol * abs(total):
        raise QuadratureNonConvergent(f"relative error estimate {err / abs(total or 1):.3g} > {rtol}")
    return total, err


def rate_sm_quadrature(cfg: SpdcConfig) -> RateResult:
    """Numerical single-mode rate over omega_1 in (0, omega_p)."""
    exp = expansion_for(cfg)
    half = cfg.omega_p / 2.0
    a1 = exp.linear_coeff * cfg.L_z / 2.0
    a2 = exp.quadratic_coeff * cfg.L_z / 2.0

    def f(x):
        # x is the signal detuning
        ph = a1 * x + a2 * x * x
        s = math.sin(ph) / ph if abs(ph) > 1e-8 else 1.0
        return (half * half - x * x) * s * s

    integral, _ = _quad_phase_integral(f, a1, a2, -half, half)
    per_watt = integrand_prefactor(cfg) * integral
    return _result(per_watt, cfg.beam.power, Regime.SINGLE_MODE, "adaptive quadrature")


def rate_sm_mode_sum(cfg: SpdcConfig, detunings, spacing: float) -> float:
    """Single-mode rate (pairs/s) as a Riemann sum over signal detunings."""
    w = cfg.omega_p / 2.0 + np.asarray(detunings, dtype=float)
    return float(integrand_prefactor(cfg) * cfg.beam.power * spacing * np.sum(rate_integrand(cfg, w)))


@dataclass(frozen=True)
class MultimodeRatio:
    exact: float
    thin_crystal: float


def multimode_ratio(sigma_p: float, L_z: float, lambda_p: float, n_p: float) -> MultimodeRatio:
    """Single-mode to total emission ratio with sigma_1 = sigma_p."""
    require_positive(sigma_p=sigma_p, L_z=L_z, lambda_p=lambda_p, n_p=n_p)
    a = L_z * lambda_p / (4.0 * math.pi * n_p)
    s2 = sigma_p**2
    exact = 4.0 * a * s2 / (s2 + math.sqrt(a * a + s2 * s2)) ** 2
    return MultimodeRatio(exact=exact, thin_crystal=a / s2)


def rate_total_type1(cfg: SpdcConfig) -> RateResult:
    """Total rate over all transverse modes for collinear type-0/I."""
    if cfg.spdc_type == SpdcType.TYPE2:
        raise WrongRegime("multimode total is only available for type-0/I")
    if not np.all(np.asarray(cfg.kappa) > 0):
        raise WrongRegime("multimode total needs kappa > 0")
    lam = cfg.beam.lambda_p
    per_watt = (
        32.0 * math.sqrt(2.0 * math.pi**3) / (27.0 * EPS0 * C_LIGHT)
        * _index_factor(cfg)
        * cfg.d_eff**2 / (lam**3 * np.sqrt(cfg.kappa))
        * np.sqrt(cfg.L_z) / cfg.phi
        * qpm_factor(cfg)
    )
    return _result(per_watt, cfg.beam.power, Regime.MULTIMODE_TOTAL, f"closed form, multimode total, phi={cfg.phi}")


def rate_narrowband_filtered(cfg: SpdcConfig, filter_bandwidth: float) -> RateResult:
    """Rate through a filter (rad/s) much narrower than the phase-matching bandwidth."""
    require_positive(filter_bandwidth=filter_bandwidth)
    natural = pm_bandwidth(expansion_for(cfg), cfg.L_z)
    if filter_bandwidth > 0.1 * natural:
        raise FilterTooWide(f"filter {filter_bandwidth:.3g} rad/s exceeds 10% of the "
                            f"phase-matching bandwidth {natural:.3g} rad/s")
    if filter_bandwidth > 0.01 * natural:
        warnings.warn("filter is not much narrower than the phase-matching bandwidth", stacklevel=2)
    per_watt = integrand_prefactor(cfg) * cfg.omega_p**2 / 4.0 * filter_bandwidth
    return _result(per_watt, cfg.beam.power, Regime.NARROW_FILTERED, "flat passband")


def focused_relative_factor(xi: float, xi_ref: float = 1.0) -> float:
    """arctan(xi) / xi_ref.

    With the default xi_ref = 1 the factor tends to xi for a loosely focused
    beam, so the ratio focused_relative_factor(xi) / focused_relative_factor(xi0)
    rescales a rate known at focal parameter xi0.
    """
    require_positive(xi=xi, xi_ref=xi_ref)
    return math.atan(xi) / xi_ref


def single_mode_rate(cfg: SpdcConfig) -> RateResult:
    if cfg.spdc_type == SpdcType.TYPE2:
        return rate_sm_type2(cfg)
    return rate_sm_type01(cfg)


def waveguide_rate(cfg: SpdcConfig, mfd_pump: float | None = None, mfd_signal: float | None = None) -> RateResult:
    """Waveguide rate with Gaussian widths taken as a quarter of the mode-field diameters."""
    beam = cfg.beam
    if mfd_pump is not None:
        beam = replace(beam, sigma_p=sigma_from_mfd(mfd_pump))
    if mfd_signal is not None:
        beam = replace(beam, sigma_1=sigma_from_mfd(mfd_signal))
    return single_mode_rate(replace(cfg, beam=beam))
