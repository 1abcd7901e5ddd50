"""Micro-ring resonator pair generation.

Conventions: a single bus waveguide couples to the ring with self-coupling
rho and cross-coupling tau (|rho|^2 + |tau|^2 = 1).  alpha = exp(-Gamma L / 2)
is the round-trip amplitude transmission and theta = nu * T_DC the round-trip
phase of a detuning nu from half the pump frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import hbar as HBAR
from scipy.linalg import expm

from ._numeric import require_nonnegative, require_positive, sinc
from .errors import (
    ConfigError,
    DivergentSeries,
    GridTooCoarse,
    OverLossyStep,
    SingularDenominator,
    UnequalParameters,
    ZeroCoupling,
)
from .phasematch import SINC2_HALF
from .rates import MILLIWATT, RateResult, Regime

UNITARY_TOL = 1e-10
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class RingConfig:
    rho: complex
    L: float
    n_g: float
    Gamma: float = 0.0
    tau: complex | None = None
    theta_p: float = 0.0
    buildup_B: float = 1.0
    r: float = 0.0

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "tau", math.sqrt(max(0.0, 1.0 - abs(self.rho) ** 2)))
        if abs(abs(self.rho) ** 2 + abs(self.tau) ** 2 - 1.0) > UNITARY_TOL:
            raise ConfigError("coupler must satisfy |rho|^2 + |tau|^2 = 1")
        require_positive(L=self.L, n_g=self.n_g)
        require_nonnegative(Gamma=self.Gamma, r=self.r, buildup_B=self.buildup_B)

    @property
    def alpha(self) -> float:
        return math.exp(-self.Gamma * self.L / 2.0)

    @property
    def t_dc(self) -> float:
        """Round-trip time n_g L / c."""
        return self.n_g * self.L / C_LIGHT

    @classmethod
    def from_alpha(cls, rho, alpha: float, L: float, n_g: float, **kw) -> "RingConfig":
        if not 0 < alpha <= 1:
            raise ConfigError("alpha must be in (0, 1]")
        return cls(rho=rho, L=L, n_g=n_g, Gamma=-2.0 * math.log(alpha) / L, **kw)


@dataclass(frozen=True)
class OutputMatrices:
    D: np.ndarray
    J: np.ndarray
    nu: np.ndarray


def chain_transmission(Gamma: float, L: float, N: int) -> float:
    """Power transmission through N lossy beamsplitters, each removing Gamma L / N."""
    require_nonnegative(Gamma=Gamma)
    require_positive(L=L)
    if N < 1:
        raise ConfigError("N must be >= 1")
    step = Gamma * L / N
    if step >= 1:
        raise OverLossyStep(f"Gamma L / N = {step} >= 1")
    return math.exp(N * math.log1p(-step))


def ring_transfer(cfg: RingConfig, theta):
    """All-pass transfer (rho - alpha e^{i theta}) / (1 - rho* alpha e^{i theta}) and |H|.

    |H| = sqrt(1 - |G|^2) is the magnitude of the loss-channel transfer.
    """
    a = cfg.alpha
    if abs(np.conj(cfg.rho) * a) >= 1:
        raise DivergentSeries("|rho* alpha| >= 1: circulation series does not converge")
    e = a * np.exp(1j * np.asarray(theta, dtype=float))
    g = (cfg.rho - e) / (1.0 - np.conj(cfg.rho) * e)
    h = np.sqrt(np.clip(1.0 - np.abs(g) ** 2, 0.0, None))
    return g, h


def ring_transfer_series(cfg: RingConfig, theta, n_terms: int = 60):
    """Partial trajectory sum rho - |tau|^2 sum_{k>=1} (rho*)^{k-1} (alpha e^{i theta})^k."""
    e = cfg.alpha * np.exp(1j * np.asarray(theta, dtype=float))
    rc = np.conj(cfg.rho)
    total = np.full_like(e, cfg.rho, dtype=complex)
    term = -abs(cfg.tau) ** 2 * e
    for _ in range(n_terms):
        total = total + term
        term = term * rc * e
    return total


def _coupling_prefactor(indices, n_p_power: int) -> float:
    ng1, ng2, n1, n2, np_ = (indices[k] for k in ("n_g1", "n_g2", "n1", "n2", "np"))
    return math.sqrt(ng1 * ng2 / (n1**2 * n2**2 * np_**n_p_power))


def coupling_g_spdc(chi2_eff: float, indices: dict, omega_p: float, V_ring: float) -> float:
    """|g_spdc| in the particle-in-a-box mode basis."""
    require_nonnegative(chi2_eff=chi2_eff)
    require_positive(omega_p=omega_p, V_ring=V_ring)
    return (32.0 * chi2_eff / (9.0 * math.pi**3 * C_LIGHT) * _coupling_prefactor(indices, 2)
            * math.sqrt((HBAR * omega_p) ** 3 / (2.0 * EPS0 * V_ring)))


def coupling_g_sfwm(chi3_eff: float, indices: dict, omega_p: float, V_ring: float) -> float:
    """|g_sfwm| in the particle-in-a-box mode basis."""
    require_nonnegative(chi3_eff=chi3_eff)
    require_positive(omega_p=omega_p, V_ring=V_ring)
    return (27.0 * chi3_eff / (16.0 * math.pi * C_LIGHT) * _coupling_prefactor(indices, 4)
            * (HBAR * omega_p) ** 2 / (EPS0 * V_ring))


def internal_squeeze_step(cfg: RingConfig, theta: float = 0.0, Gamma_b: float | None = None):
    """Round-trip propagation matrix and loss-noise matrix inside the ring."""
    if Gamma_b is not None and Gamma_b != cfg.Gamma:
        raise UnequalParameters("unequal signal/idler loss: use propagation_matrix_expm")
    ae = cfg.alpha * np.exp(1j * theta)
    ch, sh = math.cosh(cfg.r), math.sinh(cfg.r)
    rm = ae * np.array([[ch, -np.exp(1j * cfg.theta_p) * sh], [-np.exp(-1j * cfg.theta_p) * sh, ch]])
    bm = math.sqrt(1.0 - cfg.alpha**2) * np.eye(2)
    return rm, bm


def propagation_matrix_expm(cfg: RingConfig, nu: float, Gamma_a: float | None = None,
                            Gamma_b: float | None = None) -> np.ndarray:
    """exp(M L) for possibly unequal signal and idler loss rates.

    M = [[i n_g nu / c - Gamma_a/2, -(n_g/c)|g||alpha_p| e^{i theta_p}],
         [-(n_g/c)|g||alpha_p| e^{-i theta_p}, i n_g nu / c - Gamma_b/2]]
    with the per-pass gain (n_g/c)|g||alpha_p| L = r.
    """
    ga = cfg.Gamma if Gamma_a is None else Gamma_a
    gb = cfg.Gamma if Gamma_b is None else Gamma_b
    k = cfg.n_g * nu / C_LIGHT
    gain = cfg.r / cfg.L
    m = np.array([
        [1j * k - ga / 2.0, -gain * np.exp(1j * cfg.theta_p)],
        [-gain * np.exp(-1j * cfg.theta_p), 1j * k - gb / 2.0],
    ])
    return expm(m * cfg.L)


def output_matrices(cfg: RingConfig, nu) -> OutputMatrices:
    """D and J matrices mapping input and loss-noise operators to outputs.

    Shapes are (..., 2, 2) broadcast over ``nu``.
    """
    nu = np.asarray(nu, dtype=float)
    a = cfg.alpha
    rho = cfg.rho
    tau = cfg.tau
    if abs(tau) == 0:
        raise ZeroCoupling("tau = 0: ring is decoupled from the bus")
    ae = a * np.exp(1j * nu * cfg.t_dc)
    ch, sh = math.cosh(cfg.r), math.sinh(cfg.r)
    den = ae**2 + rho**2 - 2.0 * ae * rho * ch
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularDenominator("output-matrix denominator vanishes (gain compensates loss)")
    diag = tau * (ch * ae - rho) / den
    off_ab = tau * np.exp(1j * cfg.theta_p) * ae * sh / den
    off_ba = tau * np.exp(-1j * cfg.theta_p) * ae * sh / den
    d = np.stack([np.stack([diag, off_ab], -1), np.stack([off_ba, diag], -1)], -2)
    j = -math.sqrt(1.0 - a * a) / tau * d
    return OutputMatrices(D=d, J=j, nu=nu)


def biphoton_spectrum(cfg: RingConfig, nu_grid):
    """|psi_ab(nu)|^2 for signal at +nu and idler at -nu about half the pump frequency."""
    return np.abs(_psi_amplitude(cfg, nu_grid)) ** 2


def spectrum_peak_estimate(rho: float, alpha: float) -> float:
    """(1 - rho^2)^4 / (1 - rho/alpha)^4, the on-resonance value at r -> 0."""
    return (1.0 - rho**2) ** 4 / (1.0 - rho / alpha) ** 4


def spectrum_fwhm_estimate(rho: float, alpha: float) -> float:
    """|alpha - rho| / sqrt(2 alpha rho), the quoted resonance width in theta."""
    return abs(alpha - rho) / math.sqrt(2.0 * alpha * rho)


def spectrum_fwhm_exact(rho: float, alpha: float) -> float:
    """Full width at half maximum in theta of 1/|alpha e^{i theta} - rho|^4 (r = 0)."""
    cos_half = (alpha**2 + rho**2 - math.sqrt(2.0) * (alpha - rho) ** 2) / (2.0 * alpha * rho)
    return 2.0 * math.acos(max(-1.0, min(1.0, cos_half)))


def peak_pair_rate(chi2_eff: float, indices: dict, omega_p: float, L_x: float, L_y: float, L: float,
                   rho: float, buildup_B: float, pump_power: float) -> RateResult:
    """Pair rate into one pair of resonances.  ``chi2_eff`` is d_eff (m/V)."""
    require_positive(L_x=L_x, L_y=L_y, L=L, omega_p=omega_p, buildup_B=buildup_B)
    require_nonnegative(chi2_eff=chi2_eff, pump_power=pump_power)
    if not 0 <= abs(rho) < 1:
        raise ConfigError("|rho| must be in [0, 1)")
    ng1, ng2, n1, n2, np_ = (indices[k] for k in ("n_g1", "n_g2", "n1", "n2", "np"))
    per_watt = (
        8192.0 / (81.0 * math.pi**4 * EPS0 * C_LIGHT**2)
        * ng1 * ng2 / (n1**2 * n2**2 * np_**2)
        * chi2_eff**2 * omega_p**2 / (L_x * L_y)
        * L * (1.0 - abs(rho) ** 4) * buildup_B
    )
    return RateResult(per_watt * pump_power, per_watt * MILLIWATT, Regime.PEAK_RESONANCE,
                      "closed form, single resonance pair")


def heralding_efficiency(cfg: RingConfig, nu=0.0, exact: bool = True):
    if not exact:
        rho2 = abs(cfg.rho) ** 2
        return (1.0 - rho2) / (2.0 - rho2 - cfg.alpha**2)
    om = output_matrices(cfg, nu)
    dbb = np.abs(om.D[..., 1, 1]) ** 2
    jbb = np.abs(om.J[..., 1, 1]) ** 2
    out = dbb / (dbb + jbb)
    return out if np.ndim(out) else float(out)


def opo_threshold(Gamma: float, L: float, rho_mag: float) -> float:
    require_nonnegative(Gamma=Gamma)
    require_positive(L=L)
    if rho_mag == 0:
        raise ZeroCoupling("rho = 0 has no oscillation threshold")
    if not 0 < rho_mag <= 1:
        raise ConfigError("|rho| must be in (0, 1]")
    return Gamma * L / 2.0 + math.log(1.0 / rho_mag)


def finesse(rho: float, alpha: float) -> float:
    """Free spectral range over resonance full width, pi sqrt(rho alpha) / (1 - rho alpha)."""
    ra = abs(rho) * alpha
    return math.pi * math.sqrt(ra) / (1.0 - ra)


def buildup_from_finesse(F: float) -> float:
    return F / (math.pi / 2.0)


def buildup_from_q(Q: float, lambda_p: float, n_p: float, L: float) -> float:
    return 2.0 * lambda_p / (n_p * L * math.pi) * Q


def rho_from_buildup(B: float, alpha: float = 1.0) -> float:
    """Self-coupling whose finesse gives buildup B (inverse of buildup_from_finesse)."""
    require_positive(B=B)
    # B = 2 s / (1 - s^2) with s = sqrt(rho alpha)
    s = (-1.0 + math.sqrt(1.0 + B * B)) / B
    return s * s / alpha


# ------------------------------------------------------- time correlations


@dataclass(frozen=True)
class TimeCorrelations:
    """Biphoton time-difference correlations.

    ``t`` is conjugate to the difference frequency through exp(-i nu t).
    Measured decay constants refer to the amplitude envelope |psi~(t)|.
    ``*_stated`` fields hold the closed-form estimates; the cycles-convention
    spacing is the measured spacing divided by 2 pi.
    """

    t: np.ndarray
    intensity: np.ndarray
    tine_spacing_stated: float
    tine_spacing_measured: float
    tine_spacing_measured_cycles: float
    envelope_decay_stated: float
    envelope_decay_measured: float
    tines_to_1_over_e_stated: float
    tines_to_1_over_e_measured: float


def time_correlations(cfg: RingConfig, kappa: float, L: float, n_points: int = 2**17,
                      points_per_fsr: int = 1024) -> TimeCorrelations:
    """Fourier transform of the phase-matching sinc times psi_ab over nu_minus.

    nu_minus = (nu_1 - nu_2)/sqrt 2 with nu_1 = -nu_2 = nu, so the signal
    detuning is nu_minus/sqrt 2 and the degenerate mismatch phase is
    L kappa nu_minus^2 / 4.
    """
    require_positive(kappa=kappa, L=L)
    if n_points < 4 * points_per_fsr:
        raise GridTooCoarse("grid must span at least four free spectral ranges")
    t_dc = cfg.t_dc
    a = cfg.alpha
    rho = abs(cfg.rho)
    fsr_minus = 2.0 * math.sqrt(2.0) * math.pi / t_dc
    pm_width = 2.0 * math.sqrt(4.0 * SINC2_HALF / (L * kappa))
    if rho > 0:
        width = 2.0 * math.sqrt(2.0) * abs(a - rho) / (math.sqrt(a * rho) * t_dc)
        per_res = points_per_fsr * width / fsr_minus
        if per_res < 16:
            raise GridTooCoarse(f"{per_res:.1f} points per resonance < 16")
        if pm_width < 10 * width:
            raise GridTooCoarse("phase-matching bandwidth is not much wider than the cavity linewidth")
    d_nu = fsr_minus / points_per_fsr
    nu_m = (np.arange(n_points) - n_points // 2) * d_nu
    spec = sinc(L * kappa * nu_m**2 / 4.0) * _psi_amplitude(cfg, nu_m / math.sqrt(2.0))
    amp = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(spec)))
    t = np.fft.fftshift(np.fft.fftfreq(n_points, d=d_nu / (2.0 * math.pi)))
    inten = np.abs(amp) ** 2

    # tines sit at multiples of the round-trip time over sqrt 2
    dt = t[1] - t[0]
    centre = n_points // 2
    step = t_dc / math.sqrt(2.0)
    peaks_t, peaks_a = [], []
    k = 0
    while True:
        idx = centre + int(round(k * step / dt))
        if idx + 4 > n_points or k * step > t[-1] / 2:
            break
        j = idx - 3 + int(np.argmax(inten[idx - 3: idx + 4]))
        peaks_t.append(t[j])
        peaks_a.append(math.sqrt(inten[j]))
        k += 1
    peaks_t = np.asarray(peaks_t)
    peaks_a = np.asarray(peaks_a)
    spacing = float(np.median(np.diff(peaks_t))) if peaks_t.size > 1 else math.nan

    if rho > 0:
        keep = (np.arange(peaks_a.size) >= 1) & (peaks_a > peaks_a[0] * 1e-6)
        if np.count_nonzero(keep) < 3:
            raise GridTooCoarse("too few resolved tines to fit the envelope")
        decay = -np.polyfit(peaks_t[keep], np.log(peaks_a[keep]), 1)[0]
        stated_decay = abs(a - rho) * math.sqrt(2.0) / (t_dc * math.sqrt(a * rho))
        tines_measured = 1.0 / (decay * spacing)
        tines_stated = finesse(rho, a) / (8.0 * math.pi**2)
    else:
        decay = stated_decay = math.inf
        tines_measured = tines_stated = 0.0
    return TimeCorrelations(
        t=t,
        intensity=inten,
        tine_spacing_stated=t_dc / (2.0 * math.sqrt(2.0) * math.pi),
        tine_spacing_measured=spacing,
        tine_spacing_measured_cycles=spacing / (2.0 * math.pi),
        envelope_decay_stated=stated_decay,
        envelope_decay_measured=float(decay),
        tines_to_1_over_e_stated=tines_stated,
        tines_to_1_over_e_measured=tines_measured,
    )


def _psi_amplitude(cfg: RingConfig, nu):
    om = output_matrices(cfg, nu)
    d = om.D
    pref = (cfg.alpha * np.conj(cfg.tau)) ** 2
    return pref * (np.exp(1j * cfg.theta_p) * np.conj(d[..., 0, 0]) * d[..., 1, 1]
                   + np.exp(-1j * cfg.theta_p) * d[..., 0, 1] * np.conj(d[..., 1, 0]))
