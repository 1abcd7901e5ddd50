"""Multimode squeezed-vacuum number statistics.

The coupling kernel G between signal and idler modes is discretized on the
cavity-free mode grid of a crystal of length L_z: one signal mode per
reduced-sum cell, so that each discrete pair carries unit weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import hbar as HBAR

from ._numeric import require_nonnegative, require_positive, sinc
from .errors import AsymmetricMatrix, ConfigError, ToleranceNotMet
from .rates import SpdcConfig, SpdcType, expansion_for, qpm_factor

SYMMETRY_RTOL = 1e-12
RECONSTRUCTION_RTOL = 1e-10
AGGREGATE_CONSTANT = 12.0 / 35.0 * (4.0 - math.sqrt(2.0))


@dataclass(frozen=True)
class SqueezeSpec:
    g_matrix: np.ndarray
    mean_pump_photons: float
    interaction_time: float
    r: float | None = None

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.g_matrix, dtype=float))
        if g.shape[0] != g.shape[1]:
            raise AsymmetricMatrix(f"g_matrix must be square, got {g.shape}")
        scale = np.max(np.abs(g)) if g.size else 0.0
        if scale > 0 and np.max(np.abs(g - g.T)) > SYMMETRY_RTOL * scale:
            raise AsymmetricMatrix("g_matrix is not symmetric")
        object.__setattr__(self, "g_matrix", g)
        require_nonnegative(mean_pump_photons=self.mean_pump_photons, interaction_time=self.interaction_time)
        if self.r is not None and self.r < 0:
            raise ConfigError("r must be >= 0")


def mean_pump_photons(power: float, omega_p: float, L_z: float, n_p: float) -> float:
    """Mean pump photons inside the crystal: (P / hbar w_p) * (L_z n_p / c)."""
    require_nonnegative(power=power)
    require_positive(omega_p=omega_p, L_z=L_z, n_p=n_p)
    return power / (HBAR * omega_p) * (L_z * n_p / C_LIGHT)


def transit_time(L_z: float, n1: float) -> float:
    return L_z * n1 / C_LIGHT


def _eigvals(g: np.ndarray) -> np.ndarray:
    w, q = np.linalg.eigh(g)
    norm = np.linalg.norm(g)
    if norm > 0 and np.linalg.norm(q @ np.diag(w) @ q.T - g) > RECONSTRUCTION_RTOL * norm:
        raise ToleranceNotMet("symmetric eigendecomposition failed its reconstruction check")
    return w


def evolve_pairs(spec: SqueezeSpec, t: float | None = None) -> float:
    """Sum of sinh^2(sqrt(N_p) lambda_i t) over the eigenvalues of G."""
    t = spec.interaction_time if t is None else t
    lam = _eigvals(spec.g_matrix)
    x = math.sqrt(spec.mean_pump_photons) * lam * t
    return float(np.sum(np.sinh(x) ** 2))


def tmsv_pmf(r: float, n):
    """Two-mode squeezed vacuum photon-pair distribution tanh^{2n} r / cosh^2 r."""
    require_nonnegative(r=r)
    n = np.asarray(n)
    if np.any(n < 0):
        raise ConfigError("n must be >= 0")
    t2 = math.tanh(r) ** 2
    out = np.where(n == 0, 1.0, t2 ** np.maximum(n, 1)) / math.cosh(r) ** 2
    return out if out.ndim else float(out)


def multi_pair_ratio(r: float) -> float:
    """P(two or more pairs) / P(one pair)."""
    require_nonnegative(r=r)
    return math.sinh(r) ** 2


def geometric_second_moment(mean: float) -> float:
    """<N^2> = 2<N>^2 + <N> for geometric (single-mode thermal) statistics."""
    return 2.0 * mean * mean + mean


def aggregate_multi_pair_ratio(n_sm: float, kappa: float, L_z: float) -> float:
    """Mean multi-pair to single-pair ratio over the bulk spectrum.

    For bulk crystals this is of order 1e-8 per watt of pump.
    """
    require_nonnegative(n_sm=n_sm)
    require_positive(kappa=kappa, L_z=L_z)
    return n_sm * AGGREGATE_CONSTANT * C_LIGHT * math.sqrt(kappa * math.pi / L_z)


@dataclass(frozen=True)
class PoissonStats:
    mean: float
    variance: float
    p_zero: float
    waiting_time_mean: float


def poisson_pair_statistics(rate: float, window: float) -> PoissonStats:
    require_nonnegative(rate=rate)
    require_positive(window=window)
    m = rate * window
    return PoissonStats(m, m, math.exp(-m), math.inf if rate == 0 else 1.0 / rate)


# ----------------------------------------------------- discretized kernel


@dataclass(frozen=True)
class DiscretizedCoupling:
    spec: SqueezeSpec
    detunings: np.ndarray
    spacing: float
    pair_fraction: float


def mode_spacing(cfg: SpdcConfig) -> float:
    """Signal frequency step giving each reduced-sum mode unit weight."""
    return 2.0 * math.pi * cfg.n1 * C_LIGHT / (cfg.L_z * cfg.ng1 * cfg.ng2)


def coupling_squared(cfg: SpdcConfig, omega_1):
    """|G(k1, k2)|^2 for the energy-conserving partner of each signal frequency.

    Built from the transverse overlap of normalized Gaussian modes and a
    longitudinal sinc over the crystal, in the mode volume L_z^3.
    """
    b = cfg.beam
    w1 = np.asarray(omega_1, dtype=float)
    w2 = cfg.omega_p - w1
    chi = 2.0 * cfg.d_eff
    # |int dx dy g_p g_1 g_2|^2 for normalized Gaussian modes
    transverse = 2.0 / math.pi * b.sigma_p**2 / (b.sigma_1**2 + 2.0 * b.sigma_p**2) ** 2
    exp = expansion_for(cfg)
    longitudinal = (chi * cfg.L_z) ** 2 * sinc(exp.delta_k(w1) * cfg.L_z / 2.0) ** 2
    pref = HBAR / (2.0 * cfg.L_z**3 * EPS0) * cfg.omega_p / (cfg.np**2 * cfg.n1**2 * cfg.n2**2)
    return pref * w1 * w2 * longitudinal * transverse * qpm_factor(cfg)


def discretize_coupling(cfg: SpdcConfig, n_modes: int = 511) -> DiscretizedCoupling:
    """Build the symmetric coupling matrix on ``n_modes`` signal modes.

    Type-0/I: one field, signal j pairs with idler -j, giving an
    anti-diagonal matrix.  Type-II: distinct fields, block form
    [[0, K], [K^T, 0]] whose eigenvalues double count, so
    ``pair_fraction`` is 1/2.  Type-II weights include the (2 n_p - n_1)/n_2
    factor from reducing the momentum delta function.
    """
    if n_modes < 1 or n_modes > 512:
        raise ConfigError("n_modes must be in [1, 512]")
    m = n_modes // 2
    j = np.arange(-m, m + 1) if n_modes % 2 else np.arange(-m, m) + 0.5
    step = mode_spacing(cfg)
    det = j * step
    g = np.sqrt(coupling_squared(cfg, cfg.omega_p / 2.0 + det))
    n_p = mean_pump_photons(cfg.beam.power, cfg.omega_p, cfg.L_z, cfg.np)
    t_dc = transit_time(cfg.L_z, cfg.n1)
    if cfg.spdc_type == SpdcType.TYPE2:
        g = g * math.sqrt((2.0 * cfg.np - cfg.n1) / cfg.n2)
        k = np.fliplr(np.diag(g))
        zero = np.zeros_like(k)
        mat = np.block([[zero, k], [k.T, zero]])
        frac = 0.5
    else:
        mat = np.fliplr(np.diag(g))
        frac = 1.0
    spec = SqueezeSpec(g_matrix=mat, mean_pump_photons=n_p, interaction_time=t_dc)
    return DiscretizedCoupling(spec=spec, detunings=det, spacing=step, pair_fraction=frac)


def pair_rate_from_squeezing(disc: DiscretizedCoupling) -> float:
    """N_SM(T_DC) / T_DC for a discretized coupling."""
    return disc.pair_fraction * evolve_pairs(disc.spec) / disc.spec.interaction_time
