"""Momentum mismatch, sinc^2 weights, Taylor coefficients and quasi-phase matching."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from ._numeric import sinc
from .errors import ConfigError, EnergyMismatch, EvenOrder, ZeroMismatch, ZeroOrder

ENERGY_TOL = 1e-12

# sinc^2(x) = 1/2 at x = SINC2_HALF; used for full-width bandwidths.
SINC2_HALF = 1.3915573782515103


@dataclass(frozen=True)
class PolingConfig:
    period: float = 0.0
    order: int = 1
    enabled: bool = False

    def __post_init__(self):
        if self.enabled and not self.period > 0:
            raise ConfigError("poling.period must be > 0 when poling is enabled")
        if int(self.order) != self.order or self.order < 1:
            raise ConfigError(f"poling.order must be a positive integer, got {self.order}")


@dataclass(frozen=True)
class PhaseMatchExpansion:
    """delta_k(Omega) ~ linear_coeff * Omega + quadratic_coeff * Omega^2,
    with Omega the signal detuning from ``center_omega_1``."""

    center_omega_1: float
    linear_coeff: float
    quadratic_coeff: float

    def delta_k(self, omega_1):
        d = np.asarray(omega_1, dtype=float) - self.center_omega_1
        return self.linear_coeff * d + self.quadratic_coeff * d * d


def delta_k(n1, n2, np_, omega1, omega2, omegap):
    """Collinear mismatch k1 + k2 - kp in 1/m.  Requires omega1 + omega2 = omegap."""
    o1, o2, op = (np.asarray(v, dtype=float) for v in (omega1, omega2, omegap))
    if np.any(np.abs(o1 + o2 - op) > ENERGY_TOL * np.abs(op)):
        raise EnergyMismatch("omega1 + omega2 must equal omegap")
    out = (n1 * o1 + n2 * o2 - np_ * op) / C_LIGHT
    return out if np.ndim(out) else float(out)


def sinc2_weight(delta_k, L_z):
    return sinc(np.asarray(delta_k, dtype=float) * L_z / 2.0) ** 2


def expansion_coeffs(ng1, ng2, kappa1, kappa2, degenerate=True, center_omega_1=0.0) -> PhaseMatchExpansion:
    linear = abs(ng1 - ng2) / C_LIGHT
    quad = kappa1 if degenerate else 0.5 * (kappa1 + kappa2)
    return PhaseMatchExpansion(center_omega_1=center_omega_1, linear_coeff=linear, quadratic_coeff=quad)


def pm_bandwidth(expansion: PhaseMatchExpansion, L_z: float) -> float:
    """Full width (rad/s in signal detuning) at half maximum of the sinc^2 weight."""
    a1 = expansion.linear_coeff * L_z / 2.0
    a2 = expansion.quadratic_coeff * L_z / 2.0
    # |a2 x^2 + a1 x| = SINC2_HALF on each side of the peak
    roots = []
    for s in (1.0, -1.0):
        if a2 != 0:
            disc = a1 * a1 + 4.0 * a2 * s * SINC2_HALF
            if disc >= 0:
                r = np.array([(-a1 + math.sqrt(disc)) / (2 * a2), (-a1 - math.sqrt(disc)) / (2 * a2)])
                roots.extend(r.tolist())
        elif a1 != 0:
            roots.append(s * SINC2_HALF / a1)
    if not roots:
        return math.inf
    pos = min((r for r in roots if r > 0), default=math.inf)
    neg = max((r for r in roots if r < 0), default=-math.inf)
    return pos - neg


def poling_period_for(delta_k: float, order: int = 1) -> float:
    if delta_k == 0:
        raise ZeroMismatch("delta_k = 0: already phase matched, no poling needed")
    if int(order) != order or order < 1:
        raise ConfigError("order must be a positive integer")
    return 2.0 * math.pi * order / abs(delta_k)


def qpm_fourier_amp(n: int) -> float:
    """Fourier amplitude of the order-n component of a 50% duty-cycle poling."""
    if n == 0:
        raise ZeroOrder("order 0 has no quasi-phase-matching component")
    return float(sinc(n * math.pi / 2.0))


def qpm_rate_factor(n: int) -> float:
    if n < 1 or int(n) != n:
        raise ConfigError(f"order must be a positive integer, got {n}")
    if n % 2 == 0:
        raise EvenOrder(f"even order {n} has zero quasi-phase-matching amplitude")
    return 4.0 / (n * n * math.pi**2)


def _poled_amplitude(x):
    """Complex field amplitude at L = x*Lambda (units of Lambda), matched delta_k."""
    dk = 2.0 * math.pi  # per Lambda
    half = np.floor(2.0 * x).astype(int)
    # every completed half period contributes 2/(i dk) after the sign flip
    full = half * 2.0 / (1j * dk)
    z0 = half / 2.0
    sign = np.where(half % 2 == 0, 1.0, -1.0)
    part = sign * (np.exp(-1j * dk * z0) - np.exp(-1j * dk * x)) / (1j * dk)
    return full + part


def qpm_growth_curve(L_over_Lambda, poled: bool = True):
    """Relative generated intensity versus crystal length at matched delta_k = 2 pi / Lambda.

    Intensities are |int_0^L e^{-i dk z} s(z) dz|^2 in units of Lambda^2, with s = 1
    (unpoled) or s flipping sign every Lambda/2 (poled).  Returns a dict of arrays
    with keys L_over_Lambda, unpoled, poled, parabolic_approx.  With ``poled=False``
    the poled column is omitted.
    """
    x = np.asarray(L_over_Lambda, dtype=float)
    if np.any(x < 0):
        raise ConfigError("L_over_Lambda must be non-negative")
    dk = 2.0 * math.pi
    unpoled = np.abs((1.0 - np.exp(-1j * dk * x)) / (1j * dk)) ** 2
    out = {
        "L_over_Lambda": x,
        "unpoled": unpoled,
        "parabolic_approx": (2.0 * x / math.pi) ** 2,
    }
    if poled:
        out["poled"] = np.abs(_poled_amplitude(x)) ** 2
    return out
