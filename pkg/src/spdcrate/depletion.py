"""Pump depletion in single-pass down-conversion.

Semiclassical model for the signal photon number N(t), starting from vacuum:

    N'' = 2 g^2 (N_p (2N + 1) - N (6N + 4)),   N(0) = N'(0) = 0.

Multiplying by N' and integrating once gives
N'^2 = 4 g^2 x (-2 x^2 + (N_p - 2) x + N_p) at x = N, whose positive root
is exactly N_p / 2.  The depletion time T_D is the time to reach it.

The model holds only while the interaction time is shorter than both the
pump coherence time and the crystal transit time; nothing here enforces that.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, stats
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import hbar as HBAR

from ._numeric import require_nonnegative, require_positive
from .beams import overlap_factor
from .errors import ConfigError, CutoffTooSmall, QuadratureNonConvergent, ToleranceNotMet

AGM_RTOL = 1e-15
TAIL_MASS = 1e-12


@dataclass(frozen=True)
class DepletionSpec:
    g2: float
    N_p0: float
    t_max: float | None = None
    tolerance: float = 1e-10

    def __post_init__(self):
        require_nonnegative(g2=self.g2)
        require_positive(N_p0=self.N_p0, tolerance=self.tolerance)

    @property
    def g(self) -> float:
        return math.sqrt(self.g2)


def g_squared(d_eff, n1, n2, np_, L_z, lambda_p, sigma_p, sigma_1) -> float:
    """|g|^2 in 1/s^2 for the Hermite-Gauss fundamental-mode basis."""
    require_nonnegative(d_eff=d_eff)
    require_positive(n1=n1, n2=n2, np_=np_, L_z=L_z, lambda_p=lambda_p, sigma_p=sigma_p)
    return (8.0 * HBAR * math.pi**2 * C_LIGHT**3 * d_eff**2
            / (EPS0 * n1**2 * n2**2 * np_**2 * L_z * lambda_p**3 * sigma_p**2)
            * overlap_factor(sigma_p, sigma_1))


# ------------------------------------------------------------ trajectory


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    N1: np.ndarray


def _rhs(n_p):
    def f(s, y):
        # s = g t
        return [y[1], 2.0 * (n_p * (2.0 * y[0] + 1.0) - y[0] * (6.0 * y[0] + 4.0))]
    return f


def integrate_depletion(spec: DepletionSpec, t_eval=None) -> Trajectory:
    """Integrate the depletion ODE (explicit adaptive Dormand-Prince 8(5,3))."""
    if spec.g2 == 0:
        t = np.asarray(t_eval if t_eval is not None else [0.0, spec.t_max or 1.0], dtype=float)
        return Trajectory(t=t, N1=np.zeros_like(t))
    g = spec.g
    t_max = spec.t_max if spec.t_max is not None else 1.2 * depletion_time(spec).quadrature
    t = np.linspace(0.0, t_max, 2001) if t_eval is None else np.asarray(t_eval, dtype=float)
    sol = integrate.solve_ivp(_rhs(spec.N_p0), (0.0, g * float(t[-1])), [0.0, 0.0], method="DOP853",
                              t_eval=g * t, rtol=spec.tolerance, atol=spec.tolerance * 1e-6)
    if not sol.success:
        raise ToleranceNotMet(f"ODE integration failed: {sol.message}")
    return Trajectory(t=t, N1=sol.y[0])


# ------------------------------------------------------- depletion time


@dataclass(frozen=True)
class DepletionTime:
    quadrature: float
    elliptic: float
    closed_form: float
    closed_form_imag_residue: float


def _roots(n_p: float):
    """Roots of -2x^2 + (N_p - 2)x + N_p: (N_p/2, -1)."""
    b = n_p - 2.0
    disc = math.sqrt(b * b + 8.0 * n_p)
    return (b + disc) / 4.0, (b - disc) / 4.0


def agm(a: float, b: float) -> float:
    while abs(a - b) > AGM_RTOL * abs(a):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellipk(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter m < 1."""
    if m >= 1:
        raise ConfigError("ellipk needs m < 1")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def _td_quadrature(n_p: float) -> float:
    """g * T_D by quadrature.  x = x_r sin^2(phi) removes both endpoint singularities."""
    xr, xn = _roots(n_p)

    def f(phi):
        return 2.0 / math.sqrt(2.0 * (xr * math.sin(phi) ** 2 - xn))

    val, err = integrate.quad(f, 0.0, math.pi / 2.0, epsabs=0.0, epsrel=1e-12, limit=200)
    if err > 1e-9 * val:
        raise QuadratureNonConvergent(f"depletion integral error {err / val:.3g}")
    return val / 2.0


def _td_elliptic(n_p: float) -> float:
    """g * T_D via the Legendre reduction to K(m)."""
    xr, xn = _roots(n_p)
    m = xr / (xr - xn)
    integral = 2.0 / math.sqrt(xr - xn) * ellipk(m) / math.sqrt(2.0)
    return integral / 2.0


def _td_closed_form(n_p: float):
    """Large-N_p closed form with complex intermediates; returns (value, |Im|/Re)."""
    n = mpmath.mpf(n_p)
    val = (-mpmath.sqrt(2) * (mpmath.ellipf(1j * mpmath.acsch(mpmath.sqrt(n / 2)), -n / 2)
                              - 1j * mpmath.ellipk(n / 2))
           / mpmath.sqrt(-n + mpmath.sqrt(n * (n + 8))))
    re = float(mpmath.re(val))
    return re, abs(float(mpmath.im(val))) / abs(re)


def depletion_time(spec: DepletionSpec) -> DepletionTime:
    """Time to reach maximum depletion by quadrature, by the elliptic reduction,
    and by the large-N_p closed form (with its imaginary residue)."""
    if spec.g2 == 0:
        raise ConfigError("g = 0: the pump never depletes")
    if spec.N_p0 < 100:
        warnings.warn("N_p0 < 100: the closed form assumes N_p0 >> 2", stacklevel=2)
    g = spec.g
    cf, resid = _td_closed_form(spec.N_p0)
    return DepletionTime(
        quadrature=_td_quadrature(spec.N_p0) / g,
        elliptic=_td_elliptic(spec.N_p0) / g,
        closed_form=cf / g,
        closed_form_imag_residue=resid,
    )


@dataclass(frozen=True)
class RegimeApproximations:
    sinh_approx: np.ndarray
    first_order: np.ndarray
    sech_approx: np.ndarray
    hybrid: np.ndarray


def regime_approximations(spec: DepletionSpec, t, t_d: float | None = None) -> RegimeApproximations:
    """Undepleted (sinh^2), first-order (N_p g^2 t^2), near-depletion (sech^2) and hybrid forms."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ConfigError("t must be >= 0")
    t_d = depletion_time(spec).quadrature if t_d is None else t_d
    k = math.sqrt(spec.N_p0) * spec.g
    sinh_a = np.sinh(k * t) ** 2
    sech_a = spec.N_p0 / 2.0 / np.cosh(k * (t - t_d)) ** 2
    return RegimeApproximations(
        sinh_approx=sinh_a,
        first_order=spec.N_p0 * spec.g2 * t * t,
        sech_approx=sech_a,
        hybrid=np.where(t < t_d / 2.0, sinh_a, sech_a),
    )


# --------------------------------------------------- pump photon statistics


@dataclass(frozen=True)
class PumpDistribution:
    kind: str  # "fock", "coherent" or "thermal"
    mean: float

    def __post_init__(self):
        if self.kind not in ("fock", "coherent", "thermal"):
            raise ConfigError(f"unknown pump distribution {self.kind!r}")
        require_nonnegative(mean=self.mean)
        if self.kind == "fock" and self.mean != int(self.mean):
            raise ConfigError("Fock state needs an integer photon number")

    def support(self, n_cutoff: int):
        """Photon numbers and probabilities up to n_cutoff; checks the dropped tail."""
        if self.kind == "fock":
            n = int(self.mean)
            if n > n_cutoff:
                raise CutoffTooSmall(f"Fock number {n} exceeds cutoff {n_cutoff}")
            return np.array([n]), np.array([1.0])
        n = np.arange(n_cutoff + 1)
        if self.kind == "coherent":
            dist = stats.poisson(self.mean)
        else:
            p = self.mean / (self.mean + 1.0)
            dist = stats.geom(1.0 - p, loc=-1)
        tail = dist.sf(n_cutoff)
        if tail > TAIL_MASS:
            raise CutoffTooSmall(f"tail mass {tail:.3g} beyond n_cutoff={n_cutoff} exceeds {TAIL_MASS}")
        lo = int(max(0, dist.ppf(TAIL_MASS * 1e-3))) if self.kind == "coherent" else 0
        n = n[lo:]
        return n, dist.pmf(n)


def default_cutoff(dist: PumpDistribution) -> int:
    if dist.kind == "fock":
        return int(dist.mean)
    if dist.kind == "coherent":
        return int(dist.mean + 12.0 * math.sqrt(dist.mean + 1.0) + 30)
    return int(math.ceil(math.log(TAIL_MASS) / math.log(dist.mean / (dist.mean + 1.0)))) + 1 if dist.mean else 1


def pump_statistics_yield(dist: PumpDistribution, g: float, t: float, n_cutoff: int | None = None) -> float:
    """Mean signal photons sum_n P(n) sinh^2(sqrt(n) g t) for a given pump number distribution."""
    require_nonnegative(g=g, t=t)
    n_cutoff = default_cutoff(dist) if n_cutoff is None else n_cutoff
    n, p = dist.support(n_cutoff)
    return float(np.sum(p * np.sinh(np.sqrt(n) * g * t) ** 2))
