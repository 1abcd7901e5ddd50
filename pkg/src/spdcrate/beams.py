"""Collimated Gaussian beam geometry.

All widths are intensity standard deviations: the pump intensity profile is
exp(-r^2 / (2 sigma_p^2)) at the waist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0

from ._numeric import require_nonnegative, require_positive


@dataclass(frozen=True)
class BeamConfig:
    lambda_p: float
    power: float
    sigma_p: float
    sigma_1: float
    n_p: float

    def __post_init__(self):
        require_positive(lambda_p=self.lambda_p, sigma_p=self.sigma_p, sigma_1=self.sigma_1, n_p=self.n_p)
        require_nonnegative(power=self.power)

    @property
    def omega_p(self) -> float:
        return 2.0 * math.pi * C_LIGHT / self.lambda_p


def rayleigh_range(sigma_p: float, lambda_p: float) -> float:
    require_positive(sigma_p=sigma_p, lambda_p=lambda_p)
    return 4.0 * math.pi * sigma_p**2 / lambda_p


def peak_field_from_power(power: float, sigma_p: float, n: float) -> float:
    """Peak displacement-field amplitude |D| carrying ``power`` watts."""
    require_nonnegative(power=power)
    require_positive(sigma_p=sigma_p, n=n)
    return math.sqrt(power * n**3 * EPS0 / (C_LIGHT * math.pi * sigma_p**2))


def power_from_peak_field(d_field: float, sigma_p: float, n: float) -> float:
    require_nonnegative(d_field=d_field)
    require_positive(sigma_p=sigma_p, n=n)
    return C_LIGHT * d_field**2 * math.pi * sigma_p**2 / (n**3 * EPS0)


def overlap_factor(sigma_p: float, sigma_1: float) -> float:
    """(sigma_p^2 / (sigma_1^2 + 2 sigma_p^2))^2, the pump/collection overlap."""
    require_positive(sigma_p=sigma_p)
    require_nonnegative(sigma_1=sigma_1)
    return (sigma_p**2 / (sigma_1**2 + 2.0 * sigma_p**2)) ** 2


def focal_parameter(L_z: float, z_R: float) -> float:
    require_positive(L_z=L_z, z_R=z_R)
    return L_z / (2.0 * z_R)


def sigma_from_mfd(mode_field_diameter: float) -> float:
    """Intensity standard deviation approximating a guided mode: MFD / 4."""
    require_positive(mode_field_diameter=mode_field_diameter)
    return mode_field_diameter / 4.0
