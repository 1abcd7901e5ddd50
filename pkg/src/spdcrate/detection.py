"""Singles/coincidence detection model, pair-rate extraction and its oracles."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ._numeric import require_nonnegative, require_positive
from .errors import ConfigError, NoCoincidences

GENERATOR = "PCG64"
CHUNK = 2_000_000


class SplitterKind(str, enum.Enum):
    FIFTY_FIFTY = "fifty_fifty"
    ASYMMETRIC = "asymmetric"
    POLARIZING = "polarizing"


@dataclass(frozen=True)
class Splitter:
    kind: SplitterKind = SplitterKind.FIFTY_FIFTY
    gamma_t: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", SplitterKind(self.kind))
        if self.kind == SplitterKind.FIFTY_FIFTY:
            object.__setattr__(self, "gamma_t", 0.5)
        if not 0 <= self.gamma_t <= 1:
            raise ConfigError("gamma_t must be in [0, 1]")

    @property
    def gamma_r(self) -> float:
        return 1.0 - self.gamma_t


def splitter_efficiencies(splitter: Splitter) -> tuple[float, float, float]:
    """(beta1, beta2, beta12): chance that arm 1, arm 2, or both receive a photon of the pair."""
    if splitter.kind == SplitterKind.POLARIZING:
        return 1.0, 1.0, 1.0
    gt, gr = splitter.gamma_t, splitter.gamma_r
    return gt * gt + 2 * gt * gr, gr * gr + 2 * gt * gr, 2 * gt * gr


@dataclass(frozen=True)
class DetectionModel:
    C: float = 1.0
    eta: float = 1.0
    E1: float = 1.0
    E2: float = 1.0
    Phi1: float = 0.0
    Phi2: float = 0.0
    A12: float = 0.0
    splitter: Splitter = field(default_factory=Splitter)

    def __post_init__(self):
        for name in ("C", "eta", "E1", "E2"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        require_nonnegative(Phi1=self.Phi1, Phi2=self.Phi2, A12=self.A12)

    @property
    def betas(self) -> tuple[float, float, float]:
        return splitter_efficiencies(self.splitter)


@dataclass(frozen=True)
class Measured:
    value: float
    sigma: float = 0.0


@dataclass(frozen=True)
class DetectionRecord:
    N1: Measured
    N2: Measured
    N12: Measured
    Phi1: Measured = Measured(0.0)
    Phi2: Measured = Measured(0.0)
    A12: Measured = Measured(0.0)

    def __post_init__(self):
        for name in ("N1", "N2", "N12", "Phi1", "Phi2", "A12"):
            v = getattr(self, name)
            if not isinstance(v, Measured):
                object.__setattr__(self, name, Measured(*v) if isinstance(v, (tuple, list)) else Measured(v))
            if getattr(self, name).value < 0:
                raise ConfigError(f"{name} must be >= 0")
        n12 = self.N12.value - self.A12.value
        if n12 > min(self.N1.value - self.Phi1.value, self.N2.value - self.Phi2.value):
            warnings.warn("background-subtracted coincidences exceed singles", stacklevel=2)


def predict_counts(N: float, model: DetectionModel) -> tuple[float, float, float]:
    require_nonnegative(N=N)
    b1, b2, b12 = model.betas
    return (
        N * model.E1 * model.C * b1 + model.Phi1,
        N * model.E2 * model.C * b2 + model.Phi2,
        N * model.E1 * model.E2 * model.eta * model.C * b12 + model.A12,
    )


def _extract(n1, n2, n12, phi1, phi2, a12, C, eta, betas):
    b1, b2, b12 = betas
    return (n1 - phi1) * (n2 - phi2) / (n12 - a12) * (b12 / (b1 * b2)) * (eta / C)


@dataclass(frozen=True)
class Estimate:
    value: float
    sigma: float


def extract_pair_rate(rec: DetectionRecord, model: DetectionModel, samples: int = 100_000,
                      seed: int = 0, sigma_C: float = 0.0, sigma_eta: float = 0.0) -> Estimate:
    """Source pair rate from singles and coincidences.

    The central value is the closed-form inverse of :func:`predict_counts`
    (independent of E1, E2).  The uncertainty comes from Gaussian resampling
    of the record (and optionally C and eta).
    """
    if rec.N12.value <= rec.A12.value:
        raise NoCoincidences("N12 must exceed the accidental rate A12")
    if model.C == 0:
        raise ConfigError("C must be > 0 for extraction")
    central = _extract(rec.N1.value, rec.N2.value, rec.N12.value, rec.Phi1.value, rec.Phi2.value,
                       rec.A12.value, model.C, model.eta, model.betas)
    inputs = {
        "n1": (rec.N1.value, rec.N1.sigma), "n2": (rec.N2.value, rec.N2.sigma),
        "n12": (rec.N12.value, rec.N12.sigma), "phi1": (rec.Phi1.value, rec.Phi1.sigma),
        "phi2": (rec.Phi2.value, rec.Phi2.sigma), "a12": (rec.A12.value, rec.A12.sigma),
        "C": (model.C, sigma_C), "eta": (model.eta, sigma_eta),
    }
    betas = model.betas
    res = propagate_uncertainty(inputs, lambda **kw: _extract(betas=betas, **kw), samples=samples, seed=seed)
    return Estimate(central, res.sigma)


def propagate_uncertainty(inputs: Mapping[str, tuple[float, float]], target: Callable[..., np.ndarray],
                          samples: int = 100_000, seed: int = 0) -> Estimate:
    """Push independent Gaussian inputs (mean, sigma) through ``target``.

    ``target`` is called once with keyword arrays of length ``samples``.
    Returns the sample mean and standard deviation.
    """
    if samples < 10_000:
        raise ConfigError("samples must be >= 1e4")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = {}
    for name in sorted(inputs):
        mean, sigma = inputs[name]
        if sigma < 0:
            raise ConfigError(f"sigma for {name} must be >= 0")
        draws[name] = mean + sigma * rng.standard_normal(samples) if sigma > 0 else np.full(samples, float(mean))
    out = np.asarray(target(**draws), dtype=float)
    # constant output: skip the mean subtraction that leaves rounding noise
    sigma = 0.0 if np.ptp(out) == 0 else float(np.std(out, ddof=1))
    return Estimate(float(np.mean(out)), sigma)


def monte_carlo_coincidences(N: float, model: DetectionModel, duration: float, seed: int = 0) -> DetectionRecord:
    """Event-level simulation of the counting model.

    Pairs arrive as a Poisson process.  Per pair: the first photon couples
    with probability C, the second with probability eta given the first;
    the pair is routed by one categorical draw over (tt, tr, rt, rr); each
    arm that receives light fires with its efficiency (a non-resolving
    detector registers one count however many photons arrive).  A coincidence
    needs both arms to fire on a split pair with both photons coupled.
    Backgrounds and accidentals are independent Poisson streams.  Rates are
    counts / duration with sigma = sqrt(counts) / duration.
    """
    require_nonnegative(N=N)
    require_positive(duration=duration)
    rng = np.random.Generator(np.random.PCG64(seed))
    n_pairs = int(rng.poisson(N * duration))
    gt = model.splitter.gamma_t
    gr = 1.0 - gt
    polarizing = model.splitter.kind == SplitterKind.POLARIZING
    # routing cumulative probabilities: tt, tr, rt, rr
    edges = np.cumsum([gt * gt, gt * gr, gr * gt])
    c1 = c2 = c12 = 0
    left = n_pairs
    while left > 0:
        m = min(left, CHUNK)
        left -= m
        first = rng.random(m) < model.C
        second = first & (rng.random(m) < model.eta)
        if polarizing:
            to1 = np.ones(m, bool)
            to2 = np.ones(m, bool)
            split = np.ones(m, bool)
        else:
            route = np.searchsorted(edges, rng.random(m), side="right")
            to1 = route <= 2
            to2 = route >= 1
            split = (route == 1) | (route == 2)
        fire1 = first & to1 & (rng.random(m) < model.E1)
        fire2 = first & to2 & (rng.random(m) < model.E2)
        c1 += int(np.count_nonzero(fire1))
        c2 += int(np.count_nonzero(fire2))
        c12 += int(np.count_nonzero(fire1 & fire2 & split & second))
    b1 = int(rng.poisson(model.Phi1 * duration))
    b2 = int(rng.poisson(model.Phi2 * duration))
    acc = int(rng.poisson(model.A12 * duration))

    def rate(k):
        return Measured(k / duration, math.sqrt(k) / duration)

    return DetectionRecord(
        N1=rate(c1 + b1), N2=rate(c2 + b2), N12=rate(c12 + acc),
        Phi1=Measured(model.Phi1, math.sqrt(model.Phi1 / duration)),
        Phi2=Measured(model.Phi2, math.sqrt(model.Phi2 / duration)),
        A12=Measured(model.A12, math.sqrt(model.A12 / duration)),
    )


def extraction_sigma_linear(rec: DetectionRecord, model: DetectionModel) -> float:
    """First-order propagated sigma of the extracted rate from the record's sigmas."""
    n1 = rec.N1.value - rec.Phi1.value
    n2 = rec.N2.value - rec.Phi2.value
    n12 = rec.N12.value - rec.A12.value
    rel2 = ((rec.N1.sigma**2 + rec.Phi1.sigma**2) / n1**2 + (rec.N2.sigma**2 + rec.Phi2.sigma**2) / n2**2
            + (rec.N12.sigma**2 + rec.A12.sigma**2) / n12**2)
    value = _extract(rec.N1.value, rec.N2.value, rec.N12.value, rec.Phi1.value, rec.Phi2.value,
                     rec.A12.value, model.C, model.eta, model.betas)
    return abs(value) * math.sqrt(rel2)


# ------------------------------------------------ named rate formulas

RATE_INPUTS = ("lambda_p", "d_eff", "L_z", "sigma_p", "sigma_1", "n1", "n2", "np", "ng1", "ng2", "kappa")


def _rate_formula(fn, spdc_type, poled):
    def target(lambda_p, d_eff, L_z, n1, n2, np, ng1, ng2, kappa=0.0, sigma_p=1.0, sigma_1=1.0):
        from .beams import BeamConfig
        from .phasematch import PolingConfig
        from .rates import SpdcConfig

        beam = BeamConfig(lambda_p=lambda_p, power=1e-3, sigma_p=sigma_p, sigma_1=sigma_1, n_p=np)
        cfg = SpdcConfig(n1=n1, n2=n2, np=np, ng1=ng1, ng2=ng2, d_eff=d_eff, L_z=L_z, beam=beam,
                         kappa=kappa, spdc_type=spdc_type,
                         poling=PolingConfig(period=1.0, order=1, enabled=poled))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return fn(cfg).pairs_per_second
    return target


def rate_formula(name: str) -> Callable[..., np.ndarray]:
    """Vectorized per-mW rate for ``propagate_uncertainty``.

    Names: ``sm_type01`` (poled type-0), ``total_type1`` (unpoled type-I),
    ``sm_type2`` (poled type-II).  Keyword inputs are SI values named as in
    :data:`RATE_INPUTS`.
    """
    from .rates import SpdcType, rate_sm_type01, rate_sm_type2, rate_total_type1

    table = {
        "sm_type01": (rate_sm_type01, SpdcType.TYPE0, True),
        "total_type1": (rate_total_type1, SpdcType.TYPE1, False),
        "sm_type2": (rate_sm_type2, SpdcType.TYPE2, True),
    }
    if name not in table:
        raise ConfigError(f"unknown rate formula {name!r}; choose from {sorted(table)}")
    return _rate_formula(*table[name])
