"""Run configuration: TOML files with unit-suffixed quantities.

Quantities may be plain numbers (SI) or strings such as ``"782.09nm"``,
``"40 mm"``, ``"23.95pm/V"`` or ``"1mW"``.  Everything is converted to SI
once, here.

Sections:

``[spdc]``       crystal/beam experiment for ``rate`` and ``squeeze``
``[ring]``       micro-ring experiment for ``mrr``
``[depletion]``  pump-depletion experiment for ``deplete``
``[qpm]``        poling order and growth-curve grid for ``qpm``
``[record]`` / ``[model]`` (or ``record_path`` / ``model_path``) for ``extract``
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import materials as mat
from .beams import BeamConfig
from .cavity import RingConfig, buildup_from_q, rho_from_buildup
from .depletion import DepletionSpec
from .detection import DetectionModel, DetectionRecord, Measured, Splitter
from .errors import ConfigError, SpdcError
from .phasematch import PolingConfig
from .rates import PHI_MULTIMODE, SpdcConfig, SpdcType
from .squeezing import mean_pump_photons

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

UNITS = {
    "": 1.0,
    "m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9, "pm": 1e-12,
    "W": 1.0, "mW": 1e-3, "uW": 1e-6, "µW": 1e-6,
    "m/V": 1.0, "pm/V": 1e-12,
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12,
    "Hz": 1.0, "1/s": 1.0, "kHz": 1e3, "MHz": 1e6,
    "1/m": 1.0, "1/cm": 1e2, "dB/cm": 100.0 * math.log(10.0) / 10.0,
    "s^2/m": 1.0, "K": 1.0,
}
_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(value: Any, field: str = "value") -> float:
    """Convert a number or unit-suffixed string to SI."""
    if isinstance(value, bool):
        raise ConfigError(f"{field}: expected a quantity, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{field}: expected a quantity, got {value!r}")
    m = _QTY.match(value)
    if not m or m.group(2) not in UNITS:
        raise ConfigError(f"{field}: cannot parse quantity {value!r}; units: {sorted(u for u in UNITS if u)}")
    return float(m.group(1)) * UNITS[m.group(2)]


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: Any
    stop: Any
    steps: int

    def values(self) -> list[float]:
        lo = parse_quantity(self.start, f"sweep {self.parameter}")
        hi = parse_quantity(self.stop, f"sweep {self.parameter}")
        if self.steps < 1:
            raise ConfigError("sweep steps must be >= 1")
        if self.steps == 1:
            return [lo]
        return [lo + (hi - lo) * i / (self.steps - 1) for i in range(self.steps)]


def parse_sweep(parameter: str, span: str, steps: str | int) -> Sweep:
    """``("L_z", "1mm..50mm", "50")`` -> Sweep."""
    if ".." not in span:
        raise ConfigError(f"sweep range must look like start..stop, got {span!r}")
    start, stop = span.split("..", 1)
    try:
        n = int(steps)
    except ValueError:
        raise ConfigError(f"sweep steps must be an integer, got {steps!r}") from None
    if n < 1:
        raise ConfigError("sweep steps must be >= 1")
    return Sweep(parameter, start, stop, n)


@dataclass
class RunConfig:
    data: dict
    base_dir: Path

    def section(self, name: str) -> dict:
        if name not in self.data:
            raise ConfigError(f"config has no [{name}] section")
        return dict(self.data[name])

    def with_override(self, section: str, key: str, value: float) -> "RunConfig":
        sec = self.section(section)
        if key not in sec and key not in OVERRIDABLE.get(section, ()):
            raise ConfigError(f"sweep parameter {key!r} is not a field of [{section}]")
        sec[key] = value
        data = dict(self.data)
        data[section] = sec
        return RunConfig(data, self.base_dir)


OVERRIDABLE = {
    "spdc": ("lambda_p", "power", "d_eff", "L_z", "sigma_p", "sigma_1", "n1", "n2", "np",
             "ng1", "ng2", "kappa", "delta_ng", "phi", "filter_bandwidth", "mfd_pump", "mfd_signal"),
    "ring": ("rho", "alpha", "radius", "L", "n_g", "buildup_B", "Q", "power", "d_eff", "L_x", "L_y"),
    "depletion": ("g2", "N_p0", "power", "t_max"),
}


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        data = tomllib.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from None
    return RunConfig(data, p.parent)


def _require(sec: dict, key: str, where: str):
    if key not in sec:
        raise ConfigError(f"{where}.{key} is required")
    return sec[key]


def _q(sec: dict, key: str, where: str, default=None):
    if key not in sec:
        if default is None:
            raise ConfigError(f"{where}.{key} is required")
        return default
    return parse_quantity(sec[key], f"{where}.{key}")


def resolve_material(run: RunConfig, name: str, where: str) -> mat.Material:
    """Material by shipped name, by path, or from ``materials_path``."""
    candidates = []
    if "materials_path" in run.data:
        root = run.base_dir / run.data["materials_path"]
        candidates += [root / f"{name}.toml", root / name] if root.is_dir() else [root]
    candidates.append(run.base_dir / name)
    for c in candidates:
        if c.is_file():
            m = mat.load(c)
            if c.suffix == ".toml" and c.stem.lower() != name.lower() and m.name.lower() != name.lower():
                continue
            return m
    try:
        return mat.builtin(name)
    except ConfigError:
        raise ConfigError(f"{where}.material: unknown material {name!r}; shipped: {mat.builtin_names()}") from None


def spdc_config(run: RunConfig) -> SpdcConfig:
    w = "spdc"
    sec = run.section(w)
    lambda_p = _q(sec, "lambda_p", w)
    indices = {}
    if "material" in sec:
        m = resolve_material(run, sec["material"], w)
        lam_s = _q(sec, "lambda_1", w, 2.0 * lambda_p)
        lam_i = 1.0 / (1.0 / lambda_p - 1.0 / lam_s)
        ax1 = sec.get("axis_1")
        ax2 = sec.get("axis_2", ax1)
        axp = sec.get("axis_p", ax1)
        try:
            q1 = mat.OpticalQuery(lam_s, ax1)
            q2 = mat.OpticalQuery(lam_i, ax2)
            indices = {
                "n1": mat.phase_index(m, q1), "n2": mat.phase_index(m, q2),
                "np": mat.phase_index(m, mat.OpticalQuery(lambda_p, axp)),
                "ng1": mat.group_index(m, q1), "ng2": mat.group_index(m, q2),
            }
            if sec.get("type", "type0") != "type2":
                indices["kappa"] = mat.gvd(m, q1)
        except SpdcError as exc:
            raise ConfigError(f"{w}.material: {exc}") from None
    for key in ("n1", "n2", "np", "ng1", "ng2", "kappa"):
        if key in sec:
            indices[key] = parse_quantity(sec[key], f"{w}.{key}")
    for key in ("n1", "n2", "np", "ng1", "ng2"):
        if key not in indices:
            raise ConfigError(f"{w}.{key} is required when no material is given")
    # the multimode total does not depend on the beam widths
    width_default = 1.0 if sec.get("regime") == "multimode_total" else None
    sigma_p = _q(sec, "mfd_pump", w) / 4.0 if "mfd_pump" in sec else _q(sec, "sigma_p", w, width_default)
    sigma_1 = _q(sec, "mfd_signal", w) / 4.0 if "mfd_signal" in sec else _q(sec, "sigma_1", w, width_default)
    beam = BeamConfig(lambda_p=lambda_p, power=_q(sec, "power", w, 1e-3), sigma_p=sigma_p,
                      sigma_1=sigma_1, n_p=indices["np"])
    order = int(sec.get("poling_order", 1))
    poled = bool(sec.get("poled", "poling_period" in sec))
    poling = PolingConfig(period=_q(sec, "poling_period", w, 1.0) if poled else 0.0, order=order, enabled=poled)
    try:
        spdc_type = SpdcType(sec.get("type", "type0"))
    except ValueError:
        raise ConfigError(f"{w}.type must be one of {[t.value for t in SpdcType]}") from None
    return SpdcConfig(
        n1=indices["n1"], n2=indices["n2"], np=indices["np"], ng1=indices["ng1"], ng2=indices["ng2"],
        d_eff=_q(sec, "d_eff", w), L_z=_q(sec, "L_z", w), beam=beam, kappa=indices.get("kappa", 0.0),
        delta_ng=_q(sec, "delta_ng", w) if "delta_ng" in sec else None,
        poling=poling, spdc_type=spdc_type, degenerate=bool(sec.get("degenerate", True)),
        d_eff_includes_qpm=bool(sec.get("d_eff_includes_qpm", False)),
        phi=_q(sec, "phi", w, PHI_MULTIMODE),
    )


@dataclass(frozen=True)
class RingExperiment:
    ring: RingConfig
    d_eff: float
    indices: dict
    lambda_p: float
    power: float
    L_x: float
    L_y: float


def ring_experiment(run: RunConfig) -> RingExperiment:
    w = "ring"
    sec = run.section(w)
    if "L" in sec:
        L = _q(sec, "L", w)
    else:
        L = 2.0 * math.pi * _q(sec, "radius", w)
    lambda_p = _q(sec, "lambda_p", w, 775e-9)
    n_g = _q(sec, "n_g", w, _q(sec, "ng1", w, 2.0))
    alpha = _q(sec, "alpha", w, 1.0)
    if "buildup_B" in sec:
        B = _q(sec, "buildup_B", w)
    elif "Q" in sec:
        B = buildup_from_q(_q(sec, "Q", w), lambda_p, _q(sec, "np", w, n_g), L)
    else:
        B = None
    if "rho" in sec:
        rho = _q(sec, "rho", w)
    elif B is not None:
        rho = rho_from_buildup(B, alpha)
    else:
        raise ConfigError(f"{w}.rho or {w}.buildup_B (or {w}.Q) is required")
    if B is None:
        B = 1.0
    indices = {k: _q(sec, src, w, n_g) for k, src in
               (("n_g1", "ng1"), ("n_g2", "ng2"), ("n1", "n1"), ("n2", "n2"), ("np", "np"))}
    ring = RingConfig.from_alpha(rho, alpha, L, n_g, buildup_B=B, r=_q(sec, "r", w, 0.0))
    return RingExperiment(ring=ring, d_eff=parse_quantity(sec.get("d_eff", 0.0), f"{w}.d_eff"),
                          indices=indices, lambda_p=lambda_p, power=_q(sec, "power", w, 1e-3),
                          L_x=_q(sec, "L_x", w, 1e-6), L_y=_q(sec, "L_y", w, 1e-6))


def depletion_spec(run: RunConfig) -> DepletionSpec:
    w = "depletion"
    sec = run.section(w)
    g2 = _q(sec, "g2", w)
    if "N_p0" in sec:
        n_p0 = _q(sec, "N_p0", w)
    else:
        lambda_p = _q(sec, "lambda_p", w)
        n_p0 = mean_pump_photons(_q(sec, "power", w), 2.0 * math.pi * 299792458.0 / lambda_p,
                                 _q(sec, "L_z", w), _q(sec, "np", w))
    t_max = _q(sec, "t_max", w) if "t_max" in sec else None
    return DepletionSpec(g2=g2, N_p0=n_p0, t_max=t_max, tolerance=_q(sec, "tolerance", w, 1e-10))


# ------------------------------------------------------------ detection

RECORD_KEYS = {"N1": "n1_hz", "N2": "n2_hz", "N12": "n12_hz", "Phi1": "phi1_hz", "Phi2": "phi2_hz", "A12": "a12_hz"}


def _measured(raw, where: str) -> Measured:
    if isinstance(raw, (list, tuple)):
        if len(raw) != 2:
            raise ConfigError(f"{where}: expected [value, sigma]")
        return Measured(parse_quantity(raw[0], where), parse_quantity(raw[1], where))
    return Measured(parse_quantity(raw, where), 0.0)


def record_from_dict(sec: dict) -> DetectionRecord:
    for key in ("n1_hz", "n2_hz", "n12_hz"):
        _require(sec, key, "record")
    return DetectionRecord(**{attr: _measured(sec[key], f"record.{key}") for attr, key in RECORD_KEYS.items()
                              if key in sec})


def record_to_toml(rec: DetectionRecord) -> str:
    lines = []
    for attr, key in RECORD_KEYS.items():
        m = getattr(rec, attr)
        lines.append(f"{key} = [{m.value!r}, {m.sigma!r}]")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ModelInputs:
    model: DetectionModel
    sigma_C: float = 0.0
    sigma_eta: float = 0.0


def model_from_dict(sec: dict) -> ModelInputs:
    w = "model"
    kind = sec.get("splitter", "fifty_fifty")
    try:
        splitter = Splitter(kind, _q(sec, "gamma_t", w, 0.5))
    except ValueError as exc:
        raise ConfigError(f"{w}.splitter: {exc}") from None

    def val(key, default):
        raw = sec.get(key, default)
        return _measured(raw, f"{w}.{key}")

    C, eta = val("C", 1.0), val("eta", 1.0)
    model = DetectionModel(C=C.value, eta=eta.value, E1=val("E1", 1.0).value, E2=val("E2", 1.0).value,
                           Phi1=val("Phi1", 0.0).value, Phi2=val("Phi2", 0.0).value, A12=val("A12", 0.0).value,
                           splitter=splitter)
    return ModelInputs(model, C.sigma, eta.sigma)


def _table(run: RunConfig, name: str, override: str | None) -> dict:
    if override:
        return tomllib.loads(Path(override).read_text(encoding="utf-8"))
    if name in run.data:
        return dict(run.data[name])
    key = f"{name}_path"
    if key in run.data:
        return tomllib.loads((run.base_dir / run.data[key]).read_text(encoding="utf-8"))
    raise ConfigError(f"config needs a [{name}] section or {key}")


def detection_inputs(run: RunConfig, record_path: str | None = None, model_path: str | None = None):
    return record_from_dict(_table(run, "record", record_path)), model_from_dict(_table(run, "model", model_path))
