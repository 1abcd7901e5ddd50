"""Refractive index, group index and group-velocity dispersion providers.

Two index models are supported:

* ``tabulated``: fixed constants (n, n_g, kappa) at named wavelengths.  The
  three reference experiments ship this way so that no dispersion data has
  to be invented.
* ``sellmeier``: per-axis coefficient sets, with analytic first and second
  wavelength derivatives.

Material files are TOML.  Wavelengths are stored in nm in files and
converted to metres once on load.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

import tomli_w
from scipy.constants import c as C_LIGHT

from .errors import ConfigError, MissingEntry, OutOfRange, UnknownAxis

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

# Queries within 0.001 nm of a tabulated wavelength hit that entry.
MATCH_TOL_M = 1e-12

SELLMEIER_VARIANTS = ("sellmeier", "sellmeier_ir")


@dataclass(frozen=True)
class TabulatedEntry:
    wavelength: float
    n: float
    n_g: float | None = None
    kappa: float | None = None


@dataclass(frozen=True)
class TabulatedAxis:
    entries: tuple[TabulatedEntry, ...]
    normal_dispersion: bool = False


@dataclass(frozen=True)
class SellmeierAxis:
    """n^2 = A + sum_i B_i L^2/(L^2 - C_i) - D L^2 with L in micrometres.

    The ``sellmeier`` variant forces D = 0; ``sellmeier_ir`` keeps the
    infrared correction term.
    """

    A: float
    B: tuple[float, ...] = ()
    C: tuple[float, ...] = ()
    D: float = 0.0
    variant: str = "sellmeier"
    normal_dispersion: bool = False


@dataclass(frozen=True)
class Material:
    name: str
    model: str
    axes: Mapping[str, TabulatedAxis | SellmeierAxis]
    valid_range: tuple[float, float]
    temperature_reference: float | None = None

    def axis(self, label: str | None):
        if label is None:
            if len(self.axes) == 1:
                return next(iter(self.axes.values()))
            raise UnknownAxis(f"{self.name}: axis required, one of {sorted(self.axes)}")
        try:
            return self.axes[label]
        except KeyError:
            raise UnknownAxis(f"{self.name}: unknown axis {label!r}, have {sorted(self.axes)}") from None


@dataclass(frozen=True)
class OpticalQuery:
    wavelength: float
    axis: str | None = None
    temperature: float | None = None

    def __post_init__(self):
        if not self.wavelength > 0:
            raise OutOfRange(f"wavelength must be > 0, got {self.wavelength}")


def _check_range(material: Material, q: OpticalQuery):
    lo, hi = material.valid_range
    if not lo <= q.wavelength <= hi:
        raise OutOfRange(
            f"{material.name}: {q.wavelength * 1e9:.6g} nm outside "
            f"[{lo * 1e9:.6g}, {hi * 1e9:.6g}] nm"
        )


def _entry(material: Material, axis: TabulatedAxis, q: OpticalQuery) -> TabulatedEntry:
    for e in axis.entries:
        if abs(e.wavelength - q.wavelength) <= MATCH_TOL_M:
            return e
    raise MissingEntry(f"{material.name}: no tabulated entry at {q.wavelength * 1e9:.6g} nm")


def _sellmeier_terms(ax: SellmeierAxis, lam_um: float):
    """Return n^2 and its first two derivatives with respect to L (um)."""
    l2 = lam_um * lam_um
    f = ax.A - ax.D * l2
    f1 = -2.0 * ax.D * lam_um
    f2 = -2.0 * ax.D
    for b, cc in zip(ax.B, ax.C):
        den = l2 - cc
        f += b * l2 / den
        f1 += -2.0 * b * cc * lam_um / den**2
        f2 += 2.0 * b * cc * (3.0 * l2 + cc) / den**3
    return f, f1, f2


def _sellmeier_derivs(ax: SellmeierAxis, lam: float):
    """n, dn/dlambda (1/m), d2n/dlambda2 (1/m^2) at vacuum wavelength lam (m)."""
    f, f1, f2 = _sellmeier_terms(ax, lam * 1e6)
    if f <= 0:
        raise OutOfRange(f"Sellmeier n^2 = {f} <= 0 at {lam * 1e9:.6g} nm")
    n = math.sqrt(f)
    dn = f1 / (2.0 * n)
    d2n = (f2 / 2.0 - dn * dn) / n
    return n, dn * 1e6, d2n * 1e12


def phase_index(material: Material, q: OpticalQuery) -> float:
    _check_range(material, q)
    ax = material.axis(q.axis)
    if isinstance(ax, TabulatedAxis):
        return _entry(material, ax, q).n
    return _sellmeier_derivs(ax, q.wavelength)[0]


def group_index(material: Material, q: OpticalQuery) -> float:
    _check_range(material, q)
    ax = material.axis(q.axis)
    if isinstance(ax, TabulatedAxis):
        e = _entry(material, ax, q)
        if e.n_g is None:
            raise MissingEntry(f"{material.name}: no group index at {q.wavelength * 1e9:.6g} nm")
        return e.n_g
    n, dn, _ = _sellmeier_derivs(ax, q.wavelength)
    return n - q.wavelength * dn


def gvd(material: Material, q: OpticalQuery) -> float:
    """kappa = d^2k/domega^2 = lambda^3/(2 pi c^2) d^2n/dlambda^2, in s^2/m."""
    _check_range(material, q)
    ax = material.axis(q.axis)
    if isinstance(ax, TabulatedAxis):
        e = _entry(material, ax, q)
        if e.kappa is None:
            raise MissingEntry(f"{material.name}: no GVD at {q.wavelength * 1e9:.6g} nm")
        return e.kappa
    lam = q.wavelength
    _, _, d2n = _sellmeier_derivs(ax, lam)
    return lam**3 / (2.0 * math.pi * C_LIGHT**2) * d2n


VACUUM = Material(
    name="vacuum",
    model="sellmeier",
    axes={"iso": SellmeierAxis(A=1.0)},
    valid_range=(1e-12, 1.0),
)


# ---------------------------------------------------------------- file I/O


def _parse_axis(model: str, label: str, block: dict):
    normal = bool(block.get("normal_dispersion", False))
    if model == "tabulated":
        raw = block.get("entries")
        if not raw:
            raise ConfigError(f"axis {label!r}: tabulated model needs 'entries'")
        entries = []
        for e in raw:
            try:
                entries.append(
                    TabulatedEntry(
                        wavelength=float(e["lambda_nm"]) / 1e9,
                        n=float(e["n"]),
                        n_g=None if "n_g" not in e else float(e["n_g"]),
                        kappa=None if "kappa_s2_per_m" not in e else float(e["kappa_s2_per_m"]),
                    )
                )
            except KeyError as exc:
                raise ConfigError(f"axis {label!r}: entry missing field {exc}") from None
        return TabulatedAxis(entries=tuple(entries), normal_dispersion=normal)
    if model == "sellmeier":
        variant = block.get("variant", "sellmeier")
        if variant not in SELLMEIER_VARIANTS:
            raise ConfigError(f"axis {label!r}: unknown Sellmeier variant {variant!r}")
        B = tuple(float(x) for x in block.get("B", ()))
        Cc = tuple(float(x) for x in block.get("C", ()))
        if len(B) != len(Cc):
            raise ConfigError(f"axis {label!r}: B and C must have equal length")
        D = float(block.get("D", 0.0)) if variant == "sellmeier_ir" else 0.0
        return SellmeierAxis(A=float(block["A"]), B=B, C=Cc, D=D, variant=variant, normal_dispersion=normal)
    raise ConfigError(f"unknown model {model!r}; expected 'tabulated' or 'sellmeier'")


def _validate(m: Material):
    for label, ax in m.axes.items():
        if isinstance(ax, TabulatedAxis):
            for e in ax.entries:
                if e.n < 1:
                    raise ConfigError(f"{m.name}/{label}: n < 1 at {e.wavelength * 1e9:g} nm")
                if ax.normal_dispersion:
                    if e.n_g is not None and e.n_g < e.n:
                        raise ConfigError(f"{m.name}/{label}: n_g < n in a normal-dispersion block")
                    if e.kappa is not None and not (math.isfinite(e.kappa) and e.kappa > 0):
                        raise ConfigError(f"{m.name}/{label}: kappa must be positive")


def material_from_dict(data: dict) -> Material:
    for key in ("name", "model", "valid_range_nm", "axes"):
        if key not in data:
            raise ConfigError(f"material file missing field {key!r}")
    lo, hi = (float(x) / 1e9 for x in data["valid_range_nm"])
    if not 0 < lo < hi:
        raise ConfigError("valid_range_nm must be [lo, hi] with 0 < lo < hi")
    model = data["model"]
    axes = {label: _parse_axis(model, label, block) for label, block in data["axes"].items()}
    t_ref = data.get("temperature_reference_k")
    m = Material(
        name=str(data["name"]),
        model=model,
        axes=axes,
        valid_range=(lo, hi),
        temperature_reference=None if t_ref is None else float(t_ref),
    )
    _validate(m)
    return m


def _nm(x: float) -> float:
    # round away float noise from the m -> nm conversion
    return float(f"{x * 1e9:.12g}")


def material_to_dict(m: Material) -> dict:
    out: dict = {
        "name": m.name,
        "model": m.model,
        "valid_range_nm": [_nm(m.valid_range[0]), _nm(m.valid_range[1])],
    }
    if m.temperature_reference is not None:
        out["temperature_reference_k"] = m.temperature_reference
    axes = {}
    for label, ax in m.axes.items():
        block: dict = {}
        if ax.normal_dispersion:
            block["normal_dispersion"] = True
        if isinstance(ax, TabulatedAxis):
            entries = []
            for e in ax.entries:
                d = {"lambda_nm": _nm(e.wavelength), "n": e.n}
                if e.n_g is not None:
                    d["n_g"] = e.n_g
                if e.kappa is not None:
                    d["kappa_s2_per_m"] = e.kappa
                entries.append(d)
            block["entries"] = entries
        else:
            block.update(variant=ax.variant, A=ax.A, B=list(ax.B), C=list(ax.C))
            if ax.variant == "sellmeier_ir":
                block["D"] = ax.D
        axes[label] = block
    out["axes"] = axes
    return out


def loads(text: str) -> Material:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"material file is not valid TOML: {exc}") from None
    return material_from_dict(data)


def dumps(m: Material) -> str:
    return tomli_w.dumps(material_to_dict(m))


def load(path: str | Path) -> Material:
    return loads(Path(path).read_text(encoding="utf-8"))


def builtin_names() -> list[str]:
    root = resources.files("spdcrate") / "data" / "materials"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def builtin(name: str) -> Material:
    """Load one of the shipped materials by (case-insensitive) name."""
    key = name.lower()
    if key == "vacuum":
        return VACUUM
    if key not in builtin_names():
        raise ConfigError(f"unknown material {name!r}; shipped: {builtin_names()}")
    text = (resources.files("spdcrate") / "data" / "materials" / f"{key}.toml").read_text(encoding="utf-8")
    return loads(text)
