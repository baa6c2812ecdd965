"""Parsers for the spec strings used in configs (weights, norms, actions, cocycles).

The grammar is documented in docs/grammar.md.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .coefficients import CoefficientModel, StandardModel, parse_model
from .groups import Element, Group, parse_group
from .system import (
    BicharacterCocycle,
    CoboundaryCocycle,
    Cocycle,
    PointAction,
    ProductCocycle,
    TableCocycle,
    ThetaCocycle,
    TranslationAction,
    TrivialAction,
    TrivialCocycle,
    TwistedSystem,
)
from .weights import L1, AdmissibleNorm, L1Weighted, LInfWeighted, Weight


class SpecError(ValueError):
    pass


def _elem(v) -> Element:
    if isinstance(v, int):
        return (v,)
    if isinstance(v, (list, tuple)) and all(isinstance(t, int) for t in v):
        return tuple(v)
    raise SpecError(f"{v!r} is not a group element literal")


def _load_json(path: str, base_dir: Path | None):
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    if not p.exists():
        raise SpecError(f"referenced file {str(p)!r} does not exist")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_weight(spec: str, group: Group, base_dir: Path | None = None) -> Weight:
    spec = spec.strip()
    if spec == "one":
        return Weight.one(group)
    m = re.fullmatch(r"poly:s=([0-9.eE+-]+)", spec)
    if m:
        return Weight.poly(group, float(m.group(1)))
    m = re.fullmatch(r"exp:c=([0-9.eE+-]+)", spec)
    if m:
        return Weight.exp(group, float(m.group(1)))
    if spec.startswith("table:"):
        data = _load_json(spec[6:], base_dir)
        entries = data["entries"] if isinstance(data, dict) else data
        table = {group.validate(_elem(x)): float(v) for x, v in entries}
        return Weight(group, "table", table=table, label=spec)
    raise SpecError(f"unknown weight {spec!r}")


def parse_norm(spec: str, group: Group, base_dir: Path | None = None) -> AdmissibleNorm:
    spec = spec.strip()
    if spec == "l1":
        return L1()
    if spec.startswith("l1w:"):
        return L1Weighted(parse_weight(spec[4:], group, base_dir))
    if spec.startswith("linf:"):
        body, radius = spec[5:], 16
        m = re.fullmatch(r"(.*);R=(\d+)", body)
        if m:
            body, radius = m.group(1), int(m.group(2))
        return LInfWeighted.build(parse_weight(body, group, base_dir), radius)
    raise SpecError(f"unknown norm {spec!r}")


def parse_action(spec: str, group: Group, model: CoefficientModel):
    spec = spec.strip()
    if spec == "trivial":
        return TrivialAction()
    if spec == "translation":
        if not isinstance(model, StandardModel):
            raise SpecError("translation action needs the standard coefficient model")
        return TranslationAction(group)
    if spec.startswith("point:"):
        try:
            perms = json.loads(spec[6:])
        except json.JSONDecodeError as exc:
            raise SpecError(f"point action: {exc.msg}") from None
        size = len(perms[0]) if perms else getattr(model, "size", 0)
        return PointAction(group, size, perms)
    raise SpecError(f"unknown action {spec!r}")


def _parse_one_cocycle(spec: str, group: Group, model: CoefficientModel, base_dir: Path | None) -> Cocycle:
    spec = spec.strip()
    if spec == "trivial":
        return TrivialCocycle()
    if spec.startswith("theta:"):
        try:
            return ThetaCocycle(json.loads(spec[6:]))
        except json.JSONDecodeError as exc:
            raise SpecError(f"theta matrix: {exc.msg}") from None
    if spec.startswith("bicharacter:"):
        return BicharacterCocycle(group, json.loads(spec[12:]))
    m = re.fullmatch(r"coboundary:seed=(\d+)", spec)
    if m:
        return CoboundaryCocycle(int(m.group(1)))
    if spec.startswith("table:"):
        data = _load_json(spec[6:], base_dir)
        entries = data["entries"] if isinstance(data, dict) else data
        table = {}
        for entry in entries:
            if len(entry) != 3:
                raise SpecError(f"cocycle table entry must be [x, y, value], got {entry!r}")
            x, y, v = entry
            table[group.validate(_elem(x)), group.validate(_elem(y))] = model.from_json(v)
        return TableCocycle(table, label=spec)
    raise SpecError(f"unknown cocycle {spec!r}")


def parse_cocycle(spec: str, group: Group, model: CoefficientModel, base_dir: Path | None = None) -> Cocycle:
    """One cocycle or a pointwise product "c1*c2*..."."""
    parts = [_parse_one_cocycle(s, group, model, base_dir) for s in spec.split("*")]
    return parts[0] if len(parts) == 1 else ProductCocycle(parts)


def build_system(group: str, coefficients: str = "scalar", action: str = "trivial", cocycle: str = "trivial",
                 base_dir: Path | None = None) -> TwistedSystem:
    g = parse_group(group)
    model = parse_model(coefficients, g)
    return TwistedSystem(g, model, parse_action(action, g, model), parse_cocycle(cocycle, g, model, base_dir))


# Named systems exercised by the law sweeps: (group, coefficients, action, cocycle).
BUILTIN_SYSTEMS: dict[str, tuple[str, str, str, str]] = {
    "Z-trivial": ("Z", "scalar", "trivial", "trivial"),
    "Z2-torus": ("Z^2", "scalar", "trivial", "theta:[[0,0.25],[-0.25,0]]"),
    "Z2-torus-generic": ("Z^2", "scalar", "trivial", "theta:[[0,0.1234],[-0.1234,0]]"),
    "Z3-torus": ("Z^3", "scalar", "trivial", "theta:[[0,0.25,0.5],[-0.25,0,0.75],[-0.5,-0.75,0]]"),
    "C6-bicharacter": ("C6", "scalar", "trivial", "bicharacter:[[1]]"),
    "C4xC4-bicharacter": ("C4xC4", "scalar", "trivial", "bicharacter:[[0,1],[0,0]]"),
    "D3-coboundary": ("D3", "scalar", "trivial", "coboundary:seed=11"),
    "Heis3-coboundary": ("Heis3", "scalar", "trivial", "coboundary:seed=12"),
    "C2xC4-coboundary": ("C2xC4", "scalar", "trivial", "coboundary:seed=13"),
    "C4-spectrum": ("C4", "finite:2", "point:[[1,0]]", "coboundary:seed=14"),
    "Z-spectrum": ("Z", "finite:3", "point:[[1,2,0]]", "coboundary:seed=15"),
    "C4-standard": ("C4", "standard", "translation", "coboundary:seed=16"),
    "Z-standard": ("Z", "standard", "translation", "coboundary:seed=17"),
    "Z2-standard-torus": ("Z^2", "standard", "translation", "theta:[[0,0.25],[-0.25,0]]*coboundary:seed=18"),
}


def builtin_system(name: str) -> TwistedSystem:
    return build_system(*BUILTIN_SYSTEMS[name])
