"""Commutative unital coefficient algebras A.

Three models, each a small strategy object acting on immutable values:

* ``ScalarModel``          A = C, values are ``complex``
* ``FiniteSpectrumModel``  A = C(Sigma) for a finite Sigma = {0..s-1}, values are tuples
* ``StandardModel``        constants plus finitely supported corrections on G,
                           values are :class:`StandardFunction`

Every model knows how to evaluate a value at a point of its spectrum, which is
all the Hilbert-space representations need (A is commutative, so every
representation used here is a multiplication operator).
"""

from __future__ import annotations

import cmath
import operator
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .groups import Element, Group

UNIT_TOL = 1e-12


def _c(v: Any) -> complex:
    """Parse a complex literal: number, [re, im] or "a+bj"."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex literal must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def complex_to_json(z: complex) -> list[float]:
    return [z.real, z.imag]


@dataclass(frozen=True)
class StandardFunction:
    """phi(y) = background + corrections.get(y, 0) for y in G."""

    background: complex
    corrections: tuple[tuple[Element, complex], ...] = ()

    @classmethod
    def make(cls, background: complex, corrections: Mapping[Element, complex] | Iterable = ()) -> StandardFunction:
        items = corrections.items() if isinstance(corrections, Mapping) else corrections
        return cls(complex(background), tuple(sorted((tuple(k), complex(v)) for k, v in items)))

    @property
    def table(self) -> dict[Element, complex]:
        return dict(self.corrections)

    @property
    def support(self) -> tuple[Element, ...]:
        return tuple(k for k, _ in self.corrections)

    def __call__(self, y: Element) -> complex:
        for k, v in self.corrections:
            if k == y:
                return self.background + v
        return self.background


class CoefficientModel:
    tag: str

    def one(self): ...
    def zero(self): ...
    def from_scalar(self, c: complex): ...
    def add(self, a, b): ...
    def mul(self, a, b): ...
    def scale(self, a, c: complex): ...
    def conj(self, a): ...
    def norm(self, a) -> float: ...
    def evaluate(self, a, point) -> complex: ...
    def to_json(self, a): ...
    def from_json(self, data): ...

    def sub(self, a, b):
        return self.add(a, self.scale(b, -1.0))

    def diff_norm(self, a, b) -> float:
        return self.norm(self.sub(a, b))

    def is_zero(self, a) -> bool:
        return not self.norm(a) > 0

    def is_unitary(self, a, tol: float = UNIT_TOL) -> bool:
        return self.unitarity_defect(a) <= tol

    def unitarity_defect(self, a) -> float:
        return abs(self.norm(self.mul(a, self.conj(a))) - 1.0) + self.norm(
            self.sub(self.mul(a, self.conj(a)), self.one())
        )

    def coerce(self, value):
        """Embed complex scalars as constants; pass native values through."""
        if isinstance(value, (int, float, complex)):
            return self.from_scalar(complex(value))
        return value

    def random(self, rng, group: Group | None = None):
        raise NotImplementedError


class ScalarModel(CoefficientModel):
    tag = "scalar"

    def one(self):
        return 1 + 0j

    def zero(self):
        return 0j

    def from_scalar(self, c):
        return complex(c)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def scale(self, a, c):
        return a * c

    def conj(self, a):
        return a.conjugate()

    def norm(self, a):
        return abs(a)

    def diff_norm(self, a, b):
        return abs(a - b)

    def is_zero(self, a):
        return not abs(a) > 0

    def unitarity_defect(self, a):
        return abs(abs(a) - 1.0)

    def evaluate(self, a, point=None):
        return a

    def to_json(self, a):
        return complex_to_json(a)

    def from_json(self, data):
        return _c(data)

    def random(self, rng, group=None):
        return complex(rng.normal(), rng.normal())

    def __repr__(self):
        return "ScalarModel()"


class FiniteSpectrumModel(CoefficientModel):
    tag = "finite"

    def __init__(self, size: int) -> None:
        if size < 1:
            raise ValueError("spectrum size must be positive")
        self.size = size
        self.points = tuple(range(size))

    def one(self):
        return (1 + 0j,) * self.size

    def zero(self):
        return (0j,) * self.size

    def from_scalar(self, c):
        return (complex(c),) * self.size

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a, b):
        return tuple(x * y for x, y in zip(a, b))

    def scale(self, a, c):
        return tuple(x * c for x in a)

    def conj(self, a):
        return tuple(x.conjugate() for x in a)

    def norm(self, a):
        return max(abs(x) for x in a)

    def unitarity_defect(self, a):
        return max(abs(abs(x) - 1.0) for x in a)

    def evaluate(self, a, point):
        return a[point]

    def to_json(self, a):
        return [complex_to_json(x) for x in a]

    def from_json(self, data):
        if not isinstance(data, list):
            return self.from_scalar(_c(data))
        vals = tuple(_c(v) for v in data)
        if len(vals) != self.size:
            raise ValueError(f"expected {self.size} spectral values, got {len(vals)}")
        return vals

    def random(self, rng, group=None):
        return tuple(complex(rng.normal(), rng.normal()) for _ in range(self.size))

    def __repr__(self):
        return f"FiniteSpectrumModel({self.size})"


class StandardModel(CoefficientModel):
    """Translation-invariant unital subalgebra of l^inf(G): constants + finite corrections."""

    tag = "standard"

    def __init__(self, group: Group) -> None:
        self.group = group

    def one(self):
        return StandardFunction(1 + 0j)

    def zero(self):
        return StandardFunction(0j)

    def from_scalar(self, c):
        return StandardFunction(complex(c))

    def _combine(self, a: StandardFunction, b: StandardFunction, op) -> StandardFunction:
        abg, bbg = a.background, b.background
        bg = op(abg, bbg)
        ta, tb = dict(a.corrections), dict(b.corrections)
        keys = sorted((ta.keys() | tb.keys()) if ta and tb else (ta.keys() or tb.keys()))
        fa, fb = ta.get, tb.get
        if op is operator.mul:
            vals = [(k, (abg + fa(k, 0)) * (bbg + fb(k, 0)) - bg) for k in keys]
        elif op is operator.add:
            vals = [(k, (abg + fa(k, 0)) + (bbg + fb(k, 0)) - bg) for k in keys]
        else:
            vals = [(k, op(abg + fa(k, 0), bbg + fb(k, 0)) - bg) for k in keys]
        return StandardFunction(bg, tuple([kv for kv in vals if kv[1] != 0]))

    def add(self, a, b):
        return self._combine(a, b, operator.add)

    def sub(self, a, b):
        return self._combine(a, b, operator.sub)

    def mul(self, a, b):
        if not b.corrections:
            return self.scale(a, b.background)
        if not a.corrections:
            return self.scale(b, a.background)
        return self._combine(a, b, operator.mul)

    def scale(self, a, c):
        c = complex(c)
        return StandardFunction(a.background * c, tuple((k, v * c) for k, v in a.corrections if v * c != 0))

    def conj(self, a):
        return StandardFunction(a.background.conjugate(), tuple((k, v.conjugate()) for k, v in a.corrections))

    def norm(self, a):
        vals = [abs(a.background + v) for _, v in a.corrections]
        if not (self.group.finite and len(a.corrections) >= self.group.order):
            vals.append(abs(a.background))
        return max(vals)

    def is_zero(self, a):
        # on an infinite group the background is attained somewhere, so a
        # finite nonzero background settles it without scanning corrections
        bg = a.background
        if bg != 0 and cmath.isfinite(bg) and not self.group.finite:
            if all(cmath.isfinite(v) for _, v in a.corrections):
                return False
        return not self.norm(a) > 0

    def unitarity_defect(self, a):
        vals = [abs(abs(a.background + v) - 1.0) for _, v in a.corrections]
        if not (self.group.finite and len(a.corrections) >= self.group.order):
            vals.append(abs(abs(a.background) - 1.0))
        return max(vals)

    def evaluate(self, a, point):
        return a(point)

    def translate(self, x: Element, a: StandardFunction) -> StandardFunction:
        """[alpha_x a](y) = a(x^-1 y): correction at k moves to x k."""
        mul = self.group.multiply
        return StandardFunction(a.background, tuple(sorted((mul(x, k), v) for k, v in a.corrections)))

    def to_json(self, a):
        return {
            "background": complex_to_json(a.background),
            "corrections": [[list(k), complex_to_json(v)] for k, v in a.corrections],
        }

    def from_json(self, data):
        if not isinstance(data, dict):
            return self.from_scalar(_c(data))
        corr = {}
        for k, v in data.get("corrections", []):
            corr[self.group.validate(tuple(int(t) for t in k))] = _c(v)
        return StandardFunction.make(_c(data.get("background", 0)), corr)

    def random(self, rng, group=None, radius: int = 2, n_corr: int = 3):
        from .groups import random_element

        corr = {}
        for _ in range(n_corr):
            corr[random_element(self.group, rng, radius)] = complex(rng.normal(), rng.normal())
        return StandardFunction.make(complex(rng.normal(), rng.normal()), corr)

    def __repr__(self):
        return f"StandardModel({self.group.name})"


def unit_phase(turns: float) -> complex:
    """exp(2 pi i t), exact when 4t is an integer."""
    frac = turns - float(int(turns // 1))
    quarter = 4.0 * frac
    if quarter == int(quarter):
        return (1 + 0j, 1j, -1 + 0j, -1j)[int(quarter) % 4]
    return cmath.exp(2j * cmath.pi * frac)


def parse_model(spec: str, group: Group) -> CoefficientModel:
    """"scalar", "finite:<n>" or "standard"."""
    spec = spec.strip()
    if spec == "scalar":
        return ScalarModel()
    if spec == "standard":
        return StandardModel(group)
    if spec.startswith("finite:"):
        return FiniteSpectrumModel(int(spec.split(":", 1)[1]))
    raise ValueError(f"unknown coefficient model {spec!r}")


def model_spec(model: CoefficientModel) -> str:
    if isinstance(model, FiniteSpectrumModel):
        return f"finite:{model.size}"
    return model.tag
