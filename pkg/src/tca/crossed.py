"""Finitely supported elements of the twisted crossed product l^1_{alpha,omega}(G; A).

    (f . g)(x) = sum_y f(y) alpha_y[g(y^-1 x)] omega(y, y^-1 x)
    f^(x)      = omega(x, x^-1)^* alpha_x[f(x^-1)]^*

Finitely supported elements are closed under both operations, so nothing is
truncated here.  Sums run over sorted support so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .coefficients import ScalarModel
from .groups import Element
from .system import TrivialAction, TwistedSystem
from .weights import AdmissibleNorm

PRUNE = 1e-300
DEFAULT_BUDGET = 200_000


class BudgetExceeded(RuntimeError):
    """Raised by :func:`power` when the next square would exceed the support budget."""

    def __init__(self, message: str, level: int, powers: list, norms: list[float]) -> None:
        super().__init__(message)
        self.level = level
        self.powers = powers
        self.norms = norms


def _negligible(model, value) -> bool:
    return model.norm(value) < PRUNE


@dataclass(frozen=True)
class CrossedElement:
    system: TwistedSystem
    coeffs: Mapping[Element, object]
    meta: dict = field(default_factory=lambda: {"prune": PRUNE}, compare=False, repr=False)

    @classmethod
    def make(cls, system: TwistedSystem, coeffs: Mapping | Iterable) -> CrossedElement:
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        A = system.model
        merged: dict[Element, object] = {}
        for x, v in items:
            x = system.group.validate(tuple(x))
            v = A.coerce(v)
            merged[x] = A.add(merged[x], v) if x in merged else v
        return cls(system, {x: merged[x] for x in sorted(merged) if not _negligible(A, merged[x])})

    @classmethod
    def unit(cls, system: TwistedSystem) -> CrossedElement:
        return cls(system, {system.group.identity(): system.model.one()})

    @classmethod
    def point_mass(cls, system: TwistedSystem, x: Element, c=1.0) -> CrossedElement:
        return cls.make(system, {x: c})

    @classmethod
    def zero(cls, system: TwistedSystem) -> CrossedElement:
        return cls(system, {})

    @property
    def support(self) -> list[Element]:
        return list(self.coeffs)

    def __call__(self, x: Element):
        return self.coeffs.get(x, self.system.model.zero())

    def __len__(self) -> int:
        return len(self.coeffs)

    def _check(self, other: CrossedElement) -> None:
        if other.system is not self.system:
            raise ValueError("elements belong to different twisted systems")

    def __add__(self, other: CrossedElement) -> CrossedElement:
        self._check(other)
        return CrossedElement.make(self.system, list(self.coeffs.items()) + list(other.coeffs.items()))

    def __sub__(self, other: CrossedElement) -> CrossedElement:
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> CrossedElement:
        A = self.system.model
        return CrossedElement.make(self.system, {x: A.scale(v, c) for x, v in self.coeffs.items()})

    def __mul__(self, other: CrossedElement) -> CrossedElement:
        return product(self, other)

    def star(self) -> CrossedElement:
        return involution(self)

    def norm(self, n: AdmissibleNorm) -> float:
        return norm(self, n)

    def coefficient_norms(self) -> dict[Element, float]:
        A = self.system.model
        return {x: A.norm(v) for x, v in self.coeffs.items()}

    def distance(self, other: CrossedElement) -> float:
        """l^1 distance, sum_x ||f(x) - g(x)||_A."""
        import math

        A = self.system.model
        zero, dn = A.zero(), A.diff_norm
        a, b = self.coeffs, other.coeffs
        # fsum is correctly rounded, so the key order does not matter
        return math.fsum([dn(a.get(x, zero), b.get(x, zero)) for x in a.keys() | b.keys()])

    def to_json(self) -> dict:
        A = self.system.model
        return {"terms": [[list(x), A.to_json(v)] for x, v in self.coeffs.items()]}

    @classmethod
    def from_json(cls, system: TwistedSystem, data) -> CrossedElement:
        terms = data["terms"] if isinstance(data, dict) else data
        A = system.model
        out = []
        for entry in terms:
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise ValueError(f"element term must be [group element, coefficient], got {entry!r}")
            x, v = entry
            x = (x,) if isinstance(x, int) else tuple(x)
            out.append((x, A.from_json(v)))
        return cls.make(system, out)


def product(f: CrossedElement, g: CrossedElement) -> CrossedElement:
    f._check(g)
    sys = f.system
    A, grp = sys.model, sys.group
    out: dict[Element, object] = {}
    if isinstance(A, ScalarModel) and isinstance(sys.action, TrivialAction):
        mul, omega, get = grp.multiply, sys.omega, out.get
        gitems = list(g.coeffs.items())
        for y, fy in f.coeffs.items():
            for t, gt in gitems:
                x = mul(y, t)
                out[x] = get(x, 0j) + fy * gt * omega(y, t)
        return CrossedElement(sys, {x: out[x] for x in sorted(out) if not abs(out[x]) < PRUNE})
    else:
        for y, fy in f.coeffs.items():
            for t, gt in g.coeffs.items():
                x = grp.multiply(y, t)
                term = A.mul(A.mul(fy, sys.act(y, gt)), sys.omega(y, t))
                out[x] = A.add(out[x], term) if x in out else term
    return CrossedElement(sys, {x: out[x] for x in sorted(out) if not _negligible(A, out[x])})


def involution(f: CrossedElement) -> CrossedElement:
    sys = f.system
    A, grp = sys.model, sys.group
    out = {}
    for y, fy in f.coeffs.items():
        x = grp.inverse(y)
        out[x] = A.mul(A.conj(sys.omega(x, y)), A.conj(sys.act(x, fy)))
    return CrossedElement(sys, {x: out[x] for x in sorted(out)})


def norm(f: CrossedElement, n: AdmissibleNorm) -> float:
    return n.of_moduli(f.coefficient_norms())


def power(f: CrossedElement, n: int, norm_kind: AdmissibleNorm, budget: int = DEFAULT_BUDGET):
    """f^(2^j) for j = 0..log2(n) by repeated squaring, with their norms.

    ``n`` must be a power of two.  Before each squaring the support of the
    square is bounded by |supp|^2 and computed exactly when that bound
    exceeds the budget; :class:`BudgetExceeded` carries everything computed
    so far.
    """
    if n < 1 or n & (n - 1):
        raise ValueError("power exponent must be a power of two")
    grp = f.system.group
    powers = [f]
    norms = [norm(f, norm_kind)]
    level = 0
    while (1 << level) < n:
        cur = powers[-1]
        if len(cur) ** 2 > budget:
            keys = {grp.multiply(a, b) for a in cur.coeffs for b in cur.coeffs}
            if len(keys) > budget:
                raise BudgetExceeded(
                    f"support of level {level + 1} would have {len(keys)} entries (budget {budget})",
                    level, powers, norms,
                )
        nxt = product(cur, cur)
        powers.append(nxt)
        norms.append(norm(nxt, norm_kind))
        level += 1
    return powers[-1], norms, powers


# ----------------------------------------------------------------------------
# three-variable view over the spectrum of an abelian coefficient algebra


def scalar_case_abelian(f: CrossedElement) -> Callable[[Element, object], complex]:
    """The function (x, sigma) -> f(x)(sigma)."""
    A = f.system.model
    if isinstance(A, ScalarModel):
        raise ValueError("the three-variable view needs finite-spectrum or standard coefficients")
    return lambda x, s: A.evaluate(f(x), s)


def abelian_product_at(system: TwistedSystem, F, G, supp_f, supp_g, x: Element, s) -> complex:
    """(f . g)(x; s) = sum_y f(y; s) g(y^-1 x; y^-1 . s) omega(y, y^-1 x; s)."""
    grp, A, act = system.group, system.model, system.action
    supp_g = set(supp_g)
    total = 0j
    for y in supp_f:
        yi = grp.inverse(y)
        t = grp.multiply(yi, x)
        if t in supp_g:
            total += F(y, s) * G(t, act.move_point(yi, s)) * A.evaluate(system.omega(y, t), s)
    return total


def abelian_involution_at(system: TwistedSystem, F, x: Element, s) -> complex:
    """f^(x; s) = conj omega(x, x^-1; s) conj f(x^-1; x^-1 . s)."""
    grp, A = system.group, system.model
    xi = grp.inverse(x)
    return (A.evaluate(system.omega(x, xi), s) * F(xi, system.action.move_point(xi, s))).conjugate()


def compare_abelian(f: CrossedElement, g: CrossedElement, points: Iterable) -> dict[str, float]:
    """Largest gap between the algebra operations and the three-variable formulas."""
    sys = f.system
    F, G = scalar_case_abelian(f), scalar_case_abelian(g)
    fg, fs = product(f, g), involution(f)
    FG, FS = scalar_case_abelian(fg), scalar_case_abelian(fs)
    grp = sys.group
    xs = sorted({grp.multiply(a, b) for a in f.coeffs for b in g.coeffs})
    xi = sorted(grp.inverse(a) for a in f.coeffs)
    points = list(points)
    prod_gap = max((abs(FG(x, s) - abelian_product_at(sys, F, G, f.support, g.support, x, s))
                    for x in xs for s in points), default=0.0)
    inv_gap = max((abs(FS(x, s) - abelian_involution_at(sys, F, x, s)) for x in xi for s in points),
                  default=0.0)
    return {"product": prod_gap, "involution": inv_gap}


def random_element(system: TwistedSystem, rng, size: int = 3, radius: int = 2) -> CrossedElement:
    from .groups import random_element as rand_g

    items = [(rand_g(system.group, rng, radius), system.random_coefficient(rng)) for _ in range(size)]
    return CrossedElement.make(system, items)
