"""Scalar convolution algebra on a discrete group, weights and admissible norms.

Finitely supported functions are plain ``dict[Element, complex]``.  All sums
run over sorted keys so results do not depend on dict insertion order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .groups import Element, Group, GroupError, word_shells

ScalarFunction = dict  # Element -> complex


def convolve(group: Group, k: Mapping, l: Mapping, prune: float = 0.0) -> dict:
    """(k * l)(x) = sum_y k(y) l(y^-1 x)."""
    out: dict[Element, complex] = {}
    for y in sorted(k):
        ky = k[y]
        for t in sorted(l):
            x = group.multiply(y, t)
            out[x] = out.get(x, 0) + ky * l[t]
    return {x: out[x] for x in sorted(out) if abs(out[x]) >= prune}


def involve(group: Group, k: Mapping) -> dict:
    """k*(x) = conj(k(x^-1))."""
    return {x: v for x, v in sorted((group.inverse(y), complex(v).conjugate()) for y, v in k.items())}


def point_mass(x: Element, c: complex = 1.0) -> dict:
    return {x: complex(c)}


@dataclass(frozen=True)
class Weight:
    """A weight nu(x) derived from word length, or given by an explicit table.

    ``kind`` is one of "one", "poly", "exp", "table", "custom".
    """

    group: Group
    kind: str
    param: float = 0.0
    table: Mapping[Element, float] | None = None
    func: Callable[[int], float] | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind == "poly" and self.param < 0:
            raise ValueError("polynomial weight exponent must be >= 0")
        if self.kind == "exp" and self.param < 0:
            raise ValueError("exponential weight rate must be >= 0")
        if self.kind == "table":
            if not self.group.finite:
                raise ValueError("table weights need a finite group")
            missing = set(self.group.elements()) - set(self.table or {})
            if missing:
                raise ValueError(f"weight table misses {len(missing)} elements, e.g. {min(missing)}")

    @classmethod
    def one(cls, group: Group) -> Weight:
        return cls(group, "one")

    @classmethod
    def poly(cls, group: Group, s: float) -> Weight:
        return cls(group, "poly", float(s))

    @classmethod
    def exp(cls, group: Group, c: float) -> Weight:
        return cls(group, "exp", float(c))

    @classmethod
    def from_table(cls, group: Group, values: Mapping[Element, float]) -> Weight:
        return cls(group, "table", table=dict(values))

    @classmethod
    def from_length(cls, group: Group, func: Callable[[int], float], label: str = "custom") -> Weight:
        """Arbitrary function of word length; no axioms are enforced."""
        return cls(group, "custom", func=func, label=label)

    def __call__(self, x: Element) -> float:
        if self.kind == "one":
            return 1.0
        if self.kind == "table":
            return float(self.table[x])
        n = self.group.length(x)
        if self.kind == "poly":
            return (1.0 + n) ** self.param
        if self.kind == "exp":
            return math.exp(self.param * n)
        return float(self.func(n))

    def spec(self) -> str:
        if self.kind == "one":
            return "one"
        if self.kind == "poly":
            return f"poly:s={self.param:g}"
        if self.kind == "exp":
            return f"exp:c={self.param:g}"
        return self.label or self.kind


class AdmissibleNorm:
    """Norm on finitely supported functions; evaluated on |k| only (solid)."""

    kind: str

    def weight_at(self, x: Element) -> float:
        raise NotImplementedError

    def of_moduli(self, moduli: Mapping[Element, float]) -> float:
        raise NotImplementedError

    def __call__(self, k: Mapping) -> float:
        return self.of_moduli({x: abs(v) for x, v in k.items()})


@dataclass(frozen=True)
class L1(AdmissibleNorm):
    kind = "l1"

    def weight_at(self, x):
        return 1.0

    def of_moduli(self, moduli):
        return math.fsum(moduli[x] for x in sorted(moduli))

    def spec(self) -> str:
        return "l1"


@dataclass(frozen=True)
class L1Weighted(AdmissibleNorm):
    weight: Weight
    kind = "l1w"

    def weight_at(self, x):
        return self.weight(x)

    def of_moduli(self, moduli):
        return math.fsum(self.weight(x) * moduli[x] for x in sorted(moduli))

    def spec(self) -> str:
        return f"l1w:{self.weight.spec()}"


@dataclass(frozen=True)
class LInfWeighted(AdmissibleNorm):
    """C * sup theta(x)|k(x)| for a subconvolutive weight theta.

    The plain weighted sup norm is only submultiplicative up to the
    subconvolutivity constant C; scaling by C makes it a Banach algebra norm.
    C is estimated on ball(radius) (exact on finite groups), so products are
    covered for supports inside ball(radius / 2).
    """

    weight: Weight
    constant: float
    radius: int
    kind = "linf"

    @classmethod
    def build(cls, weight: Weight, radius: int = 16) -> LInfWeighted:
        return cls(weight, subconvolutivity_constant(weight, radius), radius)

    def weight_at(self, x):
        return self.constant * self.weight(x)

    def of_moduli(self, moduli):
        if not moduli:
            return 0.0
        return self.constant * max(self.weight(x) * moduli[x] for x in sorted(moduli))

    def spec(self) -> str:
        return f"linf:{self.weight.spec()};R={self.radius}"


def norm(n: AdmissibleNorm, k: Mapping) -> float:
    return n(k)


def subconvolutivity_constant(weight: Weight, radius: int) -> float:
    """max over x in ball(R) of (theta^-1 * theta^-1)(x) / theta^-1(x), sum over ball(R)."""
    group = weight.group
    pts = group.elements() if group.finite else group.ball(radius)
    inv = {x: 1.0 / weight(x) for x in pts}
    best = 0.0
    for x in pts:
        total = 0.0
        for y in pts:
            t = group.multiply(group.inverse(y), x)
            if t in inv:
                total += inv[y] * inv[t]
        best = max(best, total / inv[x])
    return best


def check_weight_axioms(group: Group, weight: Weight, samples: Sequence[tuple[Element, Element]],
                        rel_tol: float = 1e-12) -> list[dict]:
    """Largest violation of nu >= 1, nu(x^-1) = nu(x) and nu(xy) <= nu(x)nu(y).

    Violations smaller than ``rel_tol`` times the compared value count as
    rounding and are reported as 0.
    """
    worst = {"lower_bound": (0.0, None), "symmetry": (0.0, None), "submultiplicativity": (0.0, None)}

    def bump(axiom, value, witness, scale=1.0):
        if value <= rel_tol * scale:
            return
        if value > worst[axiom][0]:
            worst[axiom] = (value, witness)

    for x, y in samples:
        xy = group.multiply(x, y)
        nx, ny, nxy = weight(x), weight(y), weight(xy)
        for z, nz in ((x, nx), (y, ny), (xy, nxy)):
            bump("lower_bound", 1.0 - nz, [list(z)])
        bump("symmetry", abs(weight(group.inverse(x)) - nx), [list(x)], nx)
        bump("submultiplicativity", nxy - nx * ny, [list(x), list(y)], nx * ny)
    return [{"axiom": a, "max_violation": v, "witness": w} for a, (v, w) in worst.items()]


def check_ugrs(group: Group, weight: Weight, n_max: int) -> list[float]:
    """a_n = (max of nu over V^n)^(1/n) for n = 1..n_max."""
    if not group.generators:
        raise GroupError("generating set must be finite and non-empty")
    seq = []
    best = 0.0
    for n, shell in enumerate(word_shells(group, n_max)):
        if shell:
            best = max(best, max(weight(x) for x in shell))
        if n >= 1:
            seq.append(best ** (1.0 / n))
    return seq


def check_shell_ratio(group: Group, weight: Weight, n_max: int) -> list[float]:
    """sup/inf of nu over V^n minus V^(n-1), for n = 1..n_max (1 on empty shells)."""
    seq = []
    for n, shell in enumerate(word_shells(group, n_max)):
        if n == 0:
            continue
        if not shell:
            seq.append(1.0)
            continue
        vals = [weight(x) for x in shell]
        seq.append(max(vals) / min(vals))
    return seq
