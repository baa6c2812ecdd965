"""Exact discrete groups: lattices Z^n, cyclic, dihedral and mod-p Heisenberg groups.

Every element is a tuple of Python ints in normal form, so equality is exact
and the natural tuple order gives a deterministic enumeration.
"""

from __future__ import annotations

import itertools
import operator
import re
from collections import deque
from functools import cached_property
from typing import Iterable, Iterator, Sequence

Element = tuple[int, ...]

_INT64_MAX = 2**63 - 1


class GroupError(ValueError):
    """Invalid element, overflow, or malformed group specification."""


class Group:
    """Common interface.  Subclasses implement the raw product and inverse."""

    name: str
    dim: int
    finite: bool

    def identity(self) -> Element:
        return (0,) * self.dim

    def validate(self, x: Element) -> Element:
        if not isinstance(x, tuple) or len(x) != self.dim:
            raise GroupError(f"{x!r} is not an element of {self.name}")
        if not all(type(c) is int for c in x):
            raise GroupError(f"{x!r} has non-integer components")
        return x

    def multiply(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def inverse(self, x: Element) -> Element:
        raise NotImplementedError

    def length(self, x: Element) -> int:
        raise NotImplementedError

    def basis_generators(self) -> tuple[Element, ...]:
        """Generators without the identity and without redundant inverses."""
        raise NotImplementedError

    @cached_property
    def generators(self) -> tuple[Element, ...]:
        """Symmetric generating set V, containing the identity."""
        gens = {self.identity()}
        for g in self.basis_generators():
            gens.add(g)
            gens.add(self.inverse(g))
        return tuple(sorted(gens))

    def ball(self, radius: int) -> list[Element]:
        raise NotImplementedError

    def elements(self) -> list[Element]:
        raise GroupError(f"{self.name} is infinite")

    @property
    def order(self) -> int | None:
        return None

    def power(self, x: Element, n: int) -> Element:
        if n < 0:
            x, n = self.inverse(x), -n
        result = self.identity()
        while n:
            if n & 1:
                result = self.multiply(result, x)
            x = self.multiply(x, x)
            n >>= 1
        return result

    def commutes(self, x: Element, y: Element) -> bool:
        return self.multiply(x, y) == self.multiply(y, x)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Group) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)


class Lattice(Group):
    """Z^n with l1 word length; components are checked 64-bit integers."""

    finite = False

    def __init__(self, n: int) -> None:
        if n < 1:
            raise GroupError("lattice rank must be at least 1")
        self.dim = n
        self.name = "Z" if n == 1 else f"Z^{n}"

    def _check(self, x: Element) -> Element:
        for c in x:
            if c > _INT64_MAX or c < -_INT64_MAX:
                raise GroupError(f"lattice component overflow in {x!r}")
        return x

    def validate(self, x: Element) -> Element:
        return self._check(super().validate(x))

    def multiply(self, x: Element, y: Element) -> Element:
        if len(x) != self.dim or len(y) != self.dim:
            raise GroupError(f"elements {x!r}, {y!r} do not belong to {self.name}")
        z = tuple(map(operator.add, x, y))
        if max(z) > _INT64_MAX or min(z) < -_INT64_MAX:
            self._check(z)
        return z

    def inverse(self, x: Element) -> Element:
        if len(x) != self.dim:
            raise GroupError(f"{x!r} is not an element of {self.name}")
        return tuple(-a for a in x)

    def length(self, x: Element) -> int:
        return sum(abs(a) for a in x)

    def basis_generators(self) -> tuple[Element, ...]:
        return tuple(tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim))

    def ball(self, radius: int) -> list[Element]:
        if radius < 0:
            return []
        out: list[Element] = []

        def rec(prefix: list[int], budget: int, left: int) -> None:
            if left == 0:
                out.append(tuple(prefix))
                return
            for c in range(-budget, budget + 1):
                prefix.append(c)
                rec(prefix, budget - abs(c), left - 1)
                prefix.pop()

        rec([], radius, self.dim)
        return out  # lexicographic by construction


class FiniteGroup(Group):
    """Finite group with cached multiplication table and Cayley word length."""

    finite = True

    def _raw_elements(self) -> Iterable[Element]:
        raise NotImplementedError

    def _raw_multiply(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def _raw_inverse(self, x: Element) -> Element:
        raise NotImplementedError

    @cached_property
    def _elements(self) -> list[Element]:
        return sorted(self._raw_elements())

    @cached_property
    def index(self) -> dict[Element, int]:
        return {x: i for i, x in enumerate(self._elements)}

    @cached_property
    def _table(self) -> dict[tuple[Element, Element], Element]:
        els = self._elements
        return {(x, y): self._raw_multiply(x, y) for x in els for y in els}

    @cached_property
    def _inverses(self) -> dict[Element, Element]:
        return {x: self._raw_inverse(x) for x in self._elements}

    @cached_property
    def _lengths(self) -> dict[Element, int]:
        e = self.identity()
        dist = {e: 0}
        queue = deque([e])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = self._raw_multiply(x, g)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if len(dist) != len(self._elements):
            raise GroupError(f"generators do not generate {self.name}")
        return dist

    @property
    def order(self) -> int:
        return len(self._elements)

    def elements(self) -> list[Element]:
        return list(self._elements)

    def multiply(self, x: Element, y: Element) -> Element:
        try:
            return self._table[x, y]
        except KeyError:
            raise GroupError(f"elements {x!r}, {y!r} do not belong to {self.name}") from None

    def inverse(self, x: Element) -> Element:
        try:
            return self._inverses[x]
        except KeyError:
            raise GroupError(f"{x!r} is not an element of {self.name}") from None

    def validate(self, x: Element) -> Element:
        if x not in self.index:
            raise GroupError(f"{x!r} is not an element of {self.name}")
        return x

    def length(self, x: Element) -> int:
        try:
            return self._lengths[x]
        except KeyError:
            raise GroupError(f"{x!r} is not an element of {self.name}") from None

    def ball(self, radius: int) -> list[Element]:
        return [x for x in self._elements if self._lengths[x] <= radius]


class Cyclic(FiniteGroup):
    def __init__(self, m: int) -> None:
        if m < 1:
            raise GroupError("cyclic order must be positive")
        self.m = m
        self.dim = 1
        self.name = f"C{m}"

    def _raw_elements(self):
        return ((k,) for k in range(self.m))

    def _raw_multiply(self, x, y):
        return ((x[0] + y[0]) % self.m,)

    def _raw_inverse(self, x):
        return ((-x[0]) % self.m,)

    def basis_generators(self):
        return ((1 % self.m,),)


class Dihedral(FiniteGroup):
    """Symmetries of the m-gon; (k, s) stands for r^k s^s."""

    def __init__(self, m: int) -> None:
        if m < 1:
            raise GroupError("dihedral parameter must be positive")
        self.m = m
        self.dim = 2
        self.name = f"D{m}"

    def _raw_elements(self):
        return ((k, s) for k in range(self.m) for s in (0, 1))

    def _raw_multiply(self, x, y):
        k1, s1 = x
        k2, s2 = y
        return ((k1 + (-k2 if s1 else k2)) % self.m, s1 ^ s2)

    def _raw_inverse(self, x):
        k, s = x
        return (k, 1) if s else ((-k) % self.m, 0)

    def basis_generators(self):
        return ((1 % self.m, 0), (0, 1))


class Heisenberg(FiniteGroup):
    """Unitriangular 3x3 matrices mod p; (a, b, c) is [[1,a,c],[0,1,b],[0,0,1]]."""

    def __init__(self, p: int) -> None:
        if p < 2:
            raise GroupError("Heisenberg modulus must be at least 2")
        self.p = p
        self.dim = 3
        self.name = f"Heis{p}"

    def _raw_elements(self):
        r = range(self.p)
        return itertools.product(r, r, r)

    def _raw_multiply(self, x, y):
        p = self.p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    def _raw_inverse(self, x):
        p = self.p
        a, b, c = x
        return ((-a) % p, (-b) % p, (a * b - c) % p)

    def basis_generators(self):
        return ((1, 0, 0), (0, 1, 0))


class DirectProduct(Group):
    """Direct product; elements are concatenated tuples, word length is additive."""

    def __init__(self, factors: Sequence[Group]) -> None:
        if len(factors) < 2:
            raise GroupError("a direct product needs at least two factors")
        self.factors = tuple(factors)
        self.dim = sum(f.dim for f in factors)
        self.finite = all(f.finite for f in factors)
        self.name = "x".join(f.name for f in factors)
        offsets = [0]
        for f in factors:
            offsets.append(offsets[-1] + f.dim)
        self._slices = [slice(a, b) for a, b in zip(offsets, offsets[1:])]

    def _split(self, x: Element) -> list[Element]:
        if len(x) != self.dim:
            raise GroupError(f"{x!r} is not an element of {self.name}")
        return [x[s] for s in self._slices]

    def validate(self, x: Element) -> Element:
        super().validate(x)
        for f, part in zip(self.factors, self._split(x)):
            f.validate(part)
        return x

    def multiply(self, x, y):
        out: tuple[int, ...] = ()
        for f, a, b in zip(self.factors, self._split(x), self._split(y)):
            out += f.multiply(a, b)
        return out

    def inverse(self, x):
        out: tuple[int, ...] = ()
        for f, a in zip(self.factors, self._split(x)):
            out += f.inverse(a)
        return out

    def length(self, x):
        return sum(f.length(a) for f, a in zip(self.factors, self._split(x)))

    def basis_generators(self):
        gens = []
        for i, f in enumerate(self.factors):
            for g in f.basis_generators():
                parts = [h.identity() for h in self.factors]
                parts[i] = g
                gens.append(sum(parts, ()))
        return tuple(gens)

    @property
    def order(self) -> int | None:
        if not self.finite:
            return None
        n = 1
        for f in self.factors:
            n *= f.order
        return n

    def elements(self) -> list[Element]:
        return list(self._elements)

    @cached_property
    def _elements(self) -> list[Element]:
        if not self.finite:
            raise GroupError(f"{self.name} is infinite")
        return sorted(sum(parts, ()) for parts in itertools.product(*(f.elements() for f in self.factors)))

    @cached_property
    def index(self) -> dict[Element, int]:
        return {x: i for i, x in enumerate(self._elements)}

    def ball(self, radius: int) -> list[Element]:
        if radius < 0:
            return []
        balls = [[(x, f.length(x)) for x in f.ball(radius)] for f in self.factors]
        out = []
        for combo in itertools.product(*balls):
            if sum(l for _, l in combo) <= radius:
                out.append(sum((x for x, _ in combo), ()))
        return sorted(out)


_FACTOR = re.compile(r"^(?:Z(?:\^(\d+))?|C(\d+)|D(\d+)|Heis(\d+))$")


def parse_group(spec: str) -> Group:
    """Parse "Z^2", "C4", "D3", "Heis3", "C2xC4", ... into a group."""
    spec = spec.strip()
    if not spec:
        raise GroupError("empty group specification")
    factors = []
    for token in spec.split("x"):
        m = _FACTOR.match(token.strip())
        if not m:
            raise GroupError(f"cannot parse group factor {token!r} in {spec!r}")
        lat, cyc, dih, heis = m.groups()
        if token.startswith("Z"):
            factors.append(Lattice(int(lat) if lat else 1))
        elif cyc is not None:
            factors.append(Cyclic(int(cyc)))
        elif dih is not None:
            factors.append(Dihedral(int(dih)))
        else:
            factors.append(Heisenberg(int(heis)))
    return factors[0] if len(factors) == 1 else DirectProduct(factors)


def word_shells(group: Group, n_max: int) -> Iterator[list[Element]]:
    """Yield V^n minus V^(n-1) for n = 0..n_max, V being the generating set.

    V contains the identity, so V^n = V^(n-1) together with shell(n-1)*V and
    only the newest shell has to be multiplied.
    """
    e = group.identity()
    seen = {e}
    shell = [e]
    yield shell
    for _ in range(n_max):
        new = set()
        for x in shell:
            for v in group.generators:
                y = group.multiply(x, v)
                if y not in seen:
                    new.add(y)
        seen |= new
        shell = sorted(new)
        yield shell


def random_element(group: Group, rng, radius: int) -> Element:
    """Uniform sample from ball(radius), or from the whole group if finite."""
    if group.finite:
        els = group.elements()
        return els[int(rng.integers(len(els)))]
    pts = _ball_cache(group, radius)
    return pts[int(rng.integers(len(pts)))]


_BALLS: dict[tuple[str, int], list[Element]] = {}


def _ball_cache(group: Group, radius: int) -> list[Element]:
    key = (group.name, radius)
    if key not in _BALLS:
        _BALLS[key] = group.ball(radius)
    return _BALLS[key]
