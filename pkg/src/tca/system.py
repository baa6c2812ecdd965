"""Twisted dynamical systems (A, alpha, omega) over a discrete group.

Only center-valued cocycles occur (every coefficient model is commutative),
so the action must be an honest group action: alpha_x alpha_y = alpha_xy.
"""

from __future__ import annotations

import itertools
import json
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np

from .coefficients import (
    CoefficientModel,
    FiniteSpectrumModel,
    ScalarModel,
    StandardFunction,
    StandardModel,
    unit_phase,
)
from .groups import Element, Group, GroupError, Lattice, random_element


# ----------------------------------------------------------------------------
# actions


class Action:
    kind: str

    def act(self, x: Element, phi):
        raise NotImplementedError

    def move_point(self, x: Element, point):
        """x . sigma on the spectrum, so that [alpha_x phi](sigma) = phi(x^-1 . sigma)."""
        raise NotImplementedError

    def spec(self) -> str:
        return self.kind


class TrivialAction(Action):
    kind = "trivial"

    def act(self, x, phi):
        return phi

    def move_point(self, x, point):
        return point


class TranslationAction(Action):
    """[alpha_x phi](y) = phi(x^-1 y) on the standard model."""

    kind = "translation"

    def __init__(self, group: Group) -> None:
        self.group = group
        self._lattice = isinstance(group, Lattice)

    def act(self, x, phi: StandardFunction):
        if not phi.corrections:
            return phi
        mul = self.group.multiply
        moved = tuple((mul(x, k), v) for k, v in phi.corrections)
        # shifting a lattice preserves lexicographic order
        return StandardFunction(phi.background, moved if self._lattice else tuple(sorted(moved)))

    def move_point(self, x, point):
        return self.group.multiply(x, point)


class PointAction(Action):
    """G acting on a finite Sigma = {0..s-1} by permutations.

    ``perm(x)[sigma]`` is x . sigma.  The permutations are generated from the
    images of the basis generators; for lattices they must commute, for
    finite groups the induced map must be a homomorphism.
    """

    kind = "point"

    def __init__(self, group: Group, size: int, generator_perms: Sequence[Sequence[int]]) -> None:
        basis = group.basis_generators()
        if len(generator_perms) != len(basis):
            raise ValueError(f"{group.name} needs {len(basis)} generator permutations, got {len(generator_perms)}")
        self.group = group
        self.size = size
        self.generator_perms = tuple(tuple(int(v) for v in p) for p in generator_perms)
        for p in self.generator_perms:
            if sorted(p) != list(range(size)):
                raise ValueError(f"{list(p)} is not a permutation of {size} points")
        self._basis = dict(zip(basis, self.generator_perms))
        self._cache: dict[Element, tuple[int, ...]] = {}
        if group.finite:
            self._cache = self._extend_finite()
        elif isinstance(group, Lattice):
            for p, q in itertools.combinations(self.generator_perms, 2):
                if _compose(p, q) != _compose(q, p):
                    raise ValueError("lattice generator permutations must commute")
        else:
            raise ValueError("point actions need a finite group or a lattice")

    def _extend_finite(self) -> dict[Element, tuple[int, ...]]:
        g = self.group
        perms = {g.identity(): tuple(range(self.size))}
        frontier = [g.identity()]
        while frontier:
            nxt = []
            for x in frontier:
                for b, pb in self._basis.items():
                    y = g.multiply(x, b)
                    py = _compose(perms[x], pb)
                    if y in perms:
                        if perms[y] != py:
                            raise ValueError("generator permutations do not define a group action")
                    else:
                        perms[y] = py
                        nxt.append(y)
            frontier = nxt
        for x in g.elements():
            for y in g.elements():
                if perms[g.multiply(x, y)] != _compose(perms[x], perms[y]):
                    raise ValueError("generator permutations do not define a group action")
        return perms

    def perm(self, x: Element) -> tuple[int, ...]:
        p = self._cache.get(x)
        if p is None:
            p = tuple(range(self.size))
            for coeff, q in zip(x, self.generator_perms):
                p = _compose(p, _perm_power(q, coeff))
            self._cache[x] = p
        return p

    def act(self, x, phi):
        # [alpha_x phi](sigma) = phi(x^-1 . sigma)
        q = self.perm(self.group.inverse(x))
        return tuple(phi[q[s]] for s in range(self.size))

    def move_point(self, x, point):
        return self.perm(x)[point]

    @cached_property
    def image(self) -> set[tuple[int, ...]]:
        """All permutations realised by group elements."""
        ident = tuple(range(self.size))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for q in self.generator_perms:
                    for r in (_compose(p, q), _compose(p, _perm_power(q, -1))):
                        if r not in seen:
                            seen.add(r)
                            nxt.append(r)
            frontier = nxt
        return seen

    def spec(self) -> str:
        return "point:" + json.dumps([list(p) for p in self.generator_perms])


def _compose(p, q):
    """(p o q)(s) = p[q[s]]: apply q first.  perm(xy) = perm(x) o perm(y)."""
    return tuple(p[i] for i in q)


def _perm_power(p, n):
    if n < 0:
        inv = [0] * len(p)
        for i, v in enumerate(p):
            inv[v] = i
        p, n = tuple(inv), -n
    out = tuple(range(len(p)))
    for _ in range(n % _perm_order(p) if n else 0):
        out = _compose(out, p)
    return out


def _perm_order(p) -> int:
    ident = tuple(range(len(p)))
    q, k = p, 1
    while q != ident:
        q, k = _compose(q, p), k + 1
    return k


# ----------------------------------------------------------------------------
# cocycles


class Cocycle:
    """omega(x, y); returns a complex scalar or a native model value."""

    label: str

    def __call__(self, x: Element, y: Element):
        raise NotImplementedError

    def spec(self) -> str:
        return self.label

    def __mul__(self, other: Cocycle) -> Cocycle:
        return ProductCocycle((self, other))


class TrivialCocycle(Cocycle):
    label = "trivial"

    def __call__(self, x, y):
        return 1 + 0j


class ThetaCocycle(Cocycle):
    """omega(x, y) = exp(2 pi i x^T Theta y) on Z^n, Theta real skew-symmetric."""

    def __init__(self, theta: Sequence[Sequence[float]]) -> None:
        arr = np.asarray(theta, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("theta must be a square matrix")
        if not np.array_equal(arr, -arr.T):
            raise ValueError("theta must be skew-symmetric")
        self.theta = arr
        self.n = arr.shape[0]
        self._rows = [[float(v) for v in row] for row in arr]
        self.label = "theta:" + json.dumps(arr.tolist())

    def exponent(self, x, y) -> float:
        total = 0.0
        for i, xi in enumerate(x):
            if xi:
                row = self._rows[i]
                for j, yj in enumerate(y):
                    if yj:
                        total += xi * row[j] * yj
        return total

    def __call__(self, x, y):
        return unit_phase(self.exponent(x, y))


class BicharacterCocycle(Cocycle):
    """omega(x, y) = exp(2 pi i sum_ij B_ij x_i y_j / gcd(m_i, m_j)) on products of cyclic groups."""

    def __init__(self, group: Group, matrix: Sequence[Sequence[int]]) -> None:
        from math import gcd

        from .groups import Cyclic, DirectProduct

        factors = group.factors if isinstance(group, DirectProduct) else (group,)
        if not all(isinstance(f, Cyclic) for f in factors):
            raise ValueError("bicharacter cocycles need a product of cyclic groups")
        mods = [f.m for f in factors]
        b = [[int(v) for v in row] for row in matrix]
        if len(b) != len(mods) or any(len(r) != len(mods) for r in b):
            raise ValueError(f"bicharacter matrix must be {len(mods)}x{len(mods)}")
        self.mods = mods
        self.matrix = b
        self.label = "bicharacter:" + json.dumps(b)

    def __call__(self, x, y):
        from fractions import Fraction
        from math import gcd

        t = Fraction(0)
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                if self.matrix[i][j]:
                    t += Fraction(self.matrix[i][j] * xi * yj, gcd(self.mods[i], self.mods[j]))
        t -= t.numerator // t.denominator
        return unit_phase(float(t)) if (4 * t).denominator == 1 else complex(np.exp(2j * np.pi * float(t)))


class TableCocycle(Cocycle):
    """Explicit table on a finite group; missing entries default to 1."""

    def __init__(self, table: Mapping[tuple[Element, Element], object], label: str = "table") -> None:
        self.table = dict(table)
        self.label = label

    def __call__(self, x, y):
        return self.table.get((x, y), 1 + 0j)


class CoboundaryCocycle(Cocycle):
    """omega(x, y) = u(x) alpha_x[u(y)] u(xy)^*, with u(e) = 1 unitary.

    ``u`` is built deterministically from ``seed``: a random phase for scalar
    models, a random phase per spectral point for finite spectra, and for the
    standard model the function equal to a random phase at the point x and 1
    elsewhere.
    """

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)
        self.label = f"coboundary:seed={self.seed}"
        self._system: TwistedSystem | None = None

    def _phase(self, *key) -> complex:
        h = zlib.crc32(repr((self.seed,) + key).encode())
        return complex(np.exp(2j * np.pi * (h / 2**32)))

    def u(self, system: TwistedSystem, x: Element):
        model = system.model
        if x == system.group.identity():
            return model.one()
        if isinstance(model, ScalarModel):
            return self._phase(x)
        if isinstance(model, FiniteSpectrumModel):
            return tuple(self._phase(x, s) for s in range(model.size))
        return StandardFunction(1 + 0j, ((x, self._phase(x) - 1),))

    def bind(self, system: TwistedSystem) -> None:
        self._system = system

    def __call__(self, x, y):
        sys = self._system
        if sys is None:
            raise RuntimeError("coboundary cocycle is not attached to a system")
        m = sys.model
        e = sys.group.identity()
        if x == e or y == e:
            return m.one()
        xy = sys.group.multiply(x, y)
        return m.mul(m.mul(self.u(sys, x), sys.action.act(x, self.u(sys, y))), m.conj(self.u(sys, xy)))


class ProductCocycle(Cocycle):
    def __init__(self, parts: Sequence[Cocycle]) -> None:
        flat: list[Cocycle] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, ProductCocycle) else (p,))
        self.parts = tuple(flat)
        self.label = "*".join(p.spec() for p in self.parts)
        self._model: CoefficientModel | None = None

    def bind(self, system: TwistedSystem) -> None:
        self._model = system.model
        for p in self.parts:
            if hasattr(p, "bind"):
                p.bind(system)

    def __call__(self, x, y):
        m = self._model
        out = m.one()
        for p in self.parts:
            out = m.mul(out, m.coerce(p(x, y)))
        return out


# ----------------------------------------------------------------------------
# the system


@dataclass
class TwistedSystem:
    group: Group
    model: CoefficientModel
    action: Action
    cocycle: Cocycle
    _omega_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if isinstance(self.action, TranslationAction) and not isinstance(self.model, StandardModel):
            raise ValueError("translation action needs the standard coefficient model")
        if isinstance(self.action, PointAction):
            if not isinstance(self.model, FiniteSpectrumModel) or self.model.size != self.action.size:
                raise ValueError("point action needs a finite spectrum model of matching size")
        if isinstance(self.cocycle, ThetaCocycle):
            if not isinstance(self.group, Lattice) or self.group.dim != self.cocycle.n:
                raise ValueError(f"theta cocycle of size {self.cocycle.n} needs Z^{self.cocycle.n}")
        if hasattr(self.cocycle, "bind"):
            self.cocycle.bind(self)

    @property
    def is_standard(self) -> bool:
        return isinstance(self.model, StandardModel) and isinstance(self.action, TranslationAction)

    def omega(self, x: Element, y: Element):
        key = (x, y)
        v = self._omega_cache.get(key)
        if v is None:
            v = self.model.coerce(self.cocycle(x, y))
            if len(self._omega_cache) < 2_000_000:
                self._omega_cache[key] = v
        return v

    def act(self, x: Element, phi):
        return self.action.act(x, phi)

    def random_coefficient(self, rng):
        return self.model.random(rng, self.group)

    def describe(self) -> dict:
        from .coefficients import model_spec

        return {
            "group": self.group.name,
            "coefficients": model_spec(self.model),
            "action": self.action.spec(),
            "cocycle": self.cocycle.spec(),
        }


def make_theta_cocycle(theta: Sequence[Sequence[float]]) -> ThetaCocycle:
    return ThetaCocycle(theta)


def act(system: TwistedSystem, x: Element, phi):
    return system.action.act(x, phi)


def cocycle_identity_form(system: TwistedSystem, m: Element, n: Element, r: Element, s: Element) -> float:
    """Residual of alpha_{s^-1}[w(m,n)] alpha_{s^-1}[w(mn,r)] = alpha_{s^-1 m}[w(n,r)] alpha_{s^-1}[w(m,nr)]."""
    g, A, w = system.group, system.model, system.omega
    si = g.inverse(s)
    lhs = A.mul(system.act(si, w(m, n)), system.act(si, w(g.multiply(m, n), r)))
    rhs = A.mul(system.act(g.multiply(si, m), w(n, r)), system.act(si, w(m, g.multiply(n, r))))
    return A.diff_norm(lhs, rhs)


def _triples(system: TwistedSystem, trials: int, seed: int, radius: int, arity: int = 3, cap: int = 10**6):
    g = system.group
    if g.finite and g.order**arity <= cap:
        els = g.elements()
        return list(itertools.product(els, repeat=arity)), True
    rng = np.random.default_rng(seed)
    return [tuple(random_element(g, rng, radius) for _ in range(arity)) for _ in range(trials)], False


def verify_axioms(system: TwistedSystem, trials: int = 10_000, seed: int = 0, radius: int = 6,
                  exhaustive_cap: int = 10**6) -> list[dict]:
    """Largest residuals of the twisted-system axioms, with witnesses.

    Checks: alpha_x alpha_y = alpha_xy, alpha_e = id, each alpha_x a
    *-automorphism, the cocycle identity, normalisation and unitarity of
    omega.  Finite groups are swept exhaustively when |G|^3 <= exhaustive_cap.
    """
    g, A = system.group, system.model
    triples, exhaustive = _triples(system, trials, seed, radius, 3, exhaustive_cap)
    rng = np.random.default_rng(seed + 1)
    worst: dict[str, tuple[float, object]] = {}

    def bump(name, value, witness):
        if name not in worst or value > worst[name][0] or worst[name][1] is None:
            worst[name] = (value, witness)

    for name in ("action_composition", "action_identity", "automorphism", "cocycle_identity",
                 "normalization", "unitarity"):
        worst[name] = (0.0, None)

    e = g.identity()
    phis = [system.random_coefficient(rng) for _ in range(4)]
    for phi in phis:
        bump("action_identity", A.diff_norm(system.act(e, phi), phi), None)

    if exhaustive:
        # vectorised sweep over all triples; the generic loop below only
        # checks the action on pairs
        tab = compile_finite(system)
        res, wit = tab.cocycle_residual()
        bump("cocycle_identity", res, wit)
        u = np.abs(np.abs(tab.omega) - 1.0).max(axis=-1)
        k = np.unravel_index(int(u.argmax()), u.shape)
        bump("unitarity", float(u[k]), [list(tab.elements[i]) for i in k])
        triples = [(x, y, e) for x in tab.elements for y in tab.elements]
    for i, (x, y, z) in enumerate(triples):
        wit = [list(x), list(y), list(z)]
        if exhaustive:
            if i < 2000:
                phi, psi = phis[i % 4], phis[(i + 1) % 4]
                bump("action_composition",
                     A.diff_norm(system.act(x, system.act(y, phi)), system.act(g.multiply(x, y), phi)), wit[:2])
                if y == e:
                    ax = lambda v: system.act(x, v)  # noqa: E731
                    bump("automorphism", max(
                        A.diff_norm(ax(A.mul(phi, psi)), A.mul(ax(phi), ax(psi))),
                        A.diff_norm(ax(A.conj(phi)), A.conj(ax(phi))),
                        abs(A.norm(ax(phi)) - A.norm(phi)),
                    ), wit[:1])
            continue
        xy, yz = g.multiply(x, y), g.multiply(y, z)
        lhs = A.mul(system.omega(x, y), system.omega(xy, z))
        rhs = A.mul(system.act(x, system.omega(y, z)), system.omega(x, yz))
        bump("cocycle_identity", A.diff_norm(lhs, rhs), wit)
        bump("unitarity", A.unitarity_defect(system.omega(x, y)), wit[:2])
        if i < 2000:
            phi, psi = phis[i % 4], phis[(i + 1) % 4]
            bump("action_composition",
                 A.diff_norm(system.act(x, system.act(y, phi)), system.act(xy, phi)), wit[:2])
            ax = lambda v: system.act(x, v)  # noqa: E731
            bump("automorphism", max(
                A.diff_norm(ax(A.mul(phi, psi)), A.mul(ax(phi), ax(psi))),
                A.diff_norm(ax(A.conj(phi)), A.conj(ax(phi))),
                abs(A.norm(ax(phi)) - A.norm(phi)),
            ), wit[:1])
    pts = set(g.elements()) if exhaustive else {x for t in triples for x in t}
    for x in sorted(pts):
        bump("normalization", max(A.diff_norm(system.omega(x, e), A.one()),
                                  A.diff_norm(system.omega(e, x), A.one())), [list(x)])
    checked = g.order**3 if exhaustive else len(triples)
    return [
        {"axiom": name, "residual": float(v), "witness": w, "exhaustive": exhaustive, "checked": checked}
        for name, (v, w) in worst.items()
    ]


def cocycle_form_sweep(system: TwistedSystem, trials: int = 10_000, seed: int = 0, radius: int = 6,
                       exhaustive_cap: int = 10**7) -> dict:
    """Largest residual of the four-variable cocycle identity over a sweep.

    Finite groups use the vectorised tables of :func:`compile_finite`.
    """
    g = system.group
    if g.finite and g.order**4 <= exhaustive_cap:
        tab = compile_finite(system)
        return tab.cocycle_form_residual()
    quads, _ = _triples(system, trials, seed, radius, 4, 0)
    worst, wit = 0.0, None
    for m, n, r, s in quads:
        res = cocycle_identity_form(system, m, n, r, s)
        if res > worst or wit is None:
            worst, wit = res, [list(m), list(n), list(r), list(s)]
    return {"axiom": "cocycle_identity_form", "residual": worst, "witness": wit,
            "exhaustive": False, "checked": len(quads)}


# ----------------------------------------------------------------------------
# vectorised tables for finite groups


@dataclass
class FiniteTables:
    """Arrays describing a system over a finite group.

    mul[i, j]   index of x_i x_j
    inv[i]      index of x_i^-1
    omega[i, j, p]  value of omega(x_i, x_j) at spectral point p
    pull[i, p]  index q with [alpha_{x_i} phi](p) = phi(q)
    """

    elements: list[Element]
    mul: np.ndarray
    inv: np.ndarray
    omega: np.ndarray
    pull: np.ndarray

    def cocycle_residual(self) -> tuple[float, list]:
        n = len(self.elements)
        W, M, P = self.omega, self.mul, self.pull
        x, y, z = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        lhs = W[x, y] * W[M[x, y], z]
        rhs = W[y[..., None], z[..., None], P[x]] * W[x, M[y, z]]
        diff = np.abs(lhs - rhs).max(axis=-1)
        k = np.unravel_index(int(diff.argmax()), diff.shape)
        return float(diff[k]), [list(self.elements[i]) for i in k]

    def cocycle_form_residual(self) -> dict:
        n = len(self.elements)
        W, M, P, I = self.omega, self.mul, self.pull, self.inv
        m, nn, r = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        mn, nr = M[m, nn], M[nn, r]
        worst, wit = -1.0, None
        for s in range(n):
            si = I[s]
            p_si = P[si]                    # alpha_{s^-1}
            p_sim = P[M[si, m]]             # alpha_{s^-1 m}, shape (n,n,n,d)
            lhs = W[m, nn][..., p_si] * W[mn, r][..., p_si]
            rhs = np.take_along_axis(W[nn, r], p_sim, axis=-1) * W[m, nr][..., p_si]
            diff = np.abs(lhs - rhs).max(axis=-1)
            k = np.unravel_index(int(diff.argmax()), diff.shape)
            if diff[k] > worst:
                worst = float(diff[k])
                wit = [list(self.elements[i]) for i in k] + [list(self.elements[s])]
        return {"axiom": "cocycle_identity_form", "residual": worst, "witness": wit,
                "exhaustive": True, "checked": n**4}


def spectrum_points(system: TwistedSystem) -> list:
    """Points of the Gelfand spectrum, when it is finite."""
    m = system.model
    if isinstance(m, ScalarModel):
        return [None]
    if isinstance(m, FiniteSpectrumModel):
        return list(m.points)
    if system.group.finite:
        return system.group.elements()
    raise GroupError("the standard model over an infinite group has an infinite spectrum")


def compile_finite(system: TwistedSystem) -> FiniteTables:
    g = system.group
    els = g.elements()
    idx = {x: i for i, x in enumerate(els)}
    n = len(els)
    pts = spectrum_points(system)
    pidx = {p: i for i, p in enumerate(pts)}
    mul = np.array([[idx[g.multiply(x, y)] for y in els] for x in els], dtype=np.intp)
    inv = np.array([idx[g.inverse(x)] for x in els], dtype=np.intp)
    A = system.model
    omega = np.array([[[A.evaluate(system.omega(x, y), p) for p in pts] for y in els] for x in els],
                     dtype=complex)
    # [alpha_x phi](p) = phi(x^-1 . p)
    pull = np.array([[pidx[system.action.move_point(g.inverse(x), p)] for p in pts] for x in els],
                    dtype=np.intp)
    return FiniteTables(els, mul, inv, omega, pull)
