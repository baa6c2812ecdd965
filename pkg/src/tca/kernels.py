"""Band-limited A-valued kernels on G x G and their twisted composition.

A kernel is stored by diagonals.  The diagonal of band a is the map
z -> K(z, a^-1 z); it is given exactly by a finite window of explicit values
and, outside the window, a tail

    z -> sum_i p_i * alpha_{z^-1}[q_i]

A constant tail is (c, 1) and a covariant tail is (1, c).  Since A is
commutative these tails are closed under composition and involution, so every
operation below is exact and the per-diagonal sup (kappa) is computable.

    (K . L)(x, y) = sum_z K(x, z) L(z, y) alpha_{x^-1}[omega(x z^-1, z y^-1)]
    K^(x, y)      = alpha_{x^-1}[omega(x y^-1, y x^-1)^*] K(y, x)^*
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .coefficients import StandardFunction, StandardModel
from .crossed import CrossedElement
from .groups import Element, Lattice, random_element
from .system import PointAction, TranslationAction, TrivialAction, TwistedSystem
from .weights import AdmissibleNorm

COVARIANCE_TOL = 1e-12


@dataclass(frozen=True)
class Diagonal:
    window: Mapping[Element, object] = field(default_factory=dict)
    tail: tuple = ()


def _merge_tail(model, terms: Iterable[tuple]) -> tuple:
    by_p: dict = {}
    order = []
    for p, q in terms:
        key = _freeze(p)
        if key in by_p:
            by_p[key] = (p, model.add(by_p[key][1], q))
        else:
            by_p[key] = (p, q)
            order.append(key)
    out = [by_p[k] for k in order]
    return tuple((p, q) for p, q in out if not (model.is_zero(p) or model.is_zero(q)))


def _freeze(v):
    return v if not isinstance(v, list) else tuple(v)


class KernelElement:
    """Finitely many diagonals, bound to a twisted system."""

    def __init__(self, system: TwistedSystem, diagonals: Mapping[Element, Diagonal]) -> None:
        self.system = system
        self.diagonals = {a: diagonals[a] for a in sorted(diagonals)}

    # -- evaluation --------------------------------------------------------

    def diag_value(self, a: Element, z: Element):
        """K(z, a^-1 z)."""
        A = self.system.model
        d = self.diagonals.get(a)
        if d is None:
            return A.zero()
        if z in d.window:
            return d.window[z]
        return _tail_value(self.system, d.tail, z)

    def __call__(self, x: Element, y: Element):
        g = self.system.group
        return self.diag_value(g.multiply(x, g.inverse(y)), x)

    @property
    def bands(self) -> list[Element]:
        return list(self.diagonals)

    def band_radius(self) -> int:
        g = self.system.group
        return max((g.length(a) for a in self.diagonals), default=0)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: KernelElement) -> KernelElement:
        return add(self, other)

    def __sub__(self, other: KernelElement) -> KernelElement:
        return add(self, other.scale(-1.0))

    def scale(self, c: complex) -> KernelElement:
        A = self.system.model
        return KernelElement(self.system, {
            a: Diagonal({z: A.scale(v, c) for z, v in d.window.items()},
                        tuple((A.scale(p, c), q) for p, q in d.tail))
            for a, d in self.diagonals.items()
        })

    def __mul__(self, other: KernelElement) -> KernelElement:
        return compose(self, other)

    def star(self) -> KernelElement:
        return involve_kernel(self)

    def to_json(self) -> dict:
        A = self.system.model
        return {"diagonals": [
            {"band": list(a),
             "window": [[list(z), A.to_json(v)] for z, v in sorted(d.window.items())],
             "tail": [[A.to_json(p), A.to_json(q)] for p, q in d.tail]}
            for a, d in self.diagonals.items()
        ]}

    @classmethod
    def from_json(cls, system: TwistedSystem, data) -> KernelElement:
        A, g = system.model, system.group
        diags: dict[Element, Diagonal] = {}
        entries = data["diagonals"] if isinstance(data, dict) else data
        for entry in entries:
            a = g.validate(_elem(entry["band"]))
            window = {g.validate(_elem(z)): A.from_json(v) for z, v in entry.get("window", [])}
            tail = []
            for t in entry.get("tail", []):
                if isinstance(t, dict):
                    if "covariant" in t:
                        tail.append((A.one(), A.from_json(t["covariant"])))
                    elif "constant" in t:
                        tail.append((A.from_json(t["constant"]), A.one()))
                    else:
                        raise ValueError(f"tail term needs 'covariant' or 'constant': {t!r}")
                else:
                    p, q = t
                    tail.append((A.from_json(p), A.from_json(q)))
            if a in diags:
                raise ValueError(f"band {list(a)} given twice")
            diags[a] = Diagonal(window, tuple(tail))
        return cls(system, diags)


def _elem(v) -> Element:
    return (int(v),) if isinstance(v, int) else tuple(int(t) for t in v)


def _tail_value(system: TwistedSystem, tail: tuple, z: Element):
    A = system.model
    if not tail:
        return A.zero()
    zi = system.group.inverse(z)
    out = None
    for p, q in tail:
        term = A.mul(p, system.act(zi, q))
        out = term if out is None else A.add(out, term)
    return out


def add(K: KernelElement, L: KernelElement) -> KernelElement:
    if K.system is not L.system:
        raise ValueError("kernels belong to different twisted systems")
    sys = K.system
    A = sys.model
    out = {}
    for a in sorted(set(K.diagonals) | set(L.diagonals)):
        dk, dl = K.diagonals.get(a, Diagonal()), L.diagonals.get(a, Diagonal())
        window = {z: A.add(K.diag_value(a, z), L.diag_value(a, z)) for z in sorted(set(dk.window) | set(dl.window))}
        out[a] = Diagonal(window, _merge_tail(A, dk.tail + dl.tail))
    return KernelElement(sys, out)


def compose(K: KernelElement, L: KernelElement) -> KernelElement:
    """Twisted composition; band ab collects every pair of bands (a, b)."""
    if K.system is not L.system:
        raise ValueError("kernels belong to different twisted systems")
    sys = K.system
    g, A = sys.group, sys.model
    pairs: dict[Element, list[tuple[Element, Element]]] = {}
    for b in K.diagonals:
        for c in L.diagonals:
            pairs.setdefault(g.multiply(b, c), []).append((b, c))
    out = {}
    for a in sorted(pairs):
        window_pts: set[Element] = set()
        tail = []
        for b, c in pairs[a]:
            db, dc = K.diagonals[b], L.diagonals[c]
            window_pts.update(db.window)
            window_pts.update(g.multiply(b, w) for w in dc.window)
            w_bc = sys.omega(b, c)
            for p, q in db.tail:
                for p2, q2 in dc.tail:
                    tail.append((A.mul(p, p2), A.mul(A.mul(q, sys.act(b, q2)), w_bc)))
        window = {}
        legs = [(b, c, g.inverse(b), sys.omega(b, c)) for b, c in pairs[a]]
        for x in sorted(window_pts):
            xi = g.inverse(x)
            total = A.zero()
            for b, c, bi, w_bc in legs:
                term = A.mul(K.diag_value(b, x), L.diag_value(c, g.multiply(bi, x)))
                total = A.add(total, A.mul(term, sys.act(xi, w_bc)))
            window[x] = total
        out[a] = Diagonal(window, _merge_tail(A, tail))
    return KernelElement(sys, out)


def involve_kernel(K: KernelElement) -> KernelElement:
    sys = K.system
    g, A = sys.group, sys.model
    out = {}
    for b, d in K.diagonals.items():
        a = g.inverse(b)
        w_conj = A.conj(sys.omega(a, b))
        window = {}
        for z in d.window:
            x = g.multiply(a, z)  # z = a^-1 x
            window[x] = A.mul(sys.act(g.inverse(x), w_conj), A.conj(d.window[z]))
        tail = tuple((A.conj(p), A.mul(A.conj(sys.act(a, q)), w_conj)) for p, q in d.tail)
        out[a] = Diagonal({x: window[x] for x in sorted(window)}, _merge_tail(A, tail))
    return KernelElement(sys, out)


# ----------------------------------------------------------------------------
# norms


def tail_sup(system: TwistedSystem, diag: Diagonal) -> float:
    """Exact sup over z outside the window of the tail's A-norm."""
    g, A, act = system.group, system.model, system.action
    tail = diag.tail
    if not tail:
        return 0.0
    W = diag.window
    if g.finite:
        vals = [A.norm(_tail_value(system, tail, z)) for z in g.elements() if z not in W]
        return max(vals, default=0.0)
    if isinstance(act, TrivialAction):
        return A.norm(_tail_value(system, tail, _far_point(g, set(W))))
    if isinstance(act, PointAction):
        best = 0.0
        for perm in sorted(act.image):
            # [alpha_{z^-1} q](s) = q(z . s) = q(perm[s]) for z realising perm
            val = A.zero()
            for p, q in tail:
                val = A.add(val, A.mul(p, tuple(q[perm[s]] for s in range(act.size))))
            best = max(best, A.norm(val))
        return best
    if isinstance(act, TranslationAction):
        return _translation_tail_sup(g, tail, set(W))
    raise TypeError(f"unsupported action {act!r}")


def _translation_tail_sup(g, tail: tuple, window: set) -> float:
    """sup over z outside the window and all y of |sum_i p_i(y) q_i(z y)| on an infinite group.

    Writing w = z y, a pair (y, w) is reachable unless both lie in the
    supports and w y^-1 falls in the window; off the supports each factor
    is its background value.
    """
    ys = sorted({k for p, _ in tail for k in p.support})
    ws = sorted({k for _, q in tail for k in q.support})
    P = np.array([[p(y) for p, _ in tail] for y in ys], dtype=complex).reshape(len(ys), len(tail))
    Q = np.array([[q(w) for _, q in tail] for w in ws], dtype=complex).reshape(len(ws), len(tail))
    bp = np.array([p.background for p, _ in tail], dtype=complex)
    bq = np.array([q.background for _, q in tail], dtype=complex)
    # elementwise products and plain sums (not BLAS), and Python abs as in the
    # coefficient norm, keep the result bit-identical to the pointwise norm
    best = abs(complex((bp * bq).sum()))
    if ys:
        best = max([best] + [abs(v) for v in (P * bq).sum(axis=1).tolist()])
    if ws:
        best = max([best] + [abs(v) for v in (Q * bp).sum(axis=1).tolist()])
    if ys and ws:
        F = (P[:, None, :] * Q[None, :, :]).sum(axis=2)
        inv = [g.inverse(y) for y in ys]
        for i, j in zip(*np.nonzero(np.abs(F) > best * (1 - 1e-12))):
            v = abs(complex(F[i, j]))
            if v > best and g.multiply(ws[j], inv[i]) not in window:
                best = v
    return best


def _far_point(g, avoid: set[Element]) -> Element:
    r = max((g.length(x) for x in avoid), default=0) + 1
    if isinstance(g, Lattice):
        return (r,) + (0,) * (g.dim - 1)
    for x in g.ball(r):
        if x not in avoid:
            return x
    raise ValueError("no point outside the window")


def kappa(K: KernelElement) -> dict[Element, float]:
    """kappa(a) = sup_z ||K(z, a^-1 z)||_A, exactly."""
    A = K.system.model
    out = {}
    for a, d in K.diagonals.items():
        win = max((A.norm(v) for v in d.window.values()), default=0.0)
        out[a] = max(win, tail_sup(K.system, d))
    return out


def kernel_norm(K: KernelElement, n: AdmissibleNorm) -> float:
    return n.of_moduli(kappa(K))


def kernel_distance(K: KernelElement, L: KernelElement) -> float:
    """L1 kernel norm of K - L."""
    return math.fsum(kappa(K - L).values())


# ----------------------------------------------------------------------------
# Gamma and covariance


def gamma(f: CrossedElement) -> KernelElement:
    """(Gamma f)(x, y) = alpha_{x^-1}[f(x y^-1)]: diagonal a is the covariant tail of f(a)."""
    A = f.system.model
    return KernelElement(f.system, {a: Diagonal({}, ((A.one(), v),)) for a, v in f.coeffs.items()})


class NotCovariant(ValueError):
    pass


def gamma_inverse(K: KernelElement, check: bool = True) -> CrossedElement:
    """(Gamma^-1 K)(x) = alpha_x[K(x, e)]; only defined on covariant kernels."""
    if check:
        ok, residual, witness = is_covariant(K)
        if not ok:
            raise NotCovariant(f"kernel is not covariant (residual {residual:.3g} at {witness})")
    sys = K.system
    return CrossedElement.make(sys, {a: sys.act(a, K.diag_value(a, a)) for a in K.diagonals})


def is_covariant(K: KernelElement, samples: int = 200, seed: int = 0, radius: int = 4):
    """max ||K(xz, yz) - alpha_{z^-1}[K(x, y)]|| over probes; (ok, residual, witness).

    On a diagonal this reads D(xz) = alpha_{z^-1} D(x).  Probes: every window
    point against random shifts and against being reached from a random
    point, plus random pairs (exhaustive on small finite groups).
    """
    sys = K.system
    g, A = sys.group, sys.model
    rng = np.random.default_rng(seed)
    worst, witness = 0.0, None
    for a, d in K.diagonals.items():
        pairs = []
        if g.finite and g.order**2 <= 5000:
            els = g.elements()
            pairs = [(x, z) for x in els for z in els]
        else:
            for w in d.window:
                for _ in range(4):
                    z = random_element(g, rng, radius)
                    pairs.append((w, z))
                    x = random_element(g, rng, radius)
                    pairs.append((x, g.multiply(g.inverse(x), w)))
            for _ in range(samples):
                pairs.append((random_element(g, rng, radius), random_element(g, rng, radius)))
        for x, z in pairs:
            lhs = K.diag_value(a, g.multiply(x, z))
            rhs = sys.act(g.inverse(z), K.diag_value(a, x))
            r = A.diff_norm(lhs, rhs)
            if r > worst:
                worst = r
                witness = {"band": list(a), "x": list(x), "z": list(z)}
    return worst < COVARIANCE_TOL, worst, witness


# ----------------------------------------------------------------------------
# scalar kernels in the standard case


@dataclass
class ScalarKernel:
    """Complex kernel S(x, y) = diagonals[x y^-1](x), each diagonal a StandardFunction of x."""

    system: TwistedSystem
    diagonals: dict

    def __call__(self, x: Element, y: Element) -> complex:
        g = self.system.group
        d = self.diagonals.get(g.multiply(x, g.inverse(y)))
        return 0j if d is None else d(x)

    def band_radius(self) -> int:
        g = self.system.group
        return max((g.length(a) for a in self.diagonals), default=0)


def _require_standard(system: TwistedSystem) -> None:
    if not system.is_standard:
        raise TypeError("scalar kernels need the standard model with the translation action")


def upsilon(K: KernelElement) -> ScalarKernel:
    """(Upsilon K)(x, y) = K(x, y)(e)."""
    sys = K.system
    _require_standard(sys)
    A, e = sys.model, sys.group.identity()
    out = {}
    for a, d in K.diagonals.items():
        # tail at x evaluated at e: sum_i p_i(e) q_i(x)
        acc = A.zero()
        for p, q in d.tail:
            acc = A.add(acc, A.scale(q, p(e)))
        table = acc.table
        bg = acc.background
        for z, v in d.window.items():
            table[z] = v(e) - bg
        out[a] = StandardFunction.make(bg, {z: c for z, c in table.items() if c != 0})
    return ScalarKernel(sys, {a: out[a] for a in sorted(out)})


def upsilon_inverse(S: ScalarKernel) -> KernelElement:
    """The covariant kernel with K(x, y)(e) = S(x, y): diagonal a has covariant tail S_a."""
    sys = S.system
    _require_standard(sys)
    A = sys.model
    return KernelElement(sys, {a: Diagonal({}, ((A.one(), s),)) for a, s in S.diagonals.items()})


def _reflect(phi: StandardFunction, g) -> StandardFunction:
    """x -> phi(x^-1)."""
    return StandardFunction.make(phi.background, {g.inverse(k): v for k, v in phi.corrections})


def scalar_compose(K: ScalarKernel, L: ScalarKernel, literal: bool = False) -> ScalarKernel:
    """(K . L)(x, y) = sum_z K(x, z) L(z, y) omega(x z^-1, z y^-1)(x).

    ``literal=True`` evaluates the cocycle at x^-1 instead; that variant is
    kept only to demonstrate that it does not intertwine with Upsilon.
    """
    sys = K.system
    _require_standard(sys)
    g, A = sys.group, sys.model
    out: dict[Element, StandardFunction] = {}
    for b, kb in K.diagonals.items():
        for c, lc in L.diagonals.items():
            a = g.multiply(b, c)
            w = sys.omega(b, c)
            if literal:
                w = _reflect(w, g)
            term = A.mul(A.mul(kb, A.translate(b, lc)), w)
            out[a] = A.add(out[a], term) if a in out else term
    return ScalarKernel(sys, {a: out[a] for a in sorted(out)})


def scalar_involve(K: ScalarKernel, literal: bool = False) -> ScalarKernel:
    """K^(x, y) = conj omega(x y^-1, y x^-1)(x) conj K(y, x)."""
    sys = K.system
    _require_standard(sys)
    g, A = sys.group, sys.model
    out = {}
    for b, kb in K.diagonals.items():
        a = g.inverse(b)
        w = sys.omega(a, b)
        if literal:
            w = _reflect(w, g)
        out[a] = A.mul(A.conj(w), A.conj(A.translate(a, kb)))
    return ScalarKernel(sys, {a: out[a] for a in sorted(out)})


def scalar_norm(K: ScalarKernel, n: AdmissibleNorm) -> float:
    A = K.system.model
    return n.of_moduli({a: A.norm(d) for a, d in K.diagonals.items()})


def scalar_distance(K: ScalarKernel, L: ScalarKernel) -> float:
    A = K.system.model
    total = []
    for a in sorted(set(K.diagonals) | set(L.diagonals)):
        total.append(A.diff_norm(K.diagonals.get(a, A.zero()), L.diagonals.get(a, A.zero())))
    return math.fsum(total)


# ----------------------------------------------------------------------------
# random kernels


def random_kernel(system: TwistedSystem, rng, bands: int = 2, radius: int = 2, window: int = 2,
                  covariant: bool = False) -> KernelElement:
    g, A = system.group, system.model
    diags = {}
    for _ in range(bands):
        a = random_element(g, rng, radius)
        tail = ((A.one(), system.random_coefficient(rng)),)
        if not covariant:
            tail = tail + ((system.random_coefficient(rng), A.one()),)
        win = {}
        if not covariant:
            for _ in range(window):
                win[random_element(g, rng, radius)] = system.random_coefficient(rng)
        diags[a] = Diagonal({z: win[z] for z in sorted(win)}, _merge_tail(A, tail))
    return KernelElement(system, diags)


# ----------------------------------------------------------------------------
# dense arrays over a finite group (vectorised sweeps)


class FiniteKernelArrays:
    """Kernels over a finite group as arrays K[..., x, y, p] (p a spectral point).

    Used for exhaustive law sweeps; agrees with :func:`compose` and
    :func:`involve_kernel` entrywise.
    """

    def __init__(self, system: TwistedSystem) -> None:
        from .system import compile_finite

        tab = compile_finite(system)
        self.system = system
        self.tables = tab
        n = len(tab.elements)
        M, I, W, P = tab.mul, tab.inv, tab.omega, tab.pull
        x, z, y = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        b = M[x, I[z]]          # x z^-1
        c = M[z, I[y]]          # z y^-1
        # alpha_{x^-1}[w](p) = w(x . p) = w(P[x^-1, p])
        px = P[I]               # (n, d)
        self.twist = np.take_along_axis(W[b, c], px[x], axis=-1)          # (n, n, n, d)
        xx, yy = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        a = M[xx, I[yy]]
        self.inv_twist = np.take_along_axis(W[a, I[a]], px[xx], axis=-1).conj()  # (n, n, d)

    def array(self, K: KernelElement) -> np.ndarray:
        els = self.tables.elements
        from .system import spectrum_points

        pts = spectrum_points(self.system)
        A = self.system.model
        return np.array([[[A.evaluate(K(x, y), p) for p in pts] for y in els] for x in els], dtype=complex)

    def compose(self, K: np.ndarray, L: np.ndarray) -> np.ndarray:
        return np.einsum("...xzp,...zyp,xzyp->...xyp", K, L, self.twist)

    def involve(self, K: np.ndarray) -> np.ndarray:
        return self.inv_twist * np.swapaxes(K, -2, -3).conj()
