"""Hilbert-space realisations on finite windows of l^2(G) (tensored with a fibre).

Every coefficient representation used here is a multiplication
representation: pi(phi) acts on C^P, P a finite list of spectral points, as
diag(phi(p) for p in P).  This covers evaluation at one point, the
multiplication representation of a finite spectrum and the regular
representation of the standard model (P = window).

Induced covariant pair on l^2(W) (x) C^P:

    [r(phi) v](x) = pi[alpha_{x^-1} phi] v(x)
    [L(y) v](x)   = pi[omega(x^-1, y)] v(y^-1 x)       (zero if y^-1 x not in W)

Basis vectors are ordered fibre-major, index = i_point * |W| + i_x, so
multiplication representations give block-diagonal matrices.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .coefficients import FiniteSpectrumModel, ScalarModel, StandardModel
from .crossed import CrossedElement
from .groups import Element, Group
from .kernels import KernelElement, ScalarKernel
from .system import TwistedSystem, spectrum_points


@dataclass(frozen=True)
class Window:
    group: Group
    elements: tuple[Element, ...]

    @classmethod
    def ball(cls, group: Group, radius: int) -> Window:
        return cls(group, tuple(group.ball(radius)))

    @classmethod
    def full(cls, group: Group) -> Window:
        return cls(group, tuple(group.elements()))

    @cached_property
    def index(self) -> dict[Element, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    @property
    def is_full(self) -> bool:
        return self.group.finite and len(self.elements) == self.group.order

    def interior(self, r: int) -> list[Element]:
        """Points x with ball(r) x inside the window (rows unaffected by truncation at reach r)."""
        g = self.group
        b = g.ball(r)
        return [x for x in self.elements if all(g.multiply(a, x) in self.index for a in b)]

    def interior_mask(self, r: int, fibre: int = 1) -> np.ndarray:
        pts = set(self.interior(r))
        base = np.array([x in pts for x in self.elements])
        return np.tile(base, fibre)


@dataclass(frozen=True)
class MultiplicationRep:
    """pi(phi) = diag(phi(p)) over a finite list of spectral points."""

    points: tuple
    label: str = "points"

    def __len__(self) -> int:
        return len(self.points)


def point_rep(system: TwistedSystem, sigma0=None) -> MultiplicationRep:
    """Evaluation at one spectral point (the scalar model has a single point, None)."""
    if isinstance(system.model, ScalarModel):
        sigma0 = None
    elif sigma0 is None:
        sigma0 = 0 if isinstance(system.model, FiniteSpectrumModel) else system.group.identity()
    return MultiplicationRep((sigma0,), label="point")


def spectrum_rep(system: TwistedSystem) -> MultiplicationRep:
    """Multiplication representation of a finite spectrum (counting measure)."""
    return MultiplicationRep(tuple(spectrum_points(system)), label="spectrum")


def regular_points(system: TwistedSystem, window: Window) -> MultiplicationRep:
    """Fibre of the regular representation: the window itself (standard case) or all of Sigma."""
    if isinstance(system.model, StandardModel):
        return MultiplicationRep(tuple(window.elements), label="regular")
    return spectrum_rep(system)


@dataclass
class DenseOperator:
    matrix: object  # ndarray or scipy sparse
    window: Window
    fibre: MultiplicationRep

    @property
    def dense(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)

    @property
    def shape(self):
        return self.matrix.shape

    def adjoint(self) -> DenseOperator:
        return DenseOperator(self.matrix.conj().T, self.window, self.fibre)

    def __matmul__(self, other: DenseOperator) -> DenseOperator:
        return DenseOperator(self.matrix @ other.matrix, self.window, self.fibre)

    def index_table(self) -> list[tuple[int, Element, object]]:
        n = len(self.window)
        return [(k * n + i, x, p) for k, p in enumerate(self.fibre.points) for i, x in enumerate(self.window.elements)]

    def to_csv(self) -> str:
        """Index table (index, element, point) then one row per matrix row: re/im pairs, row-major."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "element", "point"])
        for i, x, p in self.index_table():
            w.writerow([i, " ".join(map(str, x)), _point_str(p)])
        w.writerow(["row", "values"])
        for i, row in enumerate(self.dense):
            w.writerow([i] + [f"{v:.17g}" for z in row for v in (z.real, z.imag)])
        return buf.getvalue()

    def save_npz(self, path) -> None:
        np.savez(path, index=np.array([x for _, x, _ in self.index_table()], dtype=np.int64),
                 points=np.array([_point_str(p) for _, _, p in self.index_table()]),
                 matrix=self.dense)

    @staticmethod
    def read_csv(text: str) -> tuple[list[tuple[int, Element, str]], np.ndarray]:
        rows = list(csv.reader(io.StringIO(text)))
        split = next(i for i, r in enumerate(rows) if r and r[0] == "row")
        table = [(int(r[0]), tuple(int(t) for t in r[1].split()), r[2]) for r in rows[1:split]]
        data = []
        for r in rows[split + 1:]:
            vals = [float(v) for v in r[1:]]
            data.append([complex(a, b) for a, b in zip(vals[::2], vals[1::2])])
        return table, np.array(data, dtype=complex)


def _point_str(p) -> str:
    if p is None:
        return ""
    if isinstance(p, tuple):
        return " ".join(map(str, p))
    return str(p)


# ----------------------------------------------------------------------------
# assembly helpers


def _assemble(n_rows: int, entries: tuple[list, list, list], sparse: bool):
    rows, cols, vals = entries
    m = sp.coo_matrix((np.asarray(vals, dtype=complex), (np.asarray(rows, dtype=np.intp),
                      np.asarray(cols, dtype=np.intp))), shape=(n_rows, n_rows))
    m = m.tocsr()  # duplicate entries are summed
    m.sum_duplicates()
    return m if sparse else m.toarray()


def _use_sparse(window: Window, reach: int, sparse: bool | None) -> bool:
    if sparse is not None:
        return sparse
    band = len(window.group.ball(reach)) if not window.group.finite or reach < 10 else len(window)
    return band < 0.1 * len(window)


def _ev(system: TwistedSystem, value, p) -> complex:
    return system.model.evaluate(value, p)


def r_matrix(system: TwistedSystem, rep: MultiplicationRep, phi, window: Window) -> np.ndarray:
    """Diagonal of r(phi): entry (p, x) is phi(x . p)."""
    mv = system.action.move_point
    return np.array([_ev(system, phi, mv(x, p)) for p in rep.points for x in window.elements], dtype=complex)


def induced_pair(system: TwistedSystem, rep: MultiplicationRep, window: Window):
    """The induced covariant pair as functions: phi -> r(phi) (dense) and y -> L(y) (dense)."""
    g = system.group
    n, idx = len(window), window.index
    N = n * len(rep)

    def r(phi) -> np.ndarray:
        return np.diag(r_matrix(system, rep, phi, window))

    def L(y: Element) -> np.ndarray:
        out = np.zeros((N, N), dtype=complex)
        yi = g.inverse(y)
        for k, p in enumerate(rep.points):
            for i, x in enumerate(window.elements):
                j = idx.get(g.multiply(yi, x))
                if j is not None:
                    out[k * n + i, k * n + j] = _ev(system, system.omega(g.inverse(x), y), p)
        return out

    return r, L


def integrated(system: TwistedSystem, rep: MultiplicationRep, f: CrossedElement, window: Window,
               sparse: bool | None = None) -> DenseOperator:
    """sum_a r[f(a)] L(a): entry [(p,x), (p, a^-1 x)] = f(a)(x . p) omega(x^-1, a)(p)."""
    g = system.group
    mv = system.action.move_point
    n, idx = len(window), window.index
    rows, cols, vals = [], [], []
    for a, fa in f.coeffs.items():
        ai = g.inverse(a)
        for i, x in enumerate(window.elements):
            j = idx.get(g.multiply(ai, x))
            if j is None:
                continue
            w = system.omega(g.inverse(x), a)
            for k, p in enumerate(rep.points):
                rows.append(k * n + i)
                cols.append(k * n + j)
                vals.append(_ev(system, fa, mv(x, p)) * _ev(system, w, p))
    reach = max((g.length(a) for a in f.coeffs), default=0)
    return DenseOperator(_assemble(n * len(rep), (rows, cols, vals), _use_sparse(window, reach, sparse)),
                         window, rep)


def int_kernel(system: TwistedSystem, rep: MultiplicationRep, K: KernelElement, window: Window,
               sparse: bool | None = None) -> DenseOperator:
    """[Int(K) v](x) = sum_y pi[K(x, y)] pi[omega(x^-1, x y^-1)] v(y)."""
    g = system.group
    n, idx = len(window), window.index
    rows, cols, vals = [], [], []
    for a in K.diagonals:
        ai = g.inverse(a)
        for i, x in enumerate(window.elements):
            j = idx.get(g.multiply(ai, x))
            if j is None:
                continue
            kv = K.diag_value(a, x)
            w = system.omega(g.inverse(x), a)
            for k, p in enumerate(rep.points):
                rows.append(k * n + i)
                cols.append(k * n + j)
                vals.append(_ev(system, kv, p) * _ev(system, w, p))
    return DenseOperator(_assemble(n * len(rep), (rows, cols, vals), _use_sparse(window, K.band_radius(), sparse)),
                         window, rep)


def int_scalar(system: TwistedSystem, S: ScalarKernel, window: Window) -> DenseOperator:
    """[Int_lambda(S) v](x) = sum_y S(x, y) lambda(x, y) v(y), lambda(x, y) = omega(x^-1, x y^-1)(e)."""
    g = system.group
    e = g.identity()
    n, idx = len(window), window.index
    rows, cols, vals = [], [], []
    for a, sa in S.diagonals.items():
        ai = g.inverse(a)
        for i, x in enumerate(window.elements):
            j = idx.get(g.multiply(ai, x))
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(sa(x) * _ev(system, system.omega(g.inverse(x), a), e))
    return DenseOperator(_assemble(n, (rows, cols, vals), False), window, MultiplicationRep((e,), "point"))


def regular_rep(system: TwistedSystem, f: CrossedElement, window: Window) -> DenseOperator:
    """Block-diagonal direct sum over the regular fibre of the point representations."""
    return integrated(system, regular_points(system, window), f, window, sparse=False)


def intertwiner(system: TwistedSystem, z: Element, sigma0, window: Window) -> DenseOperator:
    """(R v)(x) = omega(z^-1, x^-1)(sigma0) v(x z); maps the sigma0 picture to the z . sigma0 one."""
    g = system.group
    zi = g.inverse(z)
    n, idx = len(window), window.index
    out = np.zeros((n, n), dtype=complex)
    for i, x in enumerate(window.elements):
        j = idx.get(g.multiply(x, z))
        if j is not None:
            out[i, j] = _ev(system, system.omega(zi, g.inverse(x)), sigma0)
    return DenseOperator(out, window, MultiplicationRep((sigma0,), "point"))


def theta_embedding(system: TwistedSystem, rep: MultiplicationRep, f: CrossedElement,
                    window: Window) -> dict[Element, np.ndarray]:
    """x -> r[f(x)] L(x) as dense operators on the window."""
    r, L = induced_pair(system, rep, window)
    return {x: r(fx) @ L(x) for x, fx in f.coeffs.items()}


def operator_convolution(group: Group, F: Mapping[Element, np.ndarray], H: Mapping[Element, np.ndarray]):
    """(F * H)(x) = sum_y F(y) H(y^-1 x) for operator-valued functions."""
    out: dict[Element, np.ndarray] = {}
    for y in sorted(F):
        for t in sorted(H):
            x = group.multiply(y, t)
            term = F[y] @ H[t]
            out[x] = out[x] + term if x in out else term
    return out


def operator_involution(group: Group, F: Mapping[Element, np.ndarray]):
    """F^*(x) = F(x^-1)^*."""
    return {group.inverse(x): m.conj().T for x, m in F.items()}


def max_abs(m) -> float:
    m = m.toarray() if sp.issparse(m) else m
    return float(np.max(np.abs(m))) if m.size else 0.0

