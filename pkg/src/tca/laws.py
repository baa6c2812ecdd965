"""Exhaustive Banach *-algebra law sweeps over small supports on finite groups.

Every nonempty subset S of G with |S| <= k gets one element (and one kernel
with bands S) with seeded random coefficients; the laws are then checked on
all singles, pairs and triples.  Residuals are relative to the product of the
l^1 norms of the inputs.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .crossed import CrossedElement
from .groups import Element, Group
from .kernels import FiniteKernelArrays
from .system import TwistedSystem, spectrum_points


def support_subsets(group: Group, k: int) -> list[tuple[Element, ...]]:
    els = group.elements()
    return [c for j in range(1, k + 1) for c in itertools.combinations(els, j)]


def _bump(worst: dict, name: str, value: float, witness) -> None:
    if name not in worst or value > worst[name][0]:
        worst[name] = (value, witness)


def exhaustive_crossed_laws(system: TwistedSystem, max_support: int, seed: int) -> dict[str, tuple[float, object]]:
    """Unit, involutivity, anti-multiplicativity and associativity of the crossed product."""
    if not system.group.finite:
        raise ValueError("exhaustive sweeps need a finite group")
    rng = np.random.default_rng(seed)
    subs = support_subsets(system.group, max_support)
    els = [CrossedElement.make(system, {x: system.random_coefficient(rng) for x in s}) for s in subs]
    zero = CrossedElement.zero(system)
    nrm = [e.distance(zero) for e in els]
    unit = CrossedElement.unit(system)
    worst: dict = {}
    n = len(els)

    def wit(*idx):
        return {"supports": [[list(x) for x in subs[i]] for i in idx]}

    stars = [e.star() for e in els]
    for i, f in enumerate(els):
        _bump(worst, "crossed.unit", max((f * unit).distance(f), (unit * f).distance(f)) / nrm[i], wit(i))
        _bump(worst, "crossed.involutivity", stars[i].star().distance(f) / nrm[i], wit(i))
    pairs = [[els[i] * els[j] for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            r = pairs[i][j].star().distance(stars[j] * stars[i]) / (nrm[i] * nrm[j])
            _bump(worst, "crossed.anti_multiplicativity", r, wit(i, j))
            pij = pairs[i][j]
            for k in range(n):
                r = (pij * els[k]).distance(els[i] * pairs[j][k]) / (nrm[i] * nrm[j] * nrm[k])
                _bump(worst, "crossed.associativity", r, wit(i, j, k))
    return worst


def exhaustive_kernel_laws(system: TwistedSystem, max_support: int, seed: int) -> dict[str, tuple[float, object]]:
    """Involutivity, anti-multiplicativity and associativity of kernel composition.

    Kernels with bands S carry independent random values on every entry of
    those bands (so they are generally not covariant); the sweep runs on the
    dense-array form over the whole group.
    """
    if not system.group.finite:
        raise ValueError("exhaustive sweeps need a finite group")
    g = system.group
    rng = np.random.default_rng(seed)
    arr = FiniteKernelArrays(system)
    tab = arr.tables
    els = tab.elements
    idx = {x: i for i, x in enumerate(els)}
    n, d = len(els), len(spectrum_points(system))
    band = tab.mul[:, tab.inv]  # band[x, y] = index of x y^-1
    subs = support_subsets(g, max_support)
    K = np.zeros((len(subs), n, n, d), dtype=complex)
    for s, S in enumerate(subs):
        mask = np.isin(band, [idx[a] for a in S])
        vals = rng.normal(size=(n, n, d)) + 1j * rng.normal(size=(n, n, d))
        K[s] = np.where(mask[:, :, None], vals, 0)
    # kernel l^1 norm: sum over bands of the sup over the diagonal
    absK = np.abs(K).max(axis=3)
    norms = np.array([math.fsum(absK[s][band == a].max() for a in range(n)) for s in range(len(subs))])
    worst: dict = {}

    def wit(*ids):
        return {"bands": [[list(x) for x in subs[i]] for i in ids]}

    star = arr.involve(K)
    r = np.abs(arr.involve(star) - K).max(axis=(1, 2, 3)) / norms
    i = int(np.argmax(r))
    _bump(worst, "kernel.involutivity", float(r[i]), wit(i))
    KL = arr.compose(K[:, None], K[None, :])                       # (m, m, n, n, d)
    lhs = arr.involve(KL)
    rhs = arr.compose(star[None, :], star[:, None])                # L^ K^ with L = K[j]
    r = np.abs(lhs - rhs).max(axis=(2, 3, 4)) / np.outer(norms, norms)
    i, j = np.unravel_index(int(np.argmax(r)), r.shape)
    _bump(worst, "kernel.anti_multiplicativity", float(r[i, j]), wit(i, j))
    m = len(subs)
    for i in range(m):
        left = arr.compose(KL[i][:, None], K[None, :])             # (K_i K_j) K_k over (j, k)
        right = arr.compose(K[i][None, None], KL)                  # K_i (K_j K_k)
        r = np.abs(left - right).max(axis=(2, 3, 4)) / (norms[i] * np.outer(norms, norms))
        j, k = np.unravel_index(int(np.argmax(r)), r.shape)
        _bump(worst, "kernel.associativity", float(r[j, k]), wit(i, j, k))
    return worst
