"""Numerical probes: power-norm spectral radii, symmetry, inverse decay, GRS evidence."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .crossed import BudgetExceeded, CrossedElement, DEFAULT_BUDGET, power, product
from .groups import Group
from .reps import Window, integrated, point_rep, regular_rep
from .system import TwistedSystem
from .weights import AdmissibleNorm, Weight, check_shell_ratio, check_ugrs

MONOTONE_TOL = 1e-12


class SingularOperator(ArithmeticError):
    pass


@dataclass
class SpectralReport:
    levels: list[int]
    norms: list[float]
    rho: list[float]
    lam: float
    partial: bool = False
    shifted_norms: list[float] = field(default_factory=list)
    shifted_rho: list[float] = field(default_factory=list)
    shifted: float | None = None
    slack: float | None = None
    verdict: str | None = None
    margin: float | None = None
    monotone: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_rows(self) -> list[list]:
        rows = []
        for j, lvl in enumerate(self.levels):
            srho = self.shifted_rho[j] if j < len(self.shifted_rho) else ""
            rows.append([lvl, self.norms[j], self.rho[j], srho])
        return rows


def _is_monotone(seq: list[float], tol: float = MONOTONE_TOL) -> bool:
    return all(b <= a * (1 + tol) + tol for a, b in zip(seq, seq[1:]))


def spectral_radius_estimate(f: CrossedElement, norm_kind: AdmissibleNorm, levels: int,
                             budget: int = DEFAULT_BUDGET) -> SpectralReport:
    """rho_j = ||f^(2^j)||^(1/2^j) for j = 0..levels."""
    if not f.coeffs:
        raise ValueError("empty element")
    partial = False
    note = ""
    try:
        _, norms, _ = power(f, 1 << levels, norm_kind, budget)
    except BudgetExceeded as exc:
        norms, partial, note = exc.norms, True, str(exc)
    rho = [n ** (1.0 / (1 << j)) if n > 0 else 0.0 for j, n in enumerate(norms)]
    return SpectralReport(list(range(len(norms))), norms, rho, rho[-1], partial=partial,
                          monotone=_is_monotone(rho), note=note)


def symmetry_probe(f: CrossedElement, norm_kind: AdmissibleNorm, levels: int = 6, slack: float = 0.15,
                   budget: int = DEFAULT_BUDGET) -> SpectralReport:
    """h = f^ f, lam = rho(h); PASS when rho(lam e - h) <= lam (1 + slack) and both sequences decrease."""
    h = product(f.star(), f)
    rep = spectral_radius_estimate(h, norm_kind, levels, budget)
    lam = rep.lam
    shifted_el = CrossedElement.unit(f.system).scale(lam) - h
    if shifted_el.coeffs:
        srep = spectral_radius_estimate(shifted_el, norm_kind, levels, budget)
        rep.shifted_norms, rep.shifted_rho, rep.shifted = srep.norms, srep.rho, srep.lam
        rep.partial = rep.partial or srep.partial
        rep.monotone = rep.monotone and srep.monotone
        rep.note = "; ".join(n for n in (rep.note, srep.note) if n)
    else:
        rep.shifted_norms = [0.0] * len(rep.norms)
        rep.shifted_rho = [0.0] * len(rep.norms)
        rep.shifted = 0.0
    rep.slack = slack
    rep.margin = lam * (1 + slack) - rep.shifted
    rep.verdict = "PASS" if rep.margin >= 0 and rep.monotone else "FAIL"
    return rep


def regular_spectrum(h: CrossedElement) -> dict:
    """Eigenvalues of h in the regular representation of a finite group (full window)."""
    sys = h.system
    if not sys.group.finite:
        raise ValueError("regular spectrum needs a finite group")
    m = regular_rep(sys, h, Window.full(sys.group)).dense
    herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    ev = la.eigvalsh((m + m.conj().T) / 2)
    return {"min_eigenvalue": float(ev[0]), "max_eigenvalue": float(ev[-1]), "hermitian_defect": herm,
            "trace_scale": float(np.abs(np.trace(m)))}


# ----------------------------------------------------------------------------
# Wiener-type decay of inverses


@dataclass
class DecayProfile:
    radius: int
    sigma_min: float
    distances: list[int]
    max_abs: list[float]
    tail_sum: list[float]
    stability_delta: list[float | None]
    row: dict = field(repr=False, default_factory=dict)

    def csv_rows(self) -> list[list]:
        return [[d, m, t, "" if s is None else s]
                for d, m, t, s in zip(self.distances, self.max_abs, self.tail_sum, self.stability_delta)]

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("row")
        return out


def _center_row(T, n: int, center: int) -> np.ndarray:
    """Row `center` of T^-1 (solves T^T u = e_center)."""
    rhs = np.zeros(n, dtype=complex)
    rhs[center] = 1.0
    if sp.issparse(T):
        return spla.splu(sp.csc_matrix(T.T)).solve(rhs)
    return la.solve(np.asarray(T).T, rhs)


def smallest_singular_value(T, iterations: int = 40) -> float:
    """sigma_min(T); exact SVD for small dense matrices, inverse power iteration otherwise."""
    n = T.shape[0]
    if not sp.issparse(T) and n <= 1500:
        return float(la.svdvals(np.asarray(T))[-1])
    Ts = sp.csc_matrix(T)
    lu = spla.splu(Ts)
    luh = spla.splu(sp.csc_matrix(Ts.conj().T))
    v = np.ones(n, dtype=complex) / math.sqrt(n)
    est = 0.0
    for _ in range(iterations):
        w = lu.solve(luh.solve(v))  # (T^* T)^-1 v
        nrm = float(np.linalg.norm(w))
        if nrm == 0 or not np.isfinite(nrm):
            return 0.0
        est, v = nrm, w / nrm
    return 1.0 / math.sqrt(est)


def _row_by_distance(system: TwistedSystem, window: Window, row: np.ndarray) -> dict:
    g = system.group
    out = {}
    for i, x in enumerate(window.elements):
        out[x] = (g.length(x), row[i])
    return out


def inverse_center_row(system: TwistedSystem, f: CrossedElement, radius: int, margin: float = 1e-8,
                       sigma0=None) -> tuple[dict, float, Window]:
    """Center row of the inverse of the point-represented f on ball(radius), keyed by group element."""
    window = Window.ball(system.group, radius)
    op = integrated(system, point_rep(system, sigma0), f, window)
    T = op.matrix
    smin = smallest_singular_value(T)
    if not smin > margin:
        raise SingularOperator(f"operator is numerically singular (sigma_min={smin:.3g} <= {margin:g})")
    center = window.index[system.group.identity()]
    row = _center_row(T, len(window), center)
    return dict(zip(window.elements, row)), smin, window


def wiener_decay(system: TwistedSystem, f: CrossedElement, R: int, margin: float = 1e-8,
                 compare: bool = True) -> DecayProfile:
    """Center-row magnitudes of the inverse by word distance, with a 2R stability check."""
    if not f.coeffs:
        raise ValueError("empty element")
    g = system.group
    row, smin, window = inverse_center_row(system, f, R, margin)
    big = None
    if compare:
        big, _, _ = inverse_center_row(system, f, 2 * R, margin)
    buckets: dict[int, list[float]] = {}
    deltas: dict[int, float] = {}
    for x, v in row.items():
        d = g.length(x)
        buckets.setdefault(d, []).append(abs(v))
        if big is not None and 4 * d <= R:
            deltas[d] = max(deltas.get(d, 0.0), abs(v - big[x]))
    dist = sorted(buckets)
    mx = [max(buckets[d]) for d in dist]
    sums = [math.fsum(buckets[d]) for d in dist]
    tails = [math.fsum(sums[i:]) for i in range(len(sums))]
    stab = [deltas.get(d) for d in dist]
    return DecayProfile(R, smin, dist, mx, tails, stab, row)


def neumann_inverse(f: CrossedElement, c: complex | None = None, terms: int = 80) -> CrossedElement:
    """Inverse of c e + T by sum_k (-1)^k c^(-k-1) T^k, where T = f - c e (c defaults to f(e))."""
    sys = f.system
    e = sys.group.identity()
    if c is None:
        c = sys.model.evaluate(f(e), None if sys.model.tag == "scalar" else 0)
    unit = CrossedElement.unit(sys)
    T = f - unit.scale(c)
    acc = unit.scale(1.0 / c)
    term = unit
    for k in range(1, terms):
        term = product(term, T)
        acc = acc + term.scale((-1) ** k * c ** (-k - 1))
    return acc


# ----------------------------------------------------------------------------
# GRS evidence


def grs_verdict(group: Group, weight: Weight, n_max: int = 32, threshold: float = 1.05,
                window: int = 5, ratio_tol: float = 1e-12) -> dict:
    """Finite evidence for the uniform GRS condition and the shell-ratio condition.

    Condition 1 passes when a_{n_max} < threshold and a_n decreases over the
    last ``window`` terms.  Condition 2 passes when the shell ratios stay
    bounded: the maximum over the second half does not exceed the maximum
    over the first half (up to ``ratio_tol``).
    """
    a = check_ugrs(group, weight, n_max)
    ratios = check_shell_ratio(group, weight, n_max)
    last = a[-window - 1:] if len(a) > window else a
    decreasing = all(y <= x * (1 + ratio_tol) for x, y in zip(last, last[1:]))
    cond1 = a[-1] < threshold and decreasing
    half = len(ratios) // 2
    first = max(ratios[:max(half, 1)])
    second = max(ratios[half:]) if ratios[half:] else first
    cond2 = second <= first * (1 + ratio_tol)
    return {
        "weight": weight.spec(),
        "group": group.name,
        "n_max": n_max,
        "threshold": threshold,
        "ugrs": a,
        "shell_ratio": ratios,
        "condition1": {"pass": bool(cond1), "final": a[-1], "decreasing_tail": bool(decreasing)},
        "condition2": {"pass": bool(cond2), "max_ratio": max(ratios), "first_half_max": first,
                       "second_half_max": second},
        "verdict": "PASS" if cond1 and cond2 else "FAIL",
    }
