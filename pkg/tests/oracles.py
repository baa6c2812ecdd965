"""Independent reference computations used by the tests.

Nothing here imports the algebra code; each oracle recomputes its quantity
from the defining formula in the most direct way available.
"""

import cmath
import itertools
import math

import numpy as np


def dihedral_perm(k, s, m):
    """r^k s^s as a permutation of the m-gon vertices (r: i -> i+1, s: i -> -i)."""
    def apply(i):
        if s:
            i = (-i) % m
        return (i + k) % m
    return tuple(apply(i) for i in range(m))


def compose_perm(p, q):
    """p o q (apply q first)."""
    return tuple(p[q[i]] for i in range(len(q)))


def heis_matrix(a, b, c, p):
    return np.array([[1, a, c], [0, 1, b], [0, 0, 1]]) % p


def theta_phase(x, y, theta):
    return cmath.exp(2j * math.pi * float(np.asarray(x) @ np.asarray(theta) @ np.asarray(y)))


def twisted_convolution_torus(f, g, theta):
    """Direct double sum of f(y) g(x - y) exp(2 pi i y^T Theta (x - y)) on Z^n with dict inputs."""
    out = {}
    for y, fy in f.items():
        for t, gt in g.items():
            x = tuple(a + b for a, b in zip(y, t))
            out[x] = out.get(x, 0) + fy * gt * theta_phase(y, t, theta)
    return {k: v for k, v in out.items() if v != 0}


def binomial_l1(n):
    """l1 norm of (delta_-1 + delta_1)^n: sum of binomial coefficients, 2^n."""
    return sum(math.comb(n, k) for k in range(n + 1))


def geometric_inverse_row(d):
    """Entries of (2 + S)^-1 along the shift: (-1)^d 2^(-d-1)."""
    return (-1) ** d * 2.0 ** (-d - 1)


def ugrs_poly(n, s):
    return (1.0 + n) ** (s / n)


def lattice_ball_count(n, r):
    """Number of points of Z^n with l1 norm <= r (Delannoy-type sum)."""
    return sum(2 ** k * math.comb(n, k) * math.comb(r, k) for k in range(min(n, r) + 1))


def subsets_up_to(items, k):
    return [c for j in range(1, k + 1) for c in itertools.combinations(items, j)]
