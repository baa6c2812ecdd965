import math

import numpy as np
from hypothesis import given, settings, strategies as st

from tca.crossed import CrossedElement
from tca.groups import Lattice, parse_group
from tca.kernels import gamma, gamma_inverse, kernel_norm
from tca.specs import BUILTIN_SYSTEMS, build_system, builtin_system
from tca.system import ThetaCocycle
from tca.weights import L1, L1Weighted, Weight

SETTINGS = settings(max_examples=60, deadline=None)

ints = st.integers(-6, 6)
vec2 = st.tuples(ints, ints)
coef = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False, allow_subnormal=False)
angles = st.floats(-1, 1, allow_nan=False, allow_subnormal=False)

SYSTEMS = {name: builtin_system(name) for name in BUILTIN_SYSTEMS}


@st.composite
def system_and_elements(draw, count=3):
    name = draw(st.sampled_from(sorted(SYSTEMS)))
    sys = SYSTEMS[name]
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    from tca.crossed import random_element
    size = draw(st.integers(1, 4))
    return sys, [random_element(sys, rng, size, 2) for _ in range(count)]


def l1(f):
    return max(f.norm(L1()), 1.0)


@SETTINGS
@given(angles, vec2, vec2, vec2)
def test_theta_cocycle_identity(t, x, y, z):
    w = ThetaCocycle([[0, t], [-t, 0]])
    xy = (x[0] + y[0], x[1] + y[1])
    yz = (y[0] + z[0], y[1] + z[1])
    assert abs(w(x, y) * w(xy, z) - w(y, z) * w(x, yz)) < 1e-12
    assert w(x, (0, 0)) == 1 and w((0, 0), x) == 1


@SETTINGS
@given(system_and_elements())
def test_crossed_product_laws(data):
    sys, (f, g, h) = data
    assert ((f * g) * h).distance(f * (g * h)) <= 1e-12 * l1(f) * l1(g) * l1(h)
    assert (f * g).star().distance(g.star() * f.star()) <= 1e-12 * l1(f) * l1(g)
    assert f.star().star().distance(f) <= 1e-12 * l1(f)
    assert (f * g).norm(L1()) <= f.norm(L1()) * g.norm(L1()) * (1 + 1e-12) + 1e-300


@SETTINGS
@given(system_and_elements(count=2))
def test_gamma_is_isometric_morphism(data):
    sys, (f, g) = data
    w = L1Weighted(Weight.poly(sys.group, 1.5))
    assert kernel_norm(gamma(f), L1()) == f.norm(L1())
    assert kernel_norm(gamma(f), w) == f.norm(w)
    assert gamma_inverse(gamma(f), check=False).distance(f) == 0
    from tca.kernels import kernel_distance
    assert kernel_distance(gamma(f * g), gamma(f) * gamma(g)) <= 1e-12 * l1(f) * l1(g)


@SETTINGS
@given(system_and_elements(count=1))
def test_element_json_round_trip(data):
    sys, (f,) = data
    assert CrossedElement.from_json(sys, f.to_json()).distance(f) == 0


@SETTINGS
@given(st.sampled_from(["Z", "Z^2", "Z^3", "D4", "Heis3", "C3xC5"]), st.floats(0, 4), st.data())
def test_polynomial_weight_submultiplicative(name, s, data):
    g = parse_group(name)
    w = Weight.poly(g, s)
    pts = g.elements() if g.finite else g.ball(5)
    x = data.draw(st.sampled_from(pts))
    y = data.draw(st.sampled_from(pts))
    assert w(g.multiply(x, y)) <= w(x) * w(y) * (1 + 1e-12)
    assert w(g.inverse(x)) == w(x)


@SETTINGS
@given(st.lists(st.tuples(vec2, coef), min_size=1, max_size=5), st.lists(st.tuples(vec2, coef), min_size=1, max_size=5))
def test_torus_product_equals_direct_sum(fa, ga):
    from oracles import twisted_convolution_torus
    sys = SYSTEMS["Z2-torus-generic"]
    f, g = CrossedElement.make(sys, fa), CrossedElement.make(sys, ga)
    ref = twisted_convolution_torus(dict(f.coeffs), dict(g.coeffs), [[0, 0.1234], [-0.1234, 0]])
    got = (f * g).coeffs
    scale = l1(f) * l1(g)
    assert all(abs(ref.get(k, 0) - got.get(k, 0)) <= 1e-13 * scale for k in set(ref) | set(got))
