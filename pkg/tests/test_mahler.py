import math
import time

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biperiodic.laurent import ComplexPoly1, LaurentPoly2, X, Y, parse_poly
from biperiodic.mahler import (
    GK_NODES,
    GK_WEIGHTS,
    G_WEIGHTS,
    ToleranceNotReached,
    aberth_roots,
    lobachevsky,
    mahler_1var,
    mahler_2var,
    mahler_2var_grid,
    volume_constants,
)

SQUARE_D = 4 - X - X**-1 - Y - Y**-1
TRIANGULAR_D = 6 - X - X**-1 - Y - Y**-1 - X * Y - X**-1 * Y**-1
V_TET = 1.0149416064096536  # 3 * Cl_2(2 pi / 3) / 2, from mpmath below
V_OCT = 3.6638623767088760


def clausen_lobachevsky(theta):
    return float(mpmath.clsin(2, 2 * theta) / 2)


def smyth_value():
    # m(1 + x + y) = 3 sqrt(3) / (4 pi) * L(chi_-3, 2)
    l_value = (mpmath.zeta(2, mpmath.mpf(1) / 3) - mpmath.zeta(2, mpmath.mpf(2) / 3)) / 9
    return float(3 * mpmath.sqrt(3) / (4 * mpmath.pi) * l_value)


def test_oracle_constants():
    assert abs(3 * clausen_lobachevsky(math.pi / 3) - V_TET) < 1e-15
    assert abs(8 * clausen_lobachevsky(math.pi / 4) - V_OCT) < 1e-14


@pytest.mark.parametrize("theta", [0.0, 1e-9, 0.01, 0.3, math.pi / 6, math.pi / 4, math.pi / 3, 1.2, math.pi / 2, 2.5, -0.7, 7.0, -40.0])
def test_lobachevsky_against_clausen(theta):
    assert abs(lobachevsky(theta) - clausen_lobachevsky(theta)) < 1e-13


def test_lobachevsky_special_values():
    assert lobachevsky(0.0) == 0.0
    assert abs(lobachevsky(math.pi / 2)) < 1e-15
    assert abs(3 * lobachevsky(math.pi / 3) - 1.01494) < 1e-5


@given(st.floats(-20, 20))
def test_lobachevsky_odd_and_periodic(t):
    assert abs(lobachevsky(-t) + lobachevsky(t)) < 1e-12
    assert abs(lobachevsky(t + math.pi) - lobachevsky(t)) < 1e-12


def test_lobachevsky_maximum_at_pi_over_6():
    h = 1e-4
    slope = (lobachevsky(math.pi / 6 + h) - lobachevsky(math.pi / 6 - h)) / (2 * h)
    assert abs(slope) < 1e-6
    assert lobachevsky(math.pi / 6) > lobachevsky(math.pi / 6 + 0.01)
    assert lobachevsky(math.pi / 6) > lobachevsky(math.pi / 6 - 0.01)


def test_volume_constants():
    k = volume_constants()
    assert abs(k.v_tet - 1.01494) < 1e-5
    assert abs(k.v_oct - 3.66386) < 1e-5
    assert abs(k.v_tet - V_TET) < 1e-14
    assert abs(k.v_oct - V_OCT) < 1e-14
    assert abs(k.v_oct / (2 * k.v_tet) - 1.80493) < 1e-4


def test_lobachevsky_is_fast():
    best = min(_timed(lambda: (lobachevsky(math.pi / 3), lobachevsky(math.pi / 4))) for _ in range(20))
    assert best < 1e-3


def _timed(f):
    start = time.perf_counter()
    f()
    return time.perf_counter() - start


@pytest.mark.parametrize("k", range(23))
def test_kronrod_exact_on_polynomials(k):
    exact = (1 - (-1) ** (k + 1)) / (k + 1)
    assert abs(float(np.sum(GK_WEIGHTS * GK_NODES**k)) - exact) < 1e-14
    if k <= 13:
        assert abs(float(np.sum(G_WEIGHTS * GK_NODES**k)) - exact) < 1e-14


def test_gauss_weights_sit_on_even_nodes():
    assert np.count_nonzero(G_WEIGHTS) == 7
    assert np.all(G_WEIGHTS[0::2] == 0)


def test_aberth_matches_numpy_roots():
    rng = np.random.default_rng(11)
    for deg in range(1, 9):
        for _ in range(10):
            c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            ours = np.sort_complex(aberth_roots(c))
            ref = np.sort_complex(np.roots(c[::-1]))
            assert np.allclose(ours, ref, atol=1e-8)


def test_aberth_handles_multiple_roots():
    # (w - 1)^3 (w + 2)
    c = np.polynomial.polynomial.polyfromroots([1, 1, 1, -2])
    roots = aberth_roots(c)
    assert np.allclose(np.sort(np.abs(roots)), [1, 1, 1, 2], atol=1e-4)


@pytest.mark.parametrize(
    "coeffs, expected",
    [([-2, 1], math.log(2)), ([0, 1], 0.0), ([-1, 2, -1], 0.0), ([6, -5, 1], math.log(6)), ([3], math.log(3))],
)
def test_mahler_1var_examples(coeffs, expected):
    assert abs(mahler_1var(coeffs) - expected) < 1e-12
    assert abs(mahler_1var(ComplexPoly1(tuple(coeffs))) - expected) < 1e-12


def test_mahler_1var_against_mpmath_roots():
    rng = np.random.default_rng(3)
    for _ in range(20):
        c = [complex(v) for v in rng.integers(-5, 6, size=rng.integers(2, 8))]
        if c[-1] == 0 or all(v == 0 for v in c):
            continue
        roots = mpmath.polyroots(c[::-1], maxsteps=200, extraprec=60)
        ref = math.log(abs(c[-1])) + sum(math.log(max(1.0, abs(complex(r)))) for r in roots)
        assert abs(mahler_1var(c) - ref) < 1e-9


def test_mahler_1var_zero_rejected():
    with pytest.raises(ValueError):
        mahler_1var([0, 0])


def test_monomial_measure_is_exact():
    r = mahler_2var(X)
    assert r.value == 0.0 and r.method == "exact"
    assert mahler_2var(-3 * X * Y**-2).value == math.log(3)


def test_closed_form_lattices():
    assert abs(mahler_2var(SQUARE_D).value - V_OCT / math.pi) < 1e-6
    assert abs(mahler_2var(TRIANGULAR_D).value - 5 * V_TET / math.pi) < 1e-6
    assert abs(mahler_2var(SQUARE_D).value - 1.166243) < 1e-4
    assert abs(mahler_2var(TRIANGULAR_D).value - 1.615329) < 1e-4


def test_smyth_value():
    r = mahler_2var(1 + X + Y, tol=1e-10)
    assert abs(r.value - smyth_value()) < 1e-9
    assert r.error <= 1e-10


def test_product_of_one_variable_factors():
    assert abs(mahler_2var((X - 2) * (Y - 3), tol=1e-10).value - math.log(6)) < 1e-9
    assert abs(mahler_2var(Y * (X - 2), tol=1e-10).value - math.log(2)) < 1e-9
    assert abs(mahler_2var(X - 1, tol=1e-8).value) < 1e-7


def test_scaling_and_gauge_invariance():
    p = parse_poly("3 + x - 2*y + x*y^-1")
    base = mahler_2var(p, tol=1e-10).value
    assert abs(mahler_2var(p.scale(-5), tol=1e-10).value - (math.log(5) + base)) < 1e-9
    for q in (p.substitute_signs(-1, 1), p.substitute_signs(1, -1), p.shift(2, -3)):
        assert abs(mahler_2var(q, tol=1e-10).value - base) < 1e-9


def test_against_scipy_quadrature():
    integrate = pytest.importorskip("scipy.integrate")
    p = parse_poly("5 + x - 2*y + x*y^-1 - x^-1*y")

    def f(phi, theta):
        return math.log(abs(p.evaluate(complex(math.cos(theta), math.sin(theta)), complex(math.cos(phi), math.sin(phi)))))

    ref, _ = integrate.dblquad(f, 0, 2 * math.pi, 0, 2 * math.pi, epsabs=1e-11)
    assert abs(mahler_2var(p, tol=1e-10).value - ref / (4 * math.pi**2)) < 1e-8


def test_laplacian_measures_nonnegative():
    for p in (SQUARE_D, TRIANGULAR_D, 8 - X - X**-1 - 3 * Y - 3 * Y**-1):
        assert mahler_2var(p).value >= 0


def test_grid_method():
    assert abs(mahler_2var_grid(X, 16).value) < 1e-15
    r = mahler_2var_grid(SQUARE_D, 512)
    assert abs(r.value - 1.166243) < 5e-3
    assert r.method == "grid"
    assert abs(mahler_2var_grid(SQUARE_D, 1024).value - mahler_2var(SQUARE_D).value) < 5e-3


def test_grid_rejects_bad_size():
    with pytest.raises(ValueError):
        mahler_2var_grid(SQUARE_D, 0)


def test_tolerance_not_reached_is_reported():
    with pytest.raises(ToleranceNotReached) as info:
        mahler_2var(1 + X + Y, tol=1e-15, max_evals=300)
    partial = info.value.partial
    assert abs(partial.value - smyth_value()) < 1e-3
    assert partial.error > 1e-15


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        mahler_2var(LaurentPoly2())
    with pytest.raises(ValueError):
        mahler_2var(SQUARE_D, tol=0)
