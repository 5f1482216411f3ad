import cmath
import math

import numpy as np
import pytest

from biperiodic.charpoly import (
    KasteleynError,
    SignAssignment,
    canonicalize,
    dimer_char_poly,
    kasteleyn_matrix,
    kasteleyn_signs,
    laplacian_matrix,
    laplacian_poly,
)
from biperiodic.laurent import X, Y, LaurentPoly2
from biperiodic.mahler import mahler_2var
from biperiodic.periodic_graph import (
    BUILTIN_NAMES,
    MapValidationError,
    TorusGraph,
    blow_up,
    build_builtin,
    overlaid_graph,
    tait_graph,
)

SQUARE = TorusGraph(1, ((0, 0, (1, 0)), (0, 0, (0, 1))))
TRIANGULAR = TorusGraph(1, ((0, 0, (1, 0)), (0, 0, (0, 1)), (0, 0, (1, 1))))
HEXAGONAL = TorusGraph(2, ((0, 1, (0, 0)), (0, 1, (1, 0)), (0, 1, (0, 1))))


def all_tait_graphs():
    for name in BUILTIN_NAMES:
        m = build_builtin(name)
        for cls in ("shaded", "white"):
            yield f"{name}/{cls}", tait_graph(m, cls)


def test_laplacian_polynomial_examples():
    assert laplacian_poly(SQUARE) == 4 - X - X**-1 - Y - Y**-1
    assert laplacian_poly(TRIANGULAR) == 6 - X - X**-1 - Y - Y**-1 - X * Y - X**-1 * Y**-1
    assert laplacian_poly(HEXAGONAL) == 6 - X - X**-1 - Y - Y**-1 - X * Y**-1 - X**-1 * Y


def test_triaxial_tait_polynomial_is_triangular():
    d = laplacian_poly(tait_graph(build_builtin("triaxial"), "shaded"))
    assert canonicalize(d) == canonicalize(laplacian_poly(TRIANGULAR))


def test_weighted_laplacian():
    g = TorusGraph(1, ((0, 0, (1, 0), 2), (0, 0, (0, 1), 3)))
    assert laplacian_poly(g) == 10 - 2 * X - 2 * X**-1 - 3 * Y - 3 * Y**-1


def test_disconnected_graph_rejected():
    with pytest.raises(MapValidationError):
        laplacian_poly(TorusGraph(2, ((0, 0, (1, 0)),)))


def test_laplacian_invariants():
    thetas = np.linspace(0, 2 * np.pi, 17)
    z = np.exp(1j * thetas)
    for label, g in all_tait_graphs():
        for gg in (g, blow_up(g, 2)):
            d = laplacian_poly(gg)
            assert d.is_reciprocal(), label
            assert d.evaluate(1, 1) == 0, label
            vals = d.evaluate(z[:, None], z[None, :])
            assert np.all(np.abs(vals.imag) < 1e-10), label
            assert np.all(vals.real > -1e-10), label


def test_laplacian_matrix_is_hermitian_on_torus():
    g = tait_graph(build_builtin("rhombitrihexagonal"), "white")
    m = laplacian_matrix(g).evaluate(cmath.exp(0.7j), cmath.exp(-1.3j))
    assert np.allclose(m, m.conj().T)


def test_blow_up_multiplies_measure():
    for label, g in all_tait_graphs():
        m1 = mahler_2var(laplacian_poly(g), tol=1e-9).value
        m4 = mahler_2var(laplacian_poly(blow_up(g, 2)), tol=1e-9).value
        assert abs(m4 - 4 * m1) < 1e-7, label


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_kasteleyn_condition_on_overlaid_graphs(name):
    gb = overlaid_graph(build_builtin(name))
    for seed in (None, 0, 1, 2, 3):
        signs = kasteleyn_signs(gb, seed)
        assert signs.is_kasteleyn(gb)
        assert all(k % 2 == 1 for k in signs.negatives_per_face(gb))


def test_single_quad_toy():
    g = TorusGraph(
        4,
        ((0, 2, (0, 0)), (2, 1, (0, 0)), (1, 3, (0, 0)), (3, 0, (0, 0))),
        ("black", "black", "white", "white"),
        ((0, 1, 2, 3),),
    )
    for seed in range(6):
        assert sum(s < 0 for s in kasteleyn_signs(g, seed).signs) in (1, 3)


def test_toy_polynomial_one_minus_z():
    # no cellular faces, so any signs are accepted
    g = TorusGraph(2, ((0, 1, (0, 0)), (0, 1, (1, 0))), ("black", "white"))
    signs = SignAssignment((1, -1))
    p = dimer_char_poly(g, signs, canonical=False)
    assert p == 1 - X
    assert abs(mahler_2var(p).value) < 1e-6


def test_infeasible_parity_system():
    # faces {0,1,2,3} (odd), {4,5} (even) and their union (even) cannot all hold
    g = TorusGraph(2, tuple((0, 1, (k, 0)) for k in range(6)), ("black", "white"), ((0, 1, 2, 3), (4, 5), (0, 1, 2, 3, 4, 5)))
    with pytest.raises(KasteleynError):
        kasteleyn_signs(g)


def test_invalid_signs_rejected():
    gb = overlaid_graph(build_builtin("square-weave"))
    with pytest.raises(MapValidationError, match="Kasteleyn"):
        dimer_char_poly(gb, SignAssignment((1,) * gb.num_edges))


def test_unbalanced_graph_rejected():
    g = TorusGraph(3, ((0, 2, (0, 0)), (1, 2, (0, 0))), ("black", "black", "white"))
    with pytest.raises(MapValidationError, match="unbalanced"):
        kasteleyn_matrix(g, SignAssignment((1, 1)))


def test_canonical_polynomial_is_gauge_independent():
    for name in BUILTIN_NAMES:
        gb = overlaid_graph(build_builtin(name))
        ps = {dimer_char_poly(gb, kasteleyn_signs(gb, seed)) for seed in (None, 1, 2, 3, 4)}
        assert len(ps) == 1, name


def test_triaxial_dimer_polynomial():
    gb = overlaid_graph(build_builtin("triaxial"))
    p = dimer_char_poly(gb)
    assert p == 6 + X + X**-1 + Y + Y**-1 - X * Y - X**-1 * Y**-1
    assert abs(mahler_2var(p, tol=1e-9).value - 1.615329736) < 1e-8


def test_canonicalize_symmetries():
    p = 5 - 2 * X + Y * X**-1 + 3 * X * Y
    c = canonicalize(p)
    assert canonicalize(c) == c
    for q in (p.shift(3, -2), -p, p.substitute_signs(-1, 1), p.substitute_signs(1, -1), p.substitute_signs(-1, -1)):
        assert canonicalize(q) == c


def test_weights_scale_determinant():
    gb = overlaid_graph(build_builtin("square-weave"))
    signs = kasteleyn_signs(gb)
    p1 = dimer_char_poly(gb, signs, canonical=False)
    p2 = dimer_char_poly(gb, signs, weights=[2] * gb.num_edges, canonical=False)
    assert p2 == p1.scale(2 ** len(gb.vertices_colored("white")))


def test_unit_circle_values_match_numeric_determinant():
    gb = overlaid_graph(build_builtin("rhombitrihexagonal"))
    signs = kasteleyn_signs(gb, 7)
    k = kasteleyn_matrix(gb, signs)
    p = k.det()
    for t, s in [(0.3, 1.1), (2.0, -0.4), (math.pi, math.pi / 3)]:
        z, w = cmath.exp(1j * t), cmath.exp(1j * s)
        assert abs(np.linalg.det(k.evaluate(z, w)) - p.evaluate(z, w)) < 1e-9


def test_laurent_poly_of_constant_graph_entries():
    # a graph with only (0,0) offsets has constant D = 0 (connected)
    g = TorusGraph(2, ((0, 1, (0, 0)), (0, 1, (0, 0))))
    assert laplacian_poly(g) == LaurentPoly2()
