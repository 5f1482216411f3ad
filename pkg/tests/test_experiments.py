import csv
import io
import json
import math

import pytest

from biperiodic.experiments import (
    CSV_COLUMNS,
    FOUR_PI_INV,
    Record,
    Report,
    TilingCensus,
    census,
    check,
    cover_volume,
    entropy_closed_forms,
    growth_gaps,
    growth_report,
    link_polynomials,
    load_tolerances,
    quotient_torsion,
    ratio_limit,
    torsion_growth_series,
    tree_entropy,
    verify_report,
)
from biperiodic.exact import tree_count
from biperiodic.laurent import parse_poly
from biperiodic.mahler import volume_constants
from biperiodic.periodic_graph import build_builtin, tait_graph, torus_quotient
from biperiodic.experiments import link_volume

V_TET, V_OCT = 1.0149416064096536, 3.663862376708876


def test_census_of_builtins():
    assert census(build_builtin("square-weave")) == TilingCensus(0, 4)
    assert census(build_builtin("triaxial")) == TilingCensus(1, 0, 2)
    assert census(build_builtin("rhombitrihexagonal")) == TilingCensus(1, 3, 2)


def test_census_rejects_negative_counts():
    with pytest.raises(ValueError):
        TilingCensus(-1, 0)


def test_link_volumes():
    assert link_volume(census(build_builtin("square-weave"))) == pytest.approx(14.65545, abs=1e-5)
    assert link_volume(census(build_builtin("triaxial"))) == pytest.approx(10.14942, abs=1e-5)
    assert link_volume(census(build_builtin("rhombitrihexagonal"))) == pytest.approx(21.14100, abs=1e-5)
    assert link_volume(TilingCensus(2, 1)) == pytest.approx(20 * V_TET + V_OCT, abs=1e-12)


def test_cover_volume_scales_with_n_squared():
    c = census(build_builtin("triaxial"))
    assert cover_volume(c, 3) == pytest.approx(18 * link_volume(c))


def test_link_polynomials_weave():
    d, p = link_polynomials(build_builtin("square-weave"))
    assert d.support and p.support
    assert d.evaluate(1, 1) == 0
    assert d == d.inverted()


def test_triaxial_polynomials():
    d, p = link_polynomials(build_builtin("triaxial"))
    assert d == parse_poly("6 - x - x^-1 - y - y^-1 - x*y - x^-1*y^-1")
    assert p == parse_poly("6 + x + x^-1 + y + y^-1 - x*y - x^-1*y^-1")


def test_ratio_limits():
    assert ratio_limit(build_builtin("square-weave")) == pytest.approx(FOUR_PI_INV, abs=1e-8)
    assert ratio_limit(build_builtin("triaxial")) == pytest.approx(FOUR_PI_INV, abs=1e-8)
    assert ratio_limit(build_builtin("rhombitrihexagonal")) == pytest.approx(1.0126 * FOUR_PI_INV, abs=5e-4)


def test_quotient_torsion_methods_agree():
    g = tait_graph(build_builtin("square-weave"))
    for n in (1, 2, 3):
        snf, how_snf = quotient_torsion(g, n, "snf")
        four, how_four = quotient_torsion(g, n, "fourier")
        assert snf == four == tree_count(torus_quotient(g, n))
        assert (how_snf, how_four) == ("snf", "fourier-tree-count")
    assert quotient_torsion(g, 8)[1] == "fourier-tree-count"
    with pytest.raises(ValueError):
        quotient_torsion(g, 2, "guess")


def test_growth_series_rows():
    m = build_builtin("triaxial")
    series = torsion_growth_series(m, [1, 2, 4, 8], "n2")
    assert [r.n for r in series.rows] == [1, 2, 4, 8]
    assert series.row(2).torsion == 128
    assert series.row(1).torsion == 1 and series.row(1).ratio == 0.0
    assert series.row(4).ratio == pytest.approx(math.log(series.row(4).torsion) / 16)
    vol = torsion_growth_series(m, [2], "volume").rows[0]
    assert vol.normalizer == pytest.approx(2 * 4 * 10 * V_TET)


def test_tower_subsequence_matches_full_series():
    m = build_builtin("square-weave")
    full = torsion_growth_series(m, [1, 2, 3, 4, 8])
    tower = torsion_growth_series(m, [2, 4, 8])
    for r in tower.rows:
        assert r.torsion == full.row(r.n).torsion


def test_growth_series_weave_n1_is_finite():
    r = torsion_growth_series(build_builtin("square-weave"), [1]).rows[0]
    assert r.torsion > 0 and math.isfinite(r.ratio)


@pytest.mark.parametrize("n_list", [[], [0, 1], [2, 1], [2, 2]])
def test_growth_series_rejects_bad_n_list(n_list):
    with pytest.raises(ValueError):
        torsion_growth_series(build_builtin("triaxial"), n_list)


def test_growth_series_rejects_bad_normalizer():
    with pytest.raises(ValueError):
        torsion_growth_series(build_builtin("triaxial"), [1], "vertices")


def test_growth_gaps_decrease():
    gaps = growth_gaps(build_builtin("triaxial"), (8, 16, 32, 64))
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.02


def test_growth_report():
    rep = growth_report(torsion_growth_series(build_builtin("triaxial"), [1, 2]))
    assert [r.id for r in rep.records] == ["growth/triaxial/n2/n=1", "growth/triaxial/n2/n=2"]
    assert rep.passed


def test_entropy_closed_forms():
    closed = entropy_closed_forms()
    assert closed["triangular"] == pytest.approx(1.615329, abs=1e-6)
    assert closed["square"] == pytest.approx(1.166243, abs=1e-6)
    assert closed["hexagonal"] == pytest.approx(0.807664, abs=1e-6)


@pytest.mark.parametrize("route,tol", [("mahler", 1e-6), ("torus-fourier", 1e-5), ("planar-cut", 1e-3)])
def test_tree_entropy_routes(route, tol):
    closed = entropy_closed_forms()
    for lattice in ("square", "hexagonal"):
        assert tree_entropy(lattice, route) == pytest.approx(closed[lattice], abs=tol)


def test_tree_entropy_errors():
    with pytest.raises(ValueError):
        tree_entropy("kagome")
    with pytest.raises(ValueError):
        tree_entropy("square", "magic")
    with pytest.raises(ValueError):
        tree_entropy("square", "planar-cut", n_max=8)


def test_check_kinds():
    rep = Report()
    assert check(rep, "a", "m", 1.0, 0.1, lambda: 1.05).passed
    assert not check(rep, "b", "m", 1.0, 0.01, lambda: 1.05).passed
    assert check(rep, "c", "m", 100.0, 0.01, lambda: 100.5, kind="rel").passed
    assert check(rep, "d", "m", 1.0, 0.0, lambda: 1.0, kind="ge").passed
    assert not check(rep, "e", "m", 1.0, 0.0, lambda: 0.9, kind="ge").passed
    assert check(rep, "f", "m", 0.0, 0.0, lambda: -1.0, kind="le").passed
    assert check(rep, "g", "m", 7, 0, lambda: 7, kind="exact").passed
    assert check(rep, "h", "m", None, None, lambda: "x", kind="info").passed
    assert not rep.passed
    with pytest.raises(ValueError):
        check(rep, "i", "m", 1, 1, lambda: 1, kind="near")


def test_check_turns_exceptions_into_failures():
    rep = Report()
    rec = check(rep, "boom", "m", 1.0, 0.1, lambda: 1 / 0)
    assert not rec.passed and rec.computed is None
    assert "ZeroDivisionError" in rec.method


def test_report_csv_format():
    rep = Report([Record("x", 1.5, 1.0, 0.1, False, 2.34567, "route a"), Record("y", "1^3 4", None, None, True, 0.0, "snf")])
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1] == ["x", "1.5", "1.0", "0.1", "False", "2.346", "route a"]
    assert rows[2] == ["y", "1^3 4", "", "", "True", "0.0", "snf"]
    assert rep.render("csv") == rep.to_csv()


def test_report_json_format():
    rep = Report([Record("x", math.nan, 1.0, 0.1, False, 1.0, "m")])
    rows = json.loads(rep.render("json"))
    assert rows == [{"id": "x", "computed": None, "target": 1.0, "tolerance": 0.1, "pass": False, "runtime-ms": 1.0, "method": "m"}]
    with pytest.raises(ValueError):
        rep.render("xml")


def test_load_tolerances(tmp_path):
    tols = load_tolerances()
    assert tols["corollary_mahler"] == 1e-4
    assert tols["cross_entropy"] == 2e-3
    assert tols["grid_n"] == 1024
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"gauge": 1.0}))
    assert load_tolerances(path) == {"gauge": 1.0}


def test_verify_theorem_scope():
    rep = verify_report("theorem2")
    assert rep.passed
    ids = [r.id for r in rep.records]
    assert "theorem2/square-weave/mahler-p" in ids
    assert "theorem2/triaxial/growth-ratio-n64" in ids


def test_verify_semiregular_and_conjecture_scopes():
    for scope in ("semiregular", "conjecture-sanity"):
        rep = verify_report(scope)
        assert rep.passed, [r for r in rep.records if not r.passed]


def test_verify_tight_override_fails():
    rep = verify_report("conjecture-sanity", {"ratio_rhombitrihexagonal": 1e-9})
    assert not rep.passed


def test_verify_unknown_scope():
    with pytest.raises(ValueError):
        verify_report("everything")


def test_volume_constants():
    k = volume_constants()
    assert k.v_tet == pytest.approx(V_TET, abs=1e-12)
    assert k.v_oct == pytest.approx(V_OCT, abs=1e-12)
