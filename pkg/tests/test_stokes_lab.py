"""Stokes runners on the fixture chains.

Expected rationals marked "sympy oracle" were computed independently by
tests/oracles/sympy_oracle.py and frozen here.
"""

from fractions import Fraction

import pytest

from rumin_lab.errors import DimensionMismatch
from rumin_lab.geometry import Chart, CubicalChain, boundary, degree, integrate
from rumin_lab.literals import parse_form
from rumin_lab.poly import Poly
from rumin_lab.polyforms import PolyForm
from rumin_lab.stokes_lab import (
    counterexample_search,
    fixtures,
    group,
    run_classical_stokes,
    run_rumin_stokes,
    rumin_stokes_suite,
    spectral_stokes_suite,
)

FX = fixtures()


def rumin(name, text):
    fx = FX[name]
    return run_rumin_stokes(fx.G, fx.chain, parse_form(text, fx.G))


def test_degree3_graph_counterexample():
    # sympy oracle
    rep = rumin("h1xr_deg3_graph", "x4 t1")
    assert (rep.boundary_integral, rep.interior_integral) == (-1, Fraction(-3, 2))
    assert rep.discrepancy == Fraction(1, 2)
    assert (rep.boundary_correction, rep.interior_correction) == (Fraction(1, 2), 0)
    assert rep.status == "outside hypotheses"
    assert integrate(FX["h1xr_deg3_graph"].G, FX["h1xr_deg3_graph"].chain, parse_form("t3^t4", group("h1xr"))) == 1


def test_lens_counterexample_is_interior_driven():
    # sympy oracle
    rep = rumin("h1xr_lens", "x2 x3 t1")
    assert rep.boundary_integral == Fraction(1, 2520)
    assert rep.interior_integral == Fraction(1, 1260)
    assert (rep.boundary_correction, rep.interior_correction) == (0, Fraction(-1, 2520))
    assert rep.sigma_verdict == "falsified"


def test_pair_graph_agrees():
    # sympy oracle
    rep = rumin("h1xr_pair1", "x3 t1")
    assert rep.boundary_integral == rep.interior_integral == -1
    assert rep.status == "ok"


def test_classical_on_curve():
    # sympy oracle
    G = group("h1")
    rep = run_classical_stokes(G, FX["h1_curve"].chain, parse_form("x1 x2 + x3", G))
    assert rep.boundary_integral == rep.interior_integral == 1


def test_correction_identity_on_every_suite():
    for name, fx in FX.items():
        if fx.chain.k < 1 or fx.group == "r2":
            continue
        for rep in rumin_stokes_suite(fx, max_degree=1, limit=12):
            assert rep.discrepancy == rep.boundary_correction - rep.interior_correction, (name, rep.form)
            assert rep.status != "violation", (name, rep.form)


def test_search_finds_the_degree3_counterexample():
    fx = FX["h1xr_deg3_graph"]
    found = counterexample_search(fx.G, fx.chain, max_degree=1)
    assert found is not None and found.discrepancy != 0


def test_cartan_lens_has_no_discrepancy():
    fx = FX["cartan_lens"]
    reps = rumin_stokes_suite(fx, max_degree=1)
    assert reps and all(r.discrepancy == 0 for r in reps)


@pytest.mark.parametrize("name", [n for n, f in FX.items() if f.lsig_with_boundary and f.chain.k >= 2])
def test_spectral_suites_hold(name):
    reps = spectral_stokes_suite(FX[name], max_degree=1, limit=10)
    assert all(r.status == "ok" for r in reps)


def test_sigma0_box_contents():
    fx = FX["h2_sigma0"]
    assert fx.chain.k == 3 and degree(fx.G, fx.chain) == 4
    assert degree(fx.G, boundary(fx.chain)) == 3
    assert not fx.lsig_with_boundary


def test_h1xr_pairs():
    G = group("h1xr")
    expected = {"h1xr_pair1": (2, 2), "h1xr_pair2": (2, 2), "h1xr_deg3_graph": (3, 2), "h1xr_pair4": (3, 2)}
    for name, (deg, k) in expected.items():
        assert (degree(G, FX[name].chain), FX[name].chain.k) == (deg, k)


def test_closed_chain_and_zero_form():
    G = group("h1")
    u, v = Poly.var(2, 0), Poly.var(2, 1)
    sq = CubicalChain.of(Chart([u, v, Poly.zero(2)]))
    closed = boundary(sq)
    assert boundary(closed).is_zero()
    rep = run_classical_stokes(G, closed, PolyForm(G, 0, {0: Poly.monomial([2, 1, 0])}))
    assert rep.boundary_integral == rep.interior_integral == 0
    zero = run_classical_stokes(G, sq, PolyForm(G, 1))
    assert zero.discrepancy == 0


def test_dimension_mismatch():
    G = group("h1")
    with pytest.raises(DimensionMismatch):
        run_classical_stokes(G, FX["h1_curve"].chain, PolyForm.basis(G, [1]))
