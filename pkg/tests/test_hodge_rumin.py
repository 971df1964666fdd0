from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rumin_lab.errors import NotRuminForm
from rumin_lab.exterior import AlgebraicForm
from rumin_lab.hodge_rumin import (
    dc,
    dc_via_projections,
    hodge_split,
    hodge_table,
    is_rumin_form,
    pi0,
    pi_E,
    require_rumin,
)
from rumin_lab.poly import Poly
from rumin_lab.polyforms import PolyForm, d, frame_derivative
from rumin_lab.stokes_lab import group

from strategies import polys


def cov(n, *terms):
    """Sum of c * theta_I given as (c, (i, j, ...)) with 1-based indices."""
    out = AlgebraicForm(n, len(terms[0][1]))
    for c, idx in terms:
        out = out + AlgebraicForm.basis(n, list(idx)).scale(c)
    return out


def spans(space, *forms):
    vecs = [[f.coeffs.get(m, Fraction(0)) for m in space.masks] for f in forms]
    return space.dim == len(forms) and all(space.contains(v) for v in vecs)


# fiber decompositions of the standard examples ---------------------------------------


def test_h1_fibers():
    G = group("h1")
    assert [s.dims() for s in hodge_table(G, 1)] == [(0, 2, 0), (0, 0, 1)]
    top = hodge_split(G, 2, 3)
    assert spans(top.ker_box0, cov(3, (1, (1, 3))), cov(3, (1, (2, 3))))
    assert spans(hodge_split(G, 2, 2).im_d0, cov(3, (1, (1, 2))))


def test_h2_fibers():
    # basis order (x1, y1, x2, y2, t)
    G = group("h2")
    split = hodge_split(G, 2, 2)
    assert split.dims() == (1, 5, 0)
    assert spans(split.im_d0, cov(5, (1, (1, 2)), (1, (3, 4))))
    assert split.ker_box0.contains(
        [cov(5, (1, (1, 2)), (-1, (3, 4))).coeffs.get(m, 0) for m in split.ker_box0.masks])
    assert hodge_split(G, 2, 3).dims() == (0, 0, 4)
    assert hodge_split(G, 3, 4).dims() == (0, 5, 1)
    assert spans(hodge_split(G, 3, 4).im_delta0, cov(5, (1, (1, 2, 5)), (1, (3, 4, 5))))
    assert hodge_split(G, 3, 3).dims() == (4, 0, 0)
    assert [s.dims() for s in hodge_table(G, 4)] == [(1, 0, 0), (0, 4, 0)]


def test_h1xr_fibers():
    G = group("h1xr")
    one = hodge_table(G, 1)
    assert spans(one[0].ker_box0, cov(4, (1, (1,))), cov(4, (1, (2,))), cov(4, (1, (3,))))
    assert spans(one[1].im_delta0, cov(4, (1, (4,))))
    low, high = hodge_table(G, 2)
    assert spans(low.ker_box0, cov(4, (1, (1, 3))), cov(4, (1, (2, 3))))
    assert spans(high.ker_box0, cov(4, (1, (1, 4))), cov(4, (1, (2, 4))))
    assert spans(low.im_d0, cov(4, (1, (1, 2))))
    assert spans(high.im_delta0, cov(4, (1, (3, 4))))
    three = hodge_table(G, 3)
    assert spans(three[0].im_d0, cov(4, (1, (1, 2, 3))))
    assert spans(three[1].ker_box0, cov(4, (1, (1, 2, 4))), cov(4, (1, (1, 3, 4))), cov(4, (1, (2, 3, 4))))


def test_fibers_fill_each_weight():
    for name in ("h1", "h2", "h1xr", "cartan"):
        G = group(name)
        for k in range(G.dim + 1):
            from rumin_lab.exterior import masks_of_weight
            for s in hodge_table(G, k):
                assert s.total == len(masks_of_weight(G.weights, k, s.p))


# the Rumin differential ------------------------------------------------------------------


def test_non_rumin_form_is_rejected():
    G = group("h1")
    with pytest.raises(NotRuminForm):
        require_rumin(PolyForm.basis(G, [3]))
    assert is_rumin_form(PolyForm.basis(G, [1], Poly.monomial([0, 0, 2])))


@given(f1=polys(3, 2, 3), f2=polys(3, 2, 3))
def test_h1_dc_closed_formula(f1, f2):
    G = group("h1")
    X = lambda f: frame_derivative(G, 0, f)
    Y = lambda f: frame_derivative(G, 1, f)
    T = lambda f: frame_derivative(G, 2, f)
    alpha = PolyForm(G, 1, {0b001: f1, 0b010: f2})
    curl = X(f2) - Y(f1)
    expected = PolyForm(G, 2, {0b101: X(curl) - T(f1), 0b110: Y(curl) - T(f2)})
    assert dc(alpha) == expected


@given(f1=polys(4, 1, 2), f2=polys(4, 1, 2), f3=polys(4, 1, 2))
def test_h1xr_projection_formula(f1, f2, f3):
    G = group("h1xr")
    X = lambda i, f: frame_derivative(G, i, f)
    alpha = PolyForm(G, 1, {0b0001: f1, 0b0010: f2, 0b0100: f3})
    curl = X(0, f2) - X(1, f1)
    assert pi_E(alpha) == alpha + PolyForm(G, 1, {0b1000: curl})
    extra = PolyForm(G, 2, {0b1100: X(2, curl) - X(3, f3)})
    assert d(pi_E(alpha)) == dc(alpha) + extra


@pytest.mark.parametrize("name", ["h1", "h2", "h1xr", "cartan"])
@given(data=st.data())
def test_dc_squares_to_zero_and_matches_projections(name, data):
    from rumin_lab.stokes_lab import rumin_probe_forms

    G = group(name)
    pool = rumin_probe_forms(G, 1, 1)
    alpha = data.draw(st.sampled_from(pool))
    assert dc(alpha) == dc_via_projections(alpha)
    assert dc(dc(alpha)).is_zero()


@given(data=st.data())
def test_pi0_is_idempotent(data):
    G = group("h2")
    from rumin_lab.exterior import masks_of_degree

    coeffs = data.draw(st.dictionaries(st.sampled_from(masks_of_degree(5, 2)), polys(5, 1, 2), max_size=3))
    alpha = PolyForm(G, 2, coeffs)
    once = pi0(alpha)
    assert pi0(once) == once
