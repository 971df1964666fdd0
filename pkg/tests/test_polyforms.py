import pytest
from hypothesis import given
from hypothesis import strategies as st

from rumin_lab.errors import DegreeBudget
from rumin_lab.poly import Poly
from rumin_lab.polyforms import (
    PolyForm,
    d,
    d_component,
    d_function,
    degree_budget,
    multicomplex_check,
    wedge,
)
from rumin_lab.stokes_lab import group

from strategies import polys

GROUPS = ["h1", "h2", "h1xr", "cartan"]


def form_strategy(G, k):
    from rumin_lab.exterior import masks_of_degree

    return st.dictionaries(st.sampled_from(masks_of_degree(G.dim, k)), polys(G.dim, 1, 2), max_size=2).map(
        lambda c: PolyForm(G, k, c)
    )


def test_d_theta_T_on_h1xr():
    # d theta_4 = -theta_1 ^ theta_2
    G = group("h1xr")
    assert d(PolyForm.basis(G, [4])) == -PolyForm.basis(G, [1, 2])


def test_weight_jump_components_add_up():
    G = group("cartan")
    f = Poly.monomial([1, 2, 0, 1, 0])
    alpha = PolyForm.basis(G, [3], f)
    total = sum((d_component(alpha, j) for j in (0, 1, 2, 3)), PolyForm(G, 2))
    assert total == d(alpha)


def test_budget_is_enforced():
    G = group("h1")
    f = Poly.monomial([4, 0, 0])
    with degree_budget(2):
        with pytest.raises(DegreeBudget):
            d_function(f, G)


@pytest.mark.parametrize("name", GROUPS)
def test_multicomplex_relations_on_probes(name):
    rep = multicomplex_check(group(name), probe_degree=1)
    assert rep["ok"], rep


@pytest.mark.parametrize("name", ["h1xr", "cartan"])
@given(data=st.data())
def test_d_squared_is_zero(name, data):
    G = group(name)
    alpha = data.draw(form_strategy(G, 1))
    assert d(d(alpha)).is_zero()


@given(data=st.data())
def test_leibniz_rule(data):
    G = group("h1xr")
    a = data.draw(form_strategy(G, 1))
    b = data.draw(form_strategy(G, 1))
    assert d(wedge(a, b)) == wedge(d(a), b) - wedge(a, d(b))
