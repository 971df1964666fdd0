from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rumin_lab.config import (
    ConfigError,
    chain_from_config,
    chain_to_config,
    dumps,
    experiment_config,
    group_spec_from_config,
    group_spec_to_config,
    load_experiments,
    loads,
    resolve_group,
)
from rumin_lab.errors import GradingViolation, ParseError
from rumin_lab.exterior import masks_of_degree
from rumin_lab.geometry import integrate
from rumin_lab.literals import format_vector, parse_form, parse_poly, parse_vector
from rumin_lab.polyforms import PolyForm
from rumin_lab.stokes_lab import GROUP_SPECS, fixtures, group

from strategies import polys

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_literal_grammar():
    G = group("h1xr")
    alpha = parse_form("x4 t1 - 1/2 (x1 + x2)^2 t3", G)
    assert alpha.k == 1 and alpha.coeffs[0b0100] == parse_poly("-1/2 x1^2 - x1 x2 - 1/2 x2^2", 4)
    assert parse_poly("x1^2 x2 / 3", 2) == parse_poly("1/3 * x1 * x1 * x2", 2)
    assert parse_form("t2^t1", G) == -parse_form("t1^t2", G)
    assert parse_vector("X3 - 1/2 X4", 4) == {2: 1, 3: Fraction(-1, 2)}


@pytest.mark.parametrize("text,where", [("x1 + t9", 5), ("x1 + ", 5), ("x1 $ x2", 3), ("t1 + t1^t2", 0)])
def test_parse_errors_carry_a_span(text, where):
    with pytest.raises(ParseError) as err:
        parse_form(text, group("h1xr"))
    assert err.value.start == where
    assert "^" in str(err.value)


@given(data=st.data())
def test_form_round_trip(data):
    G = group("h2")
    k = data.draw(st.integers(1, 3))
    coeffs = data.draw(st.dictionaries(st.sampled_from(masks_of_degree(5, k)), polys(5, 2, 3), max_size=3))
    alpha = PolyForm(G, k, coeffs)
    if alpha:
        assert parse_form(alpha.to_str(), G) == alpha


@given(st.dictionaries(st.integers(0, 4), st.fractions(max_denominator=6).filter(bool), max_size=4))
def test_vector_round_trip(vec):
    assert parse_vector(format_vector(vec), 5) == vec


@pytest.mark.parametrize("name", sorted(GROUP_SPECS))
def test_group_config_round_trip(name):
    spec = GROUP_SPECS[name]
    data = group_spec_to_config(spec)
    again = group_spec_from_config(loads(dumps(data)))
    assert again == spec
    assert dumps(group_spec_to_config(again)) == dumps(data)


@pytest.mark.parametrize("name", ["h1_lens", "h1xr_deg3_graph", "cartan_curve"])
def test_chain_config_round_trip(name):
    fx = fixtures()[name]
    data = chain_to_config(fx.chain)
    text = dumps(data)
    chain = chain_from_config(fx.G, loads(text))
    assert dumps(chain_to_config(chain)) == text
    alpha = parse_form("x1 " + " ^ ".join(f"t{i}" for i in range(1, fx.chain.k + 1)), fx.G)
    assert integrate(fx.G, chain, alpha) == integrate(fx.G, fx.chain, alpha)


def test_toml_errors_have_positions():
    with pytest.raises(ParseError) as err:
        loads("schema = 1\ngroup = [\n")
    assert err.value.line is not None


def test_experiment_files_validate():
    for path in sorted(CONFIGS.glob("*.cfg")):
        if path.name == "bad_group.cfg":
            with pytest.raises(GradingViolation):
                resolve_group(str(path))
            continue
        cfg = load_experiments(path)
        resolve_group(cfg.group)
        assert experiment_config(loads(cfg.dumps())) == cfg


def test_experiment_validation():
    base = {"group": "h1", "chain": {"fixture": "h1_lens"}}
    with pytest.raises(ConfigError):
        experiment_config(dict(base, experiments=[{"mode": "magic"}]))
    with pytest.raises(ConfigError):
        experiment_config(dict(base, experiments=[{"mode": "rumin", "colour": 1}]))
    with pytest.raises(ConfigError):
        experiment_config(dict(base, schema=2, experiments=[{"mode": "rumin"}]))
    with pytest.raises(ConfigError):
        chain_from_config(group("h1"), {"fixture": "h1xr_lens"})
