"""TOML configuration for groups, chains and experiment lists.

Rationals are stored as strings (``"3/2"``) so a config survives a dump and
reload unchanged.  A minimal experiment file::

    schema = 1
    group = "h1xr"

    [chain]
    fixture = "h1xr_deg3_graph"

    [[experiments]]
    mode = "rumin"
    forms = ["x4 t1"]
"""

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from .errors import ParseError, SpecError
from .geometry import Chart, CubicalChain, graph_chart, pair_from_indices
from .graded_group import CheckedGroup, GroupSpec, validate
from .literals import format_vector, parse_poly, parse_vector

SCHEMA = 1
MODES = ("classical", "rumin", "spectral")


class ConfigError(SpecError):
    """A config that parses but does not describe a valid object."""


def _where(message: str):
    m = re.search(r"\(at line (\d+), column (\d+)\)", message)
    return (int(m.group(1)), int(m.group(2))) if m else (None, None)


def loads(text: str, source: str = "<config>") -> Dict[str, object]:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line, col = _where(str(exc))
        lines = text.splitlines()
        if line is None and "end of document" in str(exc):
            line = max(1, len(lines))
            col = len(lines[-1]) + 1 if lines else 1
        snippet = lines[line - 1] if line and line <= len(lines) else ""
        reason = re.sub(r"\s*\(at (line|end of).*\)", "", str(exc))
        raise ParseError(f"{source}: {reason}", snippet, (col or 1) - 1, line=line) from None


def load(path: Union[str, Path]) -> Dict[str, object]:
    path = Path(path)
    return loads(path.read_text(), str(path))


def dumps(data: Dict[str, object]) -> str:
    return tomli_w.dumps(data)


# groups --------------------------------------------------------------------------


def _literal(data, key: str, where: str, parse):
    """Run a literal parser, naming the config key in any error."""
    try:
        return parse(data)
    except ParseError as exc:
        raise ParseError(f"{where}.{key}: {exc.reason}", exc.text, exc.start, exc.end) from None


def group_spec_from_config(data: Dict[str, object]) -> GroupSpec:
    """``{name, weights, brackets = {"1,2" = "X3"}}`` -> GroupSpec (not yet validated)."""
    if "weights" not in data:
        raise ConfigError("group table needs 'weights'")
    weights = data["weights"]
    if not isinstance(weights, list) or not weights:
        raise ConfigError("group.weights must be a nonempty list of integers")
    n = len(weights)
    table = {}
    for key, value in dict(data.get("brackets", {})).items():
        m = re.fullmatch(r"\s*(\d+)\s*,\s*(\d+)\s*", key)
        if not m:
            raise ConfigError(f"bracket key {key!r} must look like \"i,j\"")
        i, j = int(m.group(1)), int(m.group(2))
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ConfigError(f"bracket [X{i}, X{j}] does not name two distinct basis vectors")
        vec = _literal(value, f"brackets.\"{key}\"", "group", lambda s: parse_vector(str(s), n))
        table[(i, j)] = {k + 1: c for k, c in vec.items()}
    return GroupSpec.from_brackets(weights, table, str(data.get("name", "")))


def group_spec_to_config(spec: GroupSpec) -> Dict[str, object]:
    brackets = {}
    for (i, j), terms in sorted(spec.brackets.items()):
        vec = {k - 1: c for k, c in terms}
        if any(vec.values()):
            brackets[f"{i},{j}"] = format_vector(vec)
    out: Dict[str, object] = {"weights": list(spec.weights), "brackets": brackets}
    if spec.name:
        out = {"name": spec.name, **out}
    return out


def resolve_group(ref) -> CheckedGroup:
    """A fixture group name, a path to a TOML file with a [group] table, or a table."""
    from .stokes_lab import GROUP_SPECS, group

    if isinstance(ref, dict):
        return validate(group_spec_from_config(ref))
    ref = str(ref)
    if ref in GROUP_SPECS:
        return group(ref)
    path = Path(ref)
    if not path.exists():
        raise ConfigError(f"unknown group {ref!r}: not a fixture name ({', '.join(GROUP_SPECS)}) or a file")
    data = load(path)
    table = data.get("group", data)
    if isinstance(table, str):
        return resolve_group(table)
    return validate(group_spec_from_config(table))


# chains --------------------------------------------------------------------------


def chain_from_config(G: CheckedGroup, data: Dict[str, object]) -> CubicalChain:
    """A chain from ``fixture = name``, an explicit ``charts`` list, or a ``graph`` table."""
    from .stokes_lab import fixtures

    if "fixture" in data:
        name = data["fixture"]
        known = fixtures()
        if name not in known:
            raise ConfigError(f"unknown fixture chain {name!r}")
        fx = known[name]
        if fx.G.spec != G.spec:
            raise ConfigError(f"fixture {name!r} lives on {fx.group}, not on the configured group")
        return fx.chain
    if "graph" in data:
        g = data["graph"]
        pair = pair_from_indices(G, g["W"], g["V"])
        k = len(g["W"])
        phi = [_literal(s, f"phi[{i}]", "chain.graph", lambda s: parse_poly(str(s), k, "u"))
               for i, s in enumerate(g.get("phi", ["0"] * len(g["V"])))]
        if len(phi) != len(g["V"]):
            raise ConfigError("chain.graph.phi needs one polynomial per V vector")
        return CubicalChain.of(graph_chart(G, pair, phi, sign=int(g.get("sign", 1)), label=str(g.get("label", ""))))
    if "charts" in data:
        k = int(data.get("k", 0))
        terms = []
        for n, c in enumerate(data["charts"]):
            comps = c["components"]
            if len(comps) != G.dim:
                raise ConfigError(f"chain.charts[{n}] needs {G.dim} components, got {len(comps)}")
            polys = [_literal(s, f"charts[{n}].components[{i}]", "chain", lambda s: parse_poly(str(s), k, "u"))
                     for i, s in enumerate(comps)]
            terms.append((int(c.get("coeff", 1)), Chart(polys, int(c.get("sign", 1)), str(c.get("label", "")), k)))
        if not terms:
            raise ConfigError("chain.charts is empty")
        return CubicalChain(k, terms)
    raise ConfigError("chain table needs one of 'fixture', 'graph' or 'charts'")


def chain_to_config(chain: CubicalChain) -> Dict[str, object]:
    charts = []
    for coeff, ch in chain.terms:
        entry: Dict[str, object] = {"components": [c.to_str("u") for c in ch.components]}
        if coeff != 1:
            entry["coeff"] = coeff
        if ch.sign != 1:
            entry["sign"] = ch.sign
        if ch.label:
            entry["label"] = ch.label
        charts.append(entry)
    return {"k": chain.k, "charts": charts}


# experiments -----------------------------------------------------------------------


@dataclass
class Experiment:
    mode: str
    forms: List[str] = field(default_factory=list)
    name: str = ""
    search: bool = False
    max_degree: int = 1
    j: Optional[int] = None
    budget_degree: Optional[int] = None

    def to_config(self) -> Dict[str, object]:
        out: Dict[str, object] = {"mode": self.mode}
        if self.name:
            out["name"] = self.name
        if self.forms:
            out["forms"] = list(self.forms)
        if self.search:
            out["search"] = True
        if self.max_degree != 1:
            out["max_degree"] = self.max_degree
        if self.j is not None:
            out["j"] = self.j
        if self.budget_degree is not None:
            out["budget_degree"] = self.budget_degree
        return out


@dataclass
class ExperimentConfig:
    group: Union[str, Dict[str, object]]
    chain: Dict[str, object]
    experiments: List[Experiment]

    def to_config(self) -> Dict[str, object]:
        return {
            "schema": SCHEMA,
            "group": self.group,
            "chain": self.chain,
            "experiments": [e.to_config() for e in self.experiments],
        }

    def dumps(self) -> str:
        return dumps(self.to_config())


_EXPERIMENT_KEYS = {"mode", "forms", "name", "search", "max_degree", "j", "budget_degree"}


def experiment_config(data: Dict[str, object]) -> ExperimentConfig:
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported schema {schema!r}; this version reads schema {SCHEMA}")
    if "group" not in data:
        raise ConfigError("experiment config needs a 'group'")
    if "chain" not in data:
        raise ConfigError("experiment config needs a [chain] table")
    exps = []
    for n, e in enumerate(data.get("experiments", [])):
        extra = set(e) - _EXPERIMENT_KEYS
        if extra:
            raise ConfigError(f"experiments[{n}]: unknown keys {sorted(extra)}")
        mode = e.get("mode")
        if mode not in MODES:
            raise ConfigError(f"experiments[{n}].mode must be one of {', '.join(MODES)}, got {mode!r}")
        exps.append(Experiment(mode, list(e.get("forms", [])), str(e.get("name", "")), bool(e.get("search", False)),
                               int(e.get("max_degree", 1)), e.get("j"), e.get("budget_degree")))
    if not exps:
        raise ConfigError("experiment config lists no experiments")
    return ExperimentConfig(data["group"], dict(data["chain"]), exps)


def load_experiments(path: Union[str, Path]) -> ExperimentConfig:
    return experiment_config(load(path))
