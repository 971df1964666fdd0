"""Command line front end: ``rumin-lab <command> ...``.

Every command prints a JSON report (``--format json``, carrying ``schema: 1``)
or an aligned table.  Exit codes: 0 success, 1 a check failed where a theorem
applies, 2 a configuration or input error.
"""

import functools
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import click

from . import config as cfg
from .currents import ChainCurrent, mass_estimate, p_comass
from .errors import RuminLabError
from .exterior import masks_of_degree
from .geometry import (
    CubicalChain,
    boundary,
    degree,
    degree_constancy,
    integrate,
    integrate_numeric,
    is_spectral_manifold,
    r_manifold_report,
)
from .graded_group import format_rational
from .hodge_rumin import dc, dc_components, dc_via_projections, hodge_table, is_rumin_form
from .literals import parse_covector, parse_form
from .polyforms import PolyForm, degree_budget
from .spectral import b_solve, delta_r, delta_rumin_form, homogeneous_weight, weight_set_P, z_solve
from .stokes_lab import (
    counterexample_search,
    fixtures,
    run_classical_stokes,
    run_experiments,
    run_rumin_stokes,
    run_spectral_stokes,
)

SCHEMA = 1


class CheckFailed(Exception):
    """Raised after the report is printed when a theorem-backed check fails."""


def _q(x) -> str:
    return format_rational(Fraction(x))


# output -------------------------------------------------------------------------


def _table(rows: Sequence[Sequence[object]], header: Sequence[str]) -> str:
    cells = [[str(h) for h in header]] + [["" if c is None else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    line = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    out = [line(cells[0]), "  ".join("-" * w for w in widths)]
    out += [line(r) for r in cells[1:]]
    return "\n".join(out)


def _emit(fmt: str, command: str, payload: Dict[str, object], tables: List[Tuple[str, list, list]]):
    if fmt == "json":
        click.echo(json.dumps({"schema": SCHEMA, "command": command, **payload}, indent=2, sort_keys=False))
        return
    blocks = []
    for title, header, rows in tables:
        body = _table(rows, header) if rows else "(none)"
        blocks.append(f"{title}\n{body}" if title else body)
    click.echo("\n\n".join(blocks))


def _kv(d: Dict[str, object]) -> list:
    return [[k, json.dumps(v) if isinstance(v, (dict, list)) else v] for k, v in d.items()]


def common(fn):
    """--format and --budget-degree, plus error handling and exit codes."""

    @click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="table", show_default=True)
    @click.option("--budget-degree", type=int, default=None, help="Maximum polynomial degree of intermediate coefficients.")
    @functools.wraps(fn)
    def wrapper(*args, fmt, budget_degree, **kwargs):
        try:
            with degree_budget(budget_degree):
                fn(*args, fmt=fmt, **kwargs)
        except CheckFailed as exc:
            click.echo(f"check failed: {exc}", err=True)
            sys.exit(1)
        except (RuminLabError, KeyError, ValueError) as exc:
            name = type(exc).__name__
            click.echo(f"error: {name}: {exc}", err=True)
            sys.exit(2)

    return wrapper


# resolving inputs -------------------------------------------------------------------


def _group(ref: Optional[str]):
    if ref is None:
        raise cfg.ConfigError("--group is required")
    return cfg.resolve_group(ref)


def _chain(ref: str, group_ref: Optional[str]):
    """(group, chain) from a fixture name or a TOML file with a [chain] table."""
    known = fixtures()
    if ref in known and not Path(ref).exists():
        fx = known[ref]
        G = fx.G
        if group_ref is not None and _group(group_ref).spec != G.spec:
            raise cfg.ConfigError(f"fixture {ref!r} lives on {fx.group}, not on {group_ref}")
        return G, fx.chain
    data = cfg.load(ref)
    gref = group_ref if group_ref is not None else data.get("group")
    if gref is None:
        raise cfg.ConfigError(f"{ref}: no group given (use --group or a 'group' key)")
    G = cfg.resolve_group(gref)
    return G, cfg.chain_from_config(G, dict(data.get("chain", data)))


group_option = click.option("--group", "group_ref", help="Fixture group name (h1, h2, h1xr, cartan) or a TOML file.")
chain_option = click.option("--chain", "chain_ref", required=True, help="Fixture chain name or a TOML file.")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exact Rumin and spectral complexes on graded groups, with Stokes checks."""


# validate / complex ----------------------------------------------------------------


@main.command()
@click.argument("target")
@common
def validate(target, fmt):
    """Check a group (name or file), or every part of an experiment file."""
    path = Path(target)
    data = cfg.load(path) if path.exists() else None
    checked = {}
    if data is not None and "experiments" in data:
        ex = cfg.experiment_config(data)
        G = cfg.resolve_group(ex.group)
        chain = cfg.chain_from_config(G, ex.chain)
        for e in ex.experiments:
            for text in e.forms:
                parse_form(text, G)
        checked = {"experiments": len(ex.experiments), "chain_dimension": chain.k}
    elif data is not None:
        table = data.get("group", data)
        G = cfg.resolve_group(table) if isinstance(table, dict) else cfg.resolve_group(str(table))
    else:
        G = cfg.resolve_group(target)
    info = {
        "name": G.name,
        "dimension": G.dim,
        "weights": list(G.weights),
        "homogeneous_dimension": G.Q,
        "step": G.step,
        "nilpotency_class": G.nilpotency_class,
        "jacobi": "ok",
        "grading": "ok",
        **checked,
    }
    _emit(fmt, "validate", {"group": info}, [("group", ["field", "value"], _kv(info))])


@main.command()
@group_option
@click.option("--degree", "k", type=int, required=True)
@common
def complex(group_ref, k, fmt):
    """Hodge split of degree-k covectors by weight, with a Rumin basis."""
    G = _group(group_ref)
    if not 0 <= k <= G.dim:
        raise cfg.ConfigError(f"degree must lie in 0..{G.dim}")
    rows, entries = [], []
    for s in hodge_table(G, k):
        basis = [xi.to_str() for xi in s.ker_box0.forms()]
        entries.append({"weight": s.p, "im_d0": s.im_d0.dim, "ker_box0": s.ker_box0.dim,
                        "im_delta0": s.im_delta0.dim, "rumin_basis": basis,
                        "im_delta0_basis": [xi.to_str() for xi in s.im_delta0.forms()]})
        rows.append([s.p, s.im_d0.dim, s.ker_box0.dim, s.im_delta0.dim, "; ".join(basis)])
    P = weight_set_P(G, k)
    _emit(fmt, "complex", {"group": G.name, "degree": k, "weight_set": P, "splits": entries},
          [(f"degree {k}, weight set {P}", ["weight", "Im d0", "ker box0", "Im delta0", "Rumin basis"], rows)])


# dc / spectral ------------------------------------------------------------------------


@main.command("dc")
@group_option
@click.option("--form", "form_text", required=True)
@common
def dc_cmd(group_ref, form_text, fmt):
    """Rumin differential of a form with coefficients in the Rumin fibers."""
    G = _group(group_ref)
    alpha = parse_form(form_text, G)
    if not is_rumin_form(alpha):
        raise cfg.ConfigError("the form is not fiberwise in ker d0 and ker delta0 (NotRuminForm)")
    comps = dc_components(alpha)
    total = dc(alpha)
    same = total == dc_via_projections(alpha)
    squared = dc(total).is_zero() if total.k < G.dim else True
    payload = {"form": alpha.to_str(), "dc": total.to_str(),
               "components": {str(r): f.to_str() for r, f in comps.items()},
               "matches_projection_formula": same, "dc_squared_zero": squared}
    rows = [[r, f.to_str()] for r, f in comps.items()]
    _emit(fmt, "dc", payload, [(f"dc of {alpha.to_str()}", ["jump", "component"], rows),
                              ("", ["check", "value"], [["dc = Pi0 d PiE", same], ["dc dc = 0", squared]])])
    if not (same and squared):
        raise CheckFailed("dc identities do not hold")


@main.command()
@group_option
@click.option("--form", "form_text", required=True)
@click.option("--j", "j", type=int, required=True, help="Page index.")
@common
def spectral(group_ref, form_text, j, fmt):
    """Z_j membership, the page differential Delta_j, and its Rumin-side comparison."""
    G = _group(group_ref)
    alpha = parse_form(form_text, G)
    p = homogeneous_weight(alpha)
    w = z_solve(alpha, j, p)
    payload: Dict[str, object] = {"form": alpha.to_str(), "weight": p, "j": j, "in_Z": w is not None}
    rows = [["weight", p], ["in Z_j", w is not None]]
    ok = True
    if w is not None:
        delta = delta_r(w)
        diff = delta - delta_rumin_form(w)
        in_B = b_solve(diff, j, p + j) is not None
        ok = in_B
        payload.update(witness=[z.to_str() for z in w.z], canonical_witness=w.canonical,
                       delta=delta.to_str(), rumin_side=delta_rumin_form(w).to_str(), difference_in_B=in_B)
        rows += [["witness", "; ".join(z.to_str() for z in w.z) or "-"], ["Delta_j", delta.to_str()],
                 ["Rumin side", delta_rumin_form(w).to_str()], ["difference in B_j", in_B]]
    _emit(fmt, "spectral", payload, [("", ["field", "value"], rows)])
    if not ok:
        raise CheckFailed("the two Delta_j representatives differ outside B_j")


# chains --------------------------------------------------------------------------------


@main.command("integrate")
@group_option
@chain_option
@click.option("--form", "form_text", required=True)
@click.option("--numeric/--no-numeric", default=False, help="Also report Gauss-Legendre quadrature.")
@common
def integrate_cmd(group_ref, chain_ref, form_text, numeric, fmt):
    """Exact integral of a form over a chain."""
    G, chain = _chain(chain_ref, group_ref)
    alpha = parse_form(form_text, G, chain.k)
    value = integrate(G, chain, alpha)
    payload: Dict[str, object] = {"form": alpha.to_str(), "integral": _q(value)}
    if numeric:
        payload["numeric"] = integrate_numeric(G, chain, alpha)
    _emit(fmt, "integrate", payload, [("", ["field", "value"], _kv(payload))])


@main.command("degree")
@group_option
@chain_option
@common
def degree_cmd(group_ref, chain_ref, fmt):
    """Degree of a chain and of its boundary, with constancy and spectral checks."""
    G, chain = _chain(chain_ref, group_ref)
    charts = []
    for coeff, ch in chain.terms:
        c = degree_constancy(G, ch)
        charts.append({"label": ch.label, "coeff": coeff, "degree": c["degree"], "constant": c["constant"],
                       "method": c["method"]})
    info = is_spectral_manifold(G, chain) if chain.k else {"degree": degree(G, chain)}
    if chain.k and info.get("boundary_degree") is not None:
        info["boundary_below"] = info["boundary_degree"] < info["degree"]
    rows = [[c["label"] or "-", c["coeff"], c["degree"], c["constant"], c["method"]] for c in charts]
    _emit(fmt, "degree", {"dimension": chain.k, "charts": charts, "summary": info},
          [("charts", ["label", "coeff", "degree", "constant", "method"], rows), ("summary", ["field", "value"], _kv(info))])


@main.command()
@group_option
@chain_option
@click.option("--probe-degree", type=int, default=2, show_default=True)
@common
def rmanifold(group_ref, chain_ref, probe_degree, fmt):
    """Whether every Im delta0 form of matching degree integrates to zero."""
    G, chain = _chain(chain_ref, group_ref)
    rep = r_manifold_report(G, chain, probe_degree)
    _emit(fmt, "rmanifold", {"report": rep}, [("", ["field", "value"], _kv(rep))])


# stokes ----------------------------------------------------------------------------------


def _experiment_tasks(G, chain: CubicalChain, ex: cfg.Experiment):
    bound = boundary(chain)
    forms = [parse_form(t, G, chain.k - 1) for t in ex.forms]
    tasks = []
    for alpha in forms:
        if ex.mode == "rumin":
            tasks.append(lambda a=alpha: run_rumin_stokes(G, chain, a, bound).to_dict())
        elif ex.mode == "spectral":
            tasks.append(lambda a=alpha: run_spectral_stokes(G, chain, a, ex.j, bound).to_dict())
        else:
            tasks.append(lambda a=alpha: run_classical_stokes(G, chain, a).to_dict())
    if ex.search and ex.mode == "rumin":
        def search():
            rep = counterexample_search(G, chain, ex.max_degree, bound)
            out = {"form": None, "status": "no witness found"} if rep is None else rep.to_dict()
            return {"search": True, "max_degree": ex.max_degree, **out}
        tasks.append(search)
    return tasks


@main.group()
def stokes():
    """Stokes-type experiments."""


@stokes.command("run")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", type=int, default=4, show_default=True)
@common
def stokes_run(config_file, workers, fmt):
    """Run every experiment listed in a config file."""
    ex_cfg = cfg.load_experiments(config_file)
    G = cfg.resolve_group(ex_cfg.group)
    chain = cfg.chain_from_config(G, ex_cfg.chain)
    labels, tasks = [], []
    for n, ex in enumerate(ex_cfg.experiments):
        with degree_budget(ex.budget_degree):
            ts = _experiment_tasks(G, chain, ex)
        labels += [(ex.name or f"experiment {n + 1}", ex.mode)] * len(ts)
        tasks += ts
    results = run_experiments(tasks, workers)
    reports = [{"experiment": name, "mode": mode, **r} for (name, mode), r in zip(labels, results)]
    rows = [[r["experiment"], r["mode"], r.get("form"), r.get("boundary_integral"), r.get("interior_integral"),
             r.get("discrepancy"), r.get("status")] for r in reports]
    _emit(fmt, "stokes run", {"config": str(config_file), "group": G.name, "reports": reports},
          [("", ["experiment", "mode", "form", "boundary", "interior", "discrepancy", "status"], rows)])
    if any(r.get("status") == "violation" for r in reports):
        raise CheckFailed("a Stokes identity failed where its hypotheses hold")


# currents ----------------------------------------------------------------------------


@main.command()
@group_option
@click.option("--form", "form_text", required=True, help="Constant covector, e.g. 't1^t2 - t3^t4'.")
@click.option("--weight", "p", type=int, required=True)
@click.option("--samples", type=int, default=1024, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@common
def comass(group_ref, form_text, p, samples, seed, fmt):
    """Weighted comass of a covector (exact or a labeled lower bound)."""
    G = _group(group_ref)
    xi = parse_covector(form_text, G.dim)
    est = p_comass(xi, p, G.weights, samples, seed)
    payload = {"form": xi.to_str(), "weight": p, "seed": seed, **est.to_dict()}
    _emit(fmt, "comass", payload, [("", ["field", "value"], _kv(payload))])


@main.command()
@group_option
@chain_option
@click.option("--form", "forms", multiple=True, help="Probe forms (default: every constant basis form).")
@click.option("--weight", "p", type=int, default=None)
@common
def mass(group_ref, chain_ref, forms, p, fmt):
    """Lower bound for the mass of the current carried by a chain."""
    G, chain = _chain(chain_ref, group_ref)
    T = ChainCurrent(G, chain, p)
    if forms:
        probes = [parse_form(t, G, chain.k) for t in forms]
    else:
        probes = [PolyForm(G, chain.k, {m: 1}) for m in masks_of_degree(G.dim, chain.k)]
    est = mass_estimate(T, probes)
    payload = {"weight": T.p, **est.to_dict()}
    _emit(fmt, "mass", payload, [("", ["field", "value"], _kv(payload))])


@main.command("fixtures")
@click.option("--group", "group_name", default=None, help="Only fixtures on this group.")
@common
def fixtures_cmd(group_name, fmt):
    """List the built-in groups and chains."""
    items = [fx.describe() for fx in fixtures().values() if group_name in (None, fx.group)]
    rows = [[d["name"], d["group"], d["dimension"], d["kind"], d["degree"], d["boundary_degree"],
             d["lsig_with_boundary"]] for d in items]
    _emit(fmt, "fixtures", {"fixtures": items},
          [("", ["name", "group", "dim", "kind", "degree", "boundary degree", "graph with boundary"], rows)])


if __name__ == "__main__":
    main()
