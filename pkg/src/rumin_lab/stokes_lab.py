"""Fixture groups and chains, and runners for every Stokes-type check.

Each runner reports both integrals and the hypothesis diagnostics instead of
a single boolean.  All arithmetic is exact.
"""

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

from .errors import DimensionMismatch, PreconditionViolated, ZMembershipFailed
from .exterior import masks_of_degree, weights_in_degree
from .geometry import (
    Chart,
    ComplementaryPair,
    CubicalChain,
    boundary,
    cone_chart,
    degree,
    degree_constancy,
    graph_chart,
    horizontal_lift,
    integrate,
    is_local_graph,
    is_spectral_manifold,
    pair_from_indices,
    r_manifold_report,
)
from .graded_group import CheckedGroup, GroupSpec, format_rational, validate
from .hodge_rumin import (
    apply_fiber,
    dc,
    leibniz_identity_residual,
    pi_E,
    require_rumin,
    rumin_basis,
)
from .poly import Poly
from .polyforms import PolyForm, d, monomials
from .spectral import (
    ZWitness,
    candidate_forms,
    delta_r,
    homogeneous_weight,
    leibniz_j1,
    leibniz_j2,
    leibniz_j3,
    z_solve,
)

# groups ------------------------------------------------------------------------

GROUP_SPECS = {
    "h1": GroupSpec.from_brackets([1, 1, 2], {(1, 2): 3}, "h1"),
    "h2": GroupSpec.from_brackets([1, 1, 1, 1, 2], {(1, 2): 5, (3, 4): 5}, "h2"),
    "h1xr": GroupSpec.from_brackets([1, 1, 1, 2], {(1, 2): 4}, "h1xr"),
    "cartan": GroupSpec.from_brackets([1, 1, 2, 3, 3], {(1, 2): 3, (1, 3): 4, (2, 3): 5}, "cartan"),
    "r2": GroupSpec.from_brackets([1, 1], {}, "r2"),
}


@lru_cache(maxsize=None)
def group(name: str) -> CheckedGroup:
    if name not in GROUP_SPECS:
        raise KeyError(f"unknown fixture group {name!r}; known: {', '.join(GROUP_SPECS)}")
    return validate(GROUP_SPECS[name])


# chains ------------------------------------------------------------------------


@dataclass
class Fixture:
    name: str
    group: str
    chain: CubicalChain
    kind: str
    pair: Optional[ComplementaryPair] = None
    lsig_with_boundary: bool = False
    note: str = ""

    @property
    def G(self) -> CheckedGroup:
        return group(self.group)

    def boundary(self) -> CubicalChain:
        return boundary(self.chain)

    def describe(self) -> Dict[str, object]:
        G = self.G
        out = {
            "name": self.name,
            "group": self.group,
            "dimension": self.chain.k,
            "kind": self.kind,
            "degree": degree(G, self.chain),
            "boundary_degree": degree(G, self.boundary()) if self.chain.k else None,
            "lsig_with_boundary": self.lsig_with_boundary,
            "note": self.note,
        }
        if self.pair is not None:
            out["pair"] = self.pair.describe()
        return out


def _u(k: int, i: int) -> Poly:
    return Poly.var(k, i)


def _c(k: int, value) -> Poly:
    return Poly.const(k, value)


def _graph(name, gname, W, V, phi, kind="graph", lsig=True, note="") -> Fixture:
    G = group(gname)
    pair = pair_from_indices(G, W, V)
    chart = graph_chart(G, pair, phi, label=name)
    return Fixture(name, gname, CubicalChain.of(chart), kind, pair, lsig, note)


def _loop_h1_like(first: Sequence[int]) -> Dict[int, Poly]:
    """Planar loop with zero signed area that does not retrace itself.

    With x = u(1-u) and y = x g(u), the signed area is the integral of
    x^2 g', which vanishes for g' = 7u^2 - 4u.
    """
    u = _u(1, 0)
    a = u - u * u
    b = a * ((u ** 3).scale(Fraction(7, 3)) - (u * u).scale(2))
    return {first[0]: a, first[1]: b}


def _bounds_nothing(G, chain: CubicalChain) -> bool:
    """True when every low-degree probe integrates to zero (a folded surface)."""
    for m in masks_of_degree(G.dim, chain.k):
        for f in monomials(G.dim, 1):
            if integrate(G, chain, PolyForm(G, chain.k, {m: f})):
                return False
    return True


def _lens(name, gname, horizontal, W, V, note="") -> Fixture:
    G = group(gname)
    loop = horizontal_lift(G, horizontal)
    if any(c.evaluate([1]) != c.evaluate([0]) for c in loop):
        raise AssertionError(f"{name}: loop does not close")
    lens = CubicalChain.of(cone_chart(G, Chart(loop, label=f"{name}-loop"), label=name))
    if _bounds_nothing(G, lens):
        raise AssertionError(f"{name}: the loop retraces itself and the cone bounds nothing")
    pair = pair_from_indices(G, W, V)
    return Fixture(name, gname, lens, "lens", pair, True, note)


def _h2_torus_lens() -> Fixture:
    G = group("h2")
    first = horizontal_lift(G, _loop_h1_like([0, 1]))
    second = horizontal_lift(G, _loop_h1_like([2, 3]))
    # the two loops live in commuting symplectic planes, so their product is isotropic
    comps = [
        first[0].embed(2, [0]),
        first[1].embed(2, [0]),
        second[2].embed(2, [1]),
        second[3].embed(2, [1]),
        first[4].embed(2, [0]) + second[4].embed(2, [1]),
    ]
    torus = Chart(comps, label="h2-torus")
    lens = CubicalChain.of(cone_chart(G, torus, label="h2_lens"))
    if _bounds_nothing(G, lens):
        raise AssertionError("h2_lens: the torus cone bounds nothing")
    pair = pair_from_indices(G, [1, 3, 5], [2, 4])
    return Fixture("h2_lens", "h2", lens, "lens", pair, True,
                   "cone over a closed isotropic torus; boundary has degree 2")


@lru_cache(maxsize=None)
def fixtures() -> Dict[str, Fixture]:
    w = _u
    out: List[Fixture] = []
    # H^1
    out.append(_graph("h1_curve", "h1", [1], [2, 3], [w(1, 0), -w(1, 0) * w(1, 0) * Fraction(1, 2)]))
    out.append(_lens("h1_lens", "h1", _loop_h1_like([0, 1]), [1, 3], [2],
                     "cone over a closed horizontal loop; boundary has degree 1"))
    out.append(_graph("h1_solid", "h1", [1, 2, 3], [], [], kind="solid"))
    out.append(_graph("h1_vertical_box", "h1", [1, 3], [2], [w(2, 0) * w(2, 1)], kind="box", lsig=False,
                      note="boundary contains vertical edges, which are not intrinsic graphs"))
    # H^2, basis X1, Y1, X2, Y2, T
    out.append(_graph("h2_curve", "h2", [1], [2, 3, 4, 5],
                      [w(1, 0), 0, 0, -w(1, 0) * w(1, 0) * Fraction(1, 2)]))
    x1, x2 = w(2, 0), w(2, 1)
    out.append(_graph("h2_isotropic", "h2", [1, 3], [2, 4, 5],
                      [x1 * x2, x1 * x1 * Fraction(1, 2), -(x1 * x1 * x2) * Fraction(1, 2)],
                      note="Legendrian graph of the generating function x1^2 x2 / 2"))
    out.append(_graph("h2_sigma0", "h2", [1, 3, 5], [2, 4], [0, 0], kind="box", lsig=False,
                      note="the plane {(x1,0,x2,0,t)} over a box; its boundary has degree 3"))
    out.append(_h2_torus_lens())
    out.append(_graph("h2_w4", "h2", [1, 2, 3, 5], [4], [w(4, 0)]))
    out.append(_graph("h2_solid", "h2", [1, 2, 3, 4, 5], [], [], kind="solid"))
    # H^1 x R: [X1, X2] = X4, X3 central of weight 1
    t = w(1, 0)
    out.append(_graph("h1xr_curve_x1", "h1xr", [1], [2, 3, 4], [t, t * t, -t * t * Fraction(1, 2)]))
    out.append(_graph("h1xr_curve_x2", "h1xr", [2], [1, 3, 4], [t, t * t, t * t * Fraction(1, 2)]))
    out.append(_graph("h1xr_curve_x3", "h1xr", [3], [1, 2, 4], [t, t * t, t ** 3 * Fraction(1, 6)]))
    a1 = w(2, 0)
    out.append(_graph("h1xr_pair1", "h1xr", [1, 3], [2, 4], [a1, -a1 * a1 * Fraction(1, 2)]))
    out.append(_graph("h1xr_pair2", "h1xr", [2, 3], [1, 4], [a1, a1 * a1 * Fraction(1, 2)]))
    out.append(_graph("h1xr_deg3_graph", "h1xr", [1, 4], [2, 3], [0, w(2, 0)], kind="box", lsig=False,
                      note="graph (w1, 0, w1, w4) over the unit box; boundary has vertical edges"))
    out.append(_graph("h1xr_pair4", "h1xr", [2, 4], [1, 3], [0, w(2, 0)], kind="box", lsig=False))
    loop = _loop_h1_like([0, 1])
    loop[2] = loop[0] * (_c(1, 1) - t.scale(2))
    out.append(_lens("h1xr_lens", "h1xr", loop, [1, 4], [2, 3],
                     "degree-3 surface bounded by a closed horizontal loop"))
    out.append(_graph("h1xr_solid_134", "h1xr", [1, 3, 4], [2], [w(3, 0)], kind="box"))
    out.append(_graph("h1xr_solid_124", "h1xr", [1, 2, 4], [3], [w(3, 0) * w(3, 1)], kind="box"))
    # Cartan: [X1,X2]=X3, [X1,X3]=X4, [X2,X3]=X5
    G = group("cartan")
    curve = Chart(horizontal_lift(G, {0: t, 1: t * t}), label="cartan_curve")
    out.append(Fixture("cartan_curve", "cartan", CubicalChain.of(curve), "curve",
                       pair_from_indices(G, [1], [2, 3, 4, 5]), True))
    u = _u(1, 0)
    base = u - u * u
    # closing x3, x4, x5 leaves a one-parameter rational family; this is one member
    a = base * (_c(1, 1) - u.scale(2))
    b = base * (u.scale(-4) + (u ** 2).scale(18) - (u ** 3).scale(26) + (u ** 4).scale(13))
    out.append(_lens("cartan_lens", "cartan", {0: a, 1: b}, [1, 4], [2, 3, 5],
                     "cone over a closed horizontal loop; every higher coordinate returns"))
    out.append(_graph("cartan_box2", "cartan", [1, 4], [2, 3, 5], [0, 0, 0], kind="box", lsig=False))
    return {f.name: f for f in out}


# reports ------------------------------------------------------------------------


def _q(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else format_rational(x)


@dataclass
class RuminStokesReport:
    form: str
    boundary_integral: Fraction
    interior_integral: Fraction
    boundary_correction: Fraction
    interior_correction: Fraction
    sigma_verdict: str
    boundary_verdict: str
    pi_E_fixes_alpha: bool
    d_pi_E_in_ker_box0: bool
    theorem_applies: bool

    @property
    def discrepancy(self) -> Fraction:
        return self.boundary_integral - self.interior_integral

    @property
    def status(self) -> str:
        if not self.theorem_applies:
            return "outside hypotheses"
        return "ok" if self.discrepancy == 0 else "violation"

    def to_dict(self) -> Dict[str, object]:
        return {
            "form": self.form,
            "boundary_integral": _q(self.boundary_integral),
            "interior_integral": _q(self.interior_integral),
            "discrepancy": _q(self.discrepancy),
            "boundary_correction": _q(self.boundary_correction),
            "interior_correction": _q(self.interior_correction),
            "sigma_r_manifold": self.sigma_verdict,
            "boundary_r_manifold": self.boundary_verdict,
            "pi_E_fixes_alpha": self.pi_E_fixes_alpha,
            "d_pi_E_in_ker_box0": self.d_pi_E_in_ker_box0,
            "theorem_applies": self.theorem_applies,
            "status": self.status,
        }


def _verdicts(G, chain, bound, probe_degree, cache):
    key = id(chain)
    if key not in cache:
        s = r_manifold_report(G, chain, probe_degree)["verdict"]
        b = r_manifold_report(G, bound, probe_degree)["verdict"] if bound.terms else "sufficient"
        cache[key] = (s, b)
    return cache[key]


def run_rumin_stokes(G, chain: CubicalChain, alpha: PolyForm, bound: Optional[CubicalChain] = None,
                     probe_degree: int = 2, _cache: Optional[dict] = None) -> RuminStokesReport:
    if alpha.k != chain.k - 1:
        raise DimensionMismatch(f"a {chain.k}-chain pairs with Rumin {chain.k - 1}-forms, got a {alpha.k}-form")
    require_rumin(alpha)
    if bound is None:
        bound = boundary(chain)
    lhs = integrate(G, bound, alpha) if bound.terms else Fraction(0)
    dca = dc(alpha)
    rhs = integrate(G, chain, dca)
    projected = pi_E(alpha)
    dpe = d(projected)
    b_corr = integrate(G, bound, alpha - projected) if bound.terms else Fraction(0)
    i_corr = integrate(G, chain, dpe - dca)
    fixes = projected == alpha
    in_ker = apply_fiber("proj_im_delta0", dpe).is_zero()
    sv, bv = _verdicts(G, chain, bound, probe_degree, {} if _cache is None else _cache)
    applies = (sv == "sufficient" or in_ker) and (bv == "sufficient" or fixes)
    return RuminStokesReport(alpha.to_str(), lhs, rhs, b_corr, i_corr, sv, bv, fixes, in_ker, applies)


def rumin_probe_forms(G, k: int, max_degree: int = 1) -> List[PolyForm]:
    """Rumin fiber basis forms times monomials, all weights."""
    if k < 0:
        return []
    monos = list(monomials(G.dim, max_degree))
    out = []
    for _, space in rumin_basis(G, k):
        for xi in space.forms():
            for f in monos:
                out.append(PolyForm.from_algebraic(G, xi, f))
    return out


def rumin_stokes_suite(fixture: Fixture, max_degree: int = 1, limit: Optional[int] = None) -> List[RuminStokesReport]:
    G = fixture.G
    bound = fixture.boundary()
    cache: dict = {}
    forms = rumin_probe_forms(G, fixture.chain.k - 1, max_degree)
    if limit is not None:
        forms = forms[:limit]
    return [run_rumin_stokes(G, fixture.chain, a, bound, _cache=cache) for a in forms]


def counterexample_search(G, chain: CubicalChain, max_degree: int = 2,
                          bound: Optional[CubicalChain] = None) -> Optional[RuminStokesReport]:
    """First monomial-coefficient Rumin form with nonzero Stokes discrepancy."""
    if bound is None:
        bound = boundary(chain)
    cache: dict = {}
    for alpha in rumin_probe_forms(G, chain.k - 1, max_degree):
        rep = run_rumin_stokes(G, chain, alpha, bound, _cache=cache)
        if rep.discrepancy:
            return rep
    return None


# spectral Stokes -------------------------------------------------------------------


@dataclass
class SpectralStokesReport:
    form: str
    p: int
    j: int
    sigma_degree: Optional[int]
    boundary_degree: Optional[int]
    boundary_integral: Fraction
    interior_integral: Fraction
    spectral_manifold: bool
    degrees_match: bool
    delta_form: str
    canonical_witness: bool

    @property
    def discrepancy(self) -> Fraction:
        return self.boundary_integral - self.interior_integral

    @property
    def hypotheses_hold(self) -> bool:
        return self.spectral_manifold and self.degrees_match

    @property
    def status(self) -> str:
        if not self.hypotheses_hold:
            return "outside hypotheses"
        return "ok" if self.discrepancy == 0 else "violation"

    def to_dict(self) -> Dict[str, object]:
        return {
            "form": self.form,
            "p": self.p,
            "j": self.j,
            "sigma_degree": self.sigma_degree,
            "boundary_degree": self.boundary_degree,
            "boundary_integral": _q(self.boundary_integral),
            "interior_integral": _q(self.interior_integral),
            "discrepancy": _q(self.discrepancy),
            "delta_form": self.delta_form,
            "spectral_manifold": self.spectral_manifold,
            "degrees_match": self.degrees_match,
            "canonical_witness": self.canonical_witness,
            "status": self.status,
        }


def spectral_pairing(G, chain: CubicalChain, bound: CubicalChain, witness: ZWitness):
    """(boundary integral of alpha, integral of Delta_j alpha, Delta_j alpha).

    Shared by the spectral Stokes runner and the current duality check.
    """
    delta = delta_r(witness)
    lhs = integrate(G, bound, witness.alpha) if bound.terms else Fraction(0)
    rhs = integrate(G, chain, delta)
    return lhs, rhs, delta


def run_spectral_stokes(G, chain: CubicalChain, alpha: PolyForm, j: Optional[int] = None,
                        bound: Optional[CubicalChain] = None, witness: Optional[ZWitness] = None) -> SpectralStokesReport:
    if alpha.k != chain.k - 1:
        raise DimensionMismatch(f"a {chain.k}-chain pairs with {chain.k - 1}-forms, got a {alpha.k}-form")
    if bound is None:
        bound = boundary(chain)
    info = is_spectral_manifold(G, chain, bound)
    deg_s, deg_b = info["degree"], info["boundary_degree"]
    p = homogeneous_weight(alpha)
    if j is None:
        if info["j"] is None:
            raise PreconditionViolated("j is needed when the boundary is empty")
        j = info["j"]
    if witness is None:
        witness = z_solve(alpha, j, p)
        if witness is None:
            raise ZMembershipFailed(f"{alpha.to_str()} is not in Z_{j}")
    elif not witness.is_valid():
        raise ZMembershipFailed("supplied witness does not satisfy the Z conditions")
    lhs, rhs, delta = spectral_pairing(G, chain, bound, witness)
    match = deg_b == p and deg_s is not None and deg_s - p == j
    return SpectralStokesReport(alpha.to_str(), p, j, deg_s, deg_b, lhs, rhs, bool(info["spectral"]), match,
                                delta.to_str(), witness.canonical)


def spectral_probe_forms(G, k: int, p: int, j: int, max_degree: int = 1) -> List[PolyForm]:
    """Candidate forms of weight p that lie in Z_j."""
    return [a for a in candidate_forms(G, k, p, max_degree) if z_solve(a, j, p) is not None]


def spectral_stokes_suite(fixture: Fixture, max_degree: int = 1, limit: Optional[int] = None) -> List[SpectralStokesReport]:
    G = fixture.G
    bound = fixture.boundary()
    info = is_spectral_manifold(G, fixture.chain, bound)
    if info["j"] is None:
        return []
    p, j = info["boundary_degree"], info["j"]
    forms = spectral_probe_forms(G, fixture.chain.k - 1, p, j, max_degree)
    if limit is not None:
        forms = forms[:limit]
    return [run_spectral_stokes(G, fixture.chain, a, j, bound) for a in forms]


# classical Stokes ----------------------------------------------------------------


@dataclass
class ClassicalReport:
    form: str
    boundary_integral: Fraction
    interior_integral: Fraction

    @property
    def discrepancy(self) -> Fraction:
        return self.boundary_integral - self.interior_integral

    def to_dict(self) -> Dict[str, object]:
        return {
            "form": self.form,
            "boundary_integral": _q(self.boundary_integral),
            "interior_integral": _q(self.interior_integral),
            "discrepancy": _q(self.discrepancy),
            "status": "ok" if self.discrepancy == 0 else "violation",
        }


def run_classical_stokes(G, chain: CubicalChain, alpha: PolyForm) -> ClassicalReport:
    if alpha.k != chain.k - 1:
        raise DimensionMismatch(f"a {chain.k}-chain pairs with {chain.k - 1}-forms, got a {alpha.k}-form")
    bound = boundary(chain)
    lhs = integrate(G, bound, alpha) if bound.terms else Fraction(0)
    return ClassicalReport(alpha.to_str(), lhs, integrate(G, chain, d(alpha)))


def _random_poly(rng: random.Random, nvars: int, terms: int, max_exp: int) -> Poly:
    acc = Poly.zero(nvars)
    for _ in range(terms):
        acc = acc + Poly.monomial([rng.randint(0, max_exp) for _ in range(nvars)], rng.randint(-3, 3))
    return acc


def random_classical_suite(G, count: int = 25, seed: int = 0) -> List[ClassicalReport]:
    """Random polynomial charts paired with random polynomial forms."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        k = rng.randint(1, min(3, G.dim))
        chart = Chart([_random_poly(rng, k, 2, 1) for _ in range(G.dim)])
        masks = masks_of_degree(G.dim, k - 1)
        alpha = PolyForm(G, k - 1, {rng.choice(masks): _random_poly(rng, G.dim, 2, 1) for _ in range(2)})
        out.append(run_classical_stokes(G, CubicalChain.of(chart), alpha))
    return out


# Leibniz suite ----------------------------------------------------------------------


@dataclass
class LeibnizReport:
    checked: Dict[str, int] = field(default_factory=dict)
    nonzero: Dict[str, int] = field(default_factory=dict)

    def record(self, name: str, residual_zero: bool):
        self.checked[name] = self.checked.get(name, 0) + 1
        if not residual_zero:
            self.nonzero[name] = self.nonzero.get(name, 0) + 1

    @property
    def ok(self) -> bool:
        return not any(self.nonzero.values())

    def to_dict(self) -> Dict[str, object]:
        return {"checked": dict(self.checked), "nonzero": dict(self.nonzero), "ok": self.ok}


def run_leibniz_suite(G, max_degree: int = 1, per_block: Optional[int] = None) -> LeibnizReport:
    """Exact residual checks of the reconstruction identities on probe forms.

    ``per_block`` caps the number of candidate forms per (degree, weight).
    """
    rep = LeibnizReport()
    for k in range(G.dim):
        for alpha in rumin_probe_forms(G, k, max_degree)[:per_block]:
            rep.record("dc_from_leibniz", leibniz_identity_residual(alpha).is_zero())
        for p in weights_in_degree(G.weights, k):
            forms = candidate_forms(G, k, p, max_degree)[:per_block]
            for alpha in forms:
                rep.record("j1", leibniz_j1(alpha, p).is_zero())
                if z_solve(alpha, 2, p) is not None:
                    rep.record("j2", all(r.is_zero() for r in leibniz_j2(alpha, p).values()))
                if z_solve(alpha, 3, p) is not None:
                    rep.record("j3", all(r.is_zero() for r in leibniz_j3(alpha, p).values()))
    return rep


# degree checks ------------------------------------------------------------------


def fixture_degree_report(fixture: Fixture) -> Dict[str, object]:
    G = fixture.G
    chart = fixture.chain.terms[0][1]
    out = dict(fixture.describe())
    out["constancy"] = degree_constancy(G, chart)
    if fixture.pair is not None:
        out["deg_W"] = fixture.pair.deg_W
        out["local_graph"] = is_local_graph(G, fixture.pair, chart)
    return out


# experiment runner -----------------------------------------------------------------


def run_experiments(tasks: Sequence, workers: int = 4) -> List[object]:
    """Evaluate zero-argument callables concurrently; results keep task order."""
    if len(tasks) <= 1 or workers <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: t(), tasks))
