"""Differential forms with polynomial coefficients in the left-invariant coframe.

A ``PolyForm`` of degree k is a map from basis masks theta_I to polynomials
in the exponential coordinates.  The exterior derivative splits by weight
jump: ``d = d_0 + d_{w_1} + ... + d_{w_s}`` where ``d_0`` is the
Chevalley-Eilenberg part and ``d_w`` differentiates along the fields of
weight w.
"""

from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterator, List, Mapping, Optional, Sequence

from .errors import DegreeBudget, DegreeMismatch
from .exterior import (
    AlgebraicForm,
    mask_label,
    mask_weight,
    masks_of_degree,
    popcount,
    wedge_sign,
)
from .poly import Poly

DEFAULT_BUDGET = 8


class PolyForm:
    __slots__ = ("group", "k", "coeffs")

    def __init__(self, group, k: int, coeffs: Mapping[int, Poly] = ()):
        self.group = group
        self.k = k
        n = group.dim
        clean: Dict[int, Poly] = {}
        for m, f in dict(coeffs).items():
            if not isinstance(f, Poly):
                f = Poly.const(n, f)
            if f:
                if popcount(m) != k or m >> n:
                    raise DegreeMismatch(f"{mask_label(m)} is not a basis {k}-form")
                clean[m] = f
        self.coeffs = clean

    # construction -----------------------------------------------------------
    @classmethod
    def zero(cls, group, k: int) -> "PolyForm":
        return cls(group, k)

    @classmethod
    def from_algebraic(cls, group, xi: AlgebraicForm, f: Optional[Poly] = None) -> "PolyForm":
        if f is None:
            f = Poly.const(group.dim, 1)
        return cls(group, xi.k, {m: f.scale(c) for m, c in xi.coeffs.items()})

    @classmethod
    def basis(cls, group, indices: Sequence[int], f: Optional[Poly] = None) -> "PolyForm":
        """f theta_{i1} ^ ... ^ theta_{ik}, 1-based indices."""
        return cls.from_algebraic(group, AlgebraicForm.basis(group.dim, indices), f)

    # queries ----------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.group.dim

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def poly_degree(self) -> int:
        return max((f.degree() for f in self.coeffs.values()), default=-1)

    def weights_present(self) -> List[int]:
        return sorted({mask_weight(m, self.group.weights) for m in self.coeffs})

    def component(self, p: int) -> "PolyForm":
        """The weight-p part (alpha)_p."""
        w = self.group.weights
        return PolyForm(self.group, self.k, {m: f for m, f in self.coeffs.items() if mask_weight(m, w) == p})

    def above(self, p: int) -> "PolyForm":
        """Components of weight >= p."""
        w = self.group.weights
        return PolyForm(self.group, self.k, {m: f for m, f in self.coeffs.items() if mask_weight(m, w) >= p})

    def below(self, p: int) -> "PolyForm":
        """Components of weight < p."""
        w = self.group.weights
        return PolyForm(self.group, self.k, {m: f for m, f in self.coeffs.items() if mask_weight(m, w) < p})

    def weight_split(self) -> Dict[int, "PolyForm"]:
        return {p: self.component(p) for p in self.weights_present()}

    def min_weight(self) -> Optional[int]:
        ws = self.weights_present()
        return ws[0] if ws else None

    def evaluate(self, point: Sequence) -> Dict[int, object]:
        return {m: f.evaluate(point) for m, f in self.coeffs.items()}

    def at(self, point: Sequence[Fraction]) -> AlgebraicForm:
        return AlgebraicForm(self.n, self.k, {m: f.evaluate(point) for m, f in self.coeffs.items()})

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "PolyForm"):
        if other.k != self.k or other.group is not self.group:
            raise DegreeMismatch(f"cannot add a {self.k}-form and a {other.k}-form")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.coeffs)
        for m, f in other.coeffs.items():
            out[m] = out[m] + f if m in out else f
        return PolyForm(self.group, self.k, out)

    __radd__ = __add__

    def __neg__(self) -> "PolyForm":
        return PolyForm(self.group, self.k, {m: -f for m, f in self.coeffs.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        """Multiply by a rational constant or a polynomial function."""
        return PolyForm(self.group, self.k, {m: f * c for m, f in self.coeffs.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self.k == other.k and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.k, frozenset(self.coeffs.items())))

    def to_str(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs):
            f = self.coeffs[m]
            label = mask_label(m)
            body = f.to_str()
            if label == "1":
                parts.append(body if len(f.terms) == 1 else f"({body})")
            elif len(f.terms) == 1 and f.is_constant():
                c = f.constant_term()
                parts.append(label if c == 1 else "-" + label if c == -1 else f"{c} {label}")
            else:
                parts.append(f"({body}) {label}" if len(f.terms) > 1 else f"{body} {label}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"PolyForm[{self.k}]({self.to_str()})"


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    out: Dict[int, Poly] = {}
    for ma, fa in a.coeffs.items():
        for mb, fb in b.coeffs.items():
            s = wedge_sign(ma, mb)
            if s:
                m = ma | mb
                term = (fa * fb).scale(s)
                out[m] = out[m] + term if m in out else term
    return PolyForm(a.group, a.k + b.k, out)


@contextmanager
def degree_budget(limit: Optional[int]):
    """Temporarily change the default polynomial degree budget."""
    global DEFAULT_BUDGET
    if limit is None:
        yield DEFAULT_BUDGET
        return
    old, DEFAULT_BUDGET = DEFAULT_BUDGET, limit
    try:
        yield limit
    finally:
        DEFAULT_BUDGET = old


def _check_budget(f: Poly, budget: Optional[int]) -> Poly:
    limit = DEFAULT_BUDGET if budget is None else budget
    if f.degree() > limit:
        raise DegreeBudget(f"polynomial degree {f.degree()} exceeds the budget {limit}")
    return f


def frame_derivative(group, i: int, f: Poly, budget: Optional[int] = None) -> Poly:
    """X_i f for a 0-based field index i."""
    acc = Poly.zero(group.dim)
    for j, a in group.field_columns[i]:
        df = f.diff(j)
        if df:
            acc = acc + a * df
    return _check_budget(acc, budget)


def jumps(group) -> List[int]:
    """Weight jumps of d: 0 and every distinct weight."""
    return [0] + list(group.distinct_weights)


def d_component(alpha: PolyForm, j: int, budget: Optional[int] = None) -> PolyForm:
    group = alpha.group
    out: Dict[int, Poly] = {}

    def put(m, f):
        out[m] = out[m] + f if m in out else f

    if j == 0:
        for m, f in alpha.coeffs.items():
            for m2, c in group.ce_differential(m).items():
                put(m2, f.scale(c))
    else:
        fields = group.layer_indices(j)
        if not fields:
            return PolyForm(group, alpha.k + 1)
        for m, f in alpha.coeffs.items():
            for l in fields:
                s = wedge_sign(1 << l, m)
                if not s:
                    continue
                xf = frame_derivative(group, l, f, budget)
                if xf:
                    put(m | (1 << l), xf.scale(s))
    return PolyForm(group, alpha.k + 1, out)


def d(alpha: PolyForm, budget: Optional[int] = None) -> PolyForm:
    total = PolyForm(alpha.group, alpha.k + 1)
    if alpha.k >= alpha.group.dim:
        return total
    for j in jumps(alpha.group):
        total = total + d_component(alpha, j, budget)
    return total


def d_function(f: Poly, group, budget: Optional[int] = None) -> PolyForm:
    return d(PolyForm(group, 0, {0: f}), budget)


def monomials(nvars: int, max_degree: int) -> Iterator[Poly]:
    for deg in range(max_degree + 1):
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield Poly.monomial(e)


def probe_forms(group, k: int, max_degree: int) -> Iterator[PolyForm]:
    """Monomial-coefficient basis k-forms; these span the probe space."""
    monos = list(monomials(group.dim, max_degree))
    for m in masks_of_degree(group.dim, k):
        for f in monos:
            yield PolyForm(group, k, {m: f})


def multicomplex_check(group, k: Optional[int] = None, probe_degree: int = 2) -> Dict[str, object]:
    """Check sum_{i+j=n} d_i d_j = 0 on monomial probes.

    Returns a report with the number of probes and, for each total jump n,
    the number of probes giving a nonzero residual.
    """
    degrees = range(group.dim) if k is None else [k]
    js = jumps(group)
    totals = sorted({a + b for a in js for b in js})
    failures = {n: 0 for n in totals}
    count = 0
    for kk in degrees:
        for probe in probe_forms(group, kk, probe_degree):
            count += 1
            first = {j: d_component(probe, j) for j in js}
            second = {
                (i, j): d_component(first[j], i) if first[j] else PolyForm(group, kk + 2)
                for i in js
                for j in js
            }
            for n in totals:
                acc = PolyForm(group, kk + 2)
                for (i, j), v in second.items():
                    if i + j == n:
                        acc = acc + v
                if acc:
                    failures[n] += 1
    return {"probes": count, "nonzero_by_total_jump": failures, "ok": not any(failures.values())}
