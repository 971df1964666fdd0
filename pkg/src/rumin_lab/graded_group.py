"""Positively graded nilpotent Lie algebras and their groups.

A group is described by its dimension, nondecreasing integer weights and the
structure constants of the brackets ``[X_i, X_j]`` for ``i < j`` (1-based, as
in the user-facing file format).  ``validate`` checks the Jacobi identity and
compatibility with the grading and returns a ``CheckedGroup`` which knows its
group law in exponential coordinates, its dilations and its left-invariant
frame.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial
from typing import Dict, List, Mapping, Sequence, Tuple

from . import linalg
from .errors import (
    GradingViolation,
    JacobiViolation,
    NonpositiveWeight,
    SpecError,
    StepBudgetExceeded,
)
from .exterior import ce_differential, ce_one_forms
from .poly import Poly

MAX_BCH_DEPTH = 6

BracketTerms = Tuple[Tuple[int, Fraction], ...]


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer, or an integer-valued string into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise SpecError(f"not a rational number: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        s = text.strip()
        try:
            if "/" in s:
                p, q = s.split("/")
                return Fraction(int(p), int(q))
            return Fraction(int(s))
        except (ValueError, ZeroDivisionError):
            pass
    raise SpecError(f"not a rational number: {text!r} (expected an integer or 'p/q')")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class GroupSpec:
    dim: int
    weights: Tuple[int, ...]
    brackets: Mapping[Tuple[int, int], BracketTerms] = field(default_factory=dict)
    name: str = ""

    @classmethod
    def from_brackets(cls, weights: Sequence[int], brackets: Mapping, name: str = "") -> "GroupSpec":
        """Build from ``{(i, j): {k: c}}`` or ``{(i, j): k}`` (coefficient 1)."""
        table = {}
        for (i, j), terms in brackets.items():
            if isinstance(terms, int):
                terms = {terms: 1}
            items = tuple(sorted((k, Fraction(c)) for k, c in dict(terms).items()))
            if i > j:
                i, j = j, i
                items = tuple((k, -c) for k, c in items)
            table[(i, j)] = items
        return cls(len(weights), tuple(weights), table, name)


class CheckedGroup:
    """A validated graded group.  Indices are 0-based internally."""

    def __init__(self, spec: GroupSpec, structure, nil_class: int):
        self.spec = spec
        self.name = spec.name
        self.dim = spec.dim
        self.weights: Tuple[int, ...] = tuple(spec.weights)
        # structure[i][j] = {k: c} for all ordered pairs (antisymmetric)
        self.structure: List[List[Dict[int, Fraction]]] = structure
        self.nilpotency_class = nil_class
        distinct = sorted(set(self.weights))
        self.distinct_weights: Tuple[int, ...] = tuple(distinct)
        self.step = len(distinct)
        self.layers: Dict[int, int] = {w: self.weights.count(w) for w in distinct}
        self.Q = sum(self.weights)

    def __repr__(self) -> str:
        label = self.name or "group"
        return f"<CheckedGroup {label} dim={self.dim} weights={self.weights}>"

    # Lie algebra ------------------------------------------------------------
    def bracket(self, u: Sequence, v: Sequence) -> list:
        """Bracket of two algebra vectors given by coordinates in the basis."""
        out = [0] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b or i == j:
                    continue
                for k, c in self.structure[i][j].items():
                    out[k] = out[k] + c * a * b
        return out

    def layer_indices(self, w: int) -> List[int]:
        return [i for i, wi in enumerate(self.weights) if wi == w]

    # group law --------------------------------------------------------------
    @cached_property
    def product_polys(self) -> Tuple[Poly, ...]:
        """Components of m(x, y) as polynomials in the 2n variables (x, y)."""
        depth = self.nilpotency_class
        if depth > MAX_BCH_DEPTH:
            raise StepBudgetExceeded(
                f"nilpotency class {depth} exceeds the supported BCH depth {MAX_BCH_DEPTH}"
            )
        n = self.dim
        nv = 2 * n
        xs = [Poly.var(nv, i) for i in range(n)]
        ys = [Poly.var(nv, n + i) for i in range(n)]
        letters = (xs, ys)
        total = [Poly.zero(nv) for _ in range(n)]
        nested: Dict[Tuple[int, ...], List[Poly]] = {}

        def right_nested(word: Tuple[int, ...]) -> List[Poly]:
            if word in nested:
                return nested[word]
            if len(word) == 1:
                res = letters[word[0]]
            else:
                res = self._poly_bracket(letters[word[0]], right_nested(word[1:]))
            nested[word] = res
            return res

        for word, coef in sorted(bch_words(depth).items()):
            vec = right_nested(word)
            scale = coef / len(word)
            for k in range(n):
                if vec[k]:
                    total[k] = total[k] + vec[k].scale(scale)
        return tuple(total)

    def _poly_bracket(self, u: Sequence[Poly], v: Sequence[Poly]) -> List[Poly]:
        nv = u[0].nvars
        out = [Poly.zero(nv) for _ in range(self.dim)]
        for i in range(self.dim):
            if not u[i]:
                continue
            for j in range(self.dim):
                if i == j or not v[j]:
                    continue
                terms = self.structure[i][j]
                if not terms:
                    continue
                prod = u[i] * v[j]
                for k, c in terms.items():
                    out[k] = out[k] + prod.scale(c)
        return out

    def group_product(self, x: Sequence, y: Sequence) -> list:
        """m(x, y) evaluated on rational or float coordinates."""
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError(f"points must have {self.dim} coordinates")
        point = list(x) + list(y)
        return [p.evaluate(point) for p in self.product_polys]

    def product_of_polys(self, x: Sequence[Poly], y: Sequence[Poly]) -> List[Poly]:
        """m(x(u), y(u)) for polynomial curves/charts x, y in a common ring."""
        subs = list(x) + list(y)
        return [p.compose(subs) for p in self.product_polys]

    def inverse(self, x: Sequence) -> list:
        # exponential coordinates of the first kind: exp(X)^-1 = exp(-X)
        return [-a for a in x]

    def dilation(self, lam, x: Sequence) -> list:
        if lam <= 0:
            raise ValueError("dilation factor must be positive")
        return [lam ** w * a for w, a in zip(self.weights, x)]

    # left-invariant frame ---------------------------------------------------
    @cached_property
    def frame(self) -> "Frame":
        return left_invariant_frame(self)

    @cached_property
    def field_columns(self) -> Tuple[Tuple[Tuple[int, Poly], ...], ...]:
        """For each X_i, the nonzero (j, A[j][i]) pairs."""
        return tuple(tuple(self.frame.field_columns(i)) for i in range(self.dim))

    @cached_property
    def ce_one_forms(self) -> Dict[int, Dict[int, Fraction]]:
        return ce_one_forms(self.structure, self.dim)

    def ce_differential(self, mask: int) -> Dict[int, Fraction]:
        cache = self.__dict__.setdefault("_ce_cache", {})
        if mask not in cache:
            cache[mask] = ce_differential(self.ce_one_forms, mask)
        return cache[mask]


@dataclass(frozen=True)
class Frame:
    """A[j][i]: coefficient of d/dx_j in X_i.  theta[i][j]: coefficient of dx_j in theta_i."""

    A: Tuple[Tuple[Poly, ...], ...]
    theta: Tuple[Tuple[Poly, ...], ...]

    def field_columns(self, i: int) -> List[Tuple[int, Poly]]:
        return [(j, row[i]) for j, row in enumerate(self.A) if row[i]]


def bch_words(depth: int) -> Dict[Tuple[int, ...], Fraction]:
    """Coefficients of log(exp(X) exp(Y)) in the free associative algebra.

    Words are tuples over {0: X, 1: Y}; only words of length <= depth are kept.
    """

    def mul(a, b):
        out: Dict[Tuple[int, ...], Fraction] = {}
        for wa, ca in a.items():
            for wb, cb in b.items():
                if len(wa) + len(wb) > depth:
                    continue
                w = wa + wb
                out[w] = out.get(w, 0) + ca * cb
        return {w: c for w, c in out.items() if c}

    def exp_letter(letter):
        return {(letter,) * m: Fraction(1, factorial(m)) for m in range(depth + 1)}

    prod = mul(exp_letter(0), exp_letter(1))
    z = {w: c for w, c in prod.items() if w}
    log: Dict[Tuple[int, ...], Fraction] = {}
    power = {(): Fraction(1)}
    for m in range(1, depth + 1):
        power = mul(power, z)
        sign = Fraction((-1) ** (m + 1), m)
        for w, c in power.items():
            log[w] = log.get(w, 0) + sign * c
    return {w: c for w, c in log.items() if c}


def _structure_table(spec: GroupSpec) -> List[List[Dict[int, Fraction]]]:
    n = spec.dim
    table: List[List[Dict[int, Fraction]]] = [[{} for _ in range(n)] for _ in range(n)]
    for (i, j), terms in spec.brackets.items():
        for idx in (i, j):
            if not 1 <= idx <= n:
                raise SpecError(f"bracket index {idx} out of range 1..{n}")
        if i == j:
            if any(c for _, c in terms):
                raise SpecError(f"[X{i}, X{i}] must vanish")
            continue
        for k, c in terms:
            if not 1 <= k <= n:
                raise SpecError(f"bracket target index {k} out of range 1..{n}")
            c = Fraction(c)
            if not c:
                continue
            a, b = (i - 1, j - 1) if i < j else (j - 1, i - 1)
            sgn = 1 if i < j else -1
            table[a][b][k - 1] = table[a][b].get(k - 1, 0) + sgn * c
            table[b][a][k - 1] = table[b][a].get(k - 1, 0) - sgn * c
    for row in table:
        for cell in row:
            for k in [k for k, c in cell.items() if not c]:
                del cell[k]
    return table


def _nilpotency_class(n: int, table) -> int:
    """Length of the lower central series (0 for the trivial algebra)."""
    if n == 0:
        return 0
    current = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    depth = 1
    while True:
        products = []
        for e in range(n):
            for v in current:
                out = [Fraction(0)] * n
                for j, b in enumerate(v):
                    if b and j != e:
                        for k, c in table[e][j].items():
                            out[k] += c * b
                if any(out):
                    products.append(out)
        if not products:
            return depth
        current = linalg.column_space(linalg.transpose(products), n)
        depth += 1
        if depth > n + 1:
            raise SpecError("algebra is not nilpotent")


def validate(spec: GroupSpec) -> CheckedGroup:
    """Check a specification; returns a ``CheckedGroup`` or raises."""
    n = spec.dim
    if n <= 0:
        raise SpecError("dimension must be positive")
    if len(spec.weights) != n:
        raise SpecError(f"expected {n} weights, got {len(spec.weights)}")
    for i, w in enumerate(spec.weights):
        if not isinstance(w, int) or isinstance(w, bool):
            raise SpecError(f"weight of X{i + 1} must be an integer, got {w!r}")
        if w <= 0:
            raise NonpositiveWeight(f"weight of X{i + 1} is {w}; weights must be positive")
    for i in range(n - 1):
        if spec.weights[i] > spec.weights[i + 1]:
            raise SpecError(
                f"weights must be nondecreasing: weight of X{i + 1} is {spec.weights[i]} "
                f"but weight of X{i + 2} is {spec.weights[i + 1]}"
            )
    table = _structure_table(spec)
    for i, j in combinations(range(n), 2):
        for k in table[i][j]:
            if spec.weights[k] != spec.weights[i] + spec.weights[j]:
                raise GradingViolation(i + 1, j + 1, k + 1)
    residual = jacobi_residuals(n, table)
    if residual:
        (i, j, k), vec = residual[0]
        raise JacobiViolation(i + 1, j + 1, k + 1, [format_rational(c) for c in vec])
    return CheckedGroup(spec, table, _nilpotency_class(n, table))


def jacobi_residuals(n: int, table) -> List[Tuple[Tuple[int, int, int], List[Fraction]]]:
    """Nonzero Jacobiator values over all triples i<j<k."""

    def br(u, v):
        out = [Fraction(0)] * n
        for a, x in enumerate(u):
            if not x:
                continue
            for b, y in enumerate(v):
                if y and a != b:
                    for k, c in table[a][b].items():
                        out[k] += c * x * y
        return out

    basis = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    bad = []
    for i, j, k in combinations(range(n), 3):
        x, y, z = basis[i], basis[j], basis[k]
        terms = [br(br(x, y), z), br(br(y, z), x), br(br(z, x), y)]
        total = [a + b + c for a, b, c in zip(*terms)]
        if any(total):
            bad.append(((i, j, k), total))
    return bad


def left_invariant_frame(group: CheckedGroup) -> Frame:
    """X_i(x) = d/dy_i m(x, y) at y = 0, and its polynomial inverse."""
    n = group.dim
    m = group.product_polys
    A = [[None] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            der = m[j].diff(n + i)
            A[j][i] = Poly(n, {e[:n]: c for e, c in der.terms.items() if not any(e[n:])})
    # A = I + N with N nilpotent (strictly increasing weight), so
    # A^{-1} = sum_k (-N)^k terminates.
    N = [[A[j][i] - (1 if i == j else 0) for i in range(n)] for j in range(n)]
    theta = [[Poly.const(n, int(i == j)) for j in range(n)] for i in range(n)]
    term = [row[:] for row in theta]
    for _ in range(n):
        term = _poly_matmul(term, N, n)
        term = [[-p for p in row] for row in term]
        if all(p.is_zero() for row in term for p in row):
            break
        theta = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(theta, term)]
    return Frame(tuple(tuple(r) for r in A), tuple(tuple(r) for r in theta))


def _poly_matmul(a, b, nvars):
    size = len(a)
    out = [[Poly.zero(nvars) for _ in range(size)] for _ in range(size)]
    for i in range(size):
        for k in range(size):
            if a[i][k].is_zero():
                continue
            for j in range(size):
                if not b[k][j].is_zero():
                    out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out
