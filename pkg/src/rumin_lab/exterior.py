"""The exterior algebra of the dual of a graded Lie algebra.

Basis covectors theta_I are keyed by bitmasks: bit i set means theta_{i+1}
is a factor.  The declared basis is orthonormal and the orientation is
theta_1 ^ ... ^ theta_n.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from . import linalg
from .errors import DegreeMismatch, DegreeOverflow


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> Tuple[int, ...]:
    """0-based indices of the set bits, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def mask_weight(mask: int, weights: Sequence[int]) -> int:
    return sum(weights[i] for i in bits(mask))


def wedge_sign(a: int, b: int) -> int:
    """Sign with theta_A ^ theta_B = sign * theta_{A|B}; 0 if they overlap."""
    if a & b:
        return 0
    inversions = 0
    for j in bits(b):
        inversions += popcount(a >> (j + 1))
    return -1 if inversions & 1 else 1


@lru_cache(maxsize=None)
def masks_of_degree(n: int, k: int) -> Tuple[int, ...]:
    return tuple(mask_of(c) for c in combinations(range(n), k))


@lru_cache(maxsize=None)
def masks_of_weight(weights: Tuple[int, ...], k: int, p: int) -> Tuple[int, ...]:
    return tuple(m for m in masks_of_degree(len(weights), k) if mask_weight(m, weights) == p)


def weights_in_degree(weights: Tuple[int, ...], k: int) -> List[int]:
    """All weights of basis k-covectors, ascending."""
    return sorted({mask_weight(m, weights) for m in masks_of_degree(len(weights), k)})


def mask_label(mask: int, prefix: str = "t") -> str:
    idx = bits(mask)
    if not idx:
        return "1"
    return "^".join(f"{prefix}{i + 1}" for i in idx)


class AlgebraicForm:
    """A k-covector with rational coefficients on the basis theta_I."""

    __slots__ = ("n", "k", "coeffs")

    def __init__(self, n: int, k: int, coeffs: Mapping[int, Fraction] = ()):
        self.n = n
        self.k = k
        clean = {}
        for m, c in dict(coeffs).items():
            if c:
                if popcount(m) != k or m >> n:
                    raise DegreeMismatch(f"basis element {mask_label(m)} is not a {k}-covector in dimension {n}")
                clean[m] = Fraction(c)
        self.coeffs: Dict[int, Fraction] = clean

    @classmethod
    def basis(cls, n: int, indices: Sequence[int], c=1) -> "AlgebraicForm":
        """theta_{i1} ^ ... ^ theta_{ik} for 1-based indices (any order, sign applied)."""
        mask = 0
        sign = 1
        for i in indices:
            bit = 1 << (i - 1)
            s = wedge_sign(mask, bit)
            if s == 0:
                return cls(n, len(indices))
            sign *= s
            mask |= bit
        return cls(n, len(indices), {mask: Fraction(c) * sign})

    @classmethod
    def from_vector(cls, n: int, k: int, masks: Sequence[int], vec: Sequence[Fraction]) -> "AlgebraicForm":
        return cls(n, k, {m: c for m, c in zip(masks, vec) if c})

    def to_vector(self, masks: Sequence[int]) -> List[Fraction]:
        return [self.coeffs.get(m, Fraction(0)) for m in masks]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _check(self, other: "AlgebraicForm"):
        if self.n != other.n or self.k != other.k:
            raise DegreeMismatch(f"cannot combine a {self.k}-form with a {other.k}-form")

    def __add__(self, other: "AlgebraicForm") -> "AlgebraicForm":
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return AlgebraicForm(self.n, self.k, out)

    def __neg__(self) -> "AlgebraicForm":
        return AlgebraicForm(self.n, self.k, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "AlgebraicForm") -> "AlgebraicForm":
        return self + (-other)

    def scale(self, c) -> "AlgebraicForm":
        return AlgebraicForm(self.n, self.k, {m: v * c for m, v in self.coeffs.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraicForm):
            return NotImplemented
        return self.n == other.n and self.k == other.k and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self.k, frozenset(self.coeffs.items())))

    def weights_present(self, weights: Sequence[int]) -> List[int]:
        return sorted({mask_weight(m, weights) for m in self.coeffs})

    def to_str(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for m in sorted(self.coeffs):
            c = self.coeffs[m]
            label = mask_label(m)
            if label == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(label)
            elif c == -1:
                parts.append("-" + label)
            else:
                parts.append(f"{c} {label}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"AlgebraicForm({self.to_str()})"


def wedge(a: AlgebraicForm, b: AlgebraicForm) -> AlgebraicForm:
    if a.n != b.n:
        raise DegreeMismatch("forms live on algebras of different dimension")
    if a.k + b.k > a.n:
        raise DegreeOverflow(f"wedge of degrees {a.k} and {b.k} exceeds dimension {a.n}")
    out: Dict[int, Fraction] = {}
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            s = wedge_sign(ma, mb)
            if s:
                m = ma | mb
                out[m] = out.get(m, 0) + s * ca * cb
    return AlgebraicForm(a.n, a.k + b.k, out)


def volume(n: int) -> AlgebraicForm:
    return AlgebraicForm(n, n, {(1 << n) - 1: Fraction(1)})


def star_sign(mask: int, n: int) -> int:
    full = (1 << n) - 1
    return wedge_sign(mask, full ^ mask)


def hodge_star(xi: AlgebraicForm) -> AlgebraicForm:
    """theta ^ star(xi) = <theta, xi> vol for every k-covector theta."""
    full = (1 << xi.n) - 1
    return AlgebraicForm(
        xi.n, xi.n - xi.k, {full ^ m: c * star_sign(m, xi.n) for m, c in xi.coeffs.items()}
    )


def interior_product(vec: Sequence, xi: AlgebraicForm) -> AlgebraicForm:
    """Contraction of xi with the algebra vector sum vec[i] X_{i+1} in the first slot."""
    if xi.k == 0:
        # contraction of a scalar is zero; represented as an empty 0-form
        return AlgebraicForm(xi.n, 0)
    out: Dict[int, Fraction] = {}
    for m, c in xi.coeffs.items():
        for pos, i in enumerate(bits(m)):
            a = vec[i]
            if a:
                key = m ^ (1 << i)
                out[key] = out.get(key, 0) + (-1) ** pos * a * c
    return AlgebraicForm(xi.n, xi.k - 1, out)


def inner_product(a: AlgebraicForm, b: AlgebraicForm) -> Fraction:
    if a.n != b.n or a.k != b.k:
        raise DegreeMismatch(f"inner product of a {a.k}-form with a {b.k}-form")
    return sum((c * b.coeffs[m] for m, c in a.coeffs.items() if m in b.coeffs), Fraction(0))


def weight_split(xi: AlgebraicForm, weights: Sequence[int]) -> Dict[int, AlgebraicForm]:
    parts: Dict[int, Dict[int, Fraction]] = {}
    for m, c in xi.coeffs.items():
        parts.setdefault(mask_weight(m, weights), {})[m] = c
    return {w: AlgebraicForm(xi.n, xi.k, d) for w, d in sorted(parts.items())}


def annihilator(xi: AlgebraicForm) -> List[List[Fraction]]:
    """Basis of {X : i_X xi = 0} as coordinate vectors in the algebra basis."""
    n = xi.n
    if xi.k == 0:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    targets = masks_of_degree(n, xi.k - 1)
    index = {m: r for r, m in enumerate(targets)}
    rows = linalg.zeros(len(targets), n)
    for i in range(n):
        e = [0] * n
        e[i] = 1
        for m, c in interior_product(e, xi).coeffs.items():
            rows[index[m]][i] += c
    return linalg.nullspace(rows, n)


def is_simple(xi: AlgebraicForm) -> bool:
    """A nonzero k-covector is decomposable iff its annihilator has dimension n - k."""
    if xi.is_zero():
        return False
    return len(annihilator(xi)) == xi.n - xi.k


@dataclass(frozen=True)
class Subspace:
    """Orthogonal (not normalized) basis of a subspace of k-covectors.

    ``norms[i]`` is the squared length of ``vectors[i]``, so orthogonal
    projection stays inside the rationals.
    """

    n: int
    k: int
    weight: object
    masks: Tuple[int, ...]
    vectors: Tuple[Tuple[Fraction, ...], ...]
    norms: Tuple[Fraction, ...]

    @classmethod
    def span(cls, n: int, k: int, masks: Sequence[int], vectors, weight=None) -> "Subspace":
        ortho, norms = linalg.gram_schmidt(vectors)
        return cls(n, k, weight, tuple(masks), tuple(tuple(v) for v in ortho), tuple(norms))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def forms(self) -> List[AlgebraicForm]:
        return [AlgebraicForm.from_vector(self.n, self.k, self.masks, v) for v in self.vectors]

    def gram(self) -> List[List[Fraction]]:
        """Gram matrix of the normalized basis (exactly the identity)."""
        out = []
        for a, na in zip(self.vectors, self.norms):
            row = []
            for b, nb in zip(self.vectors, self.norms):
                g = linalg.dot(a, b)
                row.append(g / na if a is b else g)
            out.append(row)
        return out

    def project(self, vec: Sequence[Fraction]) -> List[Fraction]:
        out = [Fraction(0)] * len(self.masks)
        for b, nb in zip(self.vectors, self.norms):
            c = linalg.dot(vec, b) / nb
            if c:
                out = [x + c * y for x, y in zip(out, b)]
        return out

    def contains(self, vec: Sequence[Fraction]) -> bool:
        return list(self.project(vec)) == [Fraction(x) for x in vec]


def ce_one_forms(structure, n: int) -> Dict[int, Dict[int, Fraction]]:
    """d theta_k = - sum_{i<j} c_ij^k theta_i ^ theta_j, keyed by k."""
    d1: Dict[int, Dict[int, Fraction]] = {}
    for i, j in combinations(range(n), 2):
        for k, c in structure[i][j].items():
            m = (1 << i) | (1 << j)
            d1.setdefault(k, {})
            d1[k][m] = d1[k].get(m, 0) - c
    return d1


def ce_differential(one_forms: Mapping[int, Mapping[int, Fraction]], mask: int) -> Dict[int, Fraction]:
    """Chevalley-Eilenberg differential of theta_I, extended as an antiderivation."""
    out: Dict[int, Fraction] = {}
    idx = bits(mask)
    for pos, i in enumerate(idx):
        if i not in one_forms:
            continue
        prefix = mask_of(idx[:pos])
        suffix = mask_of(idx[pos + 1:])
        for m2, c in one_forms[i].items():
            s1 = wedge_sign(prefix, m2)
            s2 = wedge_sign(prefix | m2, suffix) if s1 else 0
            if s2:
                key = prefix | m2 | suffix
                out[key] = out.get(key, 0) + (-1) ** pos * s1 * s2 * c
    return {m: c for m, c in out.items() if c}
