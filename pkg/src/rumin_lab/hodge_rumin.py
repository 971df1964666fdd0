"""Fiberwise Hodge theory of d_0 and the Rumin operators built on it.

d_0 is constant-coefficient and preserves weight, so every fiber operator is
a rational matrix on a block Lambda^{p, k-p} (degree k, weight p).  Blocks
are built once per group and cached.  All operators act on ``PolyForm``
coefficients linearly.
"""

from dataclasses import dataclass
from fractions import Fraction
from threading import Lock
from typing import Dict, List, Optional, Tuple

from . import linalg
from .errors import NotRuminForm, PreconditionViolated
from .exterior import AlgebraicForm, Subspace, masks_of_weight, weights_in_degree
from .poly import Poly
from .polyforms import PolyForm, d, d_component

KINDS = ("d0", "delta0", "d0inv", "pi0", "proj_im_d0", "proj_im_delta0")

_LOCK = Lock()


@dataclass(frozen=True)
class HodgeSplit:
    k: int
    p: int
    im_d0: Subspace
    ker_box0: Subspace
    im_delta0: Subspace

    @property
    def total(self) -> int:
        return self.im_d0.dim + self.ker_box0.dim + self.im_delta0.dim

    def dims(self) -> Tuple[int, int, int]:
        return (self.im_d0.dim, self.ker_box0.dim, self.im_delta0.dim)


class FiberOperators:
    """Cached d_0 blocks and derived fiber operators for one group."""

    def __init__(self, group):
        self.group = group
        self._blocks: Dict[tuple, object] = {}

    def masks(self, k: int, p: int) -> Tuple[int, ...]:
        if k < 0 or k > self.group.dim:
            return ()
        return masks_of_weight(self.group.weights, k, p)

    def _cached(self, key, build):
        if key not in self._blocks:
            value = build()
            with _LOCK:
                self._blocks.setdefault(key, value)
        return self._blocks[key]

    def d0_matrix(self, k: int, p: int) -> List[List[Fraction]]:
        """Matrix of d_0 from block (k, p) to block (k + 1, p)."""

        def build():
            src = self.masks(k, p)
            dst = self.masks(k + 1, p)
            index = {m: r for r, m in enumerate(dst)}
            mat = linalg.zeros(len(dst), len(src))
            for c, m in enumerate(src):
                for m2, v in self.group.ce_differential(m).items():
                    mat[index[m2]][c] += v
            return mat

        return self._cached(("d0", k, p), build)

    def matrix(self, kind: str, k: int, p: int) -> List[List[Fraction]]:
        """Fiber operator acting on block (k, p)."""
        n_here = len(self.masks(k, p))

        def build():
            if kind == "d0":
                return self.d0_matrix(k, p)
            down = self.d0_matrix(k - 1, p)  # (k-1) -> k
            up = self.d0_matrix(k, p)  # k -> (k+1)
            n_down = len(self.masks(k - 1, p))
            n_up = len(self.masks(k + 1, p))
            if kind == "delta0":
                return linalg.transpose(down, n_here) if n_down else []
            if kind == "d0inv":
                return linalg.pinv(down, n_here, n_down) if n_down else []
            if kind == "proj_im_d0":
                if not n_down or not n_here:
                    return linalg.zeros(n_here, n_here)
                return linalg.matmul(down, linalg.pinv(down, n_here, n_down), n_down, n_here)
            if kind == "proj_im_delta0":
                if not n_up or not n_here:
                    return linalg.zeros(n_here, n_here)
                return linalg.matmul(linalg.pinv(up, n_up, n_here), up, n_up, n_here)
            if kind == "pi0":
                a = self.matrix("proj_im_d0", k, p)
                b = self.matrix("proj_im_delta0", k, p)
                ident = linalg.identity(n_here)
                return [[ident[i][j] - a[i][j] - b[i][j] for j in range(n_here)] for i in range(n_here)]
            raise ValueError(f"unknown fiber operator {kind!r}")

        return self._cached((kind, k, p), build)

    def target_degree(self, kind: str, k: int) -> int:
        return {"d0": k + 1, "delta0": k - 1, "d0inv": k - 1}.get(kind, k)

    def sparse(self, kind: str, k: int, p: int) -> List[Tuple[int, Tuple[Tuple[int, Fraction], ...]]]:
        """Rows of the operator as (target mask, ((source mask, value), ...))."""

        def build():
            mat = self.matrix(kind, k, p)
            src = self.masks(k, p)
            dst = self.masks(self.target_degree(kind, k), p)
            rows = []
            for r, m in enumerate(dst):
                entries = tuple((src[c], v) for c, v in enumerate(mat[r]) if v) if mat else ()
                if entries:
                    rows.append((m, entries))
            return rows

        return self._cached(("sparse", kind, k, p), build)

    def hodge_split(self, k: int, p: int) -> HodgeSplit:
        def build():
            n = self.group.dim
            here = self.masks(k, p)
            size = len(here)
            down = self.d0_matrix(k - 1, p) if k >= 1 else []
            up = self.d0_matrix(k, p)
            n_down = len(self.masks(k - 1, p))
            im_d0 = linalg.column_space(down, size) if n_down and size else []
            im_delta0 = linalg.column_space(linalg.transpose(up), size) if up and size else []
            constraints = [row for row in up] + (linalg.transpose(down) if n_down else [])
            kernel = linalg.nullspace(constraints, size) if size else []
            return HodgeSplit(
                k,
                p,
                Subspace.span(n, k, here, im_d0, p),
                Subspace.span(n, k, here, kernel, p),
                Subspace.span(n, k, here, im_delta0, p),
            )

        return self._cached(("split", k, p), build)


def fibers(group) -> FiberOperators:
    ops = group.__dict__.get("_fiber_ops")
    if ops is None:
        with _LOCK:
            ops = group.__dict__.setdefault("_fiber_ops", FiberOperators(group))
    return ops


def apply_fiber(kind: str, alpha: PolyForm) -> PolyForm:
    ops = fibers(alpha.group)
    k_out = ops.target_degree(kind, alpha.k)
    out: Dict[int, Poly] = {}
    if k_out < 0:
        # the zero element of the (empty) space of (-1)-forms
        return PolyForm(alpha.group, -1)
    for p in alpha.weights_present():
        for target, entries in ops.sparse(kind, alpha.k, p):
            acc = None
            for src, v in entries:
                f = alpha.coeffs.get(src)
                if f is not None:
                    term = f.scale(v)
                    acc = term if acc is None else acc + term
            if acc:
                out[target] = acc
    return PolyForm(alpha.group, k_out, out)


def apply_fiber_algebraic(group, kind: str, xi: AlgebraicForm) -> AlgebraicForm:
    res = apply_fiber(kind, PolyForm.from_algebraic(group, xi))
    return AlgebraicForm(group.dim, res.k, {m: f.constant_term() for m, f in res.coeffs.items()})


def d0(alpha: PolyForm) -> PolyForm:
    return apply_fiber("d0", alpha)


def delta0(alpha: PolyForm) -> PolyForm:
    return apply_fiber("delta0", alpha)


def d0_inverse(alpha: PolyForm) -> PolyForm:
    return apply_fiber("d0inv", alpha)


def pi0(alpha: PolyForm) -> PolyForm:
    return apply_fiber("pi0", alpha)


def hodge_split(group, k: int, p: int) -> HodgeSplit:
    return fibers(group).hodge_split(k, p)


def hodge_table(group, k: int) -> List[HodgeSplit]:
    return [hodge_split(group, k, p) for p in weights_in_degree(group.weights, k)]


def rumin_basis(group, k: int) -> List[Tuple[int, Subspace]]:
    """Nonzero ker box_0 fibers in degree k, by weight."""
    return [(s.p, s.ker_box0) for s in hodge_table(group, k) if s.ker_box0.dim]


def is_rumin_form(alpha: PolyForm) -> bool:
    return pi0(alpha) == alpha


def require_rumin(alpha: PolyForm):
    if not is_rumin_form(alpha):
        raise NotRuminForm("form coefficients are not fiberwise in ker d0 and ker delta0")


# Rumin operators -------------------------------------------------------------


def _b(alpha: PolyForm, budget=None) -> PolyForm:
    return -d0_inverse(d(alpha, budget) - d0(alpha))


def _neumann(alpha: PolyForm, budget=None) -> PolyForm:
    """sum_j b^j alpha; terminates because b raises the minimum weight."""
    total = alpha
    term = alpha
    for _ in range(alpha.group.Q + 2):
        term = _b(term, budget)
        if term.is_zero():
            return total
        total = total + term
    raise AssertionError("Neumann series did not terminate")


def pi_projection(alpha: PolyForm, budget=None) -> PolyForm:
    first = _neumann(d0_inverse(d(alpha, budget)), budget)
    if alpha.k == 0:
        return first
    second = d(_neumann(d0_inverse(alpha), budget), budget)
    return first + second


def pi_E(alpha: PolyForm, budget=None) -> PolyForm:
    return alpha - pi_projection(alpha, budget)


def partials(alpha: PolyForm, r_max: int, budget=None) -> List[PolyForm]:
    """[partial_1 alpha, ..., partial_{r_max} alpha]."""
    out: List[PolyForm] = []
    for r in range(1, r_max + 1):
        acc = d_component(alpha, r, budget)
        for j in range(1, r):
            if out[j - 1]:
                acc = acc - d_component(d0_inverse(out[j - 1]), r - j, budget)
        out.append(acc)
    return out


def partial_r(alpha: PolyForm, r: int, budget=None) -> PolyForm:
    return partials(alpha, r, budget)[-1]


def jump_range(alpha: PolyForm) -> int:
    """Largest weight jump that can be nonzero starting from alpha."""
    low = alpha.min_weight()
    if low is None:
        return 0
    return max(0, alpha.group.Q - low)


def dc_r(alpha: PolyForm, r: int, budget=None) -> PolyForm:
    require_rumin(alpha)
    return pi0(partial_r(alpha, r, budget))


def dc_components(alpha: PolyForm, budget=None) -> Dict[int, PolyForm]:
    require_rumin(alpha)
    out = {}
    for r, part in enumerate(partials(alpha, jump_range(alpha), budget), start=1):
        comp = pi0(part)
        if comp:
            out[r] = comp
    return out


def dc(alpha: PolyForm, budget=None) -> PolyForm:
    total = PolyForm(alpha.group, alpha.k + 1)
    for comp in dc_components(alpha, budget).values():
        total = total + comp
    return total


def dc_via_projections(alpha: PolyForm, budget=None) -> PolyForm:
    """Pi_0 d Pi_E alpha."""
    return pi0(d(pi_E(alpha, budget), budget))


def d0_partial_identity_residual(alpha: PolyForm, r: int, budget=None) -> PolyForm:
    """d0 partial_r alpha + sum_i d_i (partial_{r-i} - d0 d0^-1 partial_{r-i}) alpha."""
    if d0(alpha):
        raise PreconditionViolated("the identity needs d0 alpha = 0")
    parts = partials(alpha, r, budget)
    res = d0(parts[r - 1])
    for i in range(1, r):
        q = parts[r - i - 1]
        res = res + d_component(q - apply_fiber("proj_im_d0", q), i, budget)
    return res


def leibniz_identity_residual(alpha: PolyForm, budget=None) -> PolyForm:
    """Part of d Pi_E alpha - dc alpha outside Im delta0 (zero when the identity holds)."""
    require_rumin(alpha)
    diff = d(pi_E(alpha, budget), budget) - dc(alpha, budget)
    return diff - apply_fiber("proj_im_delta0", diff)


def first_jump_in_kernel(alpha: PolyForm, budget=None) -> Optional[bool]:
    """Whether the lowest-weight component of d Pi_E alpha lies fiberwise in ker box_0.

    None when d Pi_E alpha vanishes.
    """
    form = d(pi_E(alpha, budget), budget)
    low = form.min_weight()
    if low is None:
        return None
    comp = form.component(low)
    return pi0(comp) == comp
