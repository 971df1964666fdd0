"""Spectral modules Z_r, B_r of the weight-filtered de Rham multicomplex.

Membership is decided by exact linear solves.  Every d_j preserves the
quantity ``N = w(I) + weighted degree of the coefficient``, so a form splits
into N-homogeneous pieces that can be solved independently, and for each
piece the unknown witnesses live in a finite-dimensional space (a witness of
weight q has coefficients of weighted degree exactly N - q).  The solves are
therefore complete: a failure certifies non-membership.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import PreconditionViolated
from .exterior import Subspace, mask_weight, masks_of_weight
from .hodge_rumin import (
    apply_fiber,
    d0,
    d0_inverse,
    dc_r,
    fibers,
    partials,
    pi0,
    rumin_basis,
)
from .poly import Poly
from .polyforms import PolyForm, d, d_component


@lru_cache(maxsize=None)
def weighted_monomials(weights: Tuple[int, ...], degree: int) -> Tuple[Tuple[int, ...], ...]:
    """Exponent tuples e with sum e_i * weights[i] == degree."""
    if degree < 0:
        return ()
    n = len(weights)
    out = []

    def rec(i, left, acc):
        if i == n:
            if left == 0:
                out.append(tuple(acc))
            return
        for a in range(left // weights[i] + 1):
            acc.append(a)
            rec(i + 1, left - a * weights[i], acc)
            acc.pop()

    rec(0, degree, [])
    return tuple(out)


def homogeneity_split(alpha: PolyForm) -> Dict[int, PolyForm]:
    """Split by N = weight of the basis form + weighted degree of the monomial."""
    w = alpha.group.weights
    pieces: Dict[int, Dict[int, Dict[tuple, Fraction]]] = {}
    for m, f in alpha.coeffs.items():
        base = mask_weight(m, w)
        for e, c in f.terms.items():
            N = base + sum(a * wi for a, wi in zip(e, w))
            pieces.setdefault(N, {}).setdefault(m, {})[e] = c
    n = alpha.group.dim
    return {
        N: PolyForm(alpha.group, alpha.k, {m: Poly(n, t) for m, t in part.items()})
        for N, part in sorted(pieces.items())
    }


def homogeneous_weight(alpha: PolyForm, p: Optional[int] = None) -> int:
    ws = alpha.weights_present()
    if len(ws) > 1:
        raise PreconditionViolated(f"form is not homogeneous: weights {ws}")
    if ws and p is not None and ws[0] != p:
        raise PreconditionViolated(f"form has weight {ws[0]}, expected {p}")
    if ws:
        return ws[0]
    if p is None:
        raise PreconditionViolated("the weight of the zero form must be given")
    return p


# generic solver ---------------------------------------------------------------

Slot = Tuple[int, int]  # (degree, weight)


def _solve(
    group,
    slots: Sequence[Slot],
    equations: Sequence[Tuple[PolyForm, Dict[int, int]]],
    N: int,
) -> Optional[List[PolyForm]]:
    """Solve sum_s d_{jump(e,s)} X_s = target_e for all equations e.

    ``equations[e] = (target, {slot index: jump})``.  Unknown X_s has degree
    and weight from ``slots`` and coefficients of weighted degree N - weight.
    """
    weights = group.weights
    n = group.dim
    columns: List[Tuple[int, int, tuple]] = []
    rows: Dict[tuple, Dict[int, Fraction]] = {}
    rhs: Dict[tuple, Fraction] = {}
    for s, (k, w) in enumerate(slots):
        if k < 0 or k > n:
            continue
        for mask in masks_of_weight(weights, k, w):
            for e in weighted_monomials(weights, N - w):
                col = len(columns)
                columns.append((s, mask, e))
                basis = PolyForm(group, k, {mask: Poly.monomial(e)})
                for eq, (_, ops) in enumerate(equations):
                    if s not in ops:
                        continue
                    image = d_component(basis, ops[s])
                    for m2, f in image.coeffs.items():
                        for e2, c in f.terms.items():
                            row = rows.setdefault((eq, m2, e2), {})
                            row[col] = row.get(col, 0) + c
    for eq, (target, _) in enumerate(equations):
        for m2, f in target.coeffs.items():
            for e2, c in f.terms.items():
                rhs[(eq, m2, e2)] = c
                rows.setdefault((eq, m2, e2), {})
    keys = list(rows)
    sol = linalg.solve_sparse([rows[k] for k in keys], [rhs.get(k, 0) for k in keys], len(columns))
    if sol is None:
        return None
    out: List[Dict[int, Dict[tuple, Fraction]]] = [dict() for _ in slots]
    for col, val in sol.items():
        s, mask, e = columns[col]
        out[s].setdefault(mask, {})[e] = val
    return [
        PolyForm(group, max(k, 0), {m: Poly(n, t) for m, t in out[s].items()})
        for s, (k, _) in enumerate(slots)
    ]


# Z_r ---------------------------------------------------------------------------


@dataclass
class ZWitness:
    alpha: PolyForm
    r: int
    p: int
    z: List[PolyForm]  # z[i] has weight p + i + 1
    canonical: bool = True

    def residuals(self) -> List[PolyForm]:
        """d_n alpha - sum_{i<n} d_i z_{p+n-i} for n = 0..r-1 (all zero when valid)."""
        out = [d0(self.alpha)]
        for n_ in range(1, self.r):
            acc = d_component(self.alpha, n_)
            for i in range(n_):
                acc = acc - d_component(self.z[n_ - i - 1], i)
            out.append(acc)
        return out

    def is_valid(self) -> bool:
        return all(res.is_zero() for res in self.residuals())


def _greedy_z(alpha: PolyForm, r: int, p: int) -> Optional[List[PolyForm]]:
    zs: List[PolyForm] = []
    for n_ in range(1, r):
        res = d_component(alpha, n_)
        for i in range(1, n_):
            res = res - d_component(zs[n_ - i - 1], i)
        if apply_fiber("proj_im_d0", res) != res:
            return None
        zs.append(d0_inverse(res))
    return zs


def z_solve(alpha: PolyForm, r: int, p: Optional[int] = None) -> Optional[ZWitness]:
    """Witness of alpha in Z_r, or None when alpha is not in Z_r."""
    if r < 1:
        raise ValueError("r must be at least 1")
    p = homogeneous_weight(alpha, p)
    if d0(alpha):
        return None
    group = alpha.group
    greedy = _greedy_z(alpha, r, p)
    if greedy is not None:
        return ZWitness(alpha, r, p, greedy, canonical=True)
    slots = [(alpha.k, p + m) for m in range(1, r)]
    total = [PolyForm(group, alpha.k) for _ in slots]
    for N, piece in homogeneity_split(alpha).items():
        equations = []
        for n_ in range(1, r):
            ops = {m - 1: n_ - m for m in range(1, n_ + 1)}
            equations.append((d_component(piece, n_), ops))
        sol = _solve(group, slots, equations, N)
        if sol is None:
            return None
        total = [a + b for a, b in zip(total, sol)]
    return ZWitness(alpha, r, p, total, canonical=False)


def in_Z(alpha: PolyForm, r: int, p: Optional[int] = None) -> bool:
    return z_solve(alpha, r, p) is not None


# B_r ---------------------------------------------------------------------------


@dataclass
class BWitness:
    alpha: PolyForm
    r: int
    p: int
    c: List[PolyForm]  # c[j] has weight p - j, degree k - 1

    def residuals(self) -> List[PolyForm]:
        top = self.alpha
        for j, cj in enumerate(self.c):
            top = top - d_component(cj, j)
        out = [top]
        for l in range(1, self.r):
            acc = PolyForm(self.alpha.group, self.alpha.k)
            for j in range(l, self.r):
                acc = acc + d_component(self.c[j], j - l)
            out.append(acc)
        return out

    def is_valid(self) -> bool:
        return all(res.is_zero() for res in self.residuals())


def b_solve(alpha: PolyForm, r: int, p: Optional[int] = None) -> Optional[BWitness]:
    if r < 1:
        raise ValueError("r must be at least 1")
    p = homogeneous_weight(alpha, p)
    group = alpha.group
    k = alpha.k
    if k == 0:
        return BWitness(alpha, r, p, []) if alpha.is_zero() else None
    slots = [(k - 1, p - j) for j in range(r)]
    total = [PolyForm(group, k - 1) for _ in slots]
    pieces = homogeneity_split(alpha)
    for N, piece in pieces.items():
        equations = [(piece, {j: j for j in range(r)})]
        for l in range(1, r):
            equations.append((PolyForm(group, k), {j: j - l for j in range(l, r)}))
        sol = _solve(group, slots, equations, N)
        if sol is None:
            return None
        total = [a + b for a, b in zip(total, sol)]
    return BWitness(alpha, r, p, total)


def in_B(alpha: PolyForm, r: int, p: Optional[int] = None) -> bool:
    return b_solve(alpha, r, p) is not None


# Delta_r -------------------------------------------------------------------------


def delta_r(w: ZWitness) -> PolyForm:
    """Weight p + r component of d(alpha - z_{p+1} - ... - z_{p+r-1})."""
    form = w.alpha
    for z in w.z:
        form = form - z
    return d(form).component(w.p + w.r)


def delta_rumin_form(w: ZWitness) -> PolyForm:
    """dc^r(Pi_0 alpha) - sum_{i=2}^{r-1} dc^i(omega_{p+r-i}) with omega = Pi_0 z."""
    bar = pi0(w.alpha)
    out = dc_r(bar, w.r) if bar else PolyForm(w.alpha.group, w.alpha.k + 1)
    for i in range(2, w.r):
        omega = pi0(w.z[w.r - i - 1])
        if omega:
            out = out - dc_r(omega, i)
    return out


def rumin_characterization_check(w: ZWitness) -> Dict[str, object]:
    """Difference of the two Delta_r representatives and whether it lies in B_r."""
    diff = delta_r(w) - delta_rumin_form(w)
    cert = b_solve(diff, w.r, w.p + w.r)
    return {"difference": diff, "in_B": cert is not None, "certificate": cert}


# weights and symbols --------------------------------------------------------------


def weight_set_P(group, k: int) -> List[int]:
    """Weights carrying nontrivial Rumin forms of degree k."""
    return [p for p, _ in rumin_basis(group, k)]


def nonzero_dc_components(group, p: int, k: int) -> List[int]:
    """I_{p,k}: jumps r with dc_r nonzero on degree-k Rumin forms of weight p.

    dc_r is a left-invariant operator, homogeneous of weighted order r, between
    two fibers.  Such an operator vanishes iff it kills every basis form times
    a monomial of weighted degree exactly r, so this probing is exact.
    """
    bases = dict(rumin_basis(group, k))
    if p not in bases:
        return []
    forms = bases[p].forms()
    out = []
    for r in range(1, group.Q - p + 1):
        if not any(q[0] == p + r for q in rumin_basis(group, k + 1)):
            continue
        found = False
        for e in weighted_monomials(group.weights, r):
            f = Poly.monomial(e)
            for xi in forms:
                if dc_r(PolyForm.from_algebraic(group, xi, f), r):
                    found = True
                    break
            if found:
                break
        if found:
            out.append(r)
    return out


def e_jl_symbol_basis(group, p: int, k: int, j: int, l: int) -> Subspace:
    """Constant-coefficient skeleton of E_{j,l} at (p, k).

    On constant coefficients every d_i with i > 0 vanishes, so the Z_j
    fiber is ker d0 and the B_l fiber is Im d0 for all j, l >= 1.
    """
    if j < 1 or l < 1:
        raise ValueError("j and l must be positive")
    ops = fibers(group)
    masks = ops.masks(k, p)
    size = len(masks)
    if not size:
        return Subspace.span(group.dim, k, masks, [], p)
    z_fiber = linalg.nullspace(ops.d0_matrix(k, p), size)
    down = ops.d0_matrix(k - 1, p) if k >= 1 else []
    b_fiber = linalg.column_space(down, size) if down and down[0] else []
    if not z_fiber:
        return Subspace.span(group.dim, k, masks, [], p)
    # coefficients a with (sum a_i z_i) orthogonal to every b
    constraints = [[linalg.dot(z, b) for z in z_fiber] for b in b_fiber]
    combos = linalg.nullspace(constraints, len(z_fiber))
    vectors = [[sum((a * z[i] for a, z in zip(coef, z_fiber)), Fraction(0)) for i in range(size)] for coef in combos]
    return Subspace.span(group.dim, k, masks, vectors, p)


# reconstruction identities ----------------------------------------------------------


def _split_parts(alpha: PolyForm):
    beta = d0_inverse(alpha)
    bar = pi0(alpha)
    return beta, bar


def leibniz_j1(alpha: PolyForm, p: Optional[int] = None) -> PolyForm:
    """d(alpha - d0^-1 d1 bar + d1 beta) - dc^1 bar, below weight p + 2."""
    p = homogeneous_weight(alpha, p)
    if d0(alpha):
        raise PreconditionViolated("alpha must lie in Z_1 = ker d0")
    beta, bar = _split_parts(alpha)
    lhs = d(alpha - d0_inverse(d_component(bar, 1)) + d_component(beta, 1))
    rhs = dc_r(bar, 1) if bar else PolyForm(alpha.group, alpha.k + 1)
    return (lhs - rhs).below(p + 2)


def z_hat_first(alpha: PolyForm) -> PolyForm:
    beta, bar = _split_parts(alpha)
    return d0_inverse(d_component(bar, 1)) - d_component(beta, 1)


def leibniz_j2(alpha: PolyForm, p: Optional[int] = None) -> Dict[str, PolyForm]:
    """Residuals of the j = 2 reconstruction identity for alpha in Z_2."""
    p = homogeneous_weight(alpha, p)
    w = z_solve(alpha, 2, p)
    if w is None:
        raise PreconditionViolated("alpha must lie in Z_2")
    group = alpha.group
    beta, bar = _split_parts(alpha)
    zero = PolyForm(group, alpha.k + 1)
    z_hat = z_hat_first(alpha)
    part2 = partials(bar, 2)[1] if bar else PolyForm(group, alpha.k + 1)
    lhs = d(alpha - z_hat - d0_inverse(part2) + d_component(beta, 2))
    rhs = dc_r(bar, 2) if bar else zero
    return {
        "dc1_vanishes": dc_r(bar, 1) if bar else zero,
        # z_hat is a valid first witness: d1 alpha = d0 z_hat
        "z_hat": d_component(alpha, 1) - d0(z_hat),
        "identity": (lhs - rhs).below(p + 3),
    }


def leibniz_j3(alpha: PolyForm, p: Optional[int] = None) -> Dict[str, PolyForm]:
    """Residuals of the j = 3 relations for alpha in Z_3 (all zero when they hold)."""
    p = homogeneous_weight(alpha, p)
    w = z_solve(alpha, 3, p)
    if w is None:
        raise PreconditionViolated("alpha must lie in Z_3")
    group = alpha.group
    zero = PolyForm(group, alpha.k + 1)
    beta, bar = _split_parts(alpha)
    z1, z2 = w.z
    # split z_{p+1} = d0 beta_{p+1} + z1_bar + z_hat with z_hat the first-step formula
    rest1 = z1 - z_hat_first(alpha)
    z1_bar = pi0(rest1)
    beta1 = d0_inverse(rest1)
    parts_a = partials(bar, 3) if bar else [zero] * 3
    parts_z = partials(z1_bar, 2) if z1_bar else [zero] * 2

    def dcr(form, r):
        return dc_r(form, r) if form else zero

    z2_hat = (
        d_component(beta1, 1)
        - d_component(beta, 2)
        + d0_inverse(parts_a[1])
        - d0_inverse(parts_z[0])
    )
    rest2 = z2 - z2_hat
    z2_bar = pi0(rest2)
    gap = delta_r(w) - (parts_a[2] - parts_z[1] - d_component(z2_bar, 1))
    return {
        "first_split": d0(rest1),
        "dc1_vanishes": dcr(bar, 1),
        "dc2_matches": dcr(bar, 2) - dcr(z1_bar, 1),
        # z_{p+2} minus the formula must lie in ker d0
        "z_hat": d0(rest2),
        "delta3_mod_im_d0": gap - apply_fiber("proj_im_d0", gap),
    }


def candidate_forms(group, k: int, p: int, max_degree: int = 2) -> List[PolyForm]:
    """Monomial multiples of a ker d0 fiber basis at (k, p), plus pairwise sums.

    The basis includes Im d0 directions, so candidates have nonzero
    d0-primitive parts as well as Rumin parts.
    """
    from .polyforms import monomials

    ops = fibers(group)
    masks = ops.masks(k, p)
    if not masks:
        return []
    kernel = linalg.nullspace(ops.d0_matrix(k, p), len(masks))
    monos = list(monomials(group.dim, max_degree))
    singles = []
    for v in kernel:
        for f in monos:
            singles.append(PolyForm(group, k, {m: f.scale(c) for m, c in zip(masks, v) if c}))
    pairs = [a + b for a, b in zip(singles, singles[len(kernel):] + singles[:len(kernel)])]
    return singles + [q for q in pairs if q]
