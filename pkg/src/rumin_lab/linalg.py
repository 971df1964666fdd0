"""Exact linear algebra over the rationals.

Dense matrices are plain lists of rows of ``Fraction``.  Everything here is
small (fibers of an exterior algebra of dimension at most a few dozen), so the
straightforward Gauss-Jordan elimination is the right tool.  A sparse solver
is provided for the larger polynomial-coefficient systems of the spectral
module.
"""

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]
Vector = List[Fraction]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def transpose(m: Matrix, cols: Optional[int] = None) -> Matrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a: Matrix, b: Matrix, inner: Optional[int] = None, cols: Optional[int] = None) -> Matrix:
    if not a:
        return []
    n_inner = len(b) if inner is None else inner
    n_cols = (len(b[0]) if b else 0) if cols is None else cols
    out = zeros(len(a), n_cols)
    for i, row in enumerate(a):
        target = out[i]
        for k in range(n_inner):
            v = row[k]
            if v:
                for j, w in enumerate(b[k]):
                    if w:
                        target[j] += v * w
    return out


def matvec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a]


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in m]
    if not rows:
        return rows, []
    n_rows, n_cols = len(rows), len(rows[0])
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def nullspace(m: Matrix, cols: int) -> List[Vector]:
    """Basis of {v : m v = 0}, one vector per free column."""
    if not m:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    reduced, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -reduced[row_idx][f]
        basis.append(v)
    return basis


def column_space(m: Matrix, rows: int) -> List[Vector]:
    if not m or not m[0]:
        return []
    _, pivots = rref(m)
    return [[m[i][c] for i in range(rows)] for c in pivots]


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(row) + ident for row, ident in zip(m, identity(n))]
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in reduced]


def pinv(m: Matrix, rows: int, cols: int) -> Matrix:
    """Exact Moore-Penrose pseudo-inverse (cols x rows) via a rank factorization.

    With m = C F, C of full column rank and F of full row rank,
    pinv(m) = F^T (F F^T)^-1 (C^T C)^-1 C^T.
    """
    if rows == 0 or cols == 0:
        return zeros(cols, rows)
    reduced, pivots = rref(m)
    r = len(pivots)
    if r == 0:
        return zeros(cols, rows)
    f = reduced[:r]
    c = [[m[i][p] for p in pivots] for i in range(rows)]
    ft = transpose(f)
    ct = transpose(c)
    left = matmul(ft, inverse(matmul(f, ft)))
    right = matmul(inverse(matmul(ct, c)), ct)
    return matmul(left, right)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def gram_schmidt(vectors: Sequence[Sequence[Fraction]]) -> Tuple[List[Vector], List[Fraction]]:
    """Orthogonalize without normalizing, so everything stays rational.

    Returns the nonzero orthogonal vectors together with their squared norms.
    """
    basis: List[Vector] = []
    norms: List[Fraction] = []
    for v in vectors:
        w = [Fraction(x) for x in v]
        for b, nb in zip(basis, norms):
            coef = dot(w, b) / nb
            if coef:
                w = [x - coef * y for x, y in zip(w, b)]
        n2 = dot(w, w)
        if n2:
            basis.append(w)
            norms.append(n2)
    return basis, norms


def orthogonal_complement(vectors: Sequence[Sequence[Fraction]], dim: int) -> List[Vector]:
    return nullspace([list(v) for v in vectors], dim) if vectors else nullspace([], dim)


def solve_sparse(
    rows: Sequence[Dict[int, Fraction]], rhs: Sequence[Fraction], n_unknowns: int
) -> Optional[Dict[int, Fraction]]:
    """Solve a sparse linear system exactly; None when inconsistent.

    Free unknowns are set to zero, which keeps the particular solution sparse.
    """
    pivot_rows: Dict[int, Tuple[Dict[int, Fraction], Fraction]] = {}
    order: List[int] = []
    for row, b in zip(rows, rhs):
        r = {k: Fraction(v) for k, v in row.items() if v}
        b = Fraction(b)
        # eliminate known pivots
        changed = True
        while changed:
            changed = False
            for col in list(r):
                if col in pivot_rows and col in r:
                    f = r[col]
                    prow, pb = pivot_rows[col]
                    for k, v in prow.items():
                        nv = r.get(k, 0) - f * v
                        if nv:
                            r[k] = nv
                        else:
                            r.pop(k, None)
                    b -= f * pb
                    changed = True
        if not r:
            if b:
                return None
            continue
        col = min(r)
        inv = 1 / r[col]
        r = {k: v * inv for k, v in r.items()}
        b *= inv
        # keep earlier pivot rows reduced with respect to the new pivot
        for pc in order:
            prow, pb = pivot_rows[pc]
            if col in prow:
                f = prow[col]
                for k, v in r.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
                pivot_rows[pc] = (prow, pb - f * b)
        pivot_rows[col] = (r, b)
        order.append(col)
    solution: Dict[int, Fraction] = {}
    for col in order:
        prow, pb = pivot_rows[col]
        # free variables are zero, so only the constant survives
        if pb:
            solution[col] = pb
    return solution
