"""Exact Gaussian elimination over the rationals."""

from fractions import Fraction


def _as_matrix(rows):
    return [[Fraction(v) for v in row] for row in rows]


def row_reduce(rows):
    """Reduced row echelon form. Returns (matrix, pivot_columns)."""
    m = _as_matrix(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows):
    return len(row_reduce(rows)[1])


def solve(rows, rhs):
    """Solve ``A x = rhs`` for a matrix of full column rank.

    Returns the unique solution, or None when the system is inconsistent.
    Raises ValueError if the columns are dependent.
    """
    n_cols = len(rows[0]) if rows else 0
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = row_reduce(aug)
    if n_cols in pivots:
        return None
    if len(pivots) < n_cols:
        raise ValueError("matrix has dependent columns")
    x = [Fraction(0)] * n_cols
    for i, c in enumerate(pivots):
        x[c] = red[i][-1]
    return x


def inverse(rows):
    n = len(rows)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(rows)]
    red, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def left_inverse(rows):
    """A rational matrix L with ``L A = I`` for A of full column rank.

    Built from the pivot rows of A, so ``L b`` is the only candidate
    solution of ``A x = b``; consistency must still be checked by the caller.
    """
    n_cols = len(rows[0])
    transposed = [[rows[i][j] for i in range(len(rows))] for j in range(n_cols)]
    _, pivot_rows = row_reduce(transposed)
    if len(pivot_rows) < n_cols:
        raise ValueError("matrix has dependent columns")
    square = [rows[i] for i in pivot_rows]
    inv = inverse(square)
    n_rows = len(rows)
    out = []
    for r in range(n_cols):
        full = [Fraction(0)] * n_rows
        for k, i in enumerate(pivot_rows):
            full[i] = inv[r][k]
        out.append(full)
    return out
