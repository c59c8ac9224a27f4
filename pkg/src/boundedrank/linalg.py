"""Small dense linear algebra over the exact rings used in this package.

Matrices are lists of rows.  Entries only need ``+``, ``-``, ``*`` (and ``/``
for exact division in :func:`bareiss_det`).
"""
from __future__ import annotations

from .padic import NonUnitError, PadicNumber


def shape(m) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def matmul(a, b, zero):
    rows, inner = shape(a)
    inner_b, cols = shape(b)
    if inner != inner_b:
        raise ValueError(f"shape mismatch: {rows}x{inner} times {inner_b}x{cols}")
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = zero
            for k in range(inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def submatrix(m, rows, cols):
    return [[m[i][j] for j in cols] for i in rows]


def block(m, r0, r1, c0, c1):
    return [row[c0:c1] for row in m[r0:r1]]


def padic_identity(p: int, k: int, precision: int):
    one = PadicNumber.from_int(p, 1, precision)
    zero = PadicNumber.zero(p, precision)
    return [[one if i == j else zero for j in range(k)] for i in range(k)]


def padic_inverse(m):
    """Inverse of a matrix in GL_k(Z_p) by Gauss-Jordan with unit pivots."""
    k = len(m)
    if any(len(row) != k for row in m):
        raise ValueError("matrix must be square")
    p = m[0][0].p
    prec = min(x.precision for row in m for x in row)
    a = [list(row) + ident for row, ident in zip(m, padic_identity(p, k, prec))]
    for col in range(k):
        piv = next((r for r in range(col, k) if a[r][col].is_unit()), None)
        if piv is None:
            raise NonUnitError("determinant is not a p-adic unit")
        a[col], a[piv] = a[piv], a[col]
        inv = PadicNumber.from_int(p, 1, prec) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(k):
            if r != col and not a[r][col].is_exact_zero:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[k:] for row in a]


def padic_det(m) -> PadicNumber:
    """Determinant over Q_p by elimination with minimal-valuation pivots."""
    k = len(m)
    a = [list(row) for row in m]
    p = a[0][0].p
    one = PadicNumber.from_int(p, 1, min(x.precision for row in a for x in row))
    det = one
    for col in range(k):
        cands = [r for r in range(col, k) if not a[r][col].is_zero()]
        if not cands:
            return laplace_det([row[col:] for row in a[col:]], one) * det
        piv = min(cands, key=lambda r: a[r][col].valuation)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pv = a[col][col]
        det = det * pv
        for r in range(col + 1, k):
            if not a[r][col].is_exact_zero:
                f = a[r][col] / pv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def laplace_det(m, one):
    """Division-free cofactor expansion; meant for small matrices."""
    k = len(m)
    if k == 0:
        return one
    if k == 1:
        return m[0][0]
    if k == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(k):
        if getattr(m[0][j], "is_exact_zero", False):
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * laplace_det(minor, one)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else m[0][0] * 0


def bareiss_det(m, one):
    """Fraction-free Gaussian elimination (Bareiss) with valuation pivoting.

    Every division is exact in the ring; pivots are chosen with the smallest
    known valuation so the precision lost by dividing is minimal.  A column
    with no pivot of known valuation falls back to cofactor expansion.
    """
    k = len(m)
    if k == 0:
        return one
    a = [list(row) for row in m]
    sign = 1
    prev = None
    for col in range(k - 1):
        cands = [r for r in range(col, k) if not a[r][col].is_zero()]
        if not cands:
            rest = laplace_det([row[col:] for row in a[col:]], one)
            # Sylvester: the trailing block's determinant is det * prev^(k-col-1)
            if prev is not None and not getattr(rest, "is_exact_zero", False):
                rest = rest / prev ** (k - col - 1)
            return rest if sign > 0 else -rest
        piv = min(cands, key=lambda r: a[r][col].lower_bound())
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        pv = a[col][col]
        for r in range(col + 1, k):
            new_row = list(a[r])
            for c in range(col + 1, k):
                val = pv * a[r][c] - a[r][col] * a[col][c]
                new_row[c] = val if prev is None else val / prev
            new_row[col] = pv * 0
            a[r] = new_row
        prev = pv
    det = a[k - 1][k - 1]
    return det if sign > 0 else -det
