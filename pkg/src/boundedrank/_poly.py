"""Dense integer polynomial helpers (coefficient lists, lowest degree first)."""
from __future__ import annotations

import gmpy2

_SCHOOLBOOK = 24


def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _sparse_mul(dense: list[int], sparse: list[int]) -> list[int]:
    out = [0] * (len(dense) + len(sparse) - 1)
    n = len(dense)
    for j, c in enumerate(sparse):
        if c:
            seg = out[j:j + n]
            out[j:j + n] = [x + c * y for x, y in zip(seg, dense)]
    return out


def _pack_signed(a: list[int], width: int):
    if all(x >= 0 for x in a):
        return gmpy2.pack(a, width)
    pos = [x if x > 0 else 0 for x in a]
    neg = [-x if x < 0 else 0 for x in a]
    return gmpy2.pack(pos, width) - gmpy2.pack(neg, width)


def mul(a: list[int], b: list[int]) -> list[int]:
    """Product of two integer polynomials (Kronecker substitution)."""
    if not a or not b:
        return []
    nnz_a = sum(1 for x in a if x)
    nnz_b = sum(1 for x in b if x)
    if nnz_a == 0 or nnz_b == 0:
        return [0] * (len(a) + len(b) - 1)
    if min(nnz_a, nnz_b) <= _SCHOOLBOOK:
        return _sparse_mul(a, b) if nnz_b <= nnz_a else _sparse_mul(b, a)
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    width = bound.bit_length() + 2
    length = len(a) + len(b) - 1
    prod = _pack_signed(a, width) * _pack_signed(b, width)
    half = 1 << (width - 1)
    if prod >= 0 and all(x >= 0 for x in a) and all(x >= 0 for x in b):
        digits = gmpy2.unpack(prod, width)
        out = [int(x) for x in digits[:length]]
        return out + [0] * (length - len(out))
    # shift every slot by half so the packed value is non-negative
    offset = (half * ((1 << (width * length)) - 1)) // ((1 << width) - 1)
    digits = gmpy2.unpack(prod + offset, width)
    out = [int(x) - half for x in digits[:length]]
    return out + [-half] * (length - len(out))


def add(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    return [x + y for x, y in zip(a, b)] + list(a[len(b):])


def sub(a: list[int], b: list[int]) -> list[int]:
    return add(a, [-y for y in b])


def divmod_monic(a: list[int], m: list[int]) -> tuple[list[int], list[int]]:
    """Quotient and remainder of ``a`` by a monic integer polynomial ``m``."""
    if m[-1] != 1:
        raise ValueError("divisor must be monic")
    dm = len(m) - 1
    r = list(a)
    if len(r) <= dm:
        return [], r
    q = [0] * (len(r) - dm)
    for i in range(len(r) - 1, dm - 1, -1):
        c = r[i]
        if c:
            q[i - dm] = c
            base = i - dm
            for j in range(dm):
                if m[j]:
                    r[base + j] -= c * m[j]
            r[i] = 0
    return q, r[:dm]


def taylor_shift(a: list[int], t: int) -> list[int]:
    """Coefficients of ``a(X + t)``."""
    out: list[int] = []
    for c in reversed(a):
        # out <- out * (X + t) + c
        if not out:
            out = [c]
            continue
        out = ([t * out[0] + c]
               + [x + t * y for x, y in zip(out, out[1:])]
               + [out[-1]])
    return out
