"""Logarithmic matrices built from Frobenius data.

For each prime v above p with Frobenius matrix ``C_v`` in GL_{2gf_v}(Z_p):

* ``C_phi,v = C_v . diag(I, I/p)``
* ``C_{v,n} = diag(I, Phi_{p^n}(1+X) I) . C_v^{-1}``
* ``H_{v,n} = C_{v,n} ... C_{v,1}`` and ``M_{v,n} = C_phi,v^(n+1) H_{v,n}``
* ``H_n`` is the block diagonal matrix of the ``H_{v,n}``.

Symbolic matrices have :class:`IwasawaSeries` entries; evaluated ones have
:class:`CycloElement` entries at a single level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .cyclotomic import CycloElement, eps_ratio, phi_at_zeta, phi_poly, scalar_combination
from .iwasawa import IwasawaSeries, eval_at_character, phi_series
from .linalg import bareiss_det, block, matmul, padic_det, padic_identity, padic_inverse
from .padic import DEFAULT_PRECISION, NonUnitError, PadicNumber, Valuation, check_prime, padic


class FrobeniusError(ValueError):
    """Frobenius data violating the GL_{2gf_v}(Z_p) constraint."""


@dataclass(frozen=True)
class FrobeniusBlock:
    label: str
    f: int
    C: tuple  # rows of PadicNumber
    C_inv: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.C)
        object.__setattr__(self, "C", rows)
        try:
            inv = padic_inverse([list(r) for r in rows])
        except NonUnitError as exc:
            raise FrobeniusError(
                f"C_v for prime {self.label!r} must lie in GL(Z_p): {exc}") from None
        object.__setattr__(self, "C_inv", tuple(tuple(r) for r in inv))

    @property
    def size(self) -> int:
        return len(self.C)


@dataclass(frozen=True)
class FrobeniusData:
    """Per-prime Frobenius matrices together with the global shape (p, g, f_v)."""

    p: int
    g: int
    blocks: tuple
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        check_prime(self.p)
        if self.g < 1:
            raise FrobeniusError("g must be positive")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        labels = [b.label for b in self.blocks]
        if len(set(labels)) != len(labels):
            raise FrobeniusError(f"duplicate prime labels in {labels}")
        for b in self.blocks:
            k = 2 * self.g * b.f
            if b.size != k or any(len(r) != k for r in b.C):
                raise FrobeniusError(
                    f"C_v for prime {b.label!r} must be {k}x{k} (2 g f_v), got {b.size}x{len(b.C[0]) if b.C else 0}")
            if any(x.p != self.p for r in b.C for x in r):
                raise FrobeniusError("entries of C_v live over a different prime")

    @classmethod
    def from_matrices(cls, p: int, g: int, blocks: Sequence, precision: int = DEFAULT_PRECISION) -> "FrobeniusData":
        """``blocks`` is a sequence of ``(label, f, matrix)`` with int/Fraction/PadicNumber entries."""
        out = []
        for label, f, m in blocks:
            rows = [[padic(p, x, precision) for x in row] for row in m]
            out.append(FrobeniusBlock(str(label), int(f), rows))
        return cls(p, g, tuple(out))

    @property
    def degree(self) -> int:
        """[F:Q] = sum of the local degrees f_v."""
        return sum(b.f for b in self.blocks)

    @property
    def labels(self) -> list[str]:
        return [b.label for b in self.blocks]

    def half(self, v) -> int:
        """g f_v, the size of the filtration half of block v."""
        return self.g * self.block(v).f

    def block(self, v) -> FrobeniusBlock:
        if isinstance(v, int):
            return self.blocks[v]
        for b in self.blocks:
            if b.label == v:
                return b
        raise KeyError(f"no prime labelled {v!r}")

    @property
    def precision(self) -> int:
        return min(x.precision for b in self.blocks for r in b.C for x in r)


# --------------------------------------------------------------------------
# index tuples


@dataclass(frozen=True, order=True)
class IndexTuple:
    """One sorted subset I_v of {1, ..., 2 g f_v} per prime, in declared order."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(tuple(sorted(part)) for part in self.parts))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(part) for part in self.parts)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def global_indices(self, block_sizes: Sequence[int]) -> list[int]:
        """0-based positions in H_n, offsetting each part by the preceding blocks."""
        out = []
        offset = 0
        for part, size in zip(self.parts, block_sizes):
            if any(not 1 <= i <= size for i in part):
                raise ValueError(f"index out of range 1..{size} in {part}")
            out.extend(offset + i - 1 for i in part)
            offset += size
        return out

    def to_json(self):
        return [list(part) for part in self.parts]

    def __str__(self):
        return "(" + ", ".join("{" + ",".join(map(str, part)) + "}" for part in self.parts) + ")"


def index_tuple_I0(data: FrobeniusData) -> IndexTuple:
    return IndexTuple(tuple(tuple(range(1, data.half(i) + 1)) for i in range(len(data.blocks))))


def index_tuple_I1(data: FrobeniusData) -> IndexTuple:
    return IndexTuple(tuple(tuple(range(data.half(i) + 1, 2 * data.half(i) + 1))
                            for i in range(len(data.blocks))))


def index_tuple_Jn(data: FrobeniusData, n: int) -> IndexTuple:
    """I_0 for even n and I_1 for odd n."""
    return index_tuple_I1(data) if n % 2 else index_tuple_I0(data)


# --------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class LogMatrix:
    """Block diagonal matrix: one square block per prime, in declared order.

    ``kind`` is ``"series"`` for symbolic entries or ``"cyclo"`` for entries
    evaluated at eps of ``eval_level``.
    """

    name: str
    level: int
    labels: tuple
    blocks: tuple
    kind: str
    eval_level: int | None = None

    @property
    def block_sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]

    @property
    def size(self) -> int:
        return sum(self.block_sizes)

    def block(self, v):
        if isinstance(v, int):
            return self.blocks[v]
        return self.blocks[self.labels.index(v)]

    def zero_entry(self, p: int):
        if self.kind == "series":
            return IwasawaSeries.zero(p)
        return CycloElement.zero(p, self.eval_level)

    def dense(self):
        """The assembled matrix with exact zeros off the diagonal blocks."""
        p = self.blocks[0][0][0].p
        zero = self.zero_entry(p)
        out = [[zero] * self.size for _ in range(self.size)]
        offset = 0
        for b in self.blocks:
            for i, row in enumerate(b):
                out[offset + i][offset:offset + len(row)] = row
            offset += len(b)
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "level": self.level,
            "kind": self.kind,
            "eval_level": self.eval_level,
            "blocks": [
                {"label": label, "size": len(b),
                 "entries": [[x.to_json() for x in row] for row in b]}
                for label, b in zip(self.labels, self.blocks)
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LogMatrix":
        parse = IwasawaSeries.from_json if doc["kind"] == "series" else CycloElement.from_json
        blocks = tuple(tuple(tuple(parse(x) for x in row) for row in b["entries"]) for b in doc["blocks"])
        return cls(doc["name"], int(doc["level"]), tuple(b["label"] for b in doc["blocks"]),
                   blocks, doc["kind"], doc["eval_level"])


def _as_rows(m):
    return tuple(tuple(r) for r in m)


def build_cphi(data: FrobeniusData, v) -> list[list[PadicNumber]]:
    """C_phi,v = C_v . diag(I, I/p): the right half of the columns divided by p."""
    b = data.block(v)
    h = data.half(v)
    return [[x if j < h else x / data.p for j, x in enumerate(row)] for row in b.C]


def det_cphi_valuation(data: FrobeniusData, v) -> Valuation:
    return padic_det(build_cphi(data, v)).val()


def build_cvn(data: FrobeniusData, v, n: int) -> LogMatrix:
    """C_{v,n} = diag(I, Phi_{p^n}(1+X) I) . C_v^{-1} over Z_p[X]."""
    if n < 1:
        raise ValueError("C_{v,n} needs n >= 1")
    b = data.block(v)
    h = data.half(v)
    phi = phi_series(data.p, n)
    rows = []
    for i, row in enumerate(b.C_inv):
        consts = [IwasawaSeries.constant(x) for x in row]
        rows.append([c if i < h else phi * c for c in consts])
    return LogMatrix("C", n, (b.label,), (_as_rows(rows),), "series")


def _series_matmul(a, b, p):
    return matmul(a, b, IwasawaSeries.zero(p))


def build_hvn(data: FrobeniusData, v, n: int) -> LogMatrix:
    """H_{v,n} = C_{v,n} C_{v,n-1} ... C_{v,1} (leftmost factor C_{v,n})."""
    if n < 1:
        raise ValueError("H_{v,n} needs n >= 1")
    label = data.block(v).label
    h = [list(r) for r in build_cvn(data, v, n).blocks[0]]
    for k in range(n - 1, 0, -1):
        h = _series_matmul(h, [list(r) for r in build_cvn(data, v, k).blocks[0]], data.p)
    return LogMatrix("H", n, (label,), (_as_rows(h),), "series")


def build_mvn(data: FrobeniusData, v, n: int) -> LogMatrix:
    """M_{v,n} = C_phi,v^(n+1) H_{v,n}; entries may have negative valuation."""
    cphi = build_cphi(data, v)
    power = padic_identity(data.p, len(cphi), data.precision)
    for _ in range(n + 1):
        power = matmul(power, cphi, PadicNumber.zero(data.p, data.precision))
    hvn = build_hvn(data, v, n)
    h = [list(r) for r in hvn.blocks[0]]
    scalar = [[IwasawaSeries.constant(x) for x in row] for row in power]
    return LogMatrix("M", n, hvn.labels, (_as_rows(_series_matmul(scalar, h, data.p)),), "series")


def assemble_hn(data: FrobeniusData, n: int) -> LogMatrix:
    """Block diagonal H_n with the H_{v,n} on the diagonal, primes in declared order."""
    blocks = tuple(build_hvn(data, i, n).blocks[0] for i in range(len(data.blocks)))
    return LogMatrix("H", n, tuple(data.labels), blocks, "series")


def evaluate(m: LogMatrix, level: int | None = None) -> LogMatrix:
    """Substitute X = eps_level into every entry of a symbolic matrix."""
    if m.kind != "series":
        raise ValueError("matrix is already evaluated")
    level = m.level if level is None else level
    blocks = tuple(tuple(tuple(eval_at_character(x, level) for x in row) for row in b) for b in m.blocks)
    return LogMatrix(m.name, m.level, m.labels, blocks, "cyclo", level)


def _scalar_matmul_right(rows, consts):
    """rows (CycloElement) times a constant PadicNumber matrix."""
    k = len(consts)
    out = []
    for row in rows:
        p, n = row[0].p, row[0].n
        if all(x.is_exact_zero for x in row):
            out.append(list(row))
            continue
        out.append([scalar_combination([(x, consts[j][c]) for j, x in enumerate(row)], p, n)
                    for c in range(k)])
    return out


def hvn_at(data: FrobeniusData, v, n: int, level: int | None = None) -> list[list[CycloElement]]:
    """H_{v,n}(eps_level) as the product of the evaluated factors C_{v,k}(eps_level).

    Each factor is diag(1, Phi_{p^k}(zeta)) C_v^{-1}; the product is taken
    left to right so the scaling by Phi_{p^k}(zeta) acts on columns.
    """
    if n < 1:
        raise ValueError("H_{v,n} needs n >= 1")
    level = n if level is None else level
    b = data.block(v)
    h = data.half(v)
    p = data.p
    cinv = [list(r) for r in b.C_inv]

    def scale_cols(rows, k):
        phi = phi_at_zeta(p, k, level)
        return [[x if j < h else x * phi for j, x in enumerate(row)] for row in rows]

    ident = [[CycloElement.from_int(p, level, 1 if i == j else 0) for j in range(2 * h)] for i in range(2 * h)]
    acc = _scalar_matmul_right(scale_cols(ident, n), cinv)
    # scale_cols on the identity scales rows; the two coincide for a diagonal matrix
    for k in range(n - 1, 0, -1):
        acc = _scalar_matmul_right(scale_cols(acc, k), cinv)
    return acc


def evaluate_hn(data: FrobeniusData, n: int, level: int | None = None) -> LogMatrix:
    """H_n(eps_level) block by block via :func:`hvn_at` (memoized on ``data``)."""
    level = n if level is None else level
    key = ("hn", n, level)
    if key not in data._cache:
        blocks = tuple(_as_rows(hvn_at(data, i, n, level)) for i in range(len(data.blocks)))
        data._cache[key] = LogMatrix("H", n, tuple(data.labels), blocks, "cyclo", level)
    return data._cache[key]


def minor_at(hn: LogMatrix, rows: IndexTuple, cols: IndexTuple) -> CycloElement:
    """The (I, J)-minor of the evaluated block diagonal H_n.

    The submatrix is itself block diagonal, so the minor is the product of the
    per-prime minors, and an exact zero as soon as |I_v| != |J_v| somewhere.
    """
    if hn.kind != "cyclo":
        raise ValueError("minor_at needs an evaluated matrix")
    if len(rows.parts) != len(hn.blocks) or len(cols.parts) != len(hn.blocks):
        raise ValueError("index tuple does not match the number of primes")
    if rows.total != cols.total:
        raise ValueError("row and column tuples have different total size")
    p = hn.blocks[0][0][0].p
    one = CycloElement.from_int(p, hn.eval_level, 1)
    result = one
    for b, ri, ci in zip(hn.blocks, rows.parts, cols.parts):
        if len(ri) != len(ci):
            return CycloElement.zero(p, hn.eval_level)
        size = len(b)
        for i in (*ri, *ci):
            if not 1 <= i <= size:
                raise ValueError(f"index {i} outside 1..{size}")
        if not ri:
            continue
        sub = [[b[i - 1][j - 1] for j in ci] for i in ri]
        result = result * bareiss_det(sub, one)
    return result


@dataclass(frozen=True)
class VanishingReport:
    label: str
    n: int
    passed: bool
    direct: list  # (row, col, valuation) for every lower-half entry
    symbolic: list | None = None  # (row, col, remainder_zero, valuation)

    def falsified(self):
        bad = [(i, j, str(v)) for i, j, v in self.direct if not v.is_infinite]
        if self.symbolic is not None:
            bad += [(i, j, str(v)) for i, j, ok, v in self.symbolic if not ok or v.determined]
        return bad


def lower_half_vanishing_check(data: FrobeniusData, v, n: int, symbolic: bool = True) -> VanishingReport:
    """Check that rows g f_v + 1 .. 2 g f_v of H_{v,n}(eps_n) vanish.

    The direct product must give exact zeros.  With ``symbolic`` the series
    H_{v,n} is also built, its lower rows must be divisible by
    Phi_{p^n}(1+X) (zero remainder at precision) and evaluate to zero at
    precision.
    """
    h = data.half(v)
    label = data.block(v).label
    hv = hvn_at(data, v, n)
    direct = [(i + 1, j + 1, hv[i][j].valuation()) for i in range(h, 2 * h) for j in range(2 * h)]
    ok = all(val.is_infinite and val.exact for _, _, val in direct)
    sym = None
    if symbolic:
        sym = []
        hs = build_hvn(data, v, n).blocks[0]
        phi = phi_poly(data.p, n)
        for i in range(h, 2 * h):
            for j in range(2 * h):
                entry = hs[i][j]
                _, rem = entry.divmod_monic(phi)
                val = eval_at_character(entry, n).valuation()
                sym.append((i + 1, j + 1, rem.is_zero(), val))
                ok = ok and rem.is_zero() and not val.determined
    return VanishingReport(label, n, ok, direct, sym)


@lru_cache(maxsize=None)
def delta(p: int, n: int) -> CycloElement:
    """delta_n = (eps_1/eps_2)(eps_3/eps_4)... over odd m <= n - 1, at level n."""
    check_prime(p)
    if n < 1:
        raise ValueError("delta_n needs n >= 1")
    result = CycloElement.from_int(p, n, 1)
    for m in range(1, n, 2):
        result = result * eps_ratio(p, n, m)
    return result


def antidiagonal_blocks(data: FrobeniusData, v):
    """(B1, B2) read off C_{v,n}: the off-diagonal blocks of C_v^{-1}."""
    h = data.half(v)
    cinv = [list(r) for r in data.block(v).C_inv]
    return block(cinv, 0, h, h, 2 * h), block(cinv, h, 2 * h, 0, h)


def closed_form_h_antidiag(B1, B2, n: int):
    """Closed form of H_{v,n}(eps_n) for block anti-diagonal C_v.

    Returns ``(matrix, delta_n)``.  For odd n the only nonzero block is the
    upper-right ``delta_n (B1 B2)^((n-1)/2) B1``, for even n the upper-left
    ``delta_n (B1 B2)^(n/2)``.
    """
    k = len(B1)
    p = B1[0][0].p
    prec = min(x.precision for m in (B1, B2) for r in m for x in r)
    zero_p = PadicNumber.zero(p, prec)
    b1b2 = matmul(B1, B2, zero_p)
    core = padic_identity(p, k, prec)
    for _ in range(n // 2 if n % 2 == 0 else (n - 1) // 2):
        core = matmul(core, b1b2, zero_p)
    if n % 2:
        core = matmul(core, B1, zero_p)
    dn = delta(p, n)
    zero = CycloElement.zero(p, n)
    out = [[zero] * (2 * k) for _ in range(2 * k)]
    off = k if n % 2 else 0
    for i in range(k):
        for j in range(k):
            out[i][off + j] = dn * core[i][j]
    return out, dn
