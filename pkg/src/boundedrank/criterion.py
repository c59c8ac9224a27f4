"""The rank-boundedness criterion on top of the logarithmic matrices.

Given Frobenius data and a family of Coleman determinants col_J (one
Iwasawa series per index tuple J), the key condition at level n is

    S_n = sum_J H_{I_0,J,n}(eps_n) col_J(eps_n) != 0.

:func:`key_sum` evaluates S_n directly.  :func:`dominance_certificate`
compares the valuations of the individual terms instead and, for block
anti-diagonal (mod p) data, derives an explicit threshold N_0 past which the
J_n term always dominates.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cyclotomic import CycloElement, degree
from .iwasawa import IwasawaSeries, MuLambda, eval_at_character, newton_invariants
from .linalg import block, padic_det
from .logmat import (FrobeniusBlock, FrobeniusData, FrobeniusError, IndexTuple, delta, evaluate_hn,
                     index_tuple_I0, index_tuple_I1, index_tuple_Jn, minor_at)
from .padic import DEFAULT_PRECISION, INF, PadicNumber, Valuation, padic

NONZERO = "nonzero-at-n"
ZERO = "zero-at-n"
INDETERMINATE = "indeterminate"
CERTIFIED = "certified-for-all-large-n"

ANTI_DIAGONAL = "anti-diagonal"
ANTI_DIAGONAL_MOD_P = "anti-diagonal-mod-p"
GENERAL = "general"


class ConfigError(ValueError):
    """Input that does not fit the declared shape."""


def enumerate_index_tuples(data: FrobeniusData) -> list[IndexTuple]:
    """Every (I_v)_v with I_v in {1..2gf_v} and total size g [F:Q], sorted."""
    target = data.g * data.degree
    per_prime = []
    for b in data.blocks:
        k = 2 * data.g * b.f
        per_prime.append([c for r in range(k + 1) for c in itertools.combinations(range(1, k + 1), r)])
    out = [IndexTuple(parts) for parts in itertools.product(*per_prime)
           if sum(map(len, parts)) == target]
    return sorted(out)


def count_index_tuples(data: FrobeniusData) -> int:
    """Coefficient of x^{g[F:Q]} in prod_v (1 + x)^{2 g f_v}."""
    poly = [1]
    for b in data.blocks:
        k = 2 * data.g * b.f
        binom = [math.comb(k, i) for i in range(k + 1)]
        poly = [sum(poly[i] * binom[j - i] for i in range(len(poly)) if 0 <= j - i <= k)
                for j in range(len(poly) + k)]
    target = data.g * data.degree
    return poly[target] if target < len(poly) else 0


# --------------------------------------------------------------------------
# Coleman data


@dataclass
class ColemanFamily:
    """col_J for every J in the index set; absent tuples count as the zero series."""

    p: int
    series: dict
    provenance: str = "user-supplied"
    missing: list = field(default_factory=list)
    seed: int | None = None

    @classmethod
    def build(cls, data: FrobeniusData, entries: dict, provenance: str = "user-supplied",
              seed: int | None = None) -> "ColemanFamily":
        tuples = enumerate_index_tuples(data)
        valid = set(tuples)
        for key in entries:
            if key not in valid:
                raise ConfigError(f"tuple {key} is not in the index set of this shape")
        series = {}
        missing = []
        for t in tuples:
            if t in entries:
                series[t] = entries[t]
            else:
                series[t] = IwasawaSeries.zero(data.p)
                missing.append(t)
        return cls(data.p, series, provenance, missing, seed)

    def __getitem__(self, t: IndexTuple) -> IwasawaSeries:
        return self.series[t]

    def nonzero(self) -> list:
        return [t for t, s in self.series.items() if not s.is_zero()]

    def invariants(self) -> dict:
        return {t: newton_invariants(s) for t, s in self.series.items() if not s.is_zero()}


def synthetic_series(p: int, mu: int, lam: int, rng: random.Random,
                     precision: int = DEFAULT_PRECISION, extra: int = 3) -> IwasawaSeries:
    """p^mu times a polynomial whose first unit coefficient sits at X^lam."""
    coeffs = [p * rng.randrange(p ** (precision - 1)) for _ in range(lam)]
    coeffs.append(rng.randrange(1, p ** precision) if p > 2 else 1)
    while coeffs[-1] % p == 0:
        coeffs[-1] += 1
    coeffs += [rng.randrange(p ** precision) for _ in range(extra)]
    return IwasawaSeries.from_coefficients(p, [c * p ** mu for c in coeffs], precision)


def synthetic_family(data: FrobeniusData, params: dict, precision: int = DEFAULT_PRECISION) -> ColemanFamily:
    """Coleman family with prescribed (mu, lambda) per tuple.

    ``params`` keys: ``seed``; ``mu`` and ``lambda`` defaults (``lambda`` may be
    replaced by ``lambda_max`` for a seeded random choice); ``tuples`` with
    per-tuple overrides ``{"tuple": [[...], ...], "mu": .., "lambda": ..}`` or
    ``"zero": true``.
    """
    seed = int(params.get("seed", 0))
    rng = random.Random(seed)
    overrides = {IndexTuple(tuple(tuple(part) for part in o["tuple"])): o for o in params.get("tuples", [])}
    entries = {}
    for t in enumerate_index_tuples(data):
        o = overrides.get(t, {})
        if o.get("zero"):
            continue
        mu = int(o.get("mu", params.get("mu", 0)))
        if "lambda" in o:
            lam = int(o["lambda"])
        elif "lambda" in params:
            lam = int(params["lambda"])
        else:
            lam = rng.randint(0, int(params.get("lambda_max", 0)))
        entries[t] = synthetic_series(data.p, mu, lam, rng, precision)
    return ColemanFamily.build(data, entries, "synthetic", seed)


# --------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Verdict:
    kind: str
    n: int | None
    dominant: Valuation | None = None
    runner_up: Valuation | None = None
    threshold: int | None = None
    diagnostic: str = ""
    dominant_tuple: IndexTuple | None = None

    @property
    def nonzero(self) -> bool:
        return self.kind in (NONZERO, CERTIFIED)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "dominant": None if self.dominant is None else self.dominant.to_json(),
            "runner_up": None if self.runner_up is None else self.runner_up.to_json(),
            "dominant_tuple": None if self.dominant_tuple is None else self.dominant_tuple.to_json(),
            "threshold": self.threshold,
            "diagnostic": self.diagnostic,
        }


def _check_shape(data: FrobeniusData, coleman: ColemanFamily):
    if coleman.p != data.p:
        raise ConfigError(f"Coleman data over p={coleman.p}, Frobenius data over p={data.p}")
    if set(coleman.series) != set(enumerate_index_tuples(data)):
        raise ConfigError("Coleman family does not match the shape of the Frobenius data")


def _hn_cached(data: FrobeniusData, n: int):
    return evaluate_hn(data, n)


def key_minors(data: FrobeniusData, n: int) -> dict:
    """H_{I_0,J,n}(eps_n) for every J."""
    hn = _hn_cached(data, n)
    i0 = index_tuple_I0(data)
    return {j: minor_at(hn, i0, j) for j in enumerate_index_tuples(data)}


def key_sum(data: FrobeniusData, coleman: ColemanFamily, n: int) -> tuple[CycloElement, Verdict]:
    """S_n computed directly, with its verdict."""
    if n < 1:
        raise ConfigError("n must be at least 1")
    _check_shape(data, coleman)
    total = CycloElement.zero(data.p, n)
    for j, m in key_minors(data, n).items():
        col = coleman[j]
        if m.is_exact_zero or col.is_exact_zero:
            continue
        total = total + m * eval_at_character(col, n)
    val = total.valuation()
    if total.is_exact_zero:
        kind = ZERO
    elif val.determined:
        kind = NONZERO
    else:
        kind = INDETERMINATE
    diag = "" if kind != INDETERMINATE else f"sum vanishes to the working precision ({val})"
    return total, Verdict(kind, n, val, None, diagnostic=diag)


def classify_frobenius(data: FrobeniusData, v) -> str:
    """anti-diagonal, anti-diagonal-mod-p or general, from the diagonal blocks of C_v."""
    c = [list(r) for r in data.block(v).C]
    h = data.half(v)
    diag = [x for r in block(c, 0, h, 0, h) + block(c, h, 2 * h, h, 2 * h) for x in r]
    if all(x.is_zero() for x in diag):
        return ANTI_DIAGONAL
    if all(x.lower_bound() >= 1 for x in diag):
        b1 = padic_det(block(c, 0, h, h, 2 * h))
        b2 = padic_det(block(c, h, 2 * h, 0, h))
        if b1.is_unit() and b2.is_unit():
            return ANTI_DIAGONAL_MOD_P
    return GENERAL


@dataclass(frozen=True)
class TermReport:
    """Valuations of H_{I_0,J,n}(eps_n), col_J(eps_n) and their product."""

    tuple: IndexTuple
    minor: Valuation
    coleman: Valuation
    coleman_predicted: Fraction | None
    total: Valuation

    def to_json(self):
        return {
            "tuple": self.tuple.to_json(),
            "minor": self.minor.to_json(),
            "coleman": self.coleman.to_json(),
            "coleman_predicted": None if self.coleman_predicted is None else str(self.coleman_predicted),
            "total": self.total.to_json(),
        }


def term_valuations(data: FrobeniusData, coleman: ColemanFamily, n: int) -> list[TermReport]:
    """Per-J valuations entering the dominance comparison at level n."""
    out = []
    d = degree(data.p, n)
    for j, m in key_minors(data, n).items():
        col = coleman[j]
        ev = eval_at_character(col, n)
        inv = newton_invariants(col) if not col.is_zero() else MuLambda(None, None, False)
        pred = inv.mu + Fraction(inv.lam, d) if inv.certified and d > inv.lam else None
        out.append(TermReport(j, m.valuation(), ev.valuation(), pred, (m * ev).valuation()))
    return out


def _dominance_at(data, coleman, n, target) -> Verdict:
    """nonzero-at-n when the ``target`` term (or, if None, any term) strictly dominates."""
    terms = [t for t in term_valuations(data, coleman, n) if not t.total.is_infinite]
    if not terms:
        return Verdict(ZERO, n, Valuation(INF), None, diagnostic="every term is exactly zero")
    terms.sort(key=lambda t: (t.total.value, not t.total.exact))
    best = terms[0]
    if target is not None:
        best = next((t for t in terms if t.tuple == target), None)
        if best is None:
            return Verdict(INDETERMINATE, n, None, terms[0].total,
                           diagnostic=f"J_n term vanishes at n={n}")
    others = [t.total for t in terms if t is not best]
    runner = min(others, key=lambda v: v.value) if others else None
    if best.total.determined and all(best.total.value < o.value for o in others):
        return Verdict(NONZERO, n, best.total, runner, dominant_tuple=best.tuple)
    return Verdict(INDETERMINATE, n, best.total, runner,
                   diagnostic=f"no strictly dominant term at n={n}", dominant_tuple=best.tuple)


def gap_constant(p: int) -> Fraction:
    """1 - p/(p^2 - 1): a lower bound for 1 - val(delta_n) valid for every n."""
    return 1 - Fraction(p, p * p - 1)


@dataclass(frozen=True)
class Certificate:
    """Outcome of the threshold search behind certified-for-all-large-n."""

    threshold: int | None
    analytic_from: int | None
    checks: tuple  # per-n Verdicts for n = 1 .. analytic_from
    diagnostic: str = ""

    def to_json(self):
        return {
            "threshold": self.threshold,
            "analytic_from": self.analytic_from,
            "checks": [v.to_json() for v in self.checks],
            "diagnostic": self.diagnostic,
        }


def certificate(data: FrobeniusData, coleman: ColemanFamily) -> Certificate:
    """Search for N_0 with the J_n term strictly dominant for every n >= N_0.

    Past ``analytic_from`` dominance follows from the valuation bounds:

    * anti-diagonal blocks: only J_n has a nonzero minor, so the sum is
      nonzero as soon as col_{J_n}(eps_n) is, which holds once
      p^{n-1}(p-1) exceeds lambda;
    * anti-diagonal mod p: every other minor is ahead by at least
      1 - val(delta_n) > 1 - p/(p^2-1), while with a common mu the Coleman
      factors differ by at most max(lambda_{I_0}, lambda_{I_1}) / (p^n - p^{n-1}),
      which decreases in n.

    The levels 1 .. analytic_from are checked exactly and N_0 is the least n
    from which all of them pass.
    """
    _check_shape(data, coleman)
    p = data.p
    kinds = [classify_frobenius(data, i) for i in range(len(data.blocks))]
    if GENERAL in kinds:
        return Certificate(None, None, (), "Frobenius data is not block anti-diagonal modulo p")
    i0, i1 = index_tuple_I0(data), index_tuple_I1(data)
    inv = coleman.invariants()
    for t, name in ((i0, "I_0"), (i1, "I_1")):
        if t not in inv:
            return Certificate(None, None, (), f"col_{name} is the zero series")
    if not all(m.certified for m in inv.values()):
        return Certificate(None, None, (), "mu/lambda not certified for every nonzero col_J")
    mus = {m.mu for m in inv.values()}
    if len(mus) > 1:
        return Certificate(None, None, (), f"mu-invariant hypothesis fails: mu differs across J ({sorted(mus)})")
    lam = max(inv[i0].lam, inv[i1].lam)
    n = 1
    if all(k == ANTI_DIAGONAL for k in kinds):
        while degree(p, n) <= lam:
            n += 1
    else:
        bound = gap_constant(p)
        while not Fraction(lam, degree(p, n)) < bound:
            n += 1
    analytic_from = n
    checks = tuple(_dominance_at(data, coleman, k, index_tuple_Jn(data, k))
                   for k in range(1, analytic_from + 1))
    threshold = analytic_from + 1
    for v in reversed(checks):
        if v.kind != NONZERO:
            break
        threshold = v.n
    if threshold > analytic_from:
        # the analytic bound covers analytic_from itself, so a failure there is a contradiction
        return Certificate(None, analytic_from, checks,
                           f"exact check failed at n={analytic_from} where the valuation bound applies")
    return Certificate(threshold, analytic_from, checks)


def dominance_certificate(data: FrobeniusData, coleman: ColemanFamily, n: int) -> Verdict:
    """Verdict at level n from term valuations, with N_0 when the hypotheses allow one."""
    if n < 1:
        raise ConfigError("n must be at least 1")
    _check_shape(data, coleman)
    kinds = [classify_frobenius(data, i) for i in range(len(data.blocks))]
    if GENERAL in kinds:
        return Verdict(INDETERMINATE, n, diagnostic="Frobenius data is not block anti-diagonal modulo p")
    if coleman[index_tuple_Jn(data, n)].is_zero():
        return Verdict(INDETERMINATE, n, diagnostic="col_{J_n} is the zero series")
    cert = certificate(data, coleman)
    if cert.threshold is None:
        return Verdict(INDETERMINATE, n, diagnostic=cert.diagnostic)
    if n >= cert.threshold:
        at = cert.checks[n - 1] if n <= len(cert.checks) else _dominance_at(data, coleman, n, index_tuple_Jn(data, n))
        return Verdict(CERTIFIED, n, at.dominant, at.runner_up, cert.threshold, at.diagnostic, at.dominant_tuple)
    at = cert.checks[n - 1]
    return Verdict(at.kind, n, at.dominant, at.runner_up, cert.threshold, at.diagnostic, at.dominant_tuple)


def jn_valuation_identity(data: FrobeniusData, n: int) -> tuple[Valuation, Fraction]:
    """(val H_{I_0,J_n,n}(eps_n), g [F:Q] val(delta_n))."""
    hn = _hn_cached(data, n)
    m = minor_at(hn, index_tuple_I0(data), index_tuple_Jn(data, n))
    return m.valuation(), data.g * data.degree * delta(data.p, n).valuation().value


# --------------------------------------------------------------------------
# GL_2-type Frobenius


def gl2_frobenius(p: int, a, b, f: int, precision: int = DEFAULT_PRECISION) -> list[list[PadicNumber]]:
    """[[0, b I_f], [I_f, a I_f]]: the matrix C for phi = [[0, b/p], [1, a/p]].

    Requires a in p Z_p and b a p-adic unit.
    """
    a = padic(p, a, precision)
    b = padic(p, b, precision)
    if f < 1:
        raise ValueError("f must be at least 1")
    if a.lower_bound() < 1:
        raise FrobeniusError(f"a must lie in pZ_p (valuation >= 1), got valuation {a.val()}")
    if not b.is_unit():
        raise FrobeniusError(f"b must be a p-adic unit, got valuation {b.val()}")
    zero = PadicNumber.zero(p, precision)
    one = PadicNumber.from_int(p, 1, precision)
    m = [[zero] * (2 * f) for _ in range(2 * f)]
    for i in range(f):
        m[i][f + i] = b
        m[f + i][i] = one
        m[f + i][f + i] = a
    return m


def gl2_frobenius_data(p: int, primes, precision: int = DEFAULT_PRECISION, label: str = "v") -> FrobeniusData:
    """One prime v of F = Q with C_v assembled from the primes of E above p.

    ``primes`` lists ``(a, b, f)`` per prime of E; the basis puts every omega
    first and every phi(omega) second, so g = sum of the f.
    """
    g = sum(f for _, _, f in primes)
    zero = PadicNumber.zero(p, precision)
    m = [[zero] * (2 * g) for _ in range(2 * g)]
    off = 0
    for a, b, f in primes:
        local = gl2_frobenius(p, a, b, f, precision)
        for i in range(2 * f):
            for j in range(2 * f):
                ri = off + i if i < f else g + off + i - f
                cj = off + j if j < f else g + off + j - f
                m[ri][cj] = local[i][j]
        off += f
    return FrobeniusData(p, g, (FrobeniusBlock(label, 1, m),))
