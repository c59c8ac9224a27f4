"""Command line front-end.

Every command reads a JSON configuration::

    {"p": 3, "precision": 20, "g": 1,
     "primes": [{"label": "v", "f": 1, "C": [[0, -1], [1, 0]]}],
     "coleman": [{"tuple": [[1]], "coefficients": [1]}, ...]
                or {"synthetic": {"seed": 1, "mu": 0, "lambda_max": 2}},
     "n_min": 1, "n_max": 3}

and writes a JSON (default) or text report.  Exit codes: 0 success or
certified, 1 partially verified (nonzero at every requested n but no
threshold), 2 indeterminate, 3 invariant falsified, 4 configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .criterion import (CERTIFIED, NONZERO, ColemanFamily, ConfigError, certificate, classify_frobenius,
                        dominance_certificate, gl2_frobenius_data, key_minors, key_sum,
                        synthetic_family, term_valuations)
from .iwasawa import IwasawaSeries, newton_invariants, weierstrass_valuation_check
from .logmat import (FrobeniusData, FrobeniusError, IndexTuple, LogMatrix, assemble_hn, det_cphi_valuation,
                     evaluate_hn, lower_half_vanishing_check)
from .padic import DEFAULT_PRECISION, NonUnitError, PadicNumber

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_INDETERMINATE = 2
EXIT_FALSIFIED = 3
EXIT_CONFIG = 4

MIN_PRECISION = 4


@dataclass
class RunConfig:
    command: str
    input: str | None
    output: str | None
    precision: int
    n_min: int
    n_max: int
    seed: int | None
    fmt: str
    verbose: bool = False

    def __post_init__(self):
        if self.precision < MIN_PRECISION:
            raise ConfigError(f"--precision must be at least {MIN_PRECISION}, got {self.precision}")
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ConfigError(f"empty n-range {self.n_min}..{self.n_max}")

    @property
    def levels(self) -> range:
        return range(self.n_min, self.n_max + 1)


# --------------------------------------------------------------------------
# documents


def dumps(doc) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(doc, key, path, kind=None, default=...):
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected an object")
    if key not in doc:
        if default is not ...:
            return default
        raise ConfigError(f"{path}.{key}: missing field")
    value = doc[key]
    if kind is not None and not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise ConfigError(f"{path}.{key}: expected {getattr(kind, '__name__', kind)}, got {value!r}")
    return value


def _number(x, path):
    if isinstance(x, bool):
        raise ConfigError(f"{path}: expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            raise ConfigError(f"{path}: cannot parse {x!r} as a rational number") from None
    raise ConfigError(f"{path}: expected an integer or a fraction string, got {x!r}")


def parse_frobenius(doc: dict, precision: int) -> FrobeniusData:
    p = _field(doc, "p", "$", int)
    g = _field(doc, "g", "$", int)
    primes = _field(doc, "primes", "$", list)
    if not primes:
        raise ConfigError("$.primes: at least one prime is required")
    blocks = []
    for i, entry in enumerate(primes):
        path = f"$.primes[{i}]"
        label = str(_field(entry, "label", path, default=f"v{i + 1}"))
        f = _field(entry, "f", path, int)
        rows = _field(entry, "C", path, list)
        k = 2 * g * f
        if len(rows) != k:
            raise ConfigError(f"{path}.C: expected {k} rows (2 g f), got {len(rows)}")
        mat = []
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != k:
                got = len(row) if isinstance(row, list) else type(row).__name__
                raise ConfigError(f"{path}.C[{r}]: expected {k} entries, got {got}")
            mat.append([_number(x, f"{path}.C[{r}][{c}]") for c, x in enumerate(row)])
        blocks.append((label, f, mat))
    try:
        return FrobeniusData.from_matrices(p, g, blocks, precision)
    except FrobeniusError as exc:
        raise ConfigError(f"C_v must lie in GL_(2gf_v)(Z_p): {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def frobenius_to_json(data: FrobeniusData) -> dict:
    """Configuration fragment for ``data``; entries are integer residues."""
    return {
        "p": data.p,
        "g": data.g,
        "precision": data.precision,
        "primes": [{"label": b.label, "f": b.f,
                    "C": [[_entry_json(x) for x in row] for row in b.C]} for b in data.blocks],
    }


def _entry_json(x: PadicNumber):
    if x.is_exact_zero:
        return 0
    r = x.residue()
    # symmetric residue keeps small negative entries readable
    m = x.p ** x.precision
    return r - m if r > m // 2 else r


def _tuple_from_json(raw, path) -> IndexTuple:
    if not isinstance(raw, list) or not all(isinstance(part, list) for part in raw):
        raise ConfigError(f"{path}: expected a list of index lists")
    return IndexTuple(tuple(tuple(int(i) for i in part) for part in raw))


def parse_coleman(doc: dict, data: FrobeniusData, precision: int, seed: int | None) -> ColemanFamily:
    raw = _field(doc, "coleman", "$")
    if isinstance(raw, dict):
        params = dict(_field(raw, "synthetic", "$.coleman", dict))
        if seed is not None:
            params["seed"] = seed
        return synthetic_family(data, params, precision)
    if not isinstance(raw, list):
        raise ConfigError("$.coleman: expected a list of entries or a synthetic block")
    entries = {}
    for i, e in enumerate(raw):
        path = f"$.coleman[{i}]"
        t = _tuple_from_json(_field(e, "tuple", path), path + ".tuple")
        coeffs = [_number(x, f"{path}.coefficients[{k}]")
                  for k, x in enumerate(_field(e, "coefficients", path, list))]
        trunc = _field(e, "truncation", path, default=None)
        if t in entries:
            raise ConfigError(f"{path}: duplicate tuple {t}")
        entries[t] = IwasawaSeries.from_coefficients(data.p, coeffs, precision, trunc)
    return ColemanFamily.build(data, entries)


# --------------------------------------------------------------------------
# commands


def _meta(cfg: RunConfig, data: FrobeniusData) -> dict:
    return {"command": cfg.command, "p": data.p, "g": data.g, "precision": cfg.precision,
            "primes": data.labels, "version": __version__}


def cmd_build_h(cfg, doc):
    data = parse_frobenius(doc, cfg.precision)
    mats = [assemble_hn(data, n).to_json() for n in cfg.levels]
    return {**_meta(cfg, data), "kind": "matrices", "matrices": mats}, EXIT_OK


def cmd_eval(cfg, doc):
    data = parse_frobenius(doc, cfg.precision)
    mats = [evaluate_hn(data, n).to_json() for n in cfg.levels]
    return {**_meta(cfg, data), "kind": "matrices", "matrices": mats}, EXIT_OK


def cmd_minors(cfg, doc):
    data = parse_frobenius(doc, cfg.precision)
    rows = []
    status = EXIT_OK
    for n in cfg.levels:
        checks = [lower_half_vanishing_check(data, i, n, symbolic=False) for i in range(len(data.blocks))]
        if not all(c.passed for c in checks):
            status = EXIT_FALSIFIED
        minors = key_minors(data, n)
        rows.append({
            "n": n,
            "lower_half_zero": all(c.passed for c in checks),
            "minors": [{"tuple": j.to_json(), "valuation": m.valuation().to_json(), "value": m.to_json()}
                       for j, m in minors.items()],
        })
    return {**_meta(cfg, data), "kind": "minors", "rows": "I_0", "levels": rows}, status


def _coleman_meta(fam: ColemanFamily) -> dict:
    return {"provenance": fam.provenance, "seed": fam.seed,
            "missing": [t.to_json() for t in fam.missing]}


def cmd_key_sum(cfg, doc):
    data = parse_frobenius(doc, cfg.precision)
    fam = parse_coleman(doc, data, cfg.precision, cfg.seed)
    levels = []
    worst = EXIT_OK
    for n in cfg.levels:
        s, v = key_sum(data, fam, n)
        levels.append({"n": n, "sum": s.to_json(), "valuation": s.valuation().to_json(), "verdict": v.to_json()})
        if v.kind != NONZERO:
            worst = EXIT_INDETERMINATE
    return {**_meta(cfg, data), "kind": "key-sum", "coleman": _coleman_meta(fam), "levels": levels}, worst


def cmd_certify(cfg, doc):
    data = parse_frobenius(doc, cfg.precision)
    fam = parse_coleman(doc, data, cfg.precision, cfg.seed)
    classes = {data.blocks[i].label: classify_frobenius(data, i) for i in range(len(data.blocks))}
    structural = {b.label: det_cphi_valuation(data, i).to_json() for i, b in enumerate(data.blocks)}
    falsified = [label for i, label in enumerate(data.labels)
                 if det_cphi_valuation(data, i) != -data.half(i)]
    table = []
    direct_ok = True
    for n in cfg.levels:
        _, direct = key_sum(data, fam, n)
        verdict = dominance_certificate(data, fam, n)
        if verdict.nonzero and direct.kind != NONZERO:
            falsified.append(f"certificate claims nonzero at n={n} but the direct sum is {direct.kind}")
        direct_ok = direct_ok and direct.kind == NONZERO
        table.append({
            "n": n,
            "terms": [t.to_json() for t in term_valuations(data, fam, n)],
            "sum_valuation": direct.dominant.to_json(),
            "direct": direct.kind,
            "verdict": verdict.to_json(),
        })
    cert = certificate(data, fam)
    if falsified:
        status, overall = EXIT_FALSIFIED, "falsified"
    elif cert.threshold is not None:
        status, overall = EXIT_OK, CERTIFIED
    elif direct_ok and "general" in classes.values():
        # no certificate is attempted for general data, so per-n verdicts are all there is
        status, overall = EXIT_PARTIAL, "partially-verified"
    else:
        status, overall = EXIT_INDETERMINATE, "indeterminate"
    report = {
        **_meta(cfg, data),
        "kind": "certificate",
        "classification": classes,
        "det_cphi_valuation": structural,
        "coleman": _coleman_meta(fam),
        "invariants": [{"tuple": t.to_json(), **m.to_json()} for t, m in fam.invariants().items()],
        "levels": table,
        "overall": overall,
        "threshold": cert.threshold,
        "diagnostic": "; ".join(map(str, falsified)) or cert.diagnostic,
    }
    return report, status


def cmd_weierstrass(cfg, doc):
    p = _field(doc, "p", "$", int)
    raw = _field(doc, "series", "$", list, default=None)
    items = []
    if raw is not None:
        for i, e in enumerate(raw):
            path = f"$.series[{i}]"
            coeffs = [_number(x, f"{path}.coefficients[{k}]")
                      for k, x in enumerate(_field(e, "coefficients", path, list))]
            name = str(_field(e, "name", path, default=str(i)))
            items.append((name, IwasawaSeries.from_coefficients(p, coeffs, cfg.precision,
                                                                 _field(e, "truncation", path, default=None))))
    else:
        data = parse_frobenius(doc, cfg.precision)
        fam = parse_coleman(doc, data, cfg.precision, cfg.seed)
        items = [(str(t), s) for t, s in fam.series.items() if not s.is_zero()]
    out = []
    status = EXIT_OK
    for name, f in items:
        reports = [weierstrass_valuation_check(f, n) for n in cfg.levels]
        if any(r.holds is False for r in reports):
            status = EXIT_FALSIFIED
        elif status == EXIT_OK and not newton_invariants(f).certified:
            status = EXIT_INDETERMINATE
        out.append({"name": name, **newton_invariants(f).to_json(), "checks": [r.to_json() for r in reports]})
    return {"command": cfg.command, "p": p, "precision": cfg.precision, "version": __version__,
            "kind": "weierstrass", "series": out}, status


def _prime_arg(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:f, got {text!r}")
    try:
        return Fraction(parts[0]), Fraction(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_gl2(cfg, args):
    try:
        data = gl2_frobenius_data(args.p, args.prime, cfg.precision, args.label)
    except (FrobeniusError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    doc = frobenius_to_json(data)
    doc["classification"] = classify_frobenius(data, 0)
    return doc, EXIT_OK


COMMANDS = {
    "build-h": cmd_build_h,
    "eval": cmd_eval,
    "minors": cmd_minors,
    "key-sum": cmd_key_sum,
    "certify": cmd_certify,
    "weierstrass": cmd_weierstrass,
}


def reserialize(text: str) -> str:
    """Parse an emitted JSON document back into objects and dump it again.

    Matrix documents go through :class:`LogMatrix` and Frobenius documents
    through :class:`FrobeniusData`; other reports are plain data.
    """
    doc = loads(text)
    if doc.get("kind") == "matrices":
        doc = {**doc, "matrices": [LogMatrix.from_json(m).to_json() for m in doc["matrices"]]}
    elif "primes" in doc and isinstance(doc["primes"][0], dict):
        rebuilt = frobenius_to_json(parse_frobenius(doc, doc["precision"]))
        doc = {**doc, **rebuilt}
    return dumps(doc)


# --------------------------------------------------------------------------
# text rendering


def render_text(doc: dict) -> str:
    kind = doc.get("kind")
    lines = [f"# {doc.get('command') or 'frobenius'}  p={doc.get('p')}  precision={doc.get('precision')}"]
    if kind == "matrices":
        for m in doc["matrices"]:
            lines.append(f"H_{m['level']} ({m['kind']})")
            for b in m["blocks"]:
                lines.append(f"  prime {b['label']}, size {b['size']}")
                for row in b["entries"]:
                    lines.append("    " + "  ".join(_short(x) for x in row))
    elif kind == "minors":
        for lvl in doc["levels"]:
            lines.append(f"n={lvl['n']}  lower half zero: {lvl['lower_half_zero']}")
            for m in lvl["minors"]:
                lines.append(f"  J={_tuple_text(m['tuple'])}  val={m['valuation']}")
    elif kind == "key-sum":
        for lvl in doc["levels"]:
            lines.append(f"n={lvl['n']}  val(S)={lvl['valuation']}  {lvl['verdict']['kind']}")
    elif kind == "certificate":
        lines.append("classification: " + ", ".join(f"{k}={v}" for k, v in doc["classification"].items()))
        lines.append(f"coleman: {doc['coleman']['provenance']} (seed {doc['coleman']['seed']})")
        for lvl in doc["levels"]:
            v = lvl["verdict"]
            lines.append(f"n={lvl['n']}  val(S)={lvl['sum_valuation']}  direct={lvl['direct']}  "
                         f"certificate={v['kind']}  dominant={v['dominant']}  runner-up={v['runner_up']}")
            for t in lvl["terms"]:
                lines.append(f"    J={_tuple_text(t['tuple'])}  minor={t['minor']}  col={t['coleman']}  "
                             f"total={t['total']}")
        lines.append(f"overall: {doc['overall']}" + (f"  N0={doc['threshold']}" if doc["threshold"] else ""))
        if doc["diagnostic"]:
            lines.append(f"diagnostic: {doc['diagnostic']}")
    elif kind == "weierstrass":
        for s in doc["series"]:
            lines.append(f"{s['name']}: mu={s['mu']} lambda={s['lambda']} certified={s['certified']}")
            for c in s["checks"]:
                tail = c["diagnostic"] or f"observed {c['observed']}, predicted {c['predicted']}"
                lines.append(f"    n={c['n']}: {tail}")
    else:
        lines.append(dumps(doc).rstrip())
    return "\n".join(lines) + "\n"


def _short(x: dict) -> str:
    coeffs = x.get("eps_coefficients", x.get("coefficients", []))
    if not coeffs:
        return "0"
    head = ",".join(coeffs[:3]) + (",..." if len(coeffs) > 3 else "")
    return f"p^{x['shift']}[{head}]"


def _tuple_text(t) -> str:
    return "(" + ", ".join("{" + ",".join(map(str, part)) + "}" for part in t) + ")"


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boundedrank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--precision", type=int, default=None,
                        help=f"p-adic working precision (default: config value or {DEFAULT_PRECISION})")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--verbose", "-v", action="store_true")
    levels = argparse.ArgumentParser(add_help=False)
    levels.add_argument("--input", "-i", required=True, help="JSON configuration file ('-' for stdin)")
    levels.add_argument("--n-min", type=int, default=None)
    levels.add_argument("--n-max", type=int, default=None)
    levels.add_argument("--seed", type=int, default=None, help="overrides the synthetic Coleman seed")

    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "build-h": "symbolic H_n over Z_p[X] for each n",
        "eval": "H_n evaluated at eps_n",
        "minors": "(I_0, J)-minors of H_n(eps_n) and the lower-half check",
        "key-sum": "the key sum S_n evaluated directly",
        "certify": "valuation dominance certificate with threshold N_0",
        "weierstrass": "mu/lambda invariants and the evaluation identity",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common, levels], help=text)
    gl2 = sub.add_parser("gl2", parents=[common], help="Frobenius data of GL_2 type from (a, b, f)")
    gl2.add_argument("--p", type=int, required=True)
    gl2.add_argument("--prime", type=_prime_arg, action="append", required=True,
                     metavar="A:B:F", help="a in pZ_p, b a unit, f the local degree; repeat per prime")
    gl2.add_argument("--label", default="v")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gl2":
            cfg = RunConfig("gl2", None, args.output, args.precision or DEFAULT_PRECISION, 1, 1, None, args.format)
            doc, status = cmd_gl2(cfg, args)
        else:
            text = sys.stdin.read() if args.input == "-" else _read(args.input)
            conf = loads(text, args.input)
            if not isinstance(conf, dict):
                raise ConfigError(f"{args.input}: top level must be an object")
            precision = args.precision or _field(conf, "precision", "$", int, DEFAULT_PRECISION)
            n_min = args.n_min if args.n_min is not None else _field(conf, "n_min", "$", int, 1)
            n_max = args.n_max if args.n_max is not None else _field(conf, "n_max", "$", int, n_min)
            cfg = RunConfig(args.command, args.input, args.output, precision, n_min, n_max,
                            args.seed, args.format, args.verbose)
            doc, status = COMMANDS[args.command](cfg, conf)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonUnitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = render_text(doc) if args.format == "text" else dumps(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return status


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
