"""Command-line front end: ``germ resonances|linearize|brjuno|majorant|check-form FILE``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .cyclotomic import CyclotomicNumber
from .io import GermFormatError, load_document
from .linearizer import check_osculating_form, poincare_dulac, solve_linearization
from .majorant import (
    alpha_sequence,
    brjuno_growth_bound,
    check_counting_bound,
    check_domination,
    delta_table,
    growth_diagnostic,
    normalize_germ,
    theta_of,
)
from .series import coeff_norm, monomials
from .spectrum import brjuno_sum, enumerate_resonances, omega_tables, parse_sequence, power_law_fit

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2

# refuse omega tables that would scan more monomials than this
MAX_OMEGA_MONOMIALS = 2_000_000


class UsageError(ValueError):
    """Flags or input incompatible with the requested computation."""


def fmt_index(k) -> str:
    return "(" + ",".join(str(e) for e in k) + ")"


def encode_value(v) -> dict:
    """Coefficient as JSON: exact string when available plus float parts."""
    z = complex(v)
    out = {"re": z.real, "im": z.imag}
    if isinstance(v, CyclotomicNumber):
        out["exact"] = str(v)
    return out


def render_value(v) -> str:
    if isinstance(v, CyclotomicNumber):
        return str(v)
    z = complex(v)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def series_rows(vec):
    """(k, j, value) over a SeriesVector in graded-lex order, j 0-based."""
    for k in vec.support():
        for j, c in enumerate(vec):
            v = c.coeff(k)
            if v:
                yield tuple(k), j, v


def write_csv(path, n, rows, witness_names=()):
    header = [f"k_{i + 1}" for i in range(n)] + ["value"] + list(witness_names)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, value, *wit in rows:
            w.writerow(list(k) + [repr(value) if isinstance(value, float) else value] + wit)


def _load(path, degree=None):
    doc = load_document(path)
    germ = doc.to_germ()
    if degree is not None:
        if degree < 1:
            raise UsageError("--degree must be at least 1")
        germ = germ.truncated(degree)
    return doc, germ


# subcommands --------------------------------------------------------------

def cmd_resonances(args):
    _, germ = _load(args.file)
    m = args.degree if args.degree is not None else germ.trunc
    if m < 2:
        raise UsageError("--degree must be at least 2")
    rep = enumerate_resonances(germ.spectrum, m)
    out = {"command": "resonances", **rep.to_dict(),
           "note": f"classification covers 2 <= |k| <= {m} only"}
    if args.report == "text":
        lines = [f"resonances up to degree {m}", f"verdict: {rep.verdict}"]
        if rep.witness:
            lines.append(f"witness: index {fmt_index(rep.witness[0])}, coordinate {rep.witness[1] + 1}")
        for j, ks in enumerate(rep.resonances):
            lines.append(f"Res_{j + 1}: " + (" ".join(fmt_index(k) for k in ks) or "none"))
        lines.append("K1~: " + (" ".join(fmt_index(k) for k in rep.K1_tilde) or "none"))
        lines.append("K2~: " + (" ".join(fmt_index(k) for k in rep.K2_tilde) or "none"))
        lines += [f"warning: {w}" for w in rep.warnings]
        return out, "\n".join(lines)
    return out, None


def _linearize_block(germ, mode):
    N = germ.trunc
    if mode == "normal-form":
        nf = poincare_dulac(germ)
        return {
            "mode": "normal-form",
            "status": "linear" if nf.is_linear else "resonant-terms-retained",
            "up_to_degree": N,
            "g": [{"coord": j + 1, "index": list(k), **encode_value(v)}
                  for k, j, v in series_rows(nf.g.nonlinear_part())],
            "phi": [{"coord": j + 1, "index": list(k), **encode_value(v)}
                    for k, j, v in series_rows(nf.phi.nonlinear_part())],
            "resonant_support": [{"index": list(k), "coord": j + 1} for k, j in nf.resonant_support],
            "support_certified_resonant": nf.certificate,
            "residual": nf.residual,
            "warnings": nf.warnings,
        }, nf
    res = solve_linearization(germ)
    prov_counts = {}
    for tag in res.provenance.values():
        prov_counts[tag] = prov_counts.get(tag, 0) + 1
    return {
        "mode": "linearize",
        "status": res.status,
        "up_to_degree": N,
        "psi": [{"coord": j + 1, "index": list(k), **encode_value(v),
                 "provenance": res.provenance.get((k, j), "identity")}
                for k, j, v in series_rows(res.psi.nonlinear_part())],
        "provenance_counts": dict(sorted(prov_counts.items())),
        "off_policy": [{"index": list(k), "coord": j + 1} for k, j in res.off_policy],
        "obstructions": [{"index": list(o.index), "coord": o.coord + 1, **encode_value(o.coefficient)}
                         for o in res.obstructions],
        "residual": res.residual,
        "warnings": res.warnings,
    }, res


def cmd_linearize(args):
    _, germ = _load(args.file, args.degree)
    if germ.trunc < 2:
        raise UsageError("truncation degree must be at least 2")
    block, res = _linearize_block(germ, args.mode)
    out = {"command": "linearize", **block,
           "note": f"formal results hold up to degree {germ.trunc}"}
    if args.diagnostics:
        out["diagnostics"] = _diagnostics(germ, args.mode)
    if args.csv:
        vec = res.psi if args.mode == "linearize" else res.g
        rows = [(tuple(k), coeff_norm(vec.coeff(k))) for k in vec.support() if sum(k) >= 2]
        write_csv(args.csv, germ.n, rows)
    if args.report == "text":
        lines = [f"{args.mode}: status {block['status']} (up to degree {germ.trunc})"]
        key = "psi" if args.mode == "linearize" else "g"
        vec = res.psi if args.mode == "linearize" else res.g
        lines.append(f"{key} nonlinear coefficients:")
        for k, j, v in series_rows(vec.nonlinear_part()):
            lines.append(f"  coord {j + 1} {fmt_index(k)}: {render_value(v)}")
        if args.mode == "linearize":
            for o in res.obstructions:
                lines.append(f"obstruction: index {fmt_index(o.index)}, coordinate {o.coord + 1}, "
                             f"coefficient {render_value(o.coefficient)}")
        lines.append(f"residual: {block['residual']!r}")
        lines += [f"warning: {w}" for w in block["warnings"]]
        if args.diagnostics:
            lines.append("diagnostics: " + json.dumps(out["diagnostics"], sort_keys=True))
        return out, "\n".join(lines)
    return out, None


def _diagnostics(germ, mode):
    normalized, Q = normalize_germ(germ)
    raw = solve_linearization(germ)
    norm = solve_linearization(normalized)
    diag = {
        "scale_Q": str(Q) if germ.exact else Q,
        "raw_growth": growth_diagnostic(raw).to_dict(),
        "normalized_growth": growth_diagnostic(norm).to_dict(),
    }
    if norm.obstructions:
        diag["domination"] = "skipped: linearization is obstructed"
        return diag
    try:
        table = delta_table(germ.spectrum, germ.trunc)
    except ValueError as exc:
        diag["domination"] = f"skipped: {exc}"
        return diag
    dom = check_domination(norm, table)
    diag["domination"] = {
        "holds": dom.holds,
        "checked": dom.checked,
        "max_ratio": dom.max_ratio,
        "violations": [{**v, "k": v["k"]} for v in dom.violations[:10]],
    }
    return diag


def cmd_brjuno(args):
    _, germ = _load(args.file)
    spec = germ.spectrum
    m_max = args.degree if args.degree is not None else germ.trunc
    if m_max < 2:
        raise UsageError("table range must be at least 2 (set --degree or the truncation)")
    size = sum(math.comb(d + spec.n - 1, spec.n - 1) for d in range(2, m_max + 1))
    if size * spec.n > MAX_OMEGA_MONOMIALS:
        raise UsageError(f"omega table to degree {m_max} needs {size} monomials; lower --degree")
    if args.horizon is None:
        seq = parse_sequence(args.sequence, 64) if args.sequence != "all" else list(range(1, m_max + 2))
        horizon = max((v for v in range(len(seq) - 1) if seq[v + 1] <= m_max), default=None)
        if horizon is None:
            raise UsageError("the table is too short for even one term of the sequence")
    else:
        horizon = args.horizon
    table = omega_tables(spec, m_max)
    try:
        est = brjuno_sum(table, args.which, args.sequence, horizon, args.threshold)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = []
    for m, val, lo, k, j in table.rows(args.which):
        rows.append({"m": m, "omega": val, "log_omega": lo, "witness_index": list(k),
                     "witness_coord": j + 1})
    out = {"command": "brjuno", "table": args.which, "m_max": m_max, **est.to_dict(),
           "omega": rows}
    if m_max >= 3:
        C, beta = power_law_fit(table, args.which)
        out["power_law_fit"] = {"C": C, "exponent": beta,
                                "model": "omega(m) ~ C m^(-exponent), least squares in log-log"}
    if args.csv:
        write_csv(args.csv, spec.n,
                  [(r["witness_index"], r["omega"], r["m"], r["witness_coord"]) for r in rows],
                  ("m", "coord"))
    if args.report == "text":
        lines = [f"{args.which} table to m = {m_max}, sequence {est.sequence}",
                 f"verdict: {est.verdict} ({out['verdict_rule']})"]
        for v, (t, ps) in enumerate(zip(est.terms, est.partial_sums)):
            lines.append(f"  nu={v}: term {t:.6g}, partial sum {ps:.6g}")
        return out, "\n".join(lines)
    return out, None


def cmd_majorant(args):
    _, germ = _load(args.file, args.degree)
    spec = germ.spectrum
    N = germ.trunc
    if N < 2:
        raise UsageError("degree must be at least 2")
    try:
        table = delta_table(spec, N)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    omega = omega_tables(spec, N)
    theta = theta_of(spec)
    counting = check_counting_bound(table, range(2, N + 1), theta, omega)
    growth = brjuno_growth_bound(table, omega, "pow2", theta)
    delta_rows = []
    for k in (tuple(k) for d in range(2, N + 1) for k in monomials(spec.n, d)):
        e = table.entries.get(k)
        if e is None:
            continue
        dd = table.divisors[k]
        delta_rows.append({"index": list(k), "log_delta": e.log_delta,
                           "epsilon": dd.epsilon, "i_k": dd.index + 1,
                           "parts": [list(p) for p in e.parts],
                           "factors": [list(l) for l in e.factors]})
    out = {
        "command": "majorant",
        "up_to_degree": N,
        "alpha": alpha_sequence(N),
        "theta": theta.theta,
        "advisory": theta.advisory,
        "delta": delta_rows,
        "K2_absent": [list(k) for d in range(2, N + 1) for k in monomials(spec.n, d)
                      if spec.in_K2(k)],
        "counting": counting.to_dict(),
        "growth_bound": growth.to_dict(),
    }
    if args.csv:
        write_csv(args.csv, spec.n,
                  [(r["index"], r["log_delta"], r["i_k"], r["epsilon"]) for r in delta_rows],
                  ("i_k", "epsilon"))
    if args.report == "text":
        lines = [f"alpha: {', '.join(str(a) for a in out['alpha'])}",
                 f"theta: {theta.theta:.6g}" + (f" ({theta.advisory})" if theta.advisory else "")]
        for r in delta_rows:
            lines.append(f"  delta{fmt_index(r['index'])}: log {r['log_delta']:.6g}, "
                         f"i_k {r['i_k']}, factors {' '.join(fmt_index(l) for l in r['factors'])}")
        lines.append(f"counting bound: {out['counting']['counting_bound']}")
        lines.append(f"growth bound: {growth.bound:.6g} vs sup {growth.sup_log_delta:.6g} "
                     f"({'holds' if growth.holds else 'fails'})")
        return out, "\n".join(lines)
    return out, None


def cmd_check_form(args):
    _, germ = _load(args.file)
    rep = check_osculating_form(germ)
    out = {"command": "check-form", **rep.to_dict()}
    if args.report == "text":
        d = rep.to_dict()
        lines = [f"{key}: {'yes' if d[key] else 'no'}"
                 for key in ("invariant", "osculating", "restriction-linear")]
        lines.append(f"(read off the tail up to degree {rep.trunc})")
        return out, "\n".join(lines)
    return out, None


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="germ",
        description="Linearization, normal forms and small-divisor diagnostics for "
                    "holomorphic germs with diagonal linear part.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, csv_ok=True):
        sp.add_argument("file", help="germ document (JSON)")
        sp.add_argument("--report", choices=("json", "text"), default="json")
        if csv_ok:
            sp.add_argument("--csv", metavar="PATH", help="also write the main table as CSV")

    sp = sub.add_parser("resonances", help="classify resonances up to a degree")
    common(sp, csv_ok=False)
    sp.add_argument("--degree", type=int, help="degree bound m (default: truncation)")
    sp.set_defaults(func=cmd_resonances)

    sp = sub.add_parser("linearize", help="formal linearization or Poincare-Dulac normal form")
    common(sp)
    sp.add_argument("--degree", type=int, help="truncation degree N (default: from file)")
    sp.add_argument("--mode", choices=("linearize", "normal-form"), default="linearize")
    sp.add_argument("--diagnostics", action="store_true",
                    help="normalize the germ and add growth and domination checks")
    sp.set_defaults(func=cmd_linearize)

    sp = sub.add_parser("brjuno", help="omega tables and Brjuno-type sums")
    common(sp)
    sp.add_argument("--which", choices=("partial", "reduced"), default="reduced")
    sp.add_argument("--sequence", default="pow2", help="pow2, all, or list:1,2,5,...")
    sp.add_argument("--horizon", type=int, help="last term index (default: as far as the table allows)")
    sp.add_argument("--threshold", type=float, default=1.0,
                    help="per-term level for the diverging-at-horizon heuristic")
    sp.add_argument("--degree", type=int, help="table range m_max (default: truncation)")
    sp.set_defaults(func=cmd_brjuno)

    sp = sub.add_parser("majorant", help="alpha and delta majorants with counting checks")
    common(sp)
    sp.add_argument("--degree", type=int, help="table degree N (default: truncation)")
    sp.set_defaults(func=cmd_majorant)

    sp = sub.add_parser("check-form", help="osculating coordinate-form conditions")
    common(sp, csv_ok=False)
    sp.set_defaults(func=cmd_check_form)
    return p


def _clean(o):
    # JSON has no infinities; emit them as strings
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, text = args.func(args)
    except (GermFormatError, UsageError) as exc:
        print(f"germ: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"germ: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"germ: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if text is not None:
        print(text)
    else:
        print(json.dumps(_clean(out), indent=2, sort_keys=False))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
