"""Batch front end: one JSON problem document in, one JSON report out.

    twistsheaf weightfilt --input doc.json
    twistsheaf run --input report_or_doc.json     # dispatch on "command"
    twistsheaf corpus-verify

Every report embeds the normalized input (defaults filled in, flags folded
into "options"), so feeding a report's "input" back reproduces it.
Failures print an error record and exit nonzero:

    1  validation error raised by a computational module
    2  malformed document or schema violation
    3  symbolic and numeric oracles disagree
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import cks, l2, resolution, schema, ssheaf
from .errors import SchemaError, TwistSheafError, UnsupportedGerm
from .exact import RatMatrix, rat
from .prolongation import (
    LocalMonodromy, deligne_basis, monodromy_consistency, residue_spectrum,
)
from .weights import check_weight_axioms, relative_weight_sequence, weight_filtration

DEFAULT_OPTIONS = {
    "oracle": "symbolic",
    "degree_bound": 12,
    "samples": 1000,
    "seed": 0,
    "tolerance": [1, 100],
}

EXIT_MODULE, EXIT_SCHEMA, EXIT_DISAGREE = 1, 2, 3


class OracleDisagreement(TwistSheafError):
    module = "cli"


# ---------------------------------------------------------------------------
# encoding


def enc(x: Fraction | int) -> list[int] | int:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else [x.numerator, x.denominator]


def enc_vec(v) -> list:
    return [enc(x) for x in v]


def enc_float(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def dec(x) -> Fraction:
    return rat(x)


def dec_matrix(rows) -> RatMatrix:
    return RatMatrix.from_rows([[dec(x) for x in r] for r in rows])


def dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# payload readers


def read_monodromy(p: dict) -> LocalMonodromy:
    dim = p["dim"]
    blocks = [([dec(a) for a in b["alpha"]], [[dec(x) for x in v] for v in b["vectors"]]) for b in p["blocks"]]
    nil = [dec_matrix(N) for N in p["nilpotents"]] if "nilpotents" in p else None
    return LocalMonodromy.build(dim, blocks, nil)


def read_hodge(p: dict) -> ssheaf.HodgeFiberData:
    return ssheaf.HodgeFiberData.build(p["weight"], {(a, b): d for a, b, d in p["dims"]}, p["selector"])


def read_divisor(items: list) -> resolution.QDivisorGerm:
    pairs = []
    for item in items:
        curve = item["curve"]
        if "catalog" in curve:
            params = [dec(x) for x in curve.get("params", [])]
            params = [int(x) if x.denominator == 1 else x for x in params]
            try:
                germ = resolution.catalog_germ(curve["catalog"], *params)
            except TypeError as exc:
                raise UnsupportedGerm(
                    f"wrong parameters {params} for catalog curve {curve['catalog']!r}",
                    field="payload/divisor/curve/params",
                ) from exc
        else:
            germ = resolution.PlaneCurveGerm.parse(curve["polynomial"])
        pairs.append((germ, dec(item["coeff"])))
    return resolution.QDivisorGerm.of(pairs)


def read_center(c: dict) -> resolution.Center:
    if "meet" in c:
        return resolution.Center.meet(*c["meet"])
    return resolution.Center.free(c["free"], dec(c["lam"]))


def read_section(p: dict) -> l2.LaurentSection:
    terms: dict = {}
    for t in p["terms"]:
        key = tuple(t["exps"])
        cur = terms.setdefault(key, [Fraction(0)] * p["rank"])
        if len(t["coeffs"]) != p["rank"]:
            raise SchemaError("coefficient vector length differs from rank", field="payload/section/terms")
        for j, c in enumerate(t["coeffs"]):
            cur[j] += dec(c)
    return l2.LaurentSection.from_dict(terms, p["rank"], p["n_boundary"], p.get("n_interior", 0))


# ---------------------------------------------------------------------------
# commands


def _filtration_json(W) -> dict:
    return {
        "levels": [
            {"l": l, "dim": W(l).dim, "basis": [enc_vec(v) for v in W(l).basis]}
            for l in range(W.lo, W.hi + 1)
        ],
        "graded": {str(l): d for l, d in sorted(W.jumps().items())},
    }


def cmd_weightfilt(p: dict, opt: dict) -> dict:
    Ns = [dec_matrix(N) for N in p["nilpotents"]]
    if len(Ns) == 1:
        W = weight_filtration(Ns[0])
        return {"filtrations": [dict(_filtration_json(W), axioms=check_weight_axioms(Ns[0], W))]}
    Ws = relative_weight_sequence(Ns)
    out = []
    total = None
    for N, W in zip(Ns, Ws):
        total = N if total is None else total + N
        out.append(dict(_filtration_json(W), axioms=check_weight_axioms(total, W)))
    return {"filtrations": out, "sums": "W(N1), W(N1+N2), ..."}


def _generator_json(g) -> dict:
    return {"label": g.label, "vector": enc_vec(g.vector), "beta": enc_vec(g.beta), "block": g.block}


def cmd_prolong(p: dict, opt: dict) -> dict:
    M = read_monodromy(p["monodromy"])
    B = deligne_basis(M, [dec(x) for x in p["a"]])
    return {
        "generators": [_generator_json(g) for g in B.generators],
        "betas": [enc_vec(g.beta) for g in B.generators],
        "residue_spectra": [enc_vec(residue_spectrum(B, i)) for i in range(M.n)],
        "in_window": B.in_window(),
        "single_valued": monodromy_consistency(B, M),
    }


def cmd_ssheaf(p: dict, opt: dict) -> dict:
    M = read_monodromy(p["monodromy"])
    H = read_hodge(p["hodge"])
    T = ssheaf.TwistSpec.of([dec(x) for x in p["twist"]["r"]], p["twist"].get("m", 1))
    B = ssheaf.r_lattice(M, H)
    rows = ssheaf.generator_report(B, T, M)
    for row in rows:
        row["vector"] = enc_vec(dec(x) for x in row["vector"])
        row["beta"] = enc_vec(dec(x) for x in row["beta"])
        row["exponent"] = enc_vec(dec(x) for x in row["exponent"])
    return {
        "generators": rows,
        "shifts": ssheaf.twisted_exponents(B, T),
        "limit_positivity": ssheaf.validate_limit_positivity(M, H),
        "assumption": ssheaf.ORTHOGONALITY_NOTE,
    }


def _numeric_1d(v: int, a: Fraction) -> dict:
    res = l2.numeric_integral(v, a)
    return {"status": res.status.value, "value": enc_float(res.value) if res.value is not None else None,
            "cutoffs": len(res.partials)}


def cmd_l2(p: dict, opt: dict) -> dict:
    mode = opt["oracle"]
    out: dict[str, Any] = {"oracle": mode}
    if "v" in p:
        v, a = p["v"], dec(p["a"])
        symbolic = l2.is_integrable_1d(v, a)
        numeric = _numeric_1d(v, a) if mode != "symbolic" else None
        boundary = v + a == -1
    else:
        f = read_section(p["section"])
        W = l2.WeightProfile.of([[dec(x) for x in r] for r in p["weights"]])
        symbolic = l2.membership(f, W)
        numeric = None
        if mode != "symbolic":
            res = l2.numeric_membership(f, W)
            numeric = {"status": res["status"].value, "axes": [s.value for s in res["axes"]]}
        boundary = None
    if mode != "numeric":
        out["symbolic"] = symbolic
    if numeric is not None:
        out["numeric"] = numeric
    if mode == "both":
        status = numeric["status"]
        if status == "INDETERMINATE":
            # log-divergent boundary: the symbolic side rules it out
            agree = not symbolic
            out["agreement"] = "indeterminate-boundary" if agree else "disagree"
        else:
            agree = (status == "CONVERGENT") == symbolic
            out["agreement"] = "agree" if agree else "disagree"
        if boundary is not None:
            out["boundary"] = boundary
        if not agree:
            raise OracleDisagreement(
                f"symbolic verdict {symbolic} but numeric trend {status}", field="payload"
            )
    return out


def cmd_cks_scan(p: dict, opt: dict) -> dict:
    model = cks.get_model(p["model"])
    eps = float(p.get("epsilon", 1.0))
    res = cks.cks_ratio_scan(model, p["vector"], eps, opt["samples"], opt["seed"])
    spread = res.max_ratio / res.min_ratio if res.min_ratio > 0 else math.inf
    return {
        "model": model.identifier,
        "levels": list(res.levels),
        "epsilon": eps,
        "samples": res.samples,
        "min_ratio": enc_float(res.min_ratio),
        "max_ratio": enc_float(res.max_ratio),
        "spread": enc_float(spread),
        "bounded": bool(spread <= 10),
    }


def cmd_nakano(p: dict, opt: dict) -> dict:
    model = cks.get_model(p["model"])
    step = float(p.get("step", 1e-3))
    res = cks.nakano_check(model, step=step, tolerance=float(dec(opt["tolerance"])))
    return {
        "model": model.identifier,
        "step": step,
        "points": res.points,
        "min_eigenvalue": enc_float(res.min_eigenvalue),
        "min_eigenvalue_extrapolated": enc_float(res.min_eigenvalue_extrapolated),
        "richardson_gap": enc_float(res.richardson_gap),
        "tolerance": opt["tolerance"],
    }


def _sequence_json(seq: resolution.BlowupSequence) -> dict:
    return {
        "blowups": len(seq),
        "branches": {
            name: {"ray": list(b.rho), "lam": enc(b.lam), "polynomial": str(b.polynomial)}
            for name, b in seq.branches
        },
        "tree": [
            dict(node, center=_center_json(node["center"])) for node in seq.tree()
        ],
        "ledger_verified": resolution.verify_ledger(seq),
    }


def _center_json(c: dict) -> dict:
    if "lam" in c:
        return {"free": c["free"], "lam": enc(Fraction(*c["lam"]))}
    return c


def cmd_resolve(p: dict, opt: dict) -> dict:
    A = read_divisor(p["divisor"])
    seq = resolution.log_resolve(A)
    return dict(_sequence_json(seq), snc=seq.resolves(A))


def _table_json(t: resolution.IdealTable) -> dict:
    return {
        "degree_bound": t.degree_bound,
        "conditions": [
            {
                "component": c.component,
                "kind": c.kind,
                "threshold": c.threshold,
                "order_of_A": enc(c.order_of_A),
                "discrepancy": c.discrepancy,
            }
            for c in t.conditions
        ],
        "generators": [list(m) for m in t.generators()],
        "unit": t.is_unit(),
        "size": len(t.monomials),
    }


def cmd_mult_ideal(p: dict, opt: dict) -> dict:
    A = read_divisor(p["divisor"])
    seq = resolution.log_resolve(A)
    for c in p.get("extra_blowups", []):
        seq = seq.blow_up(read_center(c))
    table = resolution.pushforward_ideal(seq, A, opt["degree_bound"])
    return {"sequence": _sequence_json(seq), "ideal": _table_json(table)}


def _grid(g) -> list[Fraction]:
    if isinstance(g, list):
        return [dec(x) for x in g]
    start, stop, step = dec(g["start"]), dec(g["stop"]), dec(g["step"])
    if step <= 0:
        raise SchemaError("grid step must be positive", field="payload/grid/step")
    n = math.floor((stop - start) / step)
    return [start + k * step for k in range(n + 1)]


def cmd_jump_scan(p: dict, opt: dict) -> dict:
    A = read_divisor(p["divisor"])
    scan = resolution.jumping_scan(A, _grid(p["grid"]), opt["degree_bound"])
    return {
        "changes": enc_vec(scan.changes),
        "first_change": enc(scan.changes[0]) if scan.changes else None,
        "tables": [
            {"c": enc(c), "generators": [list(m) for m in t.generators()], "size": len(t.monomials)}
            for c, t in zip(scan.grid, scan.tables)
        ],
    }


def cmd_tame(p: dict, opt: dict) -> dict:
    model = cks.get_model(p["model"])
    ref = np.asarray(p["reference"], dtype=float) if "reference" in p else None
    res = cks.norm_lower_bound_check(model, ref, samples=opt["samples"])
    return {
        "model": model.identifier,
        "diagnostic_model": model.diagnostic,
        "samples": len(res.ratios),
        "tame": res.tame,
        "constant": enc_float(res.constant),
    }


def cmd_metric_at(p: dict, opt: dict) -> dict:
    model = cks.get_model(p["model"])
    t = np.asarray(p["t"], dtype=float)
    arg = np.asarray(p.get("arg", [0.0] * len(t)), dtype=float)
    point = np.exp(-t + 1j * arg)
    if p.get("frame", "reference") == "adapted":
        H = cks.adapted_metric(model, point)
    else:
        H = cks.metric_at(model, point)
    return {
        "model": model.identifier,
        "real": [[enc_float(x) for x in row] for row in H.real],
        "imag": [[enc_float(x) for x in row] for row in H.imag],
    }


COMMANDS: dict[str, Callable[[dict, dict], dict]] = {
    "weightfilt": cmd_weightfilt,
    "prolong": cmd_prolong,
    "ssheaf-gens": cmd_ssheaf,
    "l2-test": cmd_l2,
    "cks-scan": cmd_cks_scan,
    "nakano-check": cmd_nakano,
    "resolve": cmd_resolve,
    "mult-ideal": cmd_mult_ideal,
    "jump-scan": cmd_jump_scan,
    "tame-check": cmd_tame,
    "metric-at": cmd_metric_at,
}


# ---------------------------------------------------------------------------
# driver


def normalize(document: Any, command: str, flags: dict | None = None) -> dict:
    """Validate, fill defaults and fold command-line flags into options."""
    if not isinstance(document, dict):
        raise SchemaError("document must be a JSON object", field="<root>")
    schema.validate(document, command)
    options = dict(DEFAULT_OPTIONS)
    options.update(document.get("options", {}))
    options.update({k: v for k, v in (flags or {}).items() if v is not None})
    doc = {
        "version": schema.VERSION,
        "command": command,
        "payload": document["payload"],
        "options": options,
    }
    schema.validate(doc, command)
    return doc


def run(document: Any, command: str | None = None, flags: dict | None = None) -> dict:
    """Run one document and return the report. Raises TwistSheafError."""
    if command is None:
        if not isinstance(document, dict) or not isinstance(document.get("command"), str):
            raise SchemaError("document has no command", field="command")
        command = document["command"]
    if command not in COMMANDS:
        raise SchemaError(f"unknown command {command!r}", field="command")
    doc = normalize(document, command, flags)
    try:
        result = COMMANDS[command](doc["payload"], doc["options"])
    except (ValueError, ZeroDivisionError) as exc:
        err = SchemaError(str(exc), field="payload")
        err.module = "cli"
        raise err from exc
    return {"version": schema.VERSION, "command": command, "input": doc, "result": result}


def error_record(exc: TwistSheafError) -> dict:
    rec = {"kind": exc.kind, "module": exc.module, "field": exc.field, "message": str(exc)}
    pair = getattr(exc, "pair", None)
    if pair is not None:
        rec["pair"] = list(pair)
    return {"version": schema.VERSION, "error": rec}


def _exit_code(exc: TwistSheafError) -> int:
    if isinstance(exc, OracleDisagreement):
        return EXIT_DISAGREE
    if isinstance(exc, SchemaError):
        return EXIT_SCHEMA
    return EXIT_MODULE


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistsheaf", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ["run", *COMMANDS]:
        sp = sub.add_parser(name)
        sp.add_argument("--input", help="problem document (default stdin)")
        sp.add_argument("--output", help="report file (default stdout)")
        sp.add_argument("--oracle", choices=["symbolic", "numeric", "both"])
        sp.add_argument("--degree-bound", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tolerance", help="rational, e.g. 1/100")
    cv = sub.add_parser("corpus-verify", help="replay every corpus case against its golden report")
    cv.add_argument("--output")
    sub.add_parser("schema", help="print the JSON schemas of all commands")
    return ap


def _flags(ns: argparse.Namespace) -> dict:
    tol = None
    if ns.tolerance is not None:
        try:
            tol = enc(rat(ns.tolerance))
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise SchemaError(f"bad tolerance {ns.tolerance!r}", field="tolerance") from exc
    return {
        "oracle": ns.oracle,
        "degree_bound": ns.degree_bound,
        "samples": ns.samples,
        "seed": ns.seed,
        "tolerance": tol,
    }


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    if ns.command == "schema":
        _write(dump(schema.all_schemas()), None)
        return 0
    if ns.command == "corpus-verify":
        from .corpus import verify_all

        summary = verify_all()
        _write(dump(summary.to_json()), ns.output)
        return 0 if summary.ok else 1
    try:
        raw = open(ns.input, encoding="utf-8").read() if ns.input else sys.stdin.read()
        try:
            document = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}", field="<root>") from exc
        command = None if ns.command == "run" else ns.command
        if command is None and isinstance(document, dict) and "input" in document and "result" in document:
            document = document["input"]  # a report: replay its embedded input
        report = run(document, command, _flags(ns))
    except TwistSheafError as exc:
        _write(dump(error_record(exc)), ns.output)
        return _exit_code(exc)
    except OSError as exc:
        sys.stderr.write(f"twistsheaf: {exc}\n")
        return EXIT_SCHEMA
    _write(dump(report), ns.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
