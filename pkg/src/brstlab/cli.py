"""Command line entry point: verify, torus, reduce and eval."""

from __future__ import annotations

import argparse
import json
import random
import sys

from .brst import augment as au
from .brst import operators as op
from .brst.fields import format_field, star_kappa
from .expressions import parse_operands
from .liealg import preset
from .phasespace import Flat, PhaseFunction, Point, make_backend
from .reduction import (
    ReductionRefused, consistency_verdict, field_lam_dict, format_table, reduced_table,
    solve_invariant, torus_closed_form, vey_order_audit,
)
from .scalars import BrstlabError, ConfigurationError
from .suites import SUITES, Case, Context, case, run_suites


def resolve_backend(text: str, lie: str | None):
    """Backends other than point fix their own (abelian) algebra."""
    if text == "point":
        return make_backend(text, preset(lie or "abelian:1"))
    be = make_backend(text)
    if lie is not None:
        L = preset(lie)
        if L.f != be.algebra.f:
            raise ConfigurationError(
                f"backend {text} carries the algebra {be.algebra.name}, not {L.name}")
    return be


def report(config: dict, cases: list[Case], extra: dict | None = None) -> dict:
    out = {"config": config}
    if extra:
        out.update(extra)
    out["cases"] = [c.to_json() for c in cases]
    npass = sum(c.passed for c in cases)
    out["summary"] = {"pass": npass, "fail": len(cases) - npass}
    return out


def emit(doc: dict, fmt: str, out_path: str | None = None) -> None:
    if fmt == "json":
        text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    else:
        lines = [f"{k}: {v}" for k, v in doc["config"].items()]
        for key, val in doc.items():
            if key in ("config", "cases", "summary"):
                continue
            lines.append(f"{key}: {json.dumps(val)}")
        for c in doc["cases"]:
            tail = f"  witness: {c['witness']}" if "witness" in c else ""
            lines.append(f"{c['status'].upper():4s} {c['name']}{tail}")
        s = doc["summary"]
        lines.append(f"{s['pass']} passed, {s['fail']} failed")
        text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _exit_code(doc: dict) -> int:
    return 0 if doc["summary"]["fail"] == 0 else 1


# ------------------------------------------------------------------ commands

def cmd_verify(args) -> int:
    be = resolve_backend(args.backend, args.lie)
    names = SUITES if args.suite == "all" else (args.suite,)
    ctx = Context(be, args.order, args.samples, random.Random(args.seed))
    cases = run_suites(names, ctx)
    config = {"suite": args.suite, "lie": be.algebra.name, "backend": be.name, "order": args.order,
              "samples": args.samples, "seed": args.seed}
    doc = report(config, cases)
    emit(doc, args.format)
    return _exit_code(doc)


def cmd_torus(args) -> int:
    kind = "torus" if args.variant == "standard" else "torus-perturbed"
    be = make_backend(kind)
    N, D = args.order, args.max_degree
    config = {"variant": args.variant, "order": N, "max_degree": D, "emit": args.emit}
    verdict = consistency_verdict(be, be.invariant_box(D), N)
    cases = []
    extra = {"verdict": verdict.to_json(be)}
    if args.emit == "reduced-table":
        try:
            table = reduced_table(be, D, N, verdict)
        except ReductionRefused as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        extra["table"] = format_table(be, table)
        bad = None
        for (ku, kv), prod in table.items():
            want = torus_closed_form(PhaseFunction.monomial(ku), PhaseFunction.monomial(kv), N)
            if field_lam_dict(prod) != want:
                bad = bad or f"({be.format_key(ku)}, {be.format_key(kv)})"
        cases.append(case("table-matches-closed-form", bad))
    elif args.emit == "invariants":
        extra["invariants"] = [{"seed": be.format_key(k), "extension": format_field(f)}
                               for k, f in verdict.extensions.items()]
        bad = next((be.format_key(k) for k, f in verdict.extensions.items() if au.ce_on_c(f)), None)
        cases.append(case("extensions-are-quantum-invariant", bad))
    else:
        obstructions = []
        for k in verdict.failing:
            o = solve_invariant(be, k, N).obstruction
            obstructions.append({"seed": be.format_key(k), "order": o.order,
                                 "residual": be.format_function(o.residual), "certificate": o.certificate})
        extra["obstructions"] = obstructions
        cases.append(case("obstructions-carry-nonzero-residual",
                          next((o["seed"] for o in obstructions if o["residual"] == "0"), None)))
    doc = report(config, cases, extra)
    emit(doc, "json", args.out)
    return _exit_code(doc)


def cmd_reduce(args) -> int:
    be = resolve_backend(args.backend, None)
    if isinstance(be, Point):
        raise ConfigurationError("reduce needs a backend with a constraint surface")
    N, D = args.order, args.max_degree
    config = {"backend": be.name, "order": N, "max_degree": D}
    verdict = consistency_verdict(be, be.invariant_box(D), N)
    extra = {"verdict": verdict.to_json(be)}
    cases = [case("consistent-reduction", None if verdict.consistent else verdict.to_json(be).get("witness", "?"))]
    if verdict.consistent:
        table = reduced_table(be, D, N, verdict)
        extra["table"] = format_table(be, table)
        if isinstance(be, Flat):
            # with strong invariance the reduced product is the ambient star on the free variables
            bad = None
            for (ku, kv), prod in table.items():
                direct = be.star(PhaseFunction.monomial(ku), PhaseFunction.monomial(kv), N)
                want = {(r, k): v for r, f in enumerate(direct.coeffs) for k, v in f.terms.items() if v}
                if field_lam_dict(prod) != want:
                    bad = bad or f"({be.format_key(ku)}, {be.format_key(kv)})"
            cases.append(case("table-matches-free-star", bad))
        audit = vey_order_audit(be, N, min(4, N))
        extra["vey_orders"] = {str(r): list(v) for r, v in audit.orders.items()}
        cases.append(case("vey-order-audit", audit.failure))
    doc = report(config, cases, extra)
    emit(doc, args.format)
    return _exit_code(doc)


OPS = {
    "brst0": op.brst_standard,
    "brstW": op.brst_weyl,
    "koszul": op.quant_koszul,
    "ce": op.quant_ce,
    "restrict": au.deformed_restriction,
}


def cmd_eval(args) -> int:
    be = resolve_backend(args.backend, args.lie)
    operands = parse_operands(be, args.order, args.expr)
    if args.op == "star":
        if len(operands) != 2:
            raise ConfigurationError("star needs two operands separated by ';'")
        result = star_kappa(operands[0], operands[1], 0)
    else:
        if len(operands) != 1:
            raise ConfigurationError(f"{args.op} takes a single operand")
        result = OPS[args.op](operands[0])
    text = format_field(result)
    if args.format == "json":
        print(json.dumps({"config": {"backend": be.name, "order": args.order, "op": args.op,
                                     "expr": args.expr}, "result": text}, indent=2))
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="brstlab", description="Exact BRST and quantum reduction toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run identity suites on random samples")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--lie", default=None, help="abelian:<k>, su2, aff1 or @file.json")
    v.add_argument("--backend", default="torus", help="torus, torus-perturbed, flat:<d>,<k>[:weyl] or point")
    v.add_argument("--order", type=int, default=5)
    v.add_argument("--samples", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("torus", help="reduction on the cotangent bundle of the 2-torus")
    t.add_argument("--variant", choices=("standard", "perturbed"), default="standard")
    t.add_argument("--order", type=int, default=5)
    t.add_argument("--emit", choices=("reduced-table", "invariants", "obstruction"), default="reduced-table")
    t.add_argument("--max-degree", type=int, default=3)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_torus)

    r = sub.add_parser("reduce", help="verdict, reduced table and Vey audit on a backend")
    r.add_argument("--backend", default="flat:2,1")
    r.add_argument("--order", type=int, default=5)
    r.add_argument("--max-degree", type=int, default=2)
    r.add_argument("--format", choices=("text", "json"), default="json")
    r.set_defaults(func=cmd_reduce)

    e = sub.add_parser("eval", help="apply one operation to parsed expressions")
    e.add_argument("--expr", required=True)
    e.add_argument("--op", choices=("star",) + tuple(OPS), default="star")
    e.add_argument("--backend", default="torus")
    e.add_argument("--lie", default=None)
    e.add_argument("--order", type=int, default=3)
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "order", 1) < 0:
        print("error: --order must be >= 0", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except BrstlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
