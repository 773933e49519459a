"""Command-line front door.

Exit codes: 0 = question answered, 2 = unknown / budget exhausted,
1 = usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .syntax import LanguageTag, classify, parse_formula, render

JSON_SCHEMA_VERSION = 1


def _emit(args, payload, text_lines):
    if args.format == "json":
        payload = {"schema": JSON_SCHEMA_VERSION, **payload}
        print(json.dumps(payload, indent=2, default=str))
    else:
        for line in text_lines:
            print(line)


def _load_formula(args):
    if getattr(args, "expr", None):
        return parse_formula(args.expr)
    with open(args.file, "r", encoding="utf-8") as fh:
        return parse_formula(fh.read())


def _config(args):
    from .polysolve import SolverConfig

    cfg = SolverConfig()
    if getattr(args, "max_denom", None):
        cfg.max_denom = args.max_denom
    if getattr(args, "bp_depth", None):
        cfg.bp_depth = args.bp_depth
    if getattr(args, "psatz_degree", None):
        cfg.psatz_degree = args.psatz_degree
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _add_formula_args(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("-e", "--expr", help="formula text")
    group.add_argument("-f", "--file", help="file containing the formula")


def _add_budget_args(p):
    p.add_argument("--max-denom", type=int, help="rational search denominator cap")
    p.add_argument("--bp-depth", type=int, help="branch-and-prune depth budget")
    p.add_argument("--psatz-degree", type=int, help="certificate degree budget")
    p.add_argument("--fincan-bound", type=int, default=4,
                   help="finite-cancellation instantiation bound")
    p.add_argument("--timeout-ms", type=int, default=0, help="soft timeout")
    p.add_argument("--seed", type=int, default=0)


def cmd_parse(args):
    f = _load_formula(args)
    _emit(args, {"formula": render(f), "ast": repr(f)}, [render(f)])
    return 0


def cmd_classify(args):
    f = _load_formula(args)
    tag = classify(f)
    _emit(args, {"language": str(tag)}, [str(tag)])
    return 0


def cmd_sat(args):
    from .linsolve import sat_additive
    from .polysolve import (SatNumeric, SatRational, Unknown, UnsatCertified,
                            sat_multiplicative)
    from .syntax import ADDITIVE_TAGS

    f = _load_formula(args)
    tag = classify(f)
    if args.lang:
        tag = LanguageTag(args.lang)
    if tag in ADDITIVE_TAGS or tag == LanguageTag.SAME_COND:
        res = sat_additive(f)
        if res.is_sat:
            _emit(args, {"verdict": "sat", "kind": "exact",
                         "model": res.model.to_dict()},
                  ["SAT", res.model.to_json()])
        else:
            _emit(args, {"verdict": "unsat", "kind": "exact"}, ["UNSAT"])
        return 0
    verdict = sat_multiplicative(f, _config(args))
    if isinstance(verdict, SatRational):
        _emit(args, {"verdict": "sat", "kind": "exact",
                     "model": verdict.model.to_dict()},
              ["SAT", verdict.model.to_json()])
        return 0
    if isinstance(verdict, SatNumeric):
        assignment = {verdict.var_names[v] if verdict.var_names else str(v): x
                      for v, x in verdict.assignment.items()}
        _emit(args, {"verdict": "sat", "kind": "numeric",
                     "assignment": assignment, "residual": verdict.residual},
              ["SAT (numeric)",
               " ".join(f"{k}={x:.6f}" for k, x in assignment.items())])
        return 0
    if isinstance(verdict, UnsatCertified):
        _emit(args, {"verdict": "unsat", "kind": "certified",
                     "evidence": [kind for kind, _ in verdict.evidence]},
              ["UNSAT"])
        return 0
    _emit(args, {"verdict": "unknown", "report": verdict.report}, ["UNKNOWN"])
    return 2


def cmd_valid(args):
    from .axioms import validity

    f = _load_formula(args)
    res = validity(f, _config(args))
    payload = {"status": res.status}
    lines = [res.status.upper()]
    if res.countermodel is not None:
        payload["countermodel"] = res.countermodel.to_dict()
        lines.append(res.countermodel.to_json())
    _emit(args, payload, lines)
    return 2 if res.status == "unknown" else 0


def cmd_model(args):
    from .semantics import Model, satisfies

    f = _load_formula(args)
    with open(args.model, "r", encoding="utf-8") as fh:
        m = Model.from_json(fh.read())
    ok = satisfies(m, f)
    _emit(args, {"satisfies": ok}, ["SATISFIED" if ok else "NOT SATISFIED"])
    return 0


def cmd_distinguish(args):
    from .expressivity import distinguishable
    from .semantics import Model

    with open(args.model1) as fh:
        m1 = Model.from_json(fh.read())
    with open(args.model2) as fh:
        m2 = Model.from_json(fh.read())
    f = distinguishable(m1, m2, LanguageTag(args.lang))
    if f is None:
        _emit(args, {"distinguishable": False}, ["INDISTINGUISHABLE"])
    else:
        _emit(args, {"distinguishable": True, "formula": render(f)},
              ["DISTINGUISHABLE", render(f)])
    return 0


def cmd_represent(args):
    from .represent import (CompOrder, check_definetti_axioms, representable,
                            check_sk)

    with open(args.file) as fh:
        data = json.load(fh)
    if "order" in data:
        data = data["order"]
    order = CompOrder.from_dict(data)
    if args.axioms:
        report = check_definetti_axioms(order)
        _emit(args, {"axioms": report},
              [f"{k}: {'pass' if v['holds'] else 'FAIL'}"
               for k, v in report.items()])
        return 0
    if args.sk:
        res = check_sk(order, args.sk)
        payload = {"status": res.status}
        lines = [res.status.upper()]
        if res.certificate:
            payload["certificate"] = res.certificate.to_dict()
            lines.append(res.certificate.render())
        _emit(args, payload, lines)
        return 0
    res = representable(order)
    if res.representable:
        _emit(args, {"representable": True,
                     "weights": [str(w) for w in res.weights]},
              ["REPRESENTABLE", " ".join(str(w) for w in res.weights)])
    else:
        payload = {"representable": False, "reason": res.reason}
        lines = ["NOT REPRESENTABLE", res.reason]
        if res.certificate:
            payload["certificate"] = res.certificate.to_dict()
            lines.append(res.certificate.render())
        _emit(args, payload, lines)
    return 0


def cmd_quad(args):
    from .represent import (QuadOrder, order_from_matrix, quad_check_axioms,
                            quad_representable_n2)

    if args.matrix:
        matrix = json.loads(args.matrix)
        order, rank = order_from_matrix([[Fraction(x) for x in row]
                                         for row in matrix])
        payload = {"rank": rank}
        lines = [f"rank {rank}"]
    else:
        with open(args.file) as fh:
            order = QuadOrder.from_dict(json.load(fh))
        payload = {}
        lines = []
    if args.axioms:
        report = quad_check_axioms(order, bound=args.bound)
        payload["axioms"] = report
        lines += [f"{k}: {'pass' if v['holds'] else 'FAIL'}"
                  for k, v in report.items()]
    if order.n_atoms == 2 and args.classify:
        cls = quad_representable_n2(order)
        payload["n2"] = cls
        lines.append("product-representable: " + str(cls["representable"]))
        if cls.get("interval"):
            lines.append("witness region: " + cls["interval"])
    _emit(args, payload, lines)
    return 0


def cmd_certify(args):
    from .normalize import dnf, expand
    from .polysolve import psatz_search, psatz_verify, system_to_psatz

    f = _load_formula(args)
    letters = None
    conjuncts = dnf(f)
    results = []
    for conjunct in conjuncts:
        from .syntax import free_letters

        system = expand(conjunct, free_letters(f))
        F, G, H = system_to_psatz(system)
        cfg = _config(args)
        cert = psatz_search(F, G, H, d_max=cfg.psatz_degree)
        if cert is None:
            results.append(None)
        else:
            assert psatz_verify(cert, F, G, H)
            results.append(cert.to_dict())
    if all(r is not None for r in results):
        _emit(args, {"certified_unsat": True, "certificates": results},
              ["UNSAT CERTIFIED", json.dumps(results, indent=2)])
        return 0
    _emit(args, {"certified_unsat": False,
                 "certificates": results}, ["NO CERTIFICATE FOUND"])
    return 2


def cmd_reduce(args):
    from .reductions import (EtrInverseSystem, etr_inverse_to_ind,
                             poly_to_etr, same_cond_to_comp)

    if args.kind == "same-cond":
        f = _load_formula(args)
        g = same_cond_to_comp(f)
        _emit(args, {"result": render(g)}, [render(g)])
        return 0
    if args.kind == "etr-inverse":
        with open(args.file) as fh:
            data = json.load(fh)
        sys_ = EtrInverseSystem(data["n"],
                                tuple(tuple(c) for c in data["constraints"]))
        tr = etr_inverse_to_ind(sys_)
        _emit(args, {"formula": render(tr.formula),
                     "letters": tr.letters},
              [render(tr.formula)])
        return 0
    f = _load_formula(args)
    sentences = poly_to_etr(f)
    payload = {"sentences": [{"plain": s.plain, "smtlib": s.smtlib}
                             for s in sentences]}
    _emit(args, payload, [s.plain for s in sentences])
    return 0


def cmd_bench(args):
    from .bench import PlanItem, rows_to_csv, run_bench

    with open(args.plan) as fh:
        plan_data = json.load(fh)
    plan = [PlanItem(LanguageTag(p["lang"]), p["n"], p["k"], p["count"],
                     p.get("timeout_ms", 10000), p.get("seed", 0))
            for p in plan_data]
    rows = run_bench(plan, _config(args))
    print(rows_to_csv(rows), end="")
    return 0


def cmd_fixtures(args):
    from .expressivity import hierarchy_report

    entries = hierarchy_report()
    ok = all(e.ok for e in entries)
    payload = {"blocks": [{"block": e.block, "ok": e.ok,
                           "lower": e.lower, "upper": e.upper,
                           "witness": render(e.upper_formula)
                           if e.upper_formula else None}
                          for e in entries],
               "all_ok": ok}
    lines = [f"{e.block}: {'ok' if e.ok else 'FAIL'}" for e in entries]
    _emit(args, payload, lines)
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="probcalc",
                                description="probability logic workbench")
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and pretty-print a formula")
    _add_formula_args(sp)
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("classify", help="least language generating the formula")
    _add_formula_args(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("sat", help="decide satisfiability")
    _add_formula_args(sp)
    _add_budget_args(sp)
    sp.add_argument("--lang", help="force the fragment used for dispatch")
    sp.set_defaults(fn=cmd_sat)

    sp = sub.add_parser("valid", help="decide validity")
    _add_formula_args(sp)
    _add_budget_args(sp)
    sp.set_defaults(fn=cmd_valid)

    sp = sub.add_parser("model", help="evaluate a model file against a formula")
    _add_formula_args(sp)
    sp.add_argument("-m", "--model", required=True)
    sp.set_defaults(fn=cmd_model)

    sp = sub.add_parser("distinguish", help="search a distinguishing formula")
    sp.add_argument("model1")
    sp.add_argument("model2")
    sp.add_argument("--lang", required=True)
    sp.set_defaults(fn=cmd_distinguish)

    sp = sub.add_parser("represent", help="representability of a comparative order")
    sp.add_argument("-f", "--file", required=True)
    sp.add_argument("--axioms", action="store_true")
    sp.add_argument("--sk", type=int, help="audit S_k instead")
    sp.set_defaults(fn=cmd_represent)

    sp = sub.add_parser("quad", help="quadratic order tools")
    sp.add_argument("-f", "--file")
    sp.add_argument("--matrix", help="JSON matrix inducing the order")
    sp.add_argument("--axioms", action="store_true")
    sp.add_argument("--classify", action="store_true")
    sp.add_argument("--bound", type=int, default=3)
    sp.set_defaults(fn=cmd_quad)

    sp = sub.add_parser("certify", help="search infeasibility certificates")
    _add_formula_args(sp)
    _add_budget_args(sp)
    sp.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("reduce", help="run a reduction")
    sp.add_argument("kind", choices=("same-cond", "etr-inverse", "poly-etr"))
    sp.add_argument("-e", "--expr")
    sp.add_argument("-f", "--file")
    sp.set_defaults(fn=cmd_reduce)

    sp = sub.add_parser("bench", help="run a benchmark plan")
    sp.add_argument("plan")
    _add_budget_args(sp)
    sp.set_defaults(fn=cmd_bench)

    sp = sub.add_parser("fixtures", help="run the expressivity fixture pack")
    sp.set_defaults(fn=cmd_fixtures)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.fn(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
