"""Command-line interface.

Subcommands:

  classify    normal form of a phi-matrix
  enumerate   admissible lattices at a type (e; r1, r2)
  strata      stratum table against enumeration (antidiagonal case)
  components  ordinary component partition (reducible shapes)
  x0          zero-stratum ball decomposition and point check
  raynaud     extremal lattices for a divisor bound e
  verify      smoke sweeps comparing closed forms against enumeration
  render      DOT or ASCII picture of an admissible locus

Exit codes: 0 success, 1 usage or computation error, 2 a verification
subcommand found a mismatch, 3 insufficient series precision even after
the retry ladder.
"""

import argparse
import csv
import io
import json
import os
import sys

from .field import get_ctx
from .series import (InsufficientPrecision, get_default_prec,
                     set_default_prec)
from .latmod import format_lattice, rel_position, phi_image
from .building import lattice_to_point, render_dot
from .phimod import (PhiModule, VParams, classify, parse_matrix,
                     parse_normal_form)
from .oracle import DEFAULT_BUDGET, BudgetExceeded
from . import kisin, raynaud


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kisinlab",
        description="lattice combinatorics of rank-2 phi-modules")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, module=True, vtype=False, bound=False):
        sp.add_argument("--p", type=int, help="residue characteristic")
        sp.add_argument("--ext", type=int, default=None,
                        help="field extension degree k (default 1)")
        if module:
            sp.add_argument("--normal-form", dest="normal_form",
                            help="literal like simple:a=1,s=2")
            sp.add_argument("--matrix",
                            help="matrix literal like 0,u^2;1,0")
        if vtype:
            sp.add_argument("--e", type=int, help="ramification bound e")
            sp.add_argument("--r1", type=int, help="larger weight r1")
            sp.add_argument("--r2", type=int, help="smaller weight r2")
        if bound:
            sp.add_argument("--e", type=int, help="divisor bound e")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="tree-search vertex budget")
        sp.add_argument("--prec", type=int, default=None,
                        help="base working precision (overrides the "
                             "KISINLAB_PREC environment variable)")
        sp.add_argument("--config", help="JSON file with default options")
        sp.add_argument("--out", help="write the report here instead of "
                                      "stdout")
        sp.add_argument("--format", choices=("json", "csv", "dot", "ascii"),
                        default="json")
        sp.add_argument("--seed", type=int, default=None,
                        help="seed for sampled sweeps")

    common(sub.add_parser("classify", help="normal form of a matrix"))
    common(sub.add_parser("enumerate", help="admissible lattices at a type"),
           vtype=True)
    common(sub.add_parser("strata", help="stratum table vs enumeration"),
           vtype=True)
    common(sub.add_parser("components", help="ordinary components"),
           vtype=True)
    common(sub.add_parser("x0", help="zero-stratum decomposition"),
           vtype=True)
    common(sub.add_parser("raynaud", help="extremal lattices for a bound"),
           bound=True)
    sp = sub.add_parser("verify", help="prediction-vs-enumeration sweeps")
    common(sp, module=False)
    sp.add_argument("--suite", default="all",
                    choices=("distances", "strata", "components", "x0",
                             "raynaud", "all"))
    common(sub.add_parser("render", help="picture of an admissible locus"),
           vtype=True)
    return parser


def _apply_config(args) -> None:
    """Fill unset options from a JSON config file."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        conf = json.load(fh)
    for key, val in conf.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, val)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _emit_csv(args, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buf.getvalue())


def _field(args):
    if args.p is None:
        raise ValueError("--p is required (or set p in --config)")
    return get_ctx(args.p, args.ext or 1)


def _module(args, ctx):
    if getattr(args, "normal_form", None):
        return parse_normal_form(ctx, args.normal_form)
    if getattr(args, "matrix", None):
        return classify(PhiModule(ctx, parse_matrix(ctx, args.matrix)))
    raise ValueError("need --normal-form or --matrix")


def _vparams(args) -> VParams:
    if args.e is None or args.r1 is None or args.r2 is None:
        raise ValueError("need --e, --r1 and --r2")
    return VParams(args.e, args.r1, args.r2)


# -- subcommand handlers ---------------------------------------------------------

def cmd_classify(args) -> int:
    ctx = _field(args)
    if getattr(args, "normal_form", None):
        nf = parse_normal_form(ctx, args.normal_form)
    else:
        if not args.matrix:
            raise ValueError("classify needs --matrix (or --normal-form)")
        nf = classify(PhiModule(ctx, parse_matrix(ctx, args.matrix)))
    _emit_json(args, nf.to_json())
    return 0


def cmd_enumerate(args) -> int:
    ctx = _field(args)
    nf = _module(args, ctx)
    v = _vparams(args)
    adm = kisin.enumerate_admissible(nf, v, args.budget)
    if args.format == "csv":
        rows = [(format_lattice(L), d.a, d.b) for L, d in adm.pairs]
        _emit_csv(args, ("lattice", "a", "b"), rows)
        return 0
    report = {"schema": "1", "kind": "enumerate",
              "p": ctx.p, "ext": ctx.k, "normal_form": nf.literal()}
    report.update(adm.to_json())
    _emit_json(args, report)
    return 0


def cmd_strata(args) -> int:
    ctx = _field(args)
    nf = _module(args, ctx)
    v = _vparams(args)
    table = kisin.stratify(nf, v)
    observed = kisin.enumerate_admissible(nf, v, args.budget).strata()
    ok = True
    rows = []
    for row in table:
        seen = len(observed.get((row["a"], row["b"]), []))
        match = seen == row["count"]
        ok = ok and match
        rows.append({**row, "observed": seen, "match": match})
    extra = sorted(set(observed) - {(r["a"], r["b"]) for r in table})
    ok = ok and not extra
    if args.format == "csv":
        _emit_csv(args, ("a", "b", "nonempty", "dim", "count", "observed",
                         "match"),
                  [(r["a"], r["b"], r["nonempty"], r["dim"], r["count"],
                    r["observed"], r["match"]) for r in rows])
    else:
        _emit_json(args, {"schema": "1", "kind": "strata",
                          "p": ctx.p, "ext": ctx.k,
                          "normal_form": nf.literal(),
                          "dim": kisin.predict_dimension(nf, v),
                          "rows": rows,
                          "unpredicted": [list(t) for t in extra],
                          "match": ok})
    return 0 if ok else 2


def cmd_components(args) -> int:
    ctx = _field(args)
    nf = _module(args, ctx)
    v = _vparams(args)
    predicted = kisin.predict_components(nf, v)
    observed = kisin.component_report(nf, v, args.budget)
    ok = True
    out = {}
    for label in sorted(predicted):
        want = sorted(format_lattice(L) for L in predicted[label]["points"])
        got = sorted(format_lattice(L) for L in observed["labels"][label])
        match = want == got
        ok = ok and match
        out[label] = {"shape": predicted[label]["shape"],
                      "predicted": want, "observed": got, "match": match}
    _emit_json(args, {"schema": "1", "kind": "components",
                      "p": ctx.p, "ext": ctx.k, "normal_form": nf.literal(),
                      "labels": out,
                      "zero_stratum": [format_lattice(L)
                                       for L in observed["zero_stratum"]],
                      "match": ok})
    return 0 if ok else 2


def cmd_x0(args) -> int:
    ctx = _field(args)
    nf = _module(args, ctx)
    v = _vparams(args)
    dec = kisin.predict_x0_decomposition(nf, v)
    predicted = kisin.x0_point_set(nf, v, dec, args.budget)
    observed = kisin.observed_x0(nf, v, args.budget)
    ok = predicted == observed
    comps = [{"name": c["name"],
              "centers": [[x, list(map(list, digits))]
                          for x, digits in c["centers"]],
              "radius": c["radius"], "dim": c["dim"], "kept": c["kept"]}
             for c in dec["components"]]
    classes = kisin.connectivity_certificate(ctx, sorted(
        observed, key=lambda L: L.sort_key())) if observed else []
    _emit_json(args, {"schema": "1", "kind": "x0",
                      "p": ctx.p, "ext": ctx.k, "normal_form": nf.literal(),
                      "level": dec["level"], "dim": dec["dim"],
                      "components": comps,
                      "n_predicted": len(predicted),
                      "n_observed": len(observed),
                      "connected_classes": len(classes),
                      "match": ok})
    return 0 if ok else 2


def cmd_raynaud(args) -> int:
    ctx = _field(args)
    nf = _module(args, ctx)
    if args.e is None:
        raise ValueError("need --e")
    report = raynaud.verify_extremal(nf, args.e, args.budget)
    obj = {"schema": "1", "kind": "raynaud",
           "p": ctx.p, "ext": ctx.k, "normal_form": nf.literal(),
           "e": args.e,
           "min": format_lattice(report["min"]),
           "max": format_lattice(report["max"]),
           "min_divisors": list(report["min_divisors"]),
           "max_divisors": list(report["max_divisors"]),
           "coincide": report["coincide"],
           "n_lattices": report["n_lattices"],
           "levels": {str(y): n for y, n in report["levels"].items()},
           "predicted_matches": report["predicted_matches"]}
    _emit_json(args, obj)
    return 0 if report["predicted_matches"] is not False else 2


def cmd_render(args) -> int:
    ctx = _field(args)
    nf = _module(args, ctx)
    v = _vparams(args)
    adm = kisin.enumerate_admissible(nf, v, args.budget)
    pts = [lattice_to_point(L) for L in adm]
    if args.format == "dot":
        labels = {lattice_to_point(L): format_lattice(L) for L in adm}
        _emit(args, render_dot(pts, lattice_y=adm.level, labels=labels,
                               title=nf.literal()))
        return 0
    lines = [f"# {nf.literal()}  level={adm.level}  size={len(adm)}"]
    for L, d in adm.pairs:
        lines.append(f"{format_lattice(L):<28} a={d.a} b={d.b}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


# -- verification sweeps ---------------------------------------------------------

def _verify_distances(ctx, budget) -> bool:
    from .oracle import ball_vertices, materialize
    ok = True
    mods = [parse_normal_form(ctx, "simple:a=1,s=2"),
            parse_normal_form(ctx, "split:a=1,s=1"),
            parse_normal_form(ctx, "split:a=1,s=0,b=1,t=1"),
            parse_normal_form(ctx, "nonsplit:a=1,s=0,b=1,t=1,gamma=u")]
    for nf in mods:
        for vtx, _ in ball_vertices(ctx, 0, None, 4, budget):
            L = materialize(ctx, vtx, vtx[0] % 2)
            a, b, c = kisin.distance_routes(nf, L)
            if not a == b == c:
                ok = False
    return ok


def _verify_strata(ctx, budget) -> bool:
    ok = True
    for s in (1, 2, 5):
        nf = parse_normal_form(ctx, f"simple:a=1,s={s}")
        for e in (2, 3, 4):
            for r1 in range(e + 1):
                v = VParams(e, r1, 0)
                table = {(r["a"], r["b"]): r["count"]
                         for r in kisin.stratify(nf, v)}
                seen = {t: len(Ls) for t, Ls
                        in kisin.enumerate_admissible(nf, v, budget)
                        .strata().items()}
                if {t: n for t, n in table.items() if n} != seen:
                    ok = False
    return ok


def _reducible_sweep(ctx):
    yield parse_normal_form(ctx, "split:a=1,s=0")
    yield parse_normal_form(ctx, "split:a=1,s=1")
    yield parse_normal_form(ctx, "split:a=1,s=0,b=1,t=1")
    yield parse_normal_form(ctx, "nonsplit:a=1,s=0,b=1,t=1,gamma=u")


def _verify_components(ctx, budget) -> bool:
    ok = True
    for nf in _reducible_sweep(ctx):
        for e in (2, 3):
            for r1 in range(e + 1):
                v = VParams(e, r1, 0)
                pred = kisin.predict_components(nf, v)
                obs = kisin.component_report(nf, v, budget)["labels"]
                for label in pred:
                    if set(pred[label]["points"]) != set(obs[label]):
                        ok = False
    return ok


def _verify_x0(ctx, budget) -> bool:
    ok = True
    for nf in _reducible_sweep(ctx):
        for e in (2, 3):
            for r1 in range(e + 1):
                v = VParams(e, r1, 0)
                if kisin.x0_point_set(nf, v, None, budget) != \
                        kisin.observed_x0(nf, v, budget):
                    ok = False
    return ok


def _verify_raynaud(ctx, budget) -> bool:
    ok = True
    mods = [parse_normal_form(ctx, "simple:a=1,s=2"),
            parse_normal_form(ctx, "split:a=1,s=0,b=1,t=1")]
    for nf in mods:
        for e in (1, 2, 3):
            try:
                report = raynaud.verify_extremal(nf, e, budget)
            except raynaud.NoAdmissibleLattice:
                continue
            if report["predicted_matches"] is False:
                ok = False
    return ok


def cmd_verify(args) -> int:
    ctx = _field(args)
    suites = {"distances": _verify_distances, "strata": _verify_strata,
              "components": _verify_components, "x0": _verify_x0,
              "raynaud": _verify_raynaud}
    names = list(suites) if args.suite == "all" else [args.suite]
    all_ok = True
    for name in names:
        ok = suites[name](ctx, args.budget)
        all_ok = all_ok and ok
        print(f"{name}: {'ok' if ok else 'MISMATCH'}")
    return 0 if all_ok else 2


# -- driver -----------------------------------------------------------------------

HANDLERS = {
    "classify": cmd_classify,
    "enumerate": cmd_enumerate,
    "strata": cmd_strata,
    "components": cmd_components,
    "x0": cmd_x0,
    "raynaud": cmd_raynaud,
    "verify": cmd_verify,
    "render": cmd_render,
}


def _base_precision(args) -> int:
    if getattr(args, "prec", None):
        return args.prec
    env = os.environ.get("KISINLAB_PREC")
    if env:
        return int(env)
    p = args.p or 3
    e = getattr(args, "e", None) or 8
    return max(64, p * (2 * e + 4))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        _apply_config(args)
        handler = HANDLERS[args.command]
        prev = get_default_prec()
        prec = _base_precision(args)
        try:
            for attempt in range(5):
                set_default_prec(prec)
                try:
                    return handler(args)
                except InsufficientPrecision:
                    if attempt == 4:
                        raise
                    prec *= 2
        finally:
            set_default_prec(prev)
    except InsufficientPrecision as exc:
        print(f"error: series precision exhausted: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError, BudgetExceeded,
            AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
