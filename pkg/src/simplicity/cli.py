"""Command line: ``simplicity gen``, ``simplicity check`` and ``simplicity validate``.

Reports are JSON lines on stdout, one per (file, criterion); diagnostics go
to stderr.  Exit status is 0 when every checked criterion holds, 1 when any
fails, 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import mechanisms as M
from .dominance import is_osp, is_strategy_proof, is_weakly_group_sp
from .foresight import PRESETS, TABLE, ForesightSpec, is_f_simple
from .game import Budget, GameError
from .gamedoc import HEADER, GameDocError, Issue, dumps, parse, tokenize
from .strategic import FirstOrderBelief, builtin_beliefs, is_strategically_simple

CRITERIA = ("sp", "osp", "wgsp", "strong-osp", "one-step", "f-simple", "strategic")
MECHANISMS = ("second-price", "ascending", "reverse-clock", "static-rp", "dynamic-rp",
              "double-auction")


def parse_grid(text: str) -> list[Fraction]:
    """``a..b`` (unit step), ``a..b:step`` or a comma list of rationals."""
    if ".." in text:
        span, _, step = text.partition(":")
        lo, hi = (Fraction(x) for x in span.split(".."))
        step = Fraction(step) if step else Fraction(1)
        if step <= 0:
            raise argparse.ArgumentTypeError("step must be positive")
        out, x = [], lo
        while x <= hi:
            out.append(x)
            x += step
        return out
    try:
        return [Fraction(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="simplicity", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a built-in mechanism as a game document")
    g.add_argument("mechanism", choices=MECHANISMS)
    g.add_argument("-o", "--output", default="-")
    g.add_argument("--bidders", "--sellers", dest="bidders", type=int, default=2)
    g.add_argument("--values", type=parse_grid, help="value or cost grid, e.g. 0..4")
    g.add_argument("--prices", type=parse_grid)
    g.add_argument("--step", type=Fraction, default=Fraction(1))
    g.add_argument("--tie", choices=M.TIE_POLICIES, default=M.LOWEST_INDEX)
    g.add_argument("--order", type=_ints)
    g.add_argument("--strict-at-value", action="store_true",
                   help="clock bidders quit when the price reaches their value")
    g.add_argument("--agents", type=int, default=3)
    g.add_argument("--goods", type=int, default=3)
    g.add_argument("--priority", type=_ints)
    g.add_argument("--random-order", action="store_true")
    g.add_argument("--alpha", type=Fraction, default=Fraction(1, 2))
    g.add_argument("--costs", type=parse_grid)

    c = sub.add_parser("check", help="run a certifier on game documents")
    c.add_argument("files", nargs="+", help="document paths, or - for stdin")
    c.add_argument("--criterion", choices=CRITERIA, required=True)
    c.add_argument("--coalition-size", type=int, default=2)
    c.add_argument("--wgsp-mode", choices=("realized", "expected"), default="realized")
    c.add_argument("--foresight", default="full",
                   help="full, self, one-step, doc (table in the document) or a file")
    c.add_argument("--belief", default="builtin",
                   help="builtin, doc (beliefs in the document) or a file")
    c.add_argument("--budget", type=int)
    c.add_argument("--jobs", type=int, default=1)

    v = sub.add_parser("validate", help="parse and validate a game document")
    v.add_argument("file")
    return ap


def generate(args) -> M.Mechanism:
    name = args.mechanism
    if name in ("second-price", "ascending", "reverse-clock"):
        params = M.AuctionParams(args.bidders,
                                 values=args.values if args.values is not None else range(5),
                                 prices=args.prices, step=args.step, tie=args.tie,
                                 order=args.order,
                                 continue_at_value=not args.strict_at_value)
        return {"second-price": M.second_price, "ascending": M.ascending,
                "reverse-clock": M.reverse_clock}[name](params)
    if name in ("static-rp", "dynamic-rp"):
        fn = M.static_rp if name == "static-rp" else M.dynamic_rp
        return fn(args.agents, args.goods, args.priority, args.random_order)
    return M.double_auction(M.TradeParams(
        prices=args.prices if args.prices is not None else range(7),
        alpha=args.alpha, costs=args.costs, values=args.values))


def parse_sidecar(text: str) -> tuple[dict[str, frozenset[str]], list[FirstOrderBelief]]:
    """Foresight and belief records from a stand-alone document."""
    table, weights = {}, {}
    header = False
    for lineno, raw in enumerate(text.split("\n"), 1):
        toks = tokenize(raw, lineno)
        if not toks:
            continue
        if not header:
            if toks[0].text != HEADER:
                raise GameDocError([_issue(toks[0], f"expected header {HEADER!r}")])
            header = True
            continue
        kind, rest = toks[0].text, toks[1:]
        if kind == "foresight" and rest:
            table[rest[0].text] = frozenset(t.text for t in rest[1:])
        elif kind == "belief" and len(rest) >= 3:
            try:
                key = (rest[0].text, int(rest[1].text))
                weights.setdefault(key, {})[tuple(t.text for t in rest[3:])] = \
                    Fraction(rest[2].text)
            except (ValueError, ZeroDivisionError):
                raise GameDocError([_issue(rest[1], "bad belief owner or weight")]) from None
        else:
            raise GameDocError([_issue(toks[0], f"unexpected record {kind!r}")])
    beliefs = [FirstOrderBelief(owner, w, name) for (name, owner), w in weights.items()]
    return table, beliefs


def _issue(tok, msg):
    return Issue(tok.line, tok.col, msg)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def run_check(path: str, text: str, opts: dict) -> tuple[int, dict]:
    """One certifier run; returns (exit code, report)."""
    start = time.perf_counter()
    report = {"file": path, "criterion": opts["criterion"]}
    try:
        doc = parse(text)
        mech = doc.to_mechanism()
        report.update(mechanism=mech.name, params=dict(mech.params))
        budget = Budget(opts.get("budget"))
        crit = opts["criterion"]
        if crit == "sp":
            verdict = is_strategy_proof(mech, budget=budget)
        elif crit == "osp":
            verdict = is_osp(mech, budget=budget)
        elif crit == "wgsp":
            verdict = is_weakly_group_sp(mech, opts["coalition_size"], opts["wgsp_mode"], budget)
        elif crit in ("strong-osp", "one-step", "f-simple"):
            key = {"strong-osp": "self", "one-step": "one-step"}.get(crit, opts["foresight"])
            verdict = is_f_simple(mech, _foresight(key, doc, opts), budget=budget,
                                  criterion=crit)
        else:
            verdict = is_strategically_simple(mech, _beliefs(opts["belief"], doc, mech),
                                              budget)
        report.update(verdict.to_json())
        report["evaluations"] = budget.used
        if crit == "strategic":
            report["strategies"] = "pure"
        code = 0 if verdict.holds else 1
    except (GameDocError, GameError, ValueError, OSError, KeyError) as e:
        report["error"] = f"{type(e).__name__}: {e}"
        code = 2
    report["wall_time"] = round(time.perf_counter() - start, 6)
    return code, report


def _foresight(key: str, doc, opts) -> ForesightSpec:
    if key in PRESETS:
        return PRESETS[key]
    if key == "doc":
        spec = doc.foresight_spec()
        if spec is None:
            raise ValueError("document has no foresight table")
        return spec
    table, _ = parse_sidecar(opts["foresight_text"])
    return ForesightSpec(TABLE, table)


def _beliefs(key: str, doc, mech):
    if key == "builtin":
        return None
    if key == "doc":
        found = list(doc.beliefs)
    else:
        _, found = parse_sidecar(_read(key))
    family = {p: [b for b in found if b.owner == p] or builtin_beliefs(mech, p)
              for p in range(mech.n_players)}
    for bs in family.values():
        for b in bs:
            bad = b.problems(mech)
            if bad:
                raise ValueError(f"belief {b.name!r}: " + "; ".join(bad))
    return family


def _task(item):
    path, text, opts = item
    return run_check(path, text, opts)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        if args.command == "gen":
            text = dumps(generate(args))
            if args.output == "-":
                sys.stdout.write(text)
            else:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            return 0
        if args.command == "validate":
            doc = parse(_read(args.file))
            print(json.dumps({"file": args.file, "valid": True,
                              "nodes": len(doc.tree.nodes),
                              "infosets": len(doc.tree.infosets)}))
            return 0
    except (GameDocError, GameError, ValueError, OSError) as e:
        print(f"simplicity: {e}", file=sys.stderr)
        if args.command == "validate":
            print(json.dumps({"file": args.file, "valid": False,
                              "errors": str(e).splitlines()}))
        return 2

    opts = {"criterion": args.criterion, "coalition_size": args.coalition_size,
            "wgsp_mode": args.wgsp_mode, "foresight": args.foresight,
            "belief": args.belief, "budget": args.budget}
    try:
        if args.foresight not in PRESETS and args.foresight != "doc":
            opts["foresight_text"] = _read(args.foresight)
        items = [(p, _read(p), opts) for p in args.files]
    except OSError as e:
        print(f"simplicity: {e}", file=sys.stderr)
        return 2
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_task, items))
    else:
        results = [_task(i) for i in items]
    for code, report in results:
        if code == 2:
            print(f"simplicity: {report['file']}: {report['error']}", file=sys.stderr)
        print(json.dumps(report))
    codes = {c for c, _ in results}
    return 2 if 2 in codes else 1 if 1 in codes else 0


if __name__ == "__main__":
    sys.exit(main())
