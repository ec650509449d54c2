"""Command-line front end.

Exit codes: 0 success or equivalent, 1 inequivalent, 2 input error,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .errors import BudgetExceeded, HrsError
from .flattening import flatten, flatten_noeta, fsrc, ftgt
from .hrs import Hrs, find_redexes, load_hrs, step
from .normalize import flat_nf, long_nf
from .projection import Verdict, decide_permeq, project
from .rewrites import check_rewrite
from .standardization import STANDARDIZE_BUDGET, decide_permeq_std, standardize_traced


class _Out:
    def __init__(self, command: str, as_json: bool) -> None:
        self.as_json = as_json
        self.record: dict[str, object] = {
            "command": command,
            "verdict": None,
            "witnesses": [],
            "src": None,
            "tgt": None,
            "steps": [],
        }

    def line(self, text: str) -> None:
        if not self.as_json:
            print(text)

    def finish(self) -> None:
        if self.as_json:
            print(json.dumps(self.record, ensure_ascii=False))


def _load(path: str) -> Hrs:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror}") from None
    return load_hrs(text)


def _cmd_check(args: argparse.Namespace, hrs: Hrs, out: _Out) -> int:
    judgments = [check_rewrite(None, hrs.parse(text), hrs) for text in args.expr or []]
    out.line(f"ok: {len(hrs.consts)} constants, {len(hrs.rules)} rules")
    for rule in hrs.rules.values():
        out.line(f"  {rule.name} : {rule.rule_type}")
    for j in judgments:
        out.record.update(src=hrs.show(j.src), tgt=hrs.show(j.tgt), verdict="ok")
        out.record["steps"] = [hrs.show(j.rw)]
        out.line(f"{hrs.show(j.rw)}")
        out.line(f"  src  : {hrs.show(flat_nf(j.src))}")
        out.line(f"  tgt  : {hrs.show(flat_nf(j.tgt))}")
        out.line(f"  type : {j.ty}")
    return 0


def _cmd_flatten(args: argparse.Namespace, hrs: Hrs, out: _Out) -> int:
    rw = hrs.parse(_one(args.expr, "flatten"))
    check_rewrite(None, rw, hrs)
    flat = flatten_noeta(rw, hrs) if args.no_eta else flatten(rw, hrs)
    steps = [hrs.show(m) for m in flat]
    out.record.update(steps=steps, src=hrs.show(fsrc(rw, hrs)), tgt=hrs.show(ftgt(rw, hrs)))
    out.line(" ; ".join(steps))
    return 0


def _verdict(v: Verdict, hrs: Hrs, out: _Out) -> int:
    out.record["verdict"] = "equivalent" if v.equivalent else "inequivalent"
    out.record["witnesses"] = [hrs.show(w.step) for w in v.witnesses]
    out.line(out.record["verdict"])  # type: ignore[arg-type]
    for w in v.witnesses:
        out.line(f"  {w.direction}[{w.index}] = {hrs.show(w.step)}")
    return 0 if v.equivalent else 1


def _cmd_equiv(args: argparse.Namespace, hrs: Hrs, out: _Out) -> int:
    e1, e2 = _two(args.expr, "equiv")
    rho, sigma = hrs.parse(e1), hrs.parse(e2)
    out.record.update(src=hrs.show(fsrc(rho, hrs)), tgt=hrs.show(ftgt(rho, hrs)))
    if args.method == "projection":
        return _verdict(decide_permeq(rho, sigma, hrs), hrs, out)
    if args.method == "standardize":
        return _verdict(decide_permeq_std(rho, sigma, hrs, args.budget), hrs, out)
    v1 = decide_permeq(rho, sigma, hrs)
    v2 = decide_permeq_std(rho, sigma, hrs, args.budget)
    if v1.equivalent != v2.equivalent:
        out.record["verdict"] = "disagreement"
        out.line("disagreement between projection and standardization")
        print("error: the two decision methods disagree", file=sys.stderr)
        return 2
    return _verdict(v1, hrs, out)


def _cmd_project(args: argparse.Namespace, hrs: Hrs, out: _Out) -> int:
    e1, e2 = _two(args.expr, "project")
    rho, sigma = hrs.parse(e1), hrs.parse(e2)
    check_rewrite(None, rho, hrs)
    check_rewrite(None, sigma, hrs)
    flat = project(rho, sigma, hrs)
    steps = [hrs.show(m) for m in flat]
    out.record.update(steps=steps, src=hrs.show(ftgt(sigma, hrs)), tgt=hrs.show(ftgt(flat[-1], hrs)))
    out.line(" ; ".join(steps))
    return 0


def _cmd_standardize(args: argparse.Namespace, hrs: Hrs, out: _Out) -> int:
    rw = hrs.parse(_one(args.expr, "standardize"))
    check_rewrite(None, rw, hrs)
    run = standardize_traced(rw, hrs, args.budget, measure=args.trace)
    if args.trace:
        for entry in run.trace:
            out.line(f"{entry.rule:<4} {entry.result}   measure {entry.before} -> {entry.after}")
    res = run.result
    out.record.update(
        steps=[hrs.show(m) for m in res.flat()], src=hrs.show(fsrc(rw, hrs)), tgt=hrs.show(res.terminator)
    )
    out.line(str(res))
    return 0


def _cmd_reduce(args: argparse.Namespace, hrs: Hrs, out: _Out) -> int:
    t = hrs.parse(args.term)
    check_rewrite(None, t, hrs)
    cur = long_nf(t, hrs.sig)
    out.record["src"] = hrs.show(flat_nf(cur))
    trail = [hrs.show(flat_nf(cur))]
    redexes = find_redexes(cur, hrs)
    out.line(hrs.show(flat_nf(cur)))
    for occ in redexes:
        out.line(f"  redex {occ.rule} at {list(occ.position)}")
    for _ in range(args.steps):
        redexes = find_redexes(cur, hrs)
        if not redexes:
            break
        cur = step(cur, redexes[0], hrs)
        trail.append(hrs.show(flat_nf(cur)))
        out.line(f"-> {trail[-1]}   ({redexes[0].rule} at {list(redexes[0].position)})")
    out.record.update(steps=trail, tgt=trail[-1])
    return 0


def _one(exprs: list[str] | None, cmd: str) -> str:
    if not exprs or len(exprs) != 1:
        raise UsageError(f"{cmd} expects exactly one -e EXPR")
    return exprs[0]


def _two(exprs: list[str] | None, cmd: str) -> tuple[str, str]:
    if not exprs or len(exprs) != 2:
        raise UsageError(f"{cmd} expects exactly two -e EXPR")
    return exprs[0], exprs[1]


class UsageError(Exception):
    pass


COMMANDS = {
    "check": _cmd_check,
    "flatten": _cmd_flatten,
    "equiv": _cmd_equiv,
    "project": _cmd_project,
    "standardize": _cmd_standardize,
    "reduce": _cmd_reduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrsproof",
        description="Proof terms for higher-order rewriting: flattening, projection, standardization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("hrs", help="path to a .hrs file")
        p.add_argument("--json", action="store_true", help="emit one JSON record")
        return p

    p = add("check", "validate an HRS, optionally type-check rewrites")
    p.add_argument("-e", "--expr", action="append", help="rewrite to type-check")
    p = add("flatten", "print the flat form of a rewrite")
    p.add_argument("-e", "--expr", action="append", required=True)
    p.add_argument("--no-eta", action="store_true", help="omit the EtaM rule")
    p = add("equiv", "decide permutation equivalence of two rewrites")
    p.add_argument("-e", "--expr", action="append", required=True)
    p.add_argument("--method", choices=["projection", "standardize", "both"], default="projection")
    p.add_argument("--budget", type=int, default=STANDARDIZE_BUDGET)
    p = add("project", "print E1 // E2")
    p.add_argument("-e", "--expr", action="append", required=True)
    p = add("standardize", "print the standard form of a rewrite")
    p.add_argument("-e", "--expr", action="append", required=True)
    p.add_argument("--budget", type=int, default=STANDARDIZE_BUDGET)
    p.add_argument("--trace", action="store_true", help="print every Del/Pull with its measure")
    p = add("reduce", "list the redexes of a term and contract some")
    p.add_argument("-t", "--term", required=True)
    p.add_argument("--steps", type=int, default=0, help="leftmost-outermost steps to perform")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = _Out(args.command, args.json)
    try:
        hrs = _load(args.hrs)
        code = COMMANDS[args.command](args, hrs, out)
    except BudgetExceeded as exc:
        out.record["verdict"] = "budget-exceeded"
        out.finish()
        print(f"budget exceeded: {exc} {exc.report or ''}".rstrip(), file=sys.stderr)
        return 3
    except (HrsError, UsageError, FileNotFoundError) as exc:
        out.record["verdict"] = "error"
        out.finish()
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    out.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
