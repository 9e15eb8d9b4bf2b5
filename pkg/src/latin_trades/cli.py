"""Command-line interface.

Machine-readable JSON goes to stdout, human text to stderr.  Exit codes:
0 success / EXISTS / verified / FOUND, 1 usage or internal error,
2 NONEXISTENT / verification failed / NONE, 3 UNKNOWN / TIMEOUT.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import planner as planner_mod
from .circulant import BaseRow, BaseRowError, expand_base_row, verify_base_row
from .compose import ComposeError, cyclic_trade, partition_intercalates
from .search import (SearchBudget, hunt_base_row, label_search_347, search_base_row,
                     search_trade)
from .trade import Trade, TradeError, VerificationReport, verify_trade

OK, ERROR, NEGATIVE, UNDECIDED = 0, 1, 2, 3
VERDICT_CODES = {"EXISTS": OK, "FOUND": OK, "NONEXISTENT": NEGATIVE, "NONE": NEGATIVE,
                 "UNKNOWN": UNDECIDED, "TIMEOUT": UNDECIDED}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means NONEXISTENT here
        raise UsageError(message)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _say(text: str) -> None:
    print(text, file=sys.stderr)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


# construct


def cmd_construct(args) -> int:
    if args.mu != 3:
        # planning is for 3-way trades; other mu only at k = m
        if args.k != args.m or args.k < args.mu:
            raise UsageError("for mu != 3 only k = m >= mu (cyclic) can be constructed")
        t = cyclic_trade(args.mu, args.k)
        recipe = planner_mod.Recipe("CYCLIC", args.mu, args.k, args.m, {"mu": args.mu, "k": args.k})
        status = {"verdict": "EXISTS", "mu": args.mu, "k": args.k, "m": args.m,
                  "recipe": recipe.to_dict()}
    else:
        p = planner_mod.Planner(search_budget=args.search_budget)
        st = p.plan(args.k, args.m)
        status = st.to_dict()
        t = st.trade
    if t is not None:
        _write(args.out, t.to_json())
        _write(args.recipe_out, json.dumps(status["recipe"], indent=2))
        if not args.out:
            status["trade"] = t.to_dict()
        _say(f"({args.mu},{args.k},{args.m}) EXISTS via {status['recipe']['kind']}")
    else:
        _say(f"(3,{args.k},{args.m}) {status['verdict']}: {status.get('reason', '')}")
    _emit(status)
    return VERDICT_CODES[status["verdict"]]


# verify


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _range_failure(kind: str, exc: Exception) -> int:
    # structurally invalid input is a failed verification, not a parse error
    rep = VerificationReport()
    rep.add("SHAPE", "input", str(exc))
    _emit({"kind": kind, **rep.to_dict()})
    _say(f"verification failed: {exc}")
    return NEGATIVE


def cmd_verify(args) -> int:
    data = _load_json(args.file)
    if args.base_row:
        try:
            b = BaseRow.from_dict(data)
        except (BaseRowError, ValueError) as exc:
            raise UsageError(f"malformed base row: {exc}") from exc
        try:
            rep = verify_base_row(b)
        except BaseRowError as exc:
            return _range_failure("base-row", exc)
        out = {"kind": "base-row", "params": [b.mu, b.k, b.m], **rep.to_dict()}
        ok = rep.ok
        if ok:
            trep = verify_trade(expand_base_row(b, check=False))
            out["expansion"] = trep.to_dict()
            ok = trep.ok
    else:
        if not isinstance(data, dict) or not {"mu", "m", "cells"} <= data.keys():
            raise UsageError("trade JSON needs mu, m and cells")
        try:
            t = Trade.from_dict(data)
        except TradeError as exc:
            return _range_failure("trade", exc)
        rep = verify_trade(t)
        out = {"kind": "trade", "params": list(t.params), **rep.to_dict()}
        ok = rep.ok
    _emit(out)
    if not ok:
        first = (out.get("violations") or out.get("expansion", {}).get("violations") or [{}])[0]
        _say(f"verification failed: {first.get('rule', '?')} {first.get('detail', '')}")
    return OK if ok else NEGATIVE


# search


def cmd_search(args) -> int:
    budget = SearchBudget(nodes=args.nodes, seconds=args.budget, jobs=args.jobs)
    if args.mode == "label347":
        res = label_search_347(union_bound=not args.no_union_bound)
        _emit({"mode": "label347", **res.to_dict()})
        _say(f"label search: {res.solutions} solutions over {res.cases} cases")
        return OK if res.solutions else NEGATIVE
    for name in ("mu", "k", "m"):
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for mode {args.mode}")
    resume = None
    if args.checkpoint and Path(args.checkpoint).is_file():
        text = Path(args.checkpoint).read_text().strip()
        resume = json.loads(text) if text else None
    if args.mode == "base-row":
        out = search_base_row(args.mu, args.k, args.m, budget, checkpoint=resume)
    elif args.mode == "hunt":
        out = hunt_base_row(args.mu, args.k, args.m, budget, seed=args.seed)
    else:
        prunes = args.prunes.split(",") if args.prunes else ()
        out = search_trade(args.mu, args.k, args.m, budget, symmetry=not args.no_symmetry,
                           prunes=prunes, checkpoint=resume)
    if out.verdict == "FOUND":
        _write(args.out, out.witness.to_json())
    if out.verdict == "TIMEOUT" and args.checkpoint and out.checkpoint is not None:
        Path(args.checkpoint).write_text(json.dumps(out.checkpoint))
    d = out.to_dict()
    d["mode"] = args.mode
    _emit(d)
    _say(f"{args.mode} ({args.mu},{args.k},{args.m}): {out.verdict} after {out.nodes} nodes")
    return VERDICT_CODES[out.verdict]


# catalog / partition / sweep


def cmd_catalog(args) -> int:
    if args.emit:
        k, m = args.emit
        entry = planner_mod.catalog_lookup(k, m)
        if entry is None:
            _say(f"no catalog base row for (3,{k},{m})")
            _emit({"k": k, "m": m, "found": False})
            return UNDECIDED
        b = entry.instantiate(m)
        _emit({**b.to_dict(), "name": entry.name, "provenance": entry.provenance,
               "text": str(b)})
        return OK
    entries = [e.to_dict() for e in planner_mod.catalog()]
    _emit({"entries": entries})
    for e in planner_mod.catalog():
        where = f"m={e.m}" if e.m is not None else f"m>={e.m_min}"
        _say(f"k={e.k:<3} {where:<7} {e.name:<12} {e.provenance}")
    return OK


def cmd_partition(args) -> int:
    try:
        t = Trade.from_dict(_load_json(args.file))
    except (TradeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed trade: {exc}") from exc
    try:
        part = partition_intercalates(t)
    except ComposeError as exc:
        _emit({"error": str(exc), "params": list(t.params)})
        _say(str(exc))
        return NEGATIVE
    _emit({"params": list(t.params), "count": len(part), **part.to_dict()})
    _say(f"{len(part)} intercalates")
    return OK


def _sweep_cell(km):
    k, m = km
    st = planner_mod.default_planner().plan(k, m)
    return {"k": k, "m": m, "verdict": st.verdict,
            "via": st.recipe.kind if st.recipe else st.reason}


def cmd_sweep(args) -> int:
    cells = [(k, m) for m in range(3, args.mmax + 1)
             for k in range(args.kmin, min(args.kmax, m) + 1)]
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells, chunksize=16))
    else:
        rows = [_sweep_cell(c) for c in cells]
    counts: dict[str, int] = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    _emit({"kmin": args.kmin, "kmax": args.kmax, "mmax": args.mmax, "counts": counts,
           "cells": rows})
    mark = {"EXISTS": "+", "NONEXISTENT": "x", "UNKNOWN": "?"}
    grid = {(r["k"], r["m"]): mark[r["verdict"]] for r in rows}
    ms = range(3, args.mmax + 1)
    _say("k\\m " + "".join(f"{m:>3}" for m in ms))
    for k in range(args.kmin, args.kmax + 1):
        _say(f"{k:>3} " + "".join(f"{grid.get((k, m), ''):>3}" for m in ms))
    return OK


# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="latin-trades", description="Homogeneous Latin trade toolkit.")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("construct", help="build a (3,k,m) trade or report why not")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--mu", type=int, default=3)
    c.add_argument("--out", help="write the trade JSON here")
    c.add_argument("--recipe-out", help="write the recipe JSON here")
    c.add_argument("--search-budget", type=float, default=0.0,
                   help="seconds of base-row search when no construction applies")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="verify a trade or base-row JSON file")
    v.add_argument("file")
    v.add_argument("--base-row", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="run a backtracking search")
    s.add_argument("--mode", choices=["base-row", "hunt", "trade", "label347"], required=True)
    s.add_argument("--mu", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--budget", type=float, help="wall-clock seconds")
    s.add_argument("--nodes", type=int, help="node limit")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--checkpoint", help="resume from / write the frontier to this file")
    s.add_argument("--out", help="write a found witness here")
    s.add_argument("--no-symmetry", action="store_true")
    s.add_argument("--prunes", default="balance,counts",
                   help="comma-separated: balance,counts,frequency,proof346")
    s.add_argument("--no-union-bound", action="store_true", help="label347: drop |A u B| <= 5")
    s.set_defaults(func=cmd_search)

    g = sub.add_parser("catalog", help="list or emit embedded base rows")
    grp = g.add_mutually_exclusive_group()
    grp.add_argument("--list", action="store_true")
    grp.add_argument("--emit", type=int, nargs=2, metavar=("K", "M"))
    g.set_defaults(func=cmd_catalog)

    p = sub.add_parser("partition", help="split a (mu,mu,m) trade into intercalates")
    p.add_argument("file")
    p.set_defaults(func=cmd_partition)

    w = sub.add_parser("sweep", help="existence table for 3 <= k <= kmax, k <= m <= mmax")
    w.add_argument("--kmin", type=int, default=3)
    w.add_argument("--kmax", type=int, default=40)
    w.add_argument("--mmax", type=int, default=40)
    w.add_argument("--jobs", type=int, default=1)
    w.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        return args.func(args)
    except UsageError as exc:
        _say(f"error: {exc}")
        return ERROR
    except (planner_mod.PlanError, ValueError) as exc:
        _say(f"error: {exc}")
        return ERROR
    except Exception as exc:  # noqa: BLE001 - internal failures map to exit 1
        _say(f"internal error: {type(exc).__name__}: {exc}")
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
