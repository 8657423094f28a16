"""Command-line experiment runner.

Every command prints (or writes with ``--out``) a JSON report:
``{"schema", "experiment", "params", "results", "stats", "runtime_ms", "version"}``.
Rationals are written as ``"p/q"`` strings.  Exit status is 0 on success,
2 when a search budget is exhausted and 1 on invalid input.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .banach import (CoordinateSpace, FinVectorSeq, NodeBasisSpace, bs_gap_audit, eval_norm,
                     representation_pipeline, schreier_family, sign_average_report,
                     tall_bound_audit, witness_family)
from .colorings import (PairColoring, canonical_colorings, conv_coloring, devlin_number,
                        homogeneous_sets, ramsey_extract)
from .core_sets import CompactFamily, FinSet
from .errors import ArtifactError, BudgetExceeded, InvalidParams, UnknownSubcommand
from .fronts import parse_front
from .hypergraph_lab import (CardinalInterval, chromatic_number, covering_hypergraph,
                             equi_concentration, gillis_bound, mono_cover_search)
from .measures import RationalMeasure, as_fraction, covering_submeasure, kelley_number
from .posets import divisibility_poset, mirsky_cover, width_and_dilworth, window_duality_check

SCHEMA = "artifact.report/1"


# ------------------------------------------------------------ serialization

def jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, FinSet):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(jsonable(k)) if not isinstance(k, str) else k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def _frac(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParams(f"not a rational: {text!r}") from exc


def _set(text: str) -> FinSet:
    try:
        return FinSet.parse(text)
    except (ValueError, ArtifactError) as exc:
        raise InvalidParams(f"not a finite set: {text!r}") from exc


def _load_measures(path: str) -> list[RationalMeasure]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidParams(f"cannot read measures from {path}: {exc}") from exc
    return [RationalMeasure.from_json(m) for m in data]


def _load_vectors(path: str) -> list[dict]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidParams(f"cannot read vectors from {path}: {exc}") from exc
    return [{int(k): as_fraction(v) for k, v in data[key].items()} for key in sorted(data, key=int)]


def _random_measures(rng: random.Random, count: int, window: int) -> list[RationalMeasure]:
    return [RationalMeasure({n: Fraction(rng.randint(0, 6), rng.randint(1, 6)) for n in range(window)})
            for _ in range(count)]


def _random_pair_coloring(rng: random.Random, n: int) -> PairColoring:
    table = {(a, b): rng.randrange(2) for a in range(n) for b in range(a + 1, n)}
    return PairColoring(lambda a, b: table[(a, b)], name="random")


# ------------------------------------------------------------ handlers
# each returns (results, stats, tables) where tables maps a name to a list of rows

def cmd_measures(args, rng):
    if args.op == "kelley":
        X = FinSet.interval(0, args.n)
        iv = CardinalInterval(X, _frac(args.alpha), _frac(args.beta))
        pts = FinSet.interval(0, len(iv))
        cover = [sum(1 << i for i, a in enumerate(iv.members) if not a >> x & 1) for x in X]
        value = kelley_number(pts, cover)
        return {"kelley": value, "lower_bound": 1 - iv.beta, "holds": value >= 1 - iv.beta}, {"members": len(iv)}, {}
    if args.op == "psi":
        X = FinSet.interval(0, args.n)
        iv = CardinalInterval(X, _frac(args.alpha), _frac(args.beta))
        value = covering_submeasure(X, None, iv.members)
        threshold = (1 - iv.beta) * args.n
        return ({"psi": value, "threshold": threshold, "exceeds": value > threshold,
                 "closed_form": math.floor(iv.beta * args.n) + 1 if iv.members else 0},
                {"members": len(iv)}, {})
    if args.op == "random":
        ms = _random_measures(rng, args.count, args.window)
        return {"measures": [m.to_json() for m in ms]}, {}, {}
    raise UnknownSubcommand(f"measures {args.op}")


def cmd_fronts(args, rng):
    front = parse_front(args.front)
    if args.op == "rank":
        return {"front": args.front, "rank": str(front.rank)}, {}, {}
    if args.op == "step":
        return {"front": args.front, "step": front.step(_set(args.set))}, {}, {}
    if args.op == "members":
        members = front.member_masks(args.window)
        rows = [{"member": str(FinSet.from_mask(m))} for m in members]
        return ({"front": args.front, "window": args.window, "count": len(members),
                 "thin": front.check_thin(args.window)}, {}, {"members": rows})
    raise UnknownSubcommand(f"fronts {args.op}")


def cmd_color(args, rng):
    if args.op == "extract":
        sizes = []
        rows = []
        for trial in range(args.trials):
            c = _random_pair_coloring(rng, args.n)
            H, col = ramsey_extract(c, FinSet.interval(0, args.n))
            sizes.append(len(H))
            rows.append({"trial": trial, "size": len(H), "color": col, "set": str(H)})
        return {"n": args.n, "min_size": min(sizes), "guarantee": Fraction((args.n.bit_length() - 1), 2)}, {}, {"trials": rows}
    if args.op == "conv-zero":
        c = conv_coloring()
        sets = homogeneous_sets(c, 0, FinSet.interval(0, args.window))
        bad = [FinSet.from_mask(s) for s in sets if s and s.bit_count() > (s & -s).bit_length() - 1 + 2]
        return {"window": args.window, "zero_homogeneous": len(sets), "violations": bad}, {}, {}
    if args.op == "devlin":
        return {"d": args.d, "devlin": devlin_number(args.d)}, {}, {}
    raise UnknownSubcommand(f"color {args.op}")


def cmd_poset(args, rng):
    if args.op == "duality":
        c = canonical_colorings(args.coloring)
        reports = [window_duality_check(c, i, FinSet.interval(0, args.window)) for i in (0, 1)]
        verdict = "PASS" if all(r.passed for r in reports) else "FAIL"
        return {"coloring": args.coloring, "window": args.window, "verdict": verdict, "reports": reports}, {}, {}
    if args.op == "divisibility":
        P = divisibility_poset(range(1, args.n + 1))
        dil = width_and_dilworth(P)
        return {"width": dil.width, "chains": dil.chains, "antichain": dil.antichain,
                "levels": mirsky_cover(P)}, {}, {}
    raise UnknownSubcommand(f"poset {args.op}")


def cmd_lab(args, rng):
    if args.op == "gillis":
        delta = _frac(args.delta)
        if args.alpha is not None:
            alpha, beta = _frac(args.alpha), _frac(args.beta)
        else:
            alpha, beta = (1 - delta) / 2, (1 + delta) / 2
        g = gillis_bound(args.d, alpha, beta)
        return {"d": g.d, "alpha": g.alpha, "beta": g.beta, "a": g.a, "m0": g.m0, "k": g.k}, {}, {}
    if args.op == "chi":
        block = (FinSet.interval(0, args.n), _frac(args.alpha), _frac(args.beta))
        H = covering_hypergraph(block, args.d)
        res = chromatic_number(H, max_vertices=args.max_vertices)
        return {"chi": res.chi, "vertices": len(H.vertices), "edges": len(H.edges)}, {"nodes": res.nodes}, {}
    if args.op == "cover-search":
        v = mono_cover_search(args.n, args.p, args.r, budget_ms=args.budget_ms)
        payload = {k: getattr(v, k) for k in ("n", "p", "r", "verdict", "vertices", "edges", "coloring")}
        if v.verdict == "BUDGET":
            raise BudgetExceeded("cover search budget exhausted")
        return payload, {"nodes": v.nodes}, {}
    if args.op == "equi":
        rows = []
        for n in args.sizes:
            est = equi_concentration(n, args.p, _frac(args.delta), _frac(args.eta), _frac(args.eps),
                                     args.trials, rng.randrange(1 << 30))
            rows.append({"n": n, "min_fattening": est.min_fattening, "deficit": est.deficit,
                         "space_size": est.space_size})
        trend = all(a["min_fattening"] <= b["min_fattening"] for a, b in zip(rows, rows[1:]))
        return {"estimates": rows, "non_decreasing": trend}, {}, {"estimates": rows}
    raise UnknownSubcommand(f"lab {args.op}")


def cmd_banach(args, rng):
    if args.op == "norm":
        K = schreier_family(args.window) if args.family == "schreier" else CompactFamily.from_predicate(
            lambda m: m.bit_count() <= args.size, args.window)
        F = _set(args.set)
        return {"norm": eval_norm(K, None, F)}, {"members": len(K)}, {}
    if args.op == "represent":
        ms = _load_measures(args.measures) if args.measures else _random_measures(rng, 4, args.window)
        rep = representation_pipeline(ms, args.window)
        return {"window": args.window, "certified_sets": rep.certified_sets, "equality": True,
                "tree_nodes": len(rep.nodes)}, {}, {}
    if args.op == "signs":
        vecs = [[Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(args.dim)] for _ in range(args.n)]
        rep = sign_average_report(vecs)
        return {"E_sq": rep.E_sq, "sum_sq": rep.sum_sq, "E_lin": rep.E_lin, "subset_avg": rep.subset_avg}, {}, {}
    if args.op == "audit-bs":
        x = FinVectorSeq(_load_vectors(args.vectors), CoordinateSpace("sup"))
        H = _set(args.set)
        lhs, rhs = bs_gap_audit(x, H, {n: 1 for n in H})
        return {"lhs": lhs, "rhs": rhs}, {}, {}
    if args.op == "audit-tall":
        vecs = _load_vectors(args.vectors)
        width = max((k for v in vecs for k in v), default=0) + 1
        tree = CompactFamily.from_predicate(lambda m: m.bit_count() <= args.depth, args.tree_window)
        space = NodeBasisSpace(tree)
        if width > len(space):
            raise InvalidParams("vector coordinates exceed the node basis")
        x = FinVectorSeq(vecs, space, nonneg=True)
        G = witness_family(x)
        audit = tall_bound_audit(x, _set(args.set), G)
        return audit, {}, {}
    raise UnknownSubcommand(f"banach {args.op}")


HANDLERS = {"measures": cmd_measures, "fronts": cmd_fronts, "color": cmd_color,
            "poset": cmd_poset, "lab": cmd_lab, "banach": cmd_banach}


# ------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "invalid choice" in message:
            raise UnknownSubcommand(message)
        raise InvalidParams(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="artifact", description="finite experiments on colorings, ideals and norms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-ms", type=int, default=600_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("measures").add_subparsers(dest="op", required=True, parser_class=_Parser)
    for name in ("kelley", "psi"):
        q = m.add_parser(name)
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--alpha", default="0")
        q.add_argument("--beta", required=True)
    q = m.add_parser("random")
    q.add_argument("--count", type=int, default=3)
    q.add_argument("--window", type=int, default=6)

    f = sub.add_parser("fronts").add_subparsers(dest="op", required=True, parser_class=_Parser)
    for name in ("rank", "step", "members"):
        q = f.add_parser(name)
        q.add_argument("--front", required=True)
        if name == "step":
            q.add_argument("--set", required=True)
        if name == "members":
            q.add_argument("--window", type=int, default=8)

    c = sub.add_parser("color").add_subparsers(dest="op", required=True, parser_class=_Parser)
    q = c.add_parser("extract")
    q.add_argument("--n", type=int, default=64)
    q.add_argument("--trials", type=int, default=10)
    q = c.add_parser("conv-zero")
    q.add_argument("--window", type=int, default=14)
    q = c.add_parser("devlin")
    q.add_argument("--d", type=int, required=True)

    po = sub.add_parser("poset").add_subparsers(dest="op", required=True, parser_class=_Parser)
    q = po.add_parser("duality")
    q.add_argument("--coloring", choices=["ed_fin", "q_coloring"], default="ed_fin")
    q.add_argument("--window", type=int, default=14)
    q = po.add_parser("divisibility")
    q.add_argument("--n", type=int, default=6)

    la = sub.add_parser("lab").add_subparsers(dest="op", required=True, parser_class=_Parser)
    q = la.add_parser("gillis")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--delta", default="0")
    q.add_argument("--alpha")
    q.add_argument("--beta")
    q = la.add_parser("chi")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--alpha", default="1/2")
    q.add_argument("--beta", default="1/2")
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--max-vertices", type=int, default=40)
    q = la.add_parser("cover-search")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--budget", dest="cover_budget", type=int)
    q = la.add_parser("equi")
    q.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 24])
    q.add_argument("--p", type=int, default=2)
    q.add_argument("--delta", default="1/2")
    q.add_argument("--eta", default="1/2")
    q.add_argument("--eps", default="1/8")
    q.add_argument("--trials", type=int, default=20)

    b = sub.add_parser("banach").add_subparsers(dest="op", required=True, parser_class=_Parser)
    q = b.add_parser("norm")
    q.add_argument("--family", choices=["schreier", "size"], default="schreier")
    q.add_argument("--size", type=int, default=2)
    q.add_argument("--window", type=int, default=16)
    q.add_argument("--set", required=True)
    q = b.add_parser("represent")
    q.add_argument("--measures")
    q.add_argument("--window", type=int, default=6)
    q = b.add_parser("signs")
    q.add_argument("--n", type=int, default=6)
    q.add_argument("--dim", type=int, default=3)
    q = b.add_parser("audit-bs")
    q.add_argument("--vectors", required=True)
    q.add_argument("--set", required=True)
    q = b.add_parser("audit-tall")
    q.add_argument("--vectors", required=True)
    q.add_argument("--set", required=True)
    q.add_argument("--depth", type=int, default=2)
    q.add_argument("--tree-window", type=int, default=3)
    return p


def _csv_text(tables: dict, results: dict) -> str:
    buf = io.StringIO()
    rows = next(iter(tables.values())) if tables else [
        {k: json.dumps(jsonable(v)) if isinstance(v, (list, dict)) else jsonable(v) for k, v in results.items()}]
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: jsonable(v) for k, v in row.items()})
    return buf.getvalue()


def run(argv=None) -> tuple[int, dict]:
    """Parse, dispatch and build the report; returns ``(exit_code, report)``.

    Output settings and any CSV tables travel in the private ``_output`` key.
    """
    start = time.monotonic()
    report = {"schema": SCHEMA, "version": __version__}
    output = {"format": "json", "out": None, "tables": {}}
    try:
        args = build_parser().parse_args(argv)
        output.update(format=args.format, out=args.out)
        if args.command == "lab" and args.op == "cover-search" and args.cover_budget is not None:
            args.budget_ms = args.cover_budget
        if args.workers < 1:
            raise InvalidParams("--workers must be positive")
        params = {k: v for k, v in vars(args).items() if k not in ("out", "format")}
        report.update(experiment=f"{args.command} {args.op}", params=params)
        results, stats, tables = HANDLERS[args.command](args, random.Random(args.seed))
        report.update(results=jsonable(results), stats=jsonable(stats))
        output["tables"] = tables
        code = 0
    except BudgetExceeded as exc:
        report.update(error="BudgetExceeded", message=str(exc), bounds=jsonable(exc.bounds))
        code = 2
    except ArtifactError as exc:
        report.update(error=type(exc).__name__, message=str(exc))
        code = 1
    report["runtime_ms"] = int((time.monotonic() - start) * 1000)
    report["_output"] = output
    return code, report


def main(argv=None) -> int:
    code, report = run(argv)
    output = report.pop("_output")
    as_json = json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n"
    text = as_json
    if output["format"] == "csv" and code == 0:
        text = _csv_text(output["tables"], report.get("results", {}))
    if output["out"]:
        path = Path(output["out"])
        path.write_text(text)
        if text is not as_json:
            path.with_suffix(".json").write_text(as_json)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
