"""Command-line driver: ``bdcover <subcommand>`` emits a JSON ReportDocument.

Exit codes: 0 all checks pass, 1 some check failed, 2 bad usage or input.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import bd, extensions as ext, geometry as geo, qforms, roots, symbols
from .errors import ArtifactError, CheckFailure, UsageError
from .lattice import Lattice, MuN
from .qforms import QuadraticForm

STATUSES = ("pass", "fail", "skip")


@dataclass
class CheckResult:
    name: str
    status: str
    payload: Any = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "payload": _plain(self.payload)}


@dataclass
class ReportDocument:
    command: str
    parameters: Dict[str, Any]
    results: List[CheckResult] = field(default_factory=list)
    timestamp: Optional[str] = None

    def add(self, name: str, ok: Optional[bool], payload: Any = None) -> CheckResult:
        status = "skip" if ok is None else ("pass" if ok else "fail")
        r = CheckResult(name, status, payload)
        self.results.append(r)
        return r

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_json(self) -> dict:
        return {"command": self.command, "parameters": _plain(self.parameters),
                "timestamp": self.timestamp, "results": [r.to_json() for r in self.results]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def to_tsv(self) -> str:
        """One row per check; list-of-dict payloads under "rows" become sub-tables."""
        lines = ["name\tstatus\tpayload"]
        for r in self.results:
            p = _plain(r.payload)
            rows = p.get("rows") if isinstance(p, dict) else None
            if rows and all(isinstance(x, dict) for x in rows):
                cols = sorted({k for x in rows for k in x})
                lines.append(f"{r.name}\t{r.status}\t" + "\t".join(cols))
                for x in rows:
                    lines.append("\t\t" + "\t".join(_cell(x.get(c)) for c in cols))
            else:
                lines.append(f"{r.name}\t{r.status}\t{_cell(p)}")
        return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return "" if v is None else str(v)


def _plain(x):
    """JSON-ready copy: Fractions become strings, numpy becomes lists and ints."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    return x


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def _weyl_order(family: str, n: int) -> int:
    if family == "A":
        return factorial(n + 1)
    if family in ("B", "C"):
        return 2 ** n * factorial(n)
    return 2 ** (n - 1) * factorial(n)


def _root_count(family: str, n: int) -> int:
    return {"A": n * (n + 1), "B": 2 * n * n, "C": 2 * n * n, "D": 2 * n * (n - 1)}[family]


def cmd_rootdatum(a, rep: ReportDocument) -> None:
    d = roots.build_root_datum(a.family, a.rank)
    rep.add("root count", len(d.roots) == _root_count(d.family, d.n),
            {"roots": len(d.roots), "expected": _root_count(d.family, d.n)})
    if a.no_weyl:
        rep.add("weyl order", None)
    else:
        W = roots.weyl_group(d)
        rep.add("weyl order", len(W) == _weyl_order(d.family, d.n),
                {"order": len(W), "expected": _weyl_order(d.family, d.n)})
    if a.signs:
        bad = [(x, y) for x in d.roots for y in d.roots
               if not roots.check_sign_group_level(d, x, y)][:5]
        rep.add("signs at group level", not bad, {"counterexamples": bad})
    rep.add("datum", True, d.to_json(with_signs=a.signs))


def cmd_qform(a, rep: ReportDocument) -> None:
    d = roots.build_root_datum(a.family, a.rank)
    if d.family != "A":
        space = qforms.invariant_form_space(d)
        rep.add("solution space is a line", len(space) == 1, {"dimension": len(space)})
    Q = qforms.weyl_invariant_form(d, a.a, q_offdiag=a.offdiag, decomposable=not a.offdiag)
    rep.add("weyl invariant", qforms.is_weyl_invariant(Q, d, full=not a.no_weyl),
            {"full_group": not a.no_weyl})
    payload = {"diag": list(Q.diag), "offdiag": [list(r) for r in Q.offdiag]}
    if a.n is not None:
        payload["n_Q"] = qforms.compute_nQ(a.n, Q, d)
    rep.add("form", True, payload)


def cmd_square(a, rep: ReportDocument) -> None:
    d = roots.build_root_datum(a.family, a.rank)
    T = bd.make_triple(d, a.a, rng=random.Random(a.seed) if a.seed is not None else None)
    sc = bd.construct_square(T, a.k, a.n, Fraction(a.link_shift))
    report = bd.verify_square_theorem(sc, window=a.window)
    for name, ok in report.checks.items():
        if name.startswith("info:"):
            rep.add(name[5:].strip(), None, {"holds": ok})
        else:
            rep.add(name, ok)
    rep.add("construction", True, {**report.details, "n_Q": sc.nQ, "K": sc.K,
                                   "output_rank": sc.output.Q.rank})


def _parse_form(text: Optional[str], rank: int) -> QuadraticForm:
    """Gram-style description "diag;b01,b02,...": Q = sum d_i y_i^2 + sum b_ij y_i y_j."""
    if not text:
        return QuadraticForm(Lattice(rank), (1,) * rank, tuple((0,) * rank for _ in range(rank)))
    head, _, tail = text.partition(";")
    diag = tuple(int(x) for x in head.split(","))
    r = len(diag)
    off = [[0] * r for _ in range(r)]
    vals = [int(x) for x in tail.split(",")] if tail else []
    it = iter(vals)
    for i in range(r):
        for j in range(i + 1, r):
            off[i][j] = next(it, 0)
    return QuadraticForm(Lattice(r), diag, tuple(tuple(x) for x in off))


def cmd_symbols(a, rep: ReportDocument) -> None:
    K = symbols.TameLocalField.parse(a.field, a.n)
    rep.parameters["field"] = K.descriptor()
    did = False
    if a.hilbert:
        x, y = (K.element(s) for s in a.hilbert)
        h = symbols.tame_hilbert(x, y, K)
        rep.add("hilbert", True, {"a": a.hilbert[0], "b": a.hilbert[1], "n": h.n, "index": h.idx})
        did = True
    if a.residue:
        F = K.residue_field if K.kind == "laurent" else symbols.QQ
        f, g = (symbols.parse_laurent(s, F) if K.kind == "laurent" else
                symbols.LaurentSeries.make(F, *_series_args(s)) for s in a.residue)
        val = symbols.residue_symbol(f, g)
        rep.add("residue", True, {"value": val})
        did = True
    if a.commutator:
        Q = _parse_form(a.form, 2)
        i, j, u, v = a.commutator
        i, j = int(i), int(j)
        x = symbols.basis_lift(K, Q.rank, i, K.element(u))
        y = symbols.basis_lift(K, Q.rank, j, K.element(v))
        got = symbols.torus_commutator(x, y, Q)
        want = symbols.expected_commutator(Q, i, j, K.element(u), K.element(v), K)
        rep.add("torus commutator", got == want, {"index": got.idx, "expected": want.idx})
        did = True
    if a.samples or not did:
        rng = random.Random(a.seed)
        n = a.samples or 50
        st = sum(not symbols.tame_hilbert(*symbols.random_steinberg_input(K, rng), K).is_one()
                 for _ in range(n))
        rep.add("steinberg", st == 0, {"samples": n, "failures": st})
        bm = 0
        for _ in range(n):
            x, y, z = (symbols.random_element(K, rng) for _ in range(3))
            bm += symbols.tame_hilbert(x * y, z, K) != symbols.tame_hilbert(x, z, K) * symbols.tame_hilbert(y, z, K)
        rep.add("bimultiplicative", bm == 0, {"samples": n, "failures": bm})


def _series_args(s: str):
    if ":" in s:
        v, cs = s.split(":", 1)
        return int(v), [Fraction(c) for c in cs.split(",")]
    return 0, [Fraction(s)]


def cmd_orbits(a, rep: ReportDocument) -> None:
    R = geo.enumerate_double_cosets(a.family, a.m, a.q, a.k, max_states=a.max_states, jobs=a.jobs)
    rep.add("grassmannian count", R.total == R.expected_total,
            {"total": R.total, "expected": R.expected_total})
    rep.add("orbits partition", sum(o.size for o in R.orbits) == R.total,
            {"orbits": len(R.orbits)})
    mains = R.main_orbits()
    rep.add("one main orbit", len(mains) == 1 if a.k == 1 else None,
            {"main_orbits": len(mains)})
    if a.k == 1 and mains:
        G = geo.group_order(a.family, a.m, a.q)
        rep.add("main stabilizer is the diagonal", mains[0].stabilizer_order == G
                and bool(mains[0].stabilizer_is_diagonal),
                {"stabilizer_order": mains[0].stabilizer_order, "group_order": G})
        rep.add("negligible orbits have N_minus",
                all(o.n_minus for o in R.orbits if o.cls != "main"))
    rows = [{k: v for k, v in o.to_json().items() if k != "representative"} for o in R.orbits]
    payload = R.to_json()
    payload["rows"] = rows
    rep.add("report", True, payload)


def cmd_lemmas(a, rep: ReportDocument) -> None:
    rng = random.Random(a.seed)
    # Baer sum versus pushout
    bad = 0
    for t in range(a.samples):
        E = ext.random_table_extension(rng.randint(1, 3), MuN(12), rng, window=1)
        m = rng.randint(0, 5)
        pts = ext.full_grid(E.rank, a.window)
        bad += not ext.cocycle_tables_equal(ext.pushout_m(E, m), ext.baer_sum_n(E, m), pts)
    rep.add("baer sum equals pushout", bad == 0, {"samples": a.samples, "failures": bad})
    # the two s_Q routes
    for fam, n in (("C", 2), ("B", 2), ("D", 3), ("A", 2)):
        d = roots.build_root_datum(fam, n)
        T = bd.make_triple(d, 2, rng=rng)
        lift = bd.sq_extend(T, strict=False)
        wvals, wbad = bd.weyl_route_closure(T)
        agree = not wbad and all(wvals[c] == lift.value(c) for c in d.coroots)
        inv = all(ext.ext_mul(lift.value(c), lift.value(tuple(-x for x in c))) == T.E.identity()
                  for c in d.coroots)
        rep.add(f"s_Q routes agree {d.name}", agree and inv)
    # square theorem on a small case
    T = bd.make_triple(roots.build_root_datum("C", 1), 1, rng=rng)
    sq = bd.verify_square_theorem(bd.construct_square(T, 1, 2), window=a.window)
    rep.add("square theorem C1 k=1 n=2", sq.ok, {k: v for k, v in sq.checks.items()})
    # local symbols
    for desc in ("Qp:5,n:4", "Fq:9,n:8"):
        K = symbols.TameLocalField.parse(desc)
        st = sum(not symbols.tame_hilbert(*symbols.random_steinberg_input(K, rng), K).is_one()
                 for _ in range(a.samples))
        rep.add(f"steinberg {desc}", st == 0, {"failures": st})
    # geometry lemmas
    for q in (2, 3):
        G = geo.build_group("C", 1, q)
        ok, cnt = geo.diagonal_lemma_check(G, 1)
        rep.add(f"diagonal lemma Sp2(F{q})", ok, {"pairs_in_P": cnt})
    G = geo.build_group("C", 1, 3)
    dbl = geo.DoubledSpace(G.space, 2)
    dets = {geo.modular_character_check(G.random_element(rng), G.random_element(rng), dbl, G)
            for _ in range(a.samples)}
    rep.add("modular character Sp2(F3) k=2", dets == {1}, {"values": sorted(dets)})


# ----------------------------------------------------------------------------
# parsing and dispatch
# ----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bdcover", description=__doc__.splitlines()[0])
    p.add_argument("--tsv", action="store_true", help="flatten the report to TSV")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("rootdatum", help="build and serialize a root datum")
    s.add_argument("--family", required=True, choices="ABCD")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--signs", action="store_true", help="include the Chevalley sign table")
    s.add_argument("--no-weyl", action="store_true", help="skip the Weyl group enumeration")

    s = sub.add_parser("qform", help="solve for the invariant form")
    s.add_argument("--family", required=True, choices="ABCD")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--offdiag", type=int, default=0, help="GL cross term")
    s.add_argument("--no-weyl", action="store_true", help="check simple reflections only")

    s = sub.add_parser("square", help="construct the doubled datum and verify it")
    s.add_argument("--family", required=True, choices="ABCD")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--link-shift", default="0")
    s.add_argument("--window", type=int, default=1)
    s.add_argument("--seed", type=int, help="random f table (default: trivial)")

    s = sub.add_parser("symbols", help="tame symbols and torus covers")
    s.add_argument("--field", required=True, help='e.g. "Qp:5" or "Fq:9,n:8"')
    s.add_argument("--n", type=int)
    s.add_argument("--hilbert", nargs=2, metavar=("A", "B"))
    s.add_argument("--residue", nargs=2, metavar=("F", "G"), help='series as "v:c0,c1,..."')
    s.add_argument("--commutator", nargs=4, metavar=("I", "J", "U", "V"))
    s.add_argument("--form", help='"d0,d1;b01" for the torus form')
    s.add_argument("--samples", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("orbits", help="enumerate double cosets over F_q")
    s.add_argument("--family", required=True, choices="ABCD")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--max-states", type=int, default=geo.MAX_STATES)
    s.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("lemmas", help="run the identity suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--window", type=int, default=1)
    return p


COMMANDS: Dict[str, Callable] = {
    "rootdatum": cmd_rootdatum, "qform": cmd_qform, "square": cmd_square,
    "symbols": cmd_symbols, "orbits": cmd_orbits, "lemmas": cmd_lemmas,
}

_GLOBAL = ("command", "tsv", "output", "no_timestamp")


def run_command(argv: Sequence[str]) -> tuple:
    """Returns (exit code, ReportDocument or None)."""
    try:
        args = build_parser().parse_args(list(argv))
        if not args.command:
            raise UsageError("a subcommand is required")
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2, None
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _GLOBAL}
    ts = None if args.no_timestamp else _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    rep = ReportDocument(args.command, params, timestamp=ts)
    try:
        COMMANDS[args.command](args, rep)
    except CheckFailure as e:
        rep.add("error", False, {"type": type(e).__name__, "message": str(e)})
    except (ArtifactError, ValueError) as e:
        rep.add("error", False, {"type": type(e).__name__, "message": str(e)})
        _emit(rep, args)
        return 2, rep
    _emit(rep, args)
    return rep.exit_code(), rep


def _emit(rep: ReportDocument, args) -> None:
    text = rep.to_tsv() if args.tsv else rep.dumps() + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
