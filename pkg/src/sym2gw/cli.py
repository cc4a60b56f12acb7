"""Command-line front end: ``sym2gw <verb> ...``.

Exit status: 0 on success, 1 when a computation fails (or the selftest
does), 2 for usage errors such as bad flags or unparsable expressions.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Any, Sequence

from filelock import FileLock, Timeout

from . import __version__
from .acceptance import selftest
from .chow_rings import (
    ORB_NAMES, PAIRING, HilbClass, OrbClass, hilb_integrate, orb_integrate,
    verify_ring_relations,
)
from .crc_bridge import OutOfTable, crc_verify
from .exact_arith import PoleError, SingularMatrixError, format_gauss, format_rational
from .expressions import ExpressionError, parse_class, parse_insertions
from .gw_core import (
    NOT_A_BASE_CASE, InvariantKey, UnstableInvariant, base_value, dimension_admissible,
    expand_insertions, vanishing_reason,
)
from .hyperelliptic import count_hyperelliptic
from .wdvv_engine import (
    FINGERPRINT, InconsistentSystem, InvariantStore, SchedulingError, Underdetermined,
    UnknownLowerInvariant, WdvvEngine,
)

log = logging.getLogger("sym2gw")

ENV_CACHE = "SYM2GW_CACHE"
DEFAULT_CACHE = Path(".sym2gw") / "invariants.cache"
LOCK_TIMEOUT = 600.0

EXIT_OK, EXIT_COMPUTATION, EXIT_USAGE = 0, 1, 2

COMPUTATION_ERRORS = (
    Underdetermined, InconsistentSystem, UnknownLowerInvariant, SchedulingError,
    OutOfTable, PoleError, SingularMatrixError, ArithmeticError,
)


class UsageError(Exception):
    """Bad input that argparse could not catch."""


@dataclass
class ResultEnvelope:
    """What every verb prints under ``--json``."""

    verb: str
    inputs: dict[str, Any]
    result: Any
    provenance: Any
    fingerprint: str = FINGERPRINT
    version: str = __version__
    timing: dict[str, float] | None = None

    def to_json(self) -> str:
        data = asdict(self)
        if data["timing"] is None:
            del data["timing"]
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> ResultEnvelope:
        return cls(**json.loads(text))


@dataclass
class Context:
    args: argparse.Namespace
    cache_path: Path
    store: InvariantStore = field(init=False)
    engine: WdvvEngine = field(init=False)

    def __post_init__(self):
        self.store = InvariantStore(self.cache_path)
        if self.store.status.state == "rejected":
            log.warning("cache rejected (%s); recomputing", self.store.status.detail)
        self.engine = WdvvEngine(self.store)

    def save(self) -> None:
        if self.store.dirty:
            self.store.save()


# -- verbs ------------------------------------------------------------------------------------


def _class_str(x) -> str:
    return str(x) if isinstance(x, (OrbClass, HilbClass)) else format_gauss(x)


def cmd_ring(ctx: Context) -> tuple[ResultEnvelope, str]:
    args = ctx.args
    if args.eval is not None:
        try:
            value = parse_class(args.eval)
        except ExpressionError as exc:
            raise UsageError(str(exc)) from exc
        out: dict[str, Any] = {"class": _class_str(value)}
        if isinstance(value, OrbClass):
            out["ring"] = "orbifold"
            out["integral"] = format_gauss(orb_integrate(value))
        elif isinstance(value, HilbClass):
            out["ring"] = "hilbert"
            out["integral"] = format_gauss(hilb_integrate(value))
        else:
            out["ring"] = "scalar"
        text = "\n".join(f"{k}: {v}" for k, v in out.items())
        return ResultEnvelope("ring", {"eval": args.eval}, out, "closed form"), text

    show = args.show or "products"
    if show == "products":
        table = {
            f"{ORB_NAMES[i]}*{ORB_NAMES[j]}": str(OrbClass.basis(i) * OrbClass.basis(j))
            for i in range(9) for j in range(i, 9)
        }
        text = "\n".join(f"{k} = {v}" for k, v in table.items())
        result: Any = table
    elif show == "pairing":
        rows = [[format_rational(PAIRING[i][j]) for j in range(9)] for i in range(9)]
        width = max(len(c) for r in rows for c in r) + 1
        head = " " * 5 + "".join(n.rjust(width) for n in ORB_NAMES)
        text = "\n".join([head] + [ORB_NAMES[i].ljust(5) + "".join(c.rjust(width) for c in r)
                                   for i, r in enumerate(rows)])
        result = {"basis": list(ORB_NAMES), "matrix": rows}
    else:
        report = verify_ring_relations()
        result = [{"relation": c.name, "residual": c.residual, "vanishes": c.ok} for c in report.checks]
        text = "\n".join(
            f"{c['relation']}: {'0' if c['vanishes'] else c['residual']}" for c in result
        )
        if not report.ok:
            raise ArithmeticError("ring relations fail: " + ", ".join(report.failures))
    return ResultEnvelope("ring", {"show": show}, result, "closed form"), text


def _provenance(store: InvariantStore, key: InvariantKey) -> str:
    reason = vanishing_reason(key)
    if reason is not None:
        return f"vanishes ({reason})"
    if base_value(key) is not NOT_A_BASE_CASE:
        return "closed form"
    raw = (key.d, key.insertions)
    if store.was_loaded(raw):
        return "cache"
    return "computed"


def _evaluate_expression(expression: str, d: int, engine: WdvvEngine,
                         store: InvariantStore) -> tuple[ResultEnvelope, str]:
    if d < 0:
        raise UsageError("--degree must be nonnegative")
    try:
        insertions = parse_insertions(expression)
    except ExpressionError as exc:
        raise UsageError(str(exc)) from exc
    expansion = expand_insertions(d, insertions)
    provenance = {}
    for key in expansion:
        if vanishing_reason(key) is None and key.d == 0 and key.n < 3:
            raise UsageError(f"{key.pretty()} is unstable and has no value")
        provenance[key.serialize()] = _provenance(store, key)
    value = engine.evaluate(d, insertions)
    reasons = sorted({vanishing_reason(k) for k in expansion})
    if not expansion:
        reason = "zero insertion"
    elif None not in reasons:
        reason = ", ".join(reasons)
    else:
        reason = None
    bracket = "<" + ", ".join(str(x) for x in insertions) + f">_{d}"
    result = {"value": format_gauss(value), "reason": reason, "terms": len(expansion)}
    text = f"{bracket} = {format_gauss(value)}" + (f"  ({reason})" if reason else "")
    env = ResultEnvelope("invariant", {"expression": expression, "degree": d}, result, provenance)
    return env, text


def cmd_invariant(ctx: Context) -> tuple[ResultEnvelope, str]:
    return _evaluate_expression(ctx.args.expression, ctx.args.degree, ctx.engine, ctx.store)


def run_invariant(expression: str, d: int, engine: WdvvEngine | None = None) -> ResultEnvelope:
    """Evaluate a comma-separated bracket at degree d; raises UsageError on bad input."""
    engine = engine if engine is not None else WdvvEngine()
    return _evaluate_expression(expression, d, engine, engine.store)[0]


def cmd_hyperelliptic(ctx: Context) -> tuple[ResultEnvelope, str]:
    args = ctx.args
    if args.degree < 1 or args.max_genus < 0:
        raise UsageError("need --degree >= 1 and --max-genus >= 0")
    table = count_hyperelliptic(args.degree, args.max_genus, ctx.engine)
    lines = [f"{'g':>3} {'J(d,g)':>16} {'E(d,g)':>16}  flags"]
    for row in table.as_dict()["rows"]:
        lines.append(f"{row['genus']:>3} {row['J']:>16} {row['E']:>16}  {' '.join(row['flags'])}")
    env = ResultEnvelope(
        "hyperelliptic", {"degree": args.degree, "max_genus": args.max_genus},
        table.as_dict(), "computed",
    )
    return env, "\n".join(lines)


def cmd_crc(ctx: Context) -> tuple[ResultEnvelope, str]:
    args = ctx.args
    if args.max_genus < 1:
        raise UsageError("--max-genus must be at least 1")
    checks = crc_verify(args.max_genus, ctx.engine)
    rows = [c.as_dict() for c in checks]
    text = "\n".join(f"[{r['status'].upper()}] {r['identity']}" for r in rows)
    env = ResultEnvelope("crc", {"action": "verify", "max_genus": args.max_genus}, rows, "computed")
    if not all(c.ok for c in checks):
        return env, text + "\ncrc verification failed"
    return env, text


def run_selftest(quick: bool = False, cache: Path | None = None, timing: bool = False) -> ResultEnvelope:
    return _selftest(quick, cache, timing)[0]


def cmd_selftest(ctx: Context) -> tuple[ResultEnvelope, str]:
    return _selftest(ctx.args.quick, ctx.cache_path, ctx.args.timing)


def _selftest(quick: bool, cache: Path | None, timing: bool) -> tuple[ResultEnvelope, str]:
    report = selftest(cache, quick=quick)
    # the selftest merged its results into the cache file itself
    lines = [r.line() for r in report.criteria]
    for e in report.extras:
        lines.append(f"[{e['status'].upper()}] extra: {e['title']}")
        lines.extend(f"        {d}" for d in e["details"])
    if report.skipped:
        lines.append(f"skipped: {report.skipped} checks at degree >= 2 (--quick)")
    passed = sum(r.passed for r in report.criteria)
    lines.append(f"{passed}/{len(report.criteria)} criteria passed")
    env = ResultEnvelope("selftest", {"quick": quick}, report.as_dict(timing), "computed")
    return env, "\n".join(lines)


def export_keys(max_degree: int, max_points: int) -> list[InvariantKey]:
    """Every dimension-admissible stable key up to the given degree and length."""
    keys = []
    for d in range(max_degree + 1):
        for n in range(3 if d == 0 else 1, max_points + 1):
            for ins in combinations_with_replacement(range(9), n):
                key = InvariantKey(d, ins)
                if dimension_admissible(key):
                    keys.append(key)
    return keys


def cmd_export(ctx: Context) -> tuple[ResultEnvelope, str]:
    args = ctx.args
    if args.max_degree < 0 or args.max_points < 1:
        raise UsageError("need --max-degree >= 0 and --max-points >= 1")
    rows = []
    for key in export_keys(args.max_degree, args.max_points):
        rows.append({
            "key": key.serialize(),
            "degree": key.d,
            "insertions": [ORB_NAMES[k] for k in key.insertions],
            "value": format_rational(ctx.engine.value(key)),
        })
    payload = {"fingerprint": FINGERPRINT, "basis": list(ORB_NAMES), "invariants": rows}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = out.with_name(out.name + ".tmp")
    tmp.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    os.replace(tmp, out)
    nonzero = sum(1 for r in rows if r["value"] != "0")
    result = {"path": str(out), "invariants": len(rows), "nonzero": nonzero}
    env = ResultEnvelope(
        "export",
        {"what": args.what, "max_degree": args.max_degree, "max_points": args.max_points},
        result, "computed",
    )
    return env, f"wrote {len(rows)} invariants ({nonzero} nonzero) to {out}"


VERBS = {
    "ring": cmd_ring,
    "invariant": cmd_invariant,
    "hyperelliptic": cmd_hyperelliptic,
    "crc": cmd_crc,
    "selftest": cmd_selftest,
    "export": cmd_export,
}


# -- argument parsing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON result envelope")
    common.add_argument("--cache", metavar="PATH",
                        help=f"invariant cache file (default: ${ENV_CACHE} or {DEFAULT_CACHE})")
    common.add_argument("--timing", action="store_true", help="report wall-clock time")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(
        prog="sym2gw",
        description="Genus-zero invariants of the orbifold symmetric square of the plane.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("ring", parents=[common], help="orbifold cohomology ring tables")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--show", choices=("products", "pairing", "relations"),
                       help="table to print (default: products)")
    group.add_argument("--eval", metavar="EXPR", help="simplify a class expression")

    p = sub.add_parser("invariant", parents=[common], help="evaluate <x1, ..., xn>_d")
    p.add_argument("--degree", "-d", type=int, required=True)
    p.add_argument("expression", help='comma-separated classes, e.g. "a^4, a^2"')

    p = sub.add_parser("hyperelliptic", parents=[common], help="hyperelliptic curve counts")
    p.add_argument("--degree", "-d", type=int, required=True)
    p.add_argument("--max-genus", "-G", type=int, required=True)

    p = sub.add_parser("crc", parents=[common], help="crepant resolution comparison")
    p.add_argument("action", choices=("verify",))
    p.add_argument("--max-genus", "-G", type=int, default=3)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    p.add_argument("--quick", action="store_true", help="skip checks at degree 2 and above")

    p = sub.add_parser("export", parents=[common], help="write an invariant table as JSON")
    p.add_argument("--what", choices=("invariants",), required=True)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--max-degree", type=int, default=1)
    p.add_argument("--max-points", type=int, default=6)
    return parser


def resolve_cache_path(flag: str | None) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_CACHE)
    return Path(env) if env else DEFAULT_CACHE


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    cache_path = resolve_cache_path(args.cache)
    cache_path.parent.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(cache_path) + ".lock")
    start = time.perf_counter()
    try:
        with lock.acquire(timeout=LOCK_TIMEOUT):
            ctx = Context(args, cache_path)
            try:
                env, text = VERBS[args.verb](ctx)
            finally:
                ctx.save()
    except Timeout:
        print(f"sym2gw: cache {cache_path} is locked by another process", file=sys.stderr)
        return EXIT_COMPUTATION
    except (UsageError, UnstableInvariant) as exc:
        print(f"sym2gw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except COMPUTATION_ERRORS as exc:
        print(f"sym2gw: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    elapsed = time.perf_counter() - start
    if args.timing:
        env.timing = {"seconds": round(elapsed, 3)}
    if args.json:
        print(env.to_json())
    else:
        print(text)
        if args.timing:
            print(f"time: {elapsed:.3f} s", file=sys.stderr)
    return EXIT_OK if _succeeded(env) else EXIT_COMPUTATION


def _succeeded(env: ResultEnvelope) -> bool:
    if env.verb == "selftest":
        return bool(env.result["passed"])
    if env.verb == "crc":
        return all(r["status"] == "pass" for r in env.result)
    return True


if __name__ == "__main__":
    sys.exit(main())
