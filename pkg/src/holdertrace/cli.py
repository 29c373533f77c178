"""Command-line front end.

Operators are read from JSON operator documents::

    {"algebra": {"block_dims": [2, 1], "weights": [1.0, 0.5]},
     "operators": {"A": [[[[1, 0], [0, 0]], [[0, 0], [2, 0]]], [[[3, 0]]]]}}

Each block is a list of rows, each entry an ``[re, im]`` pair.  An operand
flag takes ``PATH`` or ``PATH#NAME``; ``NAME`` may be omitted when the
document holds a single operator.

Exit codes: 0 success (Equality for ``certify``), 1 StrictInequality
(``certify``) or a failed ``selftest``, 2 Indeterminate (``certify``),
64 usage error, 65 data error, 70 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import holdercore as hc
from . import tracealg as ta
from .errors import (
    BadExponent,
    DataError,
    HolderTraceError,
    NotPositive,
    ShapeMismatch,
    UsageError,
    ZeroOperator,
)
from .holdercore import Status
from .tracealg import BlockOperator, TraceAlgebra

EXIT_OK = 0
EXIT_STRICT = 1
EXIT_INDETERMINATE = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_SOFTWARE = 70

TOL_ENV = "HOLDER_TOL"


# -- JSON ------------------------------------------------------------------


def _encode(obj: Any, indent: int, level: int = 0) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "null"
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent=2) + "\n"


def _complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def blocks_to_json(x: BlockOperator) -> list:
    return [[[_complex(z) for z in row] for row in blk] for blk in x.blocks]


def algebra_to_json(alg: TraceAlgebra) -> dict:
    return {"block_dims": list(alg.block_dims), "weights": list(alg.weights)}


def document(alg: TraceAlgebra, operators: dict[str, BlockOperator]) -> dict:
    return {
        "algebra": algebra_to_json(alg),
        "operators": {name: blocks_to_json(x) for name, x in operators.items()},
    }


def _parse_entry(v) -> complex:
    if isinstance(v, bool):
        raise DataError("booleans are not matrix entries")
    if isinstance(v, (int, float)):
        z = complex(v, 0.0)
    elif isinstance(v, list) and len(v) == 2 and all(
        isinstance(t, (int, float)) and not isinstance(t, bool) for t in v
    ):
        z = complex(v[0], v[1])
    else:
        raise DataError(f"matrix entry must be [re, im], got {v!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DataError("matrix entries must be finite")
    return z


def parse_algebra(obj) -> TraceAlgebra:
    try:
        return TraceAlgebra(tuple(obj["block_dims"]), tuple(obj["weights"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"bad algebra signature: {exc}") from None


def parse_operator(alg: TraceAlgebra, blocks) -> BlockOperator:
    if not isinstance(blocks, list) or len(blocks) != alg.num_blocks:
        raise DataError(f"operator must have {alg.num_blocks} blocks")
    out = []
    for d, blk in zip(alg.block_dims, blocks):
        if not isinstance(blk, list) or len(blk) != d or any(
            not isinstance(row, list) or len(row) != d for row in blk
        ):
            raise DataError(f"block must be {d}x{d}")
        out.append(np.array([[_parse_entry(v) for v in row] for row in blk], dtype=np.complex128))
    return BlockOperator(out)


def load_document(path: str) -> tuple[TraceAlgebra, dict[str, list]]:
    try:
        if path == "-":
            doc = json.load(sys.stdin)
        else:
            with open(path) as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed JSON ({exc.msg})") from None
    if not isinstance(doc, dict) or "algebra" not in doc or not isinstance(doc.get("operators"), dict):
        raise DataError(f"{path}: expected keys 'algebra' and 'operators'")
    return parse_algebra(doc["algebra"]), doc["operators"]


def load_operand(ref: str) -> tuple[TraceAlgebra, BlockOperator]:
    path, _, name = ref.partition("#")
    alg, ops = load_document(path)
    if not name:
        if len(ops) != 1:
            raise DataError(f"{path} holds {sorted(ops)}; choose one with {path}#NAME")
        (name,) = ops
    if name not in ops:
        raise DataError(f"{path} has no operator {name!r}")
    return alg, parse_operator(alg, ops[name])


def load_pair(ref_a: str, ref_b: str) -> tuple[TraceAlgebra, BlockOperator, BlockOperator]:
    alg, a = load_operand(ref_a)
    alg_b, b = load_operand(ref_b)
    if alg_b != alg:
        raise DataError("operands live in different algebras")
    return alg, a, b


# -- arguments ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _exponent(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return x


def default_tolerance() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return hc.DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="holdertrace", description=__doc__.split("\n\n")[0])
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="no human-readable summary on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("norm", parents=[common], help="p-norm (p=inf: operator norm)")
    s.add_argument("--op", required=True)
    s.add_argument("--p", required=True, type=_exponent)

    for name, helptext in [
        ("holder", "Hölder gap report"),
        ("certify", "equality certificate"),
        ("replay", "replay of the equality argument"),
    ]:
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--a", required=True)
        s.add_argument("--b", required=True)
        s.add_argument("--p", required=True, type=_exponent)
        if name == "certify":
            s.add_argument("--tol", type=_positive_float)

    s = sub.add_parser("witness", parents=[common], help="dual-norm witness of unit q-norm")
    s.add_argument("--a", required=True)
    s.add_argument("--p", required=True, type=_exponent)
    s.add_argument("--out")

    s = sub.add_parser("pone", parents=[common], help="p = 1 boundary certificate")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--tol", type=_positive_float)

    s = sub.add_parser("selftest", parents=[common], help="run the seeded property corpus")
    s.add_argument("--seeds", type=int, default=20)
    s.add_argument("--size", type=int, default=6)
    return parser


# -- commands ----------------------------------------------------------------


@dataclass
class Outcome:
    payload: dict
    code: int = EXIT_OK
    summary: str = ""


def _report_json(r: hc.HolderReport) -> dict:
    return {
        "p": r.p,
        "q": r.q,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "gap": r.gap,
        "relative_gap": r.relative_gap,
    }


def cmd_norm(args) -> Outcome:
    alg, x = load_operand(args.op)
    value = ta.pnorm(alg, x, args.p)
    return Outcome({"command": "norm", "p": args.p, "value": value}, summary=f"||x||_{args.p:g} = {value:.17g}")


def cmd_holder(args) -> Outcome:
    alg, a, b = load_pair(args.a, args.b)
    r = hc.holder_report(alg, a, b, args.p)
    return Outcome(
        {"command": "holder", **_report_json(r)},
        summary=f"||ab*||_1 = {r.lhs:.17g} <= {r.rhs:.17g} (gap {r.gap:.3e})",
    )


_STATUS_EXIT = {
    Status.EQUALITY: EXIT_OK,
    Status.STRICT: EXIT_STRICT,
    Status.INDETERMINATE: EXIT_INDETERMINATE,
}


def cmd_certify(args) -> Outcome:
    alg, a, b = load_pair(args.a, args.b)
    tol = args.tol if args.tol is not None else default_tolerance()
    cert = hc.equality_certify(alg, a, b, args.p, tol=tol)
    payload = {
        "command": "certify",
        "status": cert.status.value,
        "deviation": cert.deviation,
        "lambda": cert.lam,
        "tolerance": cert.tolerance,
        "reason": cert.reason,
        "report": _report_json(cert.report),
    }
    dev = "n/a" if cert.deviation is None else f"{cert.deviation:.3e}"
    return Outcome(payload, _STATUS_EXIT[cert.status], f"{cert.status.value} (deviation {dev})")


def cmd_witness(args) -> Outcome:
    alg, a = load_operand(args.a)
    if a.is_zero():
        raise ZeroOperator("the zero operator has no dual witness")
    w = hc.dual_witness(alg, a, args.p)
    doc = document(alg, {"witness": w})
    q = ta.conjugate_exponent(args.p)
    qn, pairing = ta.pnorm(alg, w, q), ta.inner(alg, a, w).real
    summary = f"witness with ||b||_q = {qn:.17g}, Re tau(ab*) = {pairing:.17g}"
    if args.out is None:
        return Outcome(doc, summary=summary)
    try:
        with open(args.out, "w") as fh:
            fh.write(dumps(doc))
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc.strerror}") from None
    payload = {"command": "witness", "out": args.out, "p": args.p, "q": q, "q_norm": qn, "pairing": pairing}
    return Outcome(payload, summary=summary)


def cmd_replay(args) -> Outcome:
    alg, a, b = load_pair(args.a, args.b)
    tr = hc.proof_replay(alg, a, b, args.p)
    payload = {
        "command": "replay",
        "p": tr.p,
        "p_eff": tr.p_eff,
        "swapped": tr.swapped,
        "r": tr.r,
        "r_prime": tr.r_prime,
        "exponent_residual": tr.exponent_residual,
        "s0": tr.s0,
        "s1": tr.s1,
        "s2": tr.s2,
        "s3": tr.s3,
        "slacks": list(tr.slacks),
        "chain_holds": tr.holds(),
        "operators": {
            "normalized_a": blocks_to_json(tr.normalized_a),
            "normalized_b": blocks_to_json(tr.normalized_b),
            "w": blocks_to_json(tr.w),
            "x": blocks_to_json(tr.x),
            "y": blocks_to_json(tr.y),
        },
    }
    chain = " <= ".join(f"{v:.12f}" for v in tr.chain)
    return Outcome(payload, summary=chain)


def cmd_pone(args) -> Outcome:
    alg, a, b = load_pair(args.a, args.b)
    tol = args.tol if args.tol is not None else default_tolerance()
    c = hc.p_one_boundary_certify(alg, a, b, tol)
    payload = {
        "command": "pone",
        "equality": c.equality,
        "condition": c.condition,
        "consistent": c.consistent,
        "lhs": c.lhs,
        "rhs": c.rhs,
        "eigen_defect": c.eigen_defect,
        "commutator_defect": c.commutator_defect,
        "tolerance": tol,
    }
    return Outcome(payload, summary=f"equality={c.equality} condition={c.condition}")


def cmd_selftest(args) -> Outcome:
    from . import selftest

    if args.seeds < 1 or args.size < 1:
        raise UsageError("--seeds and --size must be positive")
    result = selftest.run(args.seeds, args.size)
    failed = [k for k, v in result["checks"].items() if v["passed"] != v["total"] or "error" in v]
    summary = "all checks passed" if result["ok"] else "FAILED: " + ", ".join(failed)
    return Outcome({"command": "selftest", **result}, EXIT_OK if result["ok"] else EXIT_STRICT, summary)


COMMANDS = {
    "norm": cmd_norm,
    "holder": cmd_holder,
    "certify": cmd_certify,
    "witness": cmd_witness,
    "replay": cmd_replay,
    "pone": cmd_pone,
    "selftest": cmd_selftest,
}


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (UsageError, BadExponent)):
        return EXIT_USAGE
    if isinstance(exc, (DataError, ShapeMismatch, ZeroOperator, NotPositive)):
        return EXIT_DATA
    return EXIT_SOFTWARE


def main(argv: list[str] | None = None) -> int:
    quiet = False
    try:
        args = build_parser().parse_args(argv)
        quiet = getattr(args, "quiet", False)
        outcome = COMMANDS[args.command](args)
    except HolderTraceError as exc:
        sys.stdout.write(dumps({"error": {"code": exc.code, "message": str(exc)}}))
        if not quiet:
            print(f"holdertrace: {exc}", file=sys.stderr)
        return _exit_code(exc)
    sys.stdout.write(dumps(outcome.payload))
    if outcome.summary and not quiet:
        print(outcome.summary, file=sys.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
