"""Command-line entry point.

Exit codes: 0 when every check of the chosen command passes, 1 on a
failed check (a JSON failure report goes to stderr), 2 on a configuration
error.  Output goes to ``--out`` atomically or to stdout.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import counterexample as ce
from . import suite
from .acdo import compute_acdo
from .errors import (
    BallOutsideDomain,
    ConfigError,
    DimensionMismatch,
    EllipticSetsError,
    InvalidCount,
    InvalidRadius,
    InvalidSpec,
    ParseError,
    PointOutsideDomain,
    SingularShift,
)
from .levelsets import check_condition
from .matrixineq import (
    BlockPair,
    block_defect,
    forward_direction_check,
    lemma_sm_defect,
    resolvent_lower_defect,
    reverse_direction_check,
)
from .operators import KINDS, OperatorSpec, make_operator
from .symmat import op_norm, resolvent_transform

COMMANDS = ("acdo", "condition", "matrixineq", "counterexample", "properties")
CONFIG_ERRORS = (
    ConfigError,
    InvalidSpec,
    DimensionMismatch,
    PointOutsideDomain,
    BallOutsideDomain,
    InvalidCount,
    InvalidRadius,
    SingularShift,
)


@dataclass
class RunConfig:
    command: str
    operator: OperatorSpec | None = None
    seed: int = 0
    tol: float = suite.TOL
    output_path: str | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise ConfigError(f"--tol must be positive, got {self.tol!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"--format must be json or csv, got {self.format!r}")
        if self.command in ("acdo", "condition") and self.operator is None:
            raise ConfigError(f"{self.command} requires --operator")
        if self.command == "acdo" and self.options.get("X") is None:
            raise ConfigError("acdo requires --X")
        if self.command == "condition":
            for key in ("x0", "t"):
                if self.options.get(key) is None:
                    raise ConfigError(f"condition requires --{key}")
            ts = self.options["t"]
            if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
                raise ConfigError("--t must be positive and strictly decreasing")


def _line_of(text, key):
    for i, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return i
    return None


def parse_operator_spec(path):
    """Read an operator spec file.

    Structural problems raise :class:`ParseError` naming the field (and the
    line, when it can be located); a well-formed spec that describes an
    invalid operator raises :class:`InvalidSpec`.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read operator file ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    for key in data:
        if key not in ("kind", "n", "params"):
            raise ParseError(f"{path}:{_line_of(text, key)}: unknown field {key!r}", key, _line_of(text, key))
    if "kind" not in data:
        raise ParseError(f"{path}: missing field 'kind'", "kind")
    if data["kind"] not in KINDS:
        line = _line_of(text, "kind")
        raise ParseError(
            f"{path}:{line}: field 'kind': unknown operator kind {data['kind']!r} (expected one of {', '.join(KINDS)})",
            "kind",
            line,
        )
    n = data.get("n", 2)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        line = _line_of(text, "n")
        raise ParseError(f"{path}:{line}: field 'n': expected a positive integer, got {n!r}", "n", line)
    if not isinstance(data.get("params", {}), dict):
        line = _line_of(text, "params")
        raise ParseError(f"{path}:{line}: field 'params': expected an object", "params", line)
    return OperatorSpec.from_dict(data)


def parse_matrix(text):
    """``"a,b;c,d"`` to a symmetric matrix (rows split on ';', entries on ',')."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.strip().split(";")]
    except ValueError as exc:
        raise ConfigError(f"matrix literal {text!r}: {exc}") from exc
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ConfigError(f"matrix literal {text!r} is not square")
    M = np.array(rows)
    return (M + M.T) / 2


def parse_vector(text, name):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--{name} {text!r}: {exc}") from exc


def _csv(rows):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def write_atomic(path, text):
    """Write ``text`` as UTF-8 via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# each command returns (output text, failures); failures is a list of dicts


def _cmd_acdo(cfg):
    F = make_operator(cfg.operator)
    X = cfg.options["X"]
    if X.shape != (F.dim, F.dim):
        raise DimensionMismatch(f"--X is {X.shape[0]}x{X.shape[1]} but the operator acts on S({F.dim})")
    x = cfg.options.get("x0")
    res = compute_acdo(F, X, None if x is None else F.point(x), cfg.tol)
    if cfg.format == "csv":
        out = _csv([["value", "t_out", "t_in", "evals"], [repr(res.value), *map(repr, res.bracket), res.evals]])
    else:
        out = json.dumps(
            {
                "operator": cfg.operator.to_dict(),
                "X": X.tolist(),
                "value": res.value,
                "bracket": list(res.bracket),
                "evals": res.evals,
                "tol": cfg.tol,
            },
            sort_keys=True,
        )
    return out, []


def _cmd_condition(cfg):
    F = make_operator(cfg.operator)
    opts = cfg.options
    report = check_condition(F, opts["x0"], opts["t"], opts["pairs"], opts["samples"], cfg.seed, cfg.tol)
    out = report.to_csv() if cfg.format == "csv" else report.to_json()
    failures = []
    if not report.passes():
        failures.append(
            {
                "check": "condition",
                "verdict": report.verdict(),
                "decay_slope": report.decay_slope(),
                "rows": report.to_dict()["rows"],
            }
        )
    return out, failures


def _cmd_matrixineq(cfg):
    opts = cfg.options
    X = opts.get("X")
    if X is None:
        res = suite.criterion_matrix_inequalities(seed=cfg.seed)
        checks = {k: {"value": v} for k, v in suite._plain(res.details).items()}
        failures = [] if res.passed else [{"check": "matrix_inequalities", "details": suite._plain(res.details)}]
    else:
        checks = {}
        failures = []
        delta, Y, alpha = opts.get("delta"), opts.get("Y"), opts.get("alpha")
        if delta is not None:
            if not 0 < delta * op_norm(X) < 1:
                raise ConfigError("--delta must satisfy 0 < delta*|X| < 1")
            R = resolvent_transform(X, delta)
            n = X.shape[0]
            checks["block_defect"] = {"value": block_defect(BlockPair(X, R, 1 / delta)), "limit": 1e-9}
            checks["lemma_sm_defect"] = {"value": lemma_sm_defect(X, delta, np.eye(n), np.eye(n)), "limit": 1e-9}
            checks["resolvent_lower_defect"] = {"value": resolvent_lower_defect(X, delta), "floor": -1e-10}
            if Y is None:
                Y, alpha = R, 1 / delta
        if Y is not None:
            if alpha is None:
                raise ConfigError("--Y requires --alpha (or --delta)")
            if Y.shape != X.shape:
                raise DimensionMismatch("--X and --Y differ in shape")
            p = BlockPair(X, Y, alpha)
            holds = block_defect(p) <= 1e-9
            checks["block_holds"] = {"passed": holds}
            if holds:
                fwd = forward_direction_check(p)
                checks["forward"] = {"passed": fwd.passed, "witness_eps": fwd.witness_eps}
            rev = reverse_direction_check(X, Y, alpha)
            # the eps-grid condition and the block inequality must agree
            checks["reverse"] = {"passed": rev.passed == holds, "grid_condition": rev.passed, "witness_eps": rev.witness_eps}
        for name, c in checks.items():
            if "limit" in c:
                ok = c["value"] <= c["limit"]
            elif "floor" in c:
                ok = c["value"] >= c["floor"]
            else:
                ok = c["passed"] or name == "block_holds"
            if not ok:
                failures.append({"check": name, **c})
        checks = suite._plain(checks)
    if cfg.format == "csv":
        rows = [["check", "field", "value"]]
        for name, c in checks.items():
            for k, v in c.items():
                rows.append([name, k, json.dumps(v) if isinstance(v, (dict, list)) else v])
        return _csv(rows), failures
    return json.dumps(checks, sort_keys=True), failures


def _cmd_counterexample(cfg):
    res = suite.criterion_counterexample(seed=cfg.seed, grid=cfg.options["grid"])
    failures = [] if res.passed else [{"check": k, "passed": False} for k, v in res.details["checks"].items() if not v]
    if cfg.format == "csv":
        return ce.profile_csv(), failures
    cert = suite._plain(res.details["certificate"])
    return json.dumps(cert, sort_keys=True), failures


def _cmd_properties(cfg):
    results = suite.run_suite(seed=cfg.seed, only=cfg.options.get("only"))
    failures = [r.to_dict() for r in results if not r.passed]
    if cfg.format == "csv":
        return _csv([["id", "name", "passed"]] + [[r.id, r.name, r.passed] for r in results]), failures
    return suite.report_json(results), failures


HANDLERS = {
    "acdo": _cmd_acdo,
    "condition": _cmd_condition,
    "matrixineq": _cmd_matrixineq,
    "counterexample": _cmd_counterexample,
    "properties": _cmd_properties,
}


def run(config):
    """Execute a validated configuration and return the process exit code."""
    try:
        config.validate()
        out, failures = HANDLERS[config.command](config)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EllipticSetsError as exc:
        failures = [{"check": config.command, "error": type(exc).__name__, "message": str(exc)}]
        out = None
    if out is not None:
        if not out.endswith("\n"):
            out += "\n"
        if config.output_path:
            write_atomic(config.output_path, out)
        else:
            sys.stdout.write(out)
    if failures:
        report = {"command": config.command, "seed": config.seed, "passed": False, "failures": suite._plain(failures)}
        print(json.dumps(report, sort_keys=True, indent=2), file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="ellipticsets", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=suite.TOL)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("json", "csv"))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("acdo", parents=[common], help="evaluate the distance operator at one matrix")
    p.add_argument("--operator", metavar="PATH", required=True)
    p.add_argument("--X", metavar="MATRIX", required=True, help='rows split by ";", entries by ","')
    p.add_argument("--x0", metavar="CSV", help="space point (default: origin)")

    p = sub.add_parser("condition", parents=[common], help="sup-excess table of permuted level sets")
    p.add_argument("--operator", metavar="PATH", required=True)
    p.add_argument("--x0", metavar="CSV", required=True)
    p.add_argument("--t", metavar="CSV", required=True, help="decreasing radii")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--samples", type=int, default=20)

    p = sub.add_parser("matrixineq", parents=[common], help="check the resolvent matrix inequalities")
    p.add_argument("--X", metavar="MATRIX")
    p.add_argument("--Y", metavar="MATRIX")
    p.add_argument("--alpha", type=float)
    p.add_argument("--delta", type=float)

    p = sub.add_parser("counterexample", parents=[common], help="emit the comparison counterexample certificate")
    p.add_argument("--grid", type=int, default=256, metavar="N")

    p = sub.add_parser("properties", parents=[common], help="run the seeded property suite")
    p.add_argument("--only", metavar="CSV", help="criterion ids to run, e.g. 1,3")
    return parser


def config_from_args(args):
    opts = {}
    operator = parse_operator_spec(args.operator) if getattr(args, "operator", None) else None
    if getattr(args, "X", None):
        opts["X"] = parse_matrix(args.X)
    if getattr(args, "Y", None):
        opts["Y"] = parse_matrix(args.Y)
    for key in ("alpha", "delta", "pairs", "samples", "grid"):
        if getattr(args, key, None) is not None:
            opts[key] = getattr(args, key)
    if getattr(args, "x0", None):
        opts["x0"] = parse_vector(args.x0, "x0")
    if getattr(args, "t", None):
        opts["t"] = parse_vector(args.t, "t")
    if getattr(args, "only", None):
        try:
            opts["only"] = {int(v) for v in args.only.split(",")}
        except ValueError as exc:
            raise ConfigError(f"--only {args.only!r}: {exc}") from exc
    if "grid" in opts and opts["grid"] < 8:
        raise ConfigError("--grid must be at least 8")
    fmt = args.format or ("csv" if args.command == "condition" else "json")
    return RunConfig(args.command, operator, args.seed, args.tol, args.out, fmt, opts)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
