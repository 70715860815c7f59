"""Command-line front end.

Three commands: ``eval`` (a quantifier on two supplied states), ``suite``
(a named verification suite, emitting a JSON or CSV report), and
``counterexample`` (the closed-form contraction-violation families, which
self-verify). Exit codes are a stable contract: 0 success, 1 expected
property violated, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import secrets
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import harness, qdiv
from .errors import DivergelabError
from .harness import PropertyReport
from .qdiv import QuantifierId
from .search import MAX_VALUE
from .states import DensityMatrix, load_fixture, state_from_dict, state_from_spec

SEED_ENV_VAR = "DIVERGELAB_SEED"

SUITES = (
    "dpi",
    "invariance",
    "optimal-pair",
    "plateau",
    "joint-convexity",
    "kadison",
    "purity-bound",
    "stinespring",
)

# Suites that take no quantifier argument.
_PAIRLESS_SUITES = ("kadison", "purity-bound")

# Default quantifier tags per suite when --q is not given.
_DEFAULT_TAGS = {
    "dpi": list(qdiv.CONTRACTIVE),
    "invariance": list(qdiv.ALL_TAGS),
    "optimal-pair": ["trace_dist"],
    "plateau": list(qdiv.PLATEAU_VALUE),
    "joint-convexity": list(qdiv.JOINTLY_CONVEX),
    "stinespring": ["trace_dist"],
}

# Entropic quantities whose numerical value depends on the log base.
_BASE_DEPENDENT = ("rel_entropy", "qjs")


@dataclass
class RunConfig:
    command: str
    quantifiers: list[str] = field(default_factory=list)
    mu: float = 0.3
    dims: tuple[int, int] = (2, 6)
    trials: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"
    log_base: str = "nat"


def _resolve_seed(arg_seed: Optional[int]) -> int:
    if arg_seed is not None:
        return arg_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return secrets.randbits(32)


def _load_state(source: str) -> DensityMatrix:
    path = Path(source)
    if path.exists():
        return state_from_dict(json.loads(path.read_text()))
    if ":" in source:
        return state_from_spec(source)
    return load_fixture(source)


def _parse_dims(text: str) -> tuple[int, int]:
    if "-" in text:
        low, high = text.split("-", 1)
        return int(low), int(high)
    d = int(text)
    return d, d


def _format_value(value: float, tag: str, log_base: str) -> str:
    if math.isinf(value):
        return "inf"
    if log_base == "bits" and tag in _BASE_DEPENDENT:
        value = value / math.log(2.0)
    return repr(value)


def cmd_eval(args: argparse.Namespace) -> int:
    rho = _load_state(args.state_a)
    sigma = _load_state(args.state_b)
    q = qdiv.quantifier(args.quantifier, args.mu)
    result = qdiv.evaluate(q, rho, sigma)
    print(_format_value(result.value, q.tag, args.log_base))
    return 0


def _quantifier_ids(suite: str, args: argparse.Namespace) -> list[Optional[QuantifierId]]:
    if suite in _PAIRLESS_SUITES:
        return [None]
    tags = args.q or _DEFAULT_TAGS[suite]
    return [qdiv.quantifier(tag, args.mu) for tag in tags]


def _run_one(suite: str, q: Optional[QuantifierId], cfg: RunConfig) -> list[dict]:
    """Run one (suite, quantifier) combination; returns result records."""
    trials = cfg.trials
    if suite == "dpi":
        report = harness.dpi_suite(q, trials or 500, cfg.dims, cfg.seed)
        return [{"type": "report", "report": report}]
    if suite == "invariance":
        reports = harness.invariance_suite(q, trials or 100, cfg.seed)
        return [{"type": "report", "report": r} for r in reports.all_reports()]
    if suite == "plateau":
        report = harness.orthogonal_plateau_check(q, trials or 100, cfg.dims, cfg.seed)
        return [{"type": "report", "report": report}]
    if suite == "joint-convexity":
        report = harness.joint_convexity_suite(q, trials or 300, cfg.seed)
        return [{"type": "report", "report": report}]
    if suite == "kadison":
        return [{"type": "report", "report": harness.kadison_bound_check(trials or 300, cfg.seed)}]
    if suite == "purity-bound":
        return [{"type": "report", "report": harness.purity_bound_check(trials or 300, cfg.seed)}]
    if suite == "stinespring":
        report = harness.stinespring_dpi_equivalence(q, trials or 50, cfg.seed)
        return [{"type": "report", "report": report}]
    # optimal-pair
    dim = cfg.dims[0]
    result = harness.optimal_pair_search(q, dim, seed=cfg.seed)
    return [{"type": "optimization", "quantifier": q.label, "dim": dim, "result": result}]


def _optimization_record(entry: dict) -> dict:
    result = entry["result"]
    target = MAX_VALUE[entry["quantifier"].split("(")[0]]
    return {
        "suite": "optimal-pair",
        "quantifier": entry["quantifier"],
        "dim": entry["dim"],
        "value": result.value,
        "target": target,
        "orthogonality_overlap": result.orthogonality_overlap,
        "purities": list(result.purities),
        "restarts_used": result.restarts_used,
        "converged": result.converged,
        "evaluations": result.evaluations,
    }


def cmd_suite(args: argparse.Namespace) -> int:
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return 2
    cfg = RunConfig(
        command="suite",
        quantifiers=args.q or [],
        mu=args.mu,
        dims=_parse_dims(args.dim),
        trials=args.trials,
        seed=_resolve_seed(args.seed),
        out=args.out,
        format=args.format,
        log_base=args.log_base,
    )
    records: list[dict] = []
    exit_code = 0
    for q in _quantifier_ids(args.suite, args):
        for entry in _run_one(args.suite, q, cfg):
            if entry["type"] == "report":
                report: PropertyReport = entry["report"]
                print(report.summary_line())
                if not report.passed:
                    exit_code = 1
                records.append(report.to_dict())
            else:
                record = _optimization_record(entry)
                ok = (
                    record["value"] >= record["target"] - 1e-3
                    and record["orthogonality_overlap"] <= 1e-3
                )
                print(
                    f"suite=optimal-pair q={record['quantifier']} dim={record['dim']} "
                    f"value={record['value']:.6f} overlap={record['orthogonality_overlap']:.2e} "
                    f"converged={record['converged']}"
                )
                if not ok:
                    exit_code = 1
                records.append(record)
    if cfg.out:
        _write_report_file(cfg, records)
    return exit_code


def _write_report_file(cfg: RunConfig, records: list[dict]) -> None:
    path = Path(cfg.out)
    if cfg.format == "csv":
        lines = [harness.CSV_HEADER]
        for rec in records:
            if "violations" in rec:
                lines.append(
                    f"{rec['suite']},{rec['quantifier']},{rec['trials']},"
                    f"{rec['violations']},{rec['worst_margin']!r},{rec['seed']}"
                )
            else:
                lines.append(
                    f"{rec['suite']},{rec['quantifier']},{rec['restarts_used']},"
                    f"{int(not rec['converged'])},{rec['value']!r},{cfg.seed}"
                )
        path.write_text("\n".join(lines) + "\n")
        return
    config = asdict(cfg)
    config.pop("out")  # self-referential; identical runs must yield identical reports
    envelope = {
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config,
        "results": records,
    }
    path.write_text(json.dumps(envelope, sort_keys=True, indent=1) + "\n")


_COUNTEREXAMPLES = {"hs": harness.hs_counterexample, "dinf": harness.dinf_counterexample}

# Exact closed forms: (before, after, ratio) as functions of n.
_CLOSED_FORMS = {
    "hs": lambda n: (1.0 / math.sqrt(n), 1.0, math.sqrt(n)),
    "dinf": lambda n: (1.0 / n, 1.0, float(n)),
}


def cmd_counterexample(args: argparse.Namespace) -> int:
    if args.n < 2:
        print("n must be >= 2", file=sys.stderr)
        return 2
    record = _COUNTEREXAMPLES[args.name](args.n)
    print(" ".join(repr(round(v, 12)) for v in (record.before, record.after, record.ratio)))
    expected = _CLOSED_FORMS[args.name](args.n)
    computed = (record.before, record.after, record.ratio)
    if any(abs(c - e) > 1e-10 for c, e in zip(computed, expected)):
        print(f"self-check failed: computed {computed}, closed form {expected}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divergelab",
        description="Distinguishability quantifiers and their contraction/invariance suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a quantifier on two states")
    p_eval.add_argument("quantifier", choices=qdiv.ALL_TAGS)
    p_eval.add_argument("state_a", help="file path, fixture name, or generator spec")
    p_eval.add_argument("state_b")
    p_eval.add_argument("--mu", type=float, default=0.3)
    p_eval.add_argument("--log-base", choices=("nat", "bits"), default="nat")
    p_eval.set_defaults(func=cmd_eval)

    p_suite = sub.add_parser("suite", help="run a named verification suite")
    p_suite.add_argument("suite")
    p_suite.add_argument("--q", action="append", help="quantifier tag (repeatable)")
    p_suite.add_argument("--mu", type=float, default=0.3)
    p_suite.add_argument("--dim", default="2-6", help="dimension or range, e.g. 4 or 2-6")
    p_suite.add_argument("--trials", type=int, default=None)
    p_suite.add_argument("--seed", type=int, default=None)
    p_suite.add_argument("--out", default=None)
    p_suite.add_argument("--format", choices=("json", "csv"), default="json")
    p_suite.add_argument("--log-base", choices=("nat", "bits"), default="nat")
    p_suite.set_defaults(func=cmd_suite)

    p_cx = sub.add_parser("counterexample", help="closed-form contraction violations")
    p_cx.add_argument("name", choices=tuple(_COUNTEREXAMPLES))
    p_cx.add_argument("n", type=int)
    p_cx.set_defaults(func=cmd_counterexample)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergelabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
