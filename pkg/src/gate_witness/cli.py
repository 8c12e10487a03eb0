"""Batch command-line front end.

Subcommands: ``report``, ``sweep``, ``verify-bounds``, ``table``.
Exit codes: 0 success, 1 usage or configuration error, 2 invariant or
verification failure. ``GATE_WITNESS_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

import jsonschema
import numpy as np

from .bounds import BOUND_BASES, verify_ensemble
from .channel import CHANNEL_SPEC_SCHEMA, SWEEP_PARAMETER, channel_from_spec, ideal_cnot, noisy_gate
from .charops import classification_table
from .exceptions import GateWitnessError, InvariantError
from .report import BoundsReport, build_report
from .sampling import ShotPlan
from .states import Axis
from .tensor import require_unitary

log = logging.getLogger("gate_witness")

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2

NAMED_GATES = {
    "cnot": ideal_cnot,
    "identity": lambda: np.eye(4, dtype=np.complex128),
    "swap": lambda: np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]],
}

_complex_pair = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "gate": {
            "oneOf": [
                {"enum": sorted(NAMED_GATES)},
                {"type": "array", "items": _complex_pair, "minItems": 16, "maxItems": 16},
            ]
        },
        "noise": {"$ref": "#/$defs/channel"},
        "mode": {"enum": ["analytic", "sampled"]},
        "shot_plan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "shots_per_input": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
        },
        "fidelities": {
            "oneOf": [{"const": "all"}, {"type": "array", "items": {"type": "string"}}]
        },
        "output": {"type": "string"},
    },
    "$defs": {"channel": CHANNEL_SPEC_SCHEMA},
}
# CHANNEL_SPEC_SCHEMA refers to its own "$defs"; hoist them to the root
SCENARIO_SCHEMA["$defs"].update(copy.deepcopy(CHANNEL_SPEC_SCHEMA["$defs"]))


class ConfigError(GateWitnessError, ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        cfg = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: Any) -> None:
    try:
        jsonschema.validate(cfg, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None


def gate_from_config(spec) -> np.ndarray:
    if spec is None:
        return ideal_cnot()
    if isinstance(spec, str):
        return NAMED_GATES[spec]()
    u = np.array([complex(re, im) for re, im in spec]).reshape(4, 4)
    try:
        return require_unitary(u)
    except GateWitnessError as exc:
        raise ConfigError(f"gate: {exc}") from None


def _gate_name(spec) -> str:
    return spec if isinstance(spec, str) else "custom"


def _report_for(cfg: dict, args) -> BoundsReport:
    gate = gate_from_config(cfg.get("gate"))
    noise_spec = cfg.get("noise", {"type": "ideal"})
    ch = noisy_gate(gate, channel_from_spec(noise_spec))
    mode = cfg.get("mode", "analytic")
    plan = None
    if mode == "sampled" or args.shots is not None:
        sp = cfg.get("shot_plan", {})
        shots = args.shots if args.shots is not None else sp.get("shots_per_input", 10_000)
        seed = args.seed if args.seed is not None else sp.get("seed", 0)
        plan = ShotPlan(int(shots), int(seed))
        mode = "sampled"
    scenario = {"gate": _gate_name(cfg.get("gate", "cnot")), "noise": noise_spec}
    return build_report(ch, gate, mode, plan, cfg.get("fidelities", "all"), scenario)


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        return
    Path(out).write_text(text, encoding="utf-8")
    log.info("wrote %s", out)


def cmd_report(args) -> int:
    cfg = load_config(args.config)
    report = _report_for(cfg, args)
    _write(report.to_json(), args.out or cfg.get("output"))
    sys.stdout.write(report.render())
    return EXIT_OK


def parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo_f, hi_f, n = float(lo), float(hi), int(steps)
    except ValueError:
        raise ConfigError(f"--param-range must be LO:HI:STEPS with numbers, got {text!r}") from None
    if n < 2:
        raise ConfigError(f"a sweep needs at least 2 grid points, got {n}")
    return np.linspace(lo_f, hi_f, n)


def capability_crossing(values, capabilities) -> Optional[float]:
    """First grid value where the capability bound changes sign relative to the first point."""
    start = capabilities[0] > 0
    for v, c in zip(values, capabilities):
        if (c > 0) != start:
            return float(v)
    return None


def cmd_sweep(args) -> int:
    if args.param_range is None:
        raise ConfigError("sweep needs --param-range LO:HI:STEPS")
    grid = parse_range(args.param_range)
    cfg = load_config(args.config)
    noise = cfg.get("noise")
    if noise is None or noise["type"] not in SWEEP_PARAMETER:
        raise ConfigError(f"sweep needs a noise model with a numeric parameter ({', '.join(SWEEP_PARAMETER)})")
    param = SWEEP_PARAMETER[noise["type"]]
    if args.param not in (None, param):
        raise ConfigError(f"noise model {noise['type']} has no numeric parameter {args.param!r}")

    def point(value):
        c = copy.deepcopy(cfg)
        c["noise"][param] = float(value)
        validate_config(c)
        return _report_for(c, args)

    with ThreadPoolExecutor(max(1, args.workers)) as pool:
        reports = list(pool.map(point, grid))

    rows = []
    for value, rep in zip(grid, reports):
        row = {param: float(value)}
        for b in BOUND_BASES:
            row[f"F_{b}->{b}"] = rep.fidelity(f"F_{b}->{b}").value
        row.update(
            process_lower=rep.process_bounds_four.lower,
            process_upper=rep.process_bounds_four.upper,
            process_fidelity_exact=rep.process_fidelity_exact,
            ent_fidelity_lower=rep.ent_fidelity_lower,
            capability=rep.concurrence_lower,
            min_concurrence_exact=(
                min(rep.concurrence_exact_per_input) if rep.concurrence_exact_per_input else None
            ),
        )
        rows.append(row)
    result = {
        "parameter": param,
        "noise": noise["type"],
        "rows": rows,
        "capability_crossing": capability_crossing(grid, [r["capability"] for r in rows]),
    }
    _write(json.dumps(result, indent=2) + "\n", args.out)
    sys.stdout.write(render_sweep(result))
    return EXIT_OK


def render_sweep(result: dict) -> str:
    param = result["parameter"]
    cols = [param, "F_zz->zz", "F_xx->xx", "F_zy->zy", "F_yx->yx", "process_lower", "process_upper",
            "process_fidelity_exact", "capability"]
    lines = ["  ".join(f"{c:>22}" for c in cols)]
    for row in result["rows"]:
        cells = []
        for c in cols:
            v = row.get(c)
            cells.append(f"{'-':>22}" if v is None else f"{v:>22.12f}")
        lines.append("  ".join(cells))
    lines.append(f"capability crosses zero at {param} = {result['capability_crossing']}")
    return "\n".join(lines) + "\n"


def cmd_verify_bounds(args) -> int:
    n = args.channels
    if n is None or n < 1:
        raise ConfigError("verify-bounds needs --channels N with N >= 1")
    seed = 0 if args.seed is None else args.seed
    gate = gate_from_config(load_config(args.config).get("gate")) if args.config else ideal_cnot()
    worst, failures = verify_ensemble(n, seed, args.rank, gate)
    summary = {
        "n_channels": n,
        "seed": seed,
        "rank": args.rank,
        "violations": len(failures),
        "worst_margins": worst,
        "failures": [{"channel_index": i, "seed": seed, "check": k, "margin": m} for i, k, m in failures],
    }
    text = json.dumps(summary, indent=2) + "\n"
    _write(text, args.out)
    sys.stdout.write(text)
    if failures:
        for i, k, m in failures:
            sys.stderr.write(f"violation: seed {seed} channel {i} check {k} margin {m:.3e}\n")
        return EXIT_FAILURE
    return EXIT_OK


def render_table(table: dict) -> str:
    """Rows are target-input axes, columns control-input axes."""
    width = 14
    corner = "target \\ control"
    lines = [f"{corner:<18}" + "".join(f"{a.name:>{width}}" for a in Axis)]
    for t in Axis:
        cells = []
        for c in Axis:
            cls = table[(c, t)]
            cells.append(f"{'other' if cls is None else cls.value:>{width}}")
        lines.append(f"{t.name:<18}" + "".join(cells))
    return "\n".join(lines) + "\n"


def table_to_dict(table: dict) -> dict:
    return {f"{c}{t}": ("other" if v is None else v.value) for (c, t), v in table.items()}


def cmd_table(args) -> int:
    spec = args.gate
    if spec is None:
        spec = load_config(args.config).get("gate") if args.config else "cnot"
    if isinstance(spec, str) and spec not in NAMED_GATES:
        raise ConfigError(f"unknown gate {spec!r}; known: {', '.join(sorted(NAMED_GATES))}")
    table = classification_table(gate_from_config(spec))
    _write(json.dumps({"gate": _gate_name(spec), "cells": table_to_dict(table)}, indent=2) + "\n", args.out)
    sys.stdout.write(render_table(table))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gate-witness", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="scenario JSON file, or - for standard input")
        p.add_argument("--out", help="write the JSON result here")
        p.add_argument("--seed", type=int)

    p = sub.add_parser("report", help="fidelities and bounds for one scenario")
    common(p)
    p.add_argument("--shots", type=int, help="shots per input; implies sampled mode")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="reports over a grid of one noise parameter")
    common(p)
    p.add_argument("--shots", type=int)
    p.add_argument("--param-range", metavar="LO:HI:STEPS")
    p.add_argument("--param", help="noise parameter to sweep (default p or theta)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-bounds", help="randomized soundness campaign")
    common(p)
    p.add_argument("--channels", type=int, default=1000)
    p.add_argument("--rank", type=int, help="fixed Kraus rank (default: cycle 1..16)")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("table", help="classification of the nine characteristic operations")
    common(p)
    p.add_argument("--gate", help=f"named gate ({', '.join(sorted(NAMED_GATES))})")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("GATE_WITNESS_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return EXIT_FAILURE
    except GateWitnessError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
