"""Command-line front end: single runs, parameter sweeps, interval queries.

Config files are flat `key = value` text with dotted keys (``#`` comments and
blank lines allowed); every key has a default, so an empty file runs the
baseline scenario.  ``run`` also accepts a previously written summary.json,
whose embedded config echo reproduces the original run byte for byte.

Exit codes: 0 success, 2 config or usage error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .geometry import IntervalInputs, ratio_interval_oracle, rssi_ratio_interval
from .sim import ConfigError, SimConfig, SimulationResult, run_simulation

__all__ = [
    "main",
    "load_config",
    "config_echo",
    "write_cycles_csv",
    "write_summary_json",
    "write_grid_csv",
    "RunReport",
]

CYCLES_HEADER = [
    "replication",
    "cycle",
    "normal_as_normal",
    "normal_as_sybil",
    "sybil_as_sybil",
    "sybil_as_normal",
    "member_packets",
    "edge_packets",
    "aborted",
]

RATE_KEYS = SimulationResult.RATE_KEYS

# Dotted config key -> (SimConfig attribute, value kind).
_FIELDS: dict[str, tuple[str, str]] = {
    "seed": ("seed", "int"),
    "replications": ("replications", "int"),
    "cycles": ("cycles", "int"),
    "area.width": ("area_width", "float"),
    "area.height": ("area_height", "float"),
    "nodes.normal": ("n_normal", "int"),
    "nodes.sybil": ("n_sybil", "int"),
    "edges.count": ("n_edges", "int"),
    "edges.substitute_offset": ("substitute_offset", "float"),
    "mobility.v_max": ("v_max", "float"),
    "mobility.dt": ("dt_between_rounds", "float"),
    "channel.alpha": ("alpha", "float"),
    "channel.gain": ("gain", "float"),
    "adversary.policy": ("adversary_policy", "str"),
    "adversary.id_cap": ("sybil_id_cap", "bool"),
    "failure.scheduled": ("failure_scheduled", "sched"),
    "failure.rate": ("failure_rate", "float"),
    "resilience.substitutes": ("substitutes_enabled", "bool"),
    "resilience.rerun_after_abort": ("rerun_after_abort", "bool"),
}

_SWEEP_AXES = {
    "sweep.nodes.normal": "n_normal",
    "sweep.nodes.sybil": "n_sybil",
    "sweep.edges.count": "n_edges",
    "sweep.cycles": "cycles",
}


def _parse_schedule(raw: str, where: str) -> tuple[tuple[int, int], ...]:
    raw = raw.strip()
    if not raw:
        return ()
    pairs = []
    for chunk in raw.split(","):
        unit, sep, cycle = chunk.strip().partition(":")
        if not sep:
            raise ConfigError([f"{where}: expected unit:cycle, got {chunk.strip()!r}"])
        try:
            pairs.append((int(unit), int(cycle)))
        except ValueError:
            raise ConfigError([f"{where}: expected integers in {chunk.strip()!r}"]) from None
    return tuple(pairs)


def _coerce(key: str, kind: str, value: Any, where: str) -> Any:
    """Coerce a raw config value (text token or JSON scalar) to its field type."""
    if kind == "sched":
        if isinstance(value, str):
            return _parse_schedule(value, where)
        raise ConfigError([f"{where}: {key} expects a unit:cycle,... string"])
    if kind == "bool":
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.strip().lower() in ("true", "false"):
            return value.strip().lower() == "true"
        raise ConfigError([f"{where}: {key} expects true or false, got {value!r}"])
    if kind == "int":
        if isinstance(value, bool):
            raise ConfigError([f"{where}: {key} expects an integer, got {value!r}"])
        if isinstance(value, int):
            return value
        try:
            return int(str(value).strip())
        except ValueError:
            raise ConfigError([f"{where}: {key} expects an integer, got {value!r}"]) from None
    if kind == "float":
        if isinstance(value, bool):
            raise ConfigError([f"{where}: {key} expects a number, got {value!r}"])
        if isinstance(value, (int, float)):
            return float(value)
        try:
            return float(str(value).strip())
        except ValueError:
            raise ConfigError([f"{where}: {key} expects a number, got {value!r}"]) from None
    return str(value).strip()


def _parse_int_list(raw: Any, key: str, where: str) -> list[int]:
    if isinstance(raw, list):
        items = raw
    else:
        items = [s for s in str(raw).split(",") if s.strip()]
    values = []
    for item in items:
        values.append(_coerce(key, "int", item, where))
    if not values:
        raise ConfigError([f"{where}: {key} lists no values"])
    return values


def load_config(path: Path) -> tuple[SimConfig, dict[str, list[int]]]:
    """Load a flat-key config file (or a summary.json) into a SimConfig.

    Returns the config plus any sweep axes (empty for plain runs).  Raises
    ConfigError with a line or field diagnostic on any malformed input.
    """
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read config: {exc.strerror or exc}"]) from None

    raw: dict[str, tuple[Any, str]] = {}
    problems: list[str] = []
    stripped = text.lstrip()
    if path.suffix == ".json" or stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}:{exc.lineno}: invalid JSON: {exc.msg}"]) from None
        if not isinstance(obj, dict):
            raise ConfigError([f"{path}: JSON config must be an object"])
        if "config" in obj and isinstance(obj["config"], dict):
            obj = obj["config"]
        for key, value in obj.items():
            raw[key] = (value, f"{path}: key {key!r}")
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            key, sep, value = body.partition("=")
            if not sep:
                problems.append(f"{path}:{lineno}: expected key = value, got {body!r}")
                continue
            raw[key.strip()] = (value.strip(), f"{path}:{lineno}")

    fields: dict[str, Any] = {}
    axes: dict[str, list[int]] = {}
    for key, (value, where) in raw.items():
        if key in _FIELDS:
            attr, kind = _FIELDS[key]
            try:
                fields[attr] = _coerce(key, kind, value, where)
            except ConfigError as exc:
                problems.extend(exc.problems)
        elif key in _SWEEP_AXES:
            try:
                axes[_SWEEP_AXES[key]] = _parse_int_list(value, key, where)
            except ConfigError as exc:
                problems.extend(exc.problems)
        else:
            problems.append(f"{where}: unknown key {key!r}")
    if problems:
        raise ConfigError(problems)
    return SimConfig(**fields), axes


def config_echo(cfg: SimConfig) -> dict[str, Any]:
    """The full effective config as flat dotted keys, ready for re-running."""
    echo: dict[str, Any] = {}
    for key, (attr, kind) in _FIELDS.items():
        value = getattr(cfg, attr)
        if kind == "sched":
            value = ",".join(f"{u}:{c}" for u, c in value)
        echo[key] = value
    return echo


@dataclass
class RunReport:
    """Everything one run emits: config echo, per-cycle rows, pooled summary."""

    config: SimConfig
    result: SimulationResult

    def summary_obj(self) -> dict[str, Any]:
        reps = []
        for rep in self.result.replications:
            row: dict[str, Any] = {"replication": rep.index, "seed": rep.seed}
            row.update(rep.rates())
            t = rep.totals()
            for key in ("member_packets", "edge_packets", "verdicts", "aborted_cycles"):
                row[key] = t[key]
            reps.append(row)
        return {
            "schema_version": 1,
            "tool_version": __version__,
            "seed": self.config.seed,
            "config": config_echo(self.config),
            "pooled": self.result.pooled(),
            "replications": reps,
        }


def write_cycles_csv(report: RunReport, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CYCLES_HEADER)
        for rep in report.result.replications:
            for cycle_no, m in enumerate(rep.cycles):
                writer.writerow(
                    [
                        rep.index,
                        cycle_no,
                        m.normal_as_normal,
                        m.normal_as_sybil,
                        m.sybil_as_sybil,
                        m.sybil_as_normal,
                        m.member_packets,
                        m.edge_packets,
                        int(m.aborted),
                    ]
                )


def write_summary_json(report: RunReport, path: Path) -> None:
    path.write_text(json.dumps(report.summary_obj(), indent=2, sort_keys=True) + "\n")


def write_grid_csv(rows: list[dict[str, Any]], path: Path) -> None:
    header = ["n_normal", "n_sybil", "n_edges", "cycles", "replications"]
    for key in RATE_KEYS:
        header += [f"{key}_mean", f"{key}_std"]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([row[h] for h in header])


def _fmt(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.6g}"


def _run_report(cfg: SimConfig) -> RunReport:
    return RunReport(config=cfg, result=run_simulation(cfg))


def _emit_run(report: RunReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_cycles_csv(report, out / "cycles.csv")
    write_summary_json(report, out / "summary.json")


def _apply_overrides(cfg: SimConfig, args: argparse.Namespace) -> SimConfig:
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.replications is not None:
        changes["replications"] = args.replications
    return replace(cfg, **changes) if changes else cfg


def cmd_run(args: argparse.Namespace) -> int:
    cfg, axes = load_config(Path(args.config))
    if axes:
        raise ConfigError(["config declares sweep.* axes; use the sweep command"])
    cfg = _apply_overrides(cfg, args)
    cfg.validate()
    report = _run_report(cfg)
    out = Path(args.out)
    _emit_run(report, out)
    pooled = report.result.pooled()
    print(f"run: {cfg.replications} replication(s) x {cfg.cycles} cycle(s), seed {cfg.seed}")
    for key in RATE_KEYS:
        cell = pooled[key]
        if cell is None:
            print(f"  {key}: n/a")
        else:
            print(f"  {key}: mean {_fmt(cell['mean'])} std {_fmt(cell['std'])}")
    print(f"wrote {out / 'cycles.csv'} and {out / 'summary.json'}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg, axes = load_config(Path(args.config))
    if not axes:
        raise ConfigError(["sweep config declares no sweep.* axes"])
    cfg = _apply_overrides(cfg, args)
    out = Path(args.out)
    axis_order = [a for a in ("n_normal", "n_sybil", "n_edges", "cycles") if a in axes]
    grid_rows = []
    combos = itertools.product(*(axes[a] for a in axis_order))
    for combo in combos:
        point = replace(cfg, **dict(zip(axis_order, combo)))
        point.validate()
        report = _run_report(point)
        name = f"N{point.n_normal}_S{point.n_sybil}_C{point.n_edges}_R{point.cycles}"
        _emit_run(report, out / name)
        pooled = report.result.pooled()
        row: dict[str, Any] = {
            "n_normal": point.n_normal,
            "n_sybil": point.n_sybil,
            "n_edges": point.n_edges,
            "cycles": point.cycles,
            "replications": point.replications,
        }
        for key in RATE_KEYS:
            cell = pooled[key]
            row[f"{key}_mean"] = "" if cell is None else repr(cell["mean"])
            row[f"{key}_std"] = "" if cell is None else repr(cell["std"])
        grid_rows.append(row)
        shown = pooled["normal_accuracy"]
        acc = _fmt(shown["mean"]) if shown else "n/a"
        print(f"sweep point {name}: normal_accuracy {acc}")
    write_grid_csv(grid_rows, out / "grid.csv")
    print(f"wrote {out / 'grid.csv'} ({len(grid_rows)} grid points)")
    return 0


def cmd_interval(args: argparse.Namespace) -> int:
    try:
        inputs = IntervalInputs(x1=args.x1, y1sq=args.y1sq, r=args.r, alpha=args.alpha)
        if not (math.isfinite(args.c) and args.c > 0):
            raise ValueError(f"c must be > 0, got {args.c}")
        interval = rssi_ratio_interval(inputs, args.c)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def fmt_interval(lo: float, hi: float) -> str:
        left = "(unbounded below" if lo == 0.0 else f"[{lo:.6g}"
        right = "unbounded above)" if math.isinf(hi) else f"{hi:.6g}]"
        return f"{left}, {right}"

    print(f"closed form: {fmt_interval(interval.lo, interval.hi)}")
    if args.oracle:
        sampled = ratio_interval_oracle(inputs, args.c, samples=args.oracle)
        print(f"oracle (n={args.oracle}): {fmt_interval(sampled.lo, sampled.hi)}")

        def gap(a: float, b: float) -> str:
            if a == 0.0 or math.isinf(a) or math.isinf(b):
                return "n/a"
            return f"{abs(a - b) / abs(a):.3e}"

        print(f"relative gap: lo {gap(interval.lo, sampled.lo)} hi {gap(interval.hi, sampled.hi)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sybilsim",
        description="Signal-strength-ratio Sybil detection simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--out", default="out", help="output directory (default: ./out)")
    common.add_argument(
        "--replications", type=int, default=None, help="override the replication count"
    )

    p_run = sub.add_parser("run", parents=[common], help="run one config, write cycles.csv + summary.json")
    p_run.add_argument("config", help="path to a flat key=value config or a summary.json")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", parents=[common], help="run a sweep grid, write grid.csv")
    p_sweep.add_argument("config", help="path to a config declaring sweep.* axes")
    p_sweep.set_defaults(func=cmd_sweep)

    p_int = sub.add_parser("interval", help="print the feasible round-2 ratio interval")
    p_int.add_argument("x1", type=float, help="round-1 position along the edge axis")
    p_int.add_argument("y1sq", type=float, help="squared offset from the edge axis")
    p_int.add_argument("r", type=float, help="motion bound between rounds")
    p_int.add_argument("c", type=float, help="edge half-separation")
    p_int.add_argument("alpha", type=float, help="path-loss exponent")
    p_int.add_argument(
        "--oracle",
        type=int,
        default=0,
        metavar="SAMPLES",
        help="also evaluate the sampling oracle with this many boundary samples",
    )
    p_int.set_defaults(func=cmd_interval)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: all edges dead, I/O, ...
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
