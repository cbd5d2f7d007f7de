"""Command-line front end: single runs, sweeps, figure presets, and the
worked three-state example.

Flag values override config-file values, which override the documented
defaults (the fig4a parameterisation). `--seed` must be given explicitly
for `run` and `sweep` so results are always reproducible on purpose.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from .engine import (
    ADOPT_BOTH,
    ADOPT_RANDOM_ONE,
    POSSIBILISTIC,
    PROBABILISTIC,
    SimParams,
)
from .harness import (
    DEFAULT_RUNS,
    DEFAULT_SEED,
    PRESET_NAMES,
    SweepSpec,
    collect_trajectories,
    emit_csv,
    metric_names,
    run_preset,
    sweep,
    trajectory_rows,
)
from .possibility import (
    FrankParameter,
    PossibilityDistribution,
    StateSubset,
    consistency,
    frank_tnorm,
    fuse,
    necessity_measure,
    pignistic,
    possibility_measure,
)

__all__ = ["CliConfig", "cmd_example", "main", "parse_args"]

OUT_ENV_VAR = "POSSIBLY_OUT"

_SWEEP_PARAMS = ("agents", "states", "evidence-rate", "noise", "theta", "steps")
_INT_PARAMS = ("agents", "states", "steps")

# keys accepted in a config file; identical to the long flag names
_CONFIG_KEYS = ("agents", "states", "evidence-rate", "noise", "theta", "steps",
                "runs", "seed", "model", "fusion", "fusion-adoption",
                "workers", "out")

_DEFAULTS = {
    "agents": 100,
    "states": 5,
    "evidence-rate": 0.05,
    "noise": 0.0,
    "theta": 20.0,
    "steps": 1500,
    "model": POSSIBILISTIC,
    "fusion": "on",
    "fusion-adoption": ADOPT_BOTH,
    "workers": 1,
}


@dataclass(frozen=True)
class CliConfig:
    """A fully resolved invocation, ready to dispatch."""

    command: str
    params: SimParams | None = None
    runs: int = 1
    workers: int = 1
    out: str = "."
    sweep_param: str | None = None
    sweep_grid: tuple = ()
    preset_name: str | None = None
    seed: int = DEFAULT_SEED


class _Parser(argparse.ArgumentParser):
    # one-line diagnostics instead of usage dumps
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _fail(flag: str, message: str):
    print(f"error: {flag}: {message}", file=sys.stderr)
    raise SystemExit(2)


def _build_parser() -> _Parser:
    top = _Parser(prog="possibly", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p, with_config=True):
        p.add_argument("--agents", type=int, default=None)
        p.add_argument("--states", type=int, default=None)
        p.add_argument("--evidence-rate", dest="evidence_rate", type=float,
                       default=None)
        p.add_argument("--noise", type=float, default=None)
        p.add_argument("--theta", type=float, default=None)
        p.add_argument("--steps", type=int, default=None)
        p.add_argument("--runs", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--model", choices=(POSSIBILISTIC, PROBABILISTIC),
                       default=None)
        p.add_argument("--fusion", choices=("on", "off"), default=None)
        p.add_argument("--fusion-adoption", dest="fusion_adoption",
                       choices=(ADOPT_BOTH, ADOPT_RANDOM_ONE), default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=None)
        if with_config:
            p.add_argument("--config", default=None)

    p_run = sub.add_parser("run", help="simulate one configuration")
    add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter over a grid")
    p_sweep.add_argument("param", choices=_SWEEP_PARAMS)
    p_sweep.add_argument("grid", help="comma-separated values, e.g. 0.1,1,10")
    add_common(p_sweep)

    p_preset = sub.add_parser("preset", help="reproduce a stock experiment")
    p_preset.add_argument("name", choices=PRESET_NAMES)
    p_preset.add_argument("--out", default=None)
    p_preset.add_argument("--workers", type=int, default=None)
    p_preset.add_argument("--seed", type=int, default=None)

    sub.add_parser("example", help="print the worked three-state example")
    return top


def _read_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        _fail("--config", f"cannot read {path}: {exc.strerror or exc}")
    mapping = {}
    for ln, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        key, eq, value = text.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key or not value:
            _fail("--config", f"line {ln}: expected `key = value`")
        if key not in _CONFIG_KEYS:
            _fail("--config", f"line {ln}: unknown key {key!r}")
        mapping[key] = value
    return mapping


def _cast_config(key: str, raw: str):
    try:
        if key in ("agents", "states", "steps", "runs", "workers", "seed"):
            return int(raw)
        if key in ("evidence-rate", "noise", "theta"):
            return float(raw)
    except ValueError:
        _fail(f"--{key}", f"invalid value {raw!r} (from config file)")
    if key == "model" and raw not in (POSSIBILISTIC, PROBABILISTIC):
        _fail("--model", f"invalid value {raw!r} (from config file)")
    if key == "fusion" and raw not in ("on", "off"):
        _fail("--fusion", f"invalid value {raw!r} (from config file)")
    if key == "fusion-adoption" and raw not in (ADOPT_BOTH, ADOPT_RANDOM_ONE):
        _fail("--fusion-adoption", f"invalid value {raw!r} (from config file)")
    return raw


def _resolve(args, config: dict, key: str, default=None):
    flag_value = getattr(args, key.replace("-", "_"), None)
    if flag_value is not None:
        return flag_value
    if key in config:
        return _cast_config(key, config[key])
    return _DEFAULTS.get(key, default)


def _resolved_params(args, config: dict, seed: int) -> SimParams:
    agents = _resolve(args, config, "agents")
    states = _resolve(args, config, "states")
    rho = _resolve(args, config, "evidence-rate")
    sigma = _resolve(args, config, "noise")
    theta = _resolve(args, config, "theta")
    steps = _resolve(args, config, "steps")
    model = _resolve(args, config, "model")
    fusion = _resolve(args, config, "fusion")
    adoption = _resolve(args, config, "fusion-adoption")

    if agents < 2:
        _fail("--agents", "need at least 2 agents")
    if states < 2:
        _fail("--states", "need at least 2 states")
    if not 0.0 <= rho <= 1.0:
        _fail("--evidence-rate", "must lie in [0, 1]")
    if sigma < 0.0:
        _fail("--noise", "must be >= 0")
    if steps < 0:
        _fail("--steps", "must be >= 0")
    try:
        frank = FrankParameter(theta=theta)
    except ValueError as exc:
        _fail("--theta", str(exc))
    try:
        return SimParams(agents=agents, states=states, rho=rho, sigma=sigma,
                         theta=frank, steps=steps, model=model, seed=seed,
                         fusion_enabled=(fusion == "on"),
                         fusion_adoption=adoption)
    except ValueError as exc:
        _fail("--seed" if "seed" in str(exc) else "run", str(exc))


def _resolve_seed(args, config: dict, required: bool) -> int:
    seed = _resolve(args, config, "seed")
    if seed is None:
        if required:
            _fail("--seed", "required; pass an explicit seed for reproducibility")
        seed = DEFAULT_SEED
    if not 0 <= seed < 2 ** 64:
        _fail("--seed", "must be a 64-bit unsigned integer")
    return seed


def _resolve_count(args, config: dict, key: str, default: int, minimum: int) -> int:
    value = _resolve(args, config, key, default)
    if value is None:
        value = default
    if value < minimum:
        _fail(f"--{key}", f"must be >= {minimum}")
    return value


def _resolve_out(args, config: dict) -> str:
    out = getattr(args, "out", None)
    if out is None:
        out = config.get("out")
    if out is None:
        out = os.environ.get(OUT_ENV_VAR)
    return out or "."


def parse_args(argv=None) -> CliConfig:
    """Parse and fully resolve an invocation; raises SystemExit on any
    invalid flag, config entry, or out-of-range value."""
    args = _build_parser().parse_args(argv)

    if args.command == "example":
        return CliConfig(command="example")

    config = _read_config(args.config) if getattr(args, "config", None) else {}
    workers = _resolve_count(args, config, "workers", default=1, minimum=1)

    if args.command == "preset":
        seed = _resolve_seed(args, config, required=False)
        return CliConfig(command="preset", preset_name=args.name,
                         workers=workers, out=_resolve_out(args, config),
                         seed=seed)

    seed = _resolve_seed(args, config, required=True)
    params = _resolved_params(args, config, seed)
    out = _resolve_out(args, config)

    if args.command == "run":
        runs = _resolve_count(args, config, "runs", default=1, minimum=1)
        return CliConfig(command="run", params=params, runs=runs,
                         workers=workers, out=out, seed=seed)

    runs = _resolve_count(args, config, "runs", default=DEFAULT_RUNS, minimum=1)
    grid = _parse_grid(args.param, args.grid)
    return CliConfig(command="sweep", params=params, runs=runs,
                     workers=workers, out=out, sweep_param=args.param,
                     sweep_grid=grid, seed=seed)


def _parse_grid(param: str, text: str) -> tuple:
    values = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            values.append(int(piece) if param in _INT_PARAMS else float(piece))
        except ValueError:
            _fail("grid", f"invalid value {piece!r} for {param}")
    if not values:
        _fail("grid", "needs at least one value")
    return tuple(values)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_run(cfg: CliConfig) -> int:
    spec = SweepSpec(base=cfg.params, runs=cfg.runs, capture="trajectory")
    trajectories = collect_trajectories(spec, cfg.workers)
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, "run_trajectory.csv")
    emit_csv(trajectory_rows(trajectories, cfg.params.model), path)
    finals = [traj[-1] for traj in trajectories]
    summary = " ".join(
        f"{name}={sum(getattr(m, name) for m in finals) / len(finals):.4f}"
        for name in metric_names(cfg.params.model))
    print(f"wrote {path}")
    print(f"final ({cfg.runs} run{'s' if cfg.runs != 1 else ''}): {summary}")
    return 0


def _cmd_sweep(cfg: CliConfig) -> int:
    spec = SweepSpec(base=cfg.params, param=cfg.sweep_param,
                     grid=cfg.sweep_grid, runs=cfg.runs, capture="final")
    records = sweep(spec, cfg.workers)
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, f"sweep_{cfg.sweep_param.replace('-', '_')}.csv")
    emit_csv(records, path)
    print(f"wrote {path}")
    return 0


def _cmd_preset(cfg: CliConfig) -> int:
    for path in run_preset(cfg.preset_name, cfg.out, workers=cfg.workers,
                           seed=cfg.seed):
        print(f"wrote {path}")
    return 0


def cmd_example() -> str:
    """The worked three-state example, computed live and formatted to four
    decimal places. Doubles as an end-to-end smoke test of the library."""
    pi1 = PossibilityDistribution((1.0, 0.8, 0.7))
    pi2 = PossibilityDistribution((0.4, 0.9, 1.0))
    theta = FrankParameter(theta=10.0)

    def row(values):
        return ", ".join(f"{v:.4f}" for v in values)

    best_two = StateSubset((2, 3))
    worst_one = StateSubset((1,))
    ignorance = [
        possibility_measure(pi1, StateSubset((s,)))
        - necessity_measure(pi1, StateSubset((s,)))
        for s in (1, 2, 3)
    ]
    tnorm = [frank_tnorm(theta, a, b) for a, b in zip(pi1.values, pi2.values)]
    fused = fuse(theta, pi1, pi2)
    normaliser = 1.0 - consistency(theta, pi1, pi2)

    lines = [
        "Three states; two agents hold possibility distributions:",
        f"  pi1 = {row(pi1.values)}",
        f"  pi2 = {row(pi2.values)}",
        "",
        "Measures under pi1:",
        f"  Pi({{s2,s3}}) = {possibility_measure(pi1, best_two):.4f}",
        f"  N({{s1}})     = {necessity_measure(pi1, worst_one):.4f}",
        f"  ignorance Pi({{s}})-N({{s}}) = {row(ignorance)}",
        f"  pignistic = {row(pignistic(pi1).values)}",
        "",
        "Fusing pi1 and pi2 with the Frank t-norm at theta = 10:",
        f"  T(pi1, pi2) = {row(tnorm)}",
        f"  normaliser 1 - max T = {normaliser:.4f}",
        f"  fused = {row(fused.values)}",
    ]
    return "\n".join(lines)


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if cfg.command == "example":
            print(cmd_example())
            return 0
        if cfg.command == "run":
            return _cmd_run(cfg)
        if cfg.command == "sweep":
            return _cmd_sweep(cfg)
        return _cmd_preset(cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
