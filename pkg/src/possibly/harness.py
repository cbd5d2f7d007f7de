"""Experiment orchestration: sweeps, aggregation, presets, and CSV output.

A sweep runs one simulation per (grid value, run index) pair. Per-run seeds
are derived by folding (grid index, run index) into the base seed through
SeedSequence spawn keys, so a sweep is reproducible from a single integer
and runs stay independent of worker count and scheduling order.
"""

from __future__ import annotations

import os
import tempfile
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .engine import (
    ADOPT_BOTH,
    POSSIBILISTIC,
    PROBABILISTIC,
    MetricsRecord,
    SimParams,
    run,
)
from .environment import EnvironmentSpec, NoiseSpec, reversal_probability
from .possibility import FrankParameter, PossibilityDistribution, fuse

__all__ = [
    "AggregateRecord",
    "apply_param",
    "DEFAULT_RUNS",
    "DEFAULT_SEED",
    "HISTOGRAM_BINS",
    "Preset",
    "PresetPart",
    "PRESET_NAMES",
    "SweepSpec",
    "TrajectoryRow",
    "aggregate_trajectories",
    "collect_finals",
    "collect_trajectories",
    "derive_run_seed",
    "emit_csv",
    "histogram",
    "percentile",
    "preset",
    "run_part",
    "run_preset",
    "sweep",
    "trajectory_rows",
]

DEFAULT_SEED = 42
DEFAULT_RUNS = 100
HISTOGRAM_BINS = 20

CAPTURE_FINAL = "final"
CAPTURE_TRAJECTORY = "trajectory"

# Sweepable parameter names (public, kebab-case as on the command line),
# mapped to SimParams fields.
_SWEEP_FIELDS = {
    "agents": ("agents", int),
    "states": ("states", int),
    "evidence-rate": ("rho", float),
    "noise": ("sigma", float),
    "steps": ("steps", int),
    "theta": None,  # wraps into a FrankParameter
}


def apply_param(base: SimParams, param: str | None, value) -> SimParams:
    """Return base with one swept parameter replaced."""
    if param is None:
        return base
    if param not in _SWEEP_FIELDS:
        raise ValueError(
            f"unknown sweep parameter {param!r}; "
            f"choose from {', '.join(sorted(_SWEEP_FIELDS))}")
    if param == "theta":
        return replace(base, theta=FrankParameter(theta=float(value)))
    field, cast = _SWEEP_FIELDS[param]
    return replace(base, **{field: cast(value)})


@dataclass(frozen=True)
class SweepSpec:
    """One experiment: a base configuration, an optional swept parameter,
    and how many runs to average per grid point.

    capture="final" keeps only each run's last MetricsRecord; "trajectory"
    keeps every step and requires a single-point grid.
    """

    base: SimParams
    param: str | None = None
    grid: tuple = (None,)
    runs: int = DEFAULT_RUNS
    capture: str = CAPTURE_FINAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", tuple(self.grid))
        if len(self.grid) == 0:
            raise ValueError("grid must be nonempty")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.capture not in (CAPTURE_FINAL, CAPTURE_TRAJECTORY):
            raise ValueError(f"unknown capture mode: {self.capture!r}")
        if self.param is None:
            if self.grid != (None,):
                raise ValueError("grid must be (None,) when no parameter is swept")
        else:
            if self.capture == CAPTURE_TRAJECTORY and len(self.grid) > 1:
                raise ValueError("trajectory capture needs a single-point grid")
            for v in self.grid:
                apply_param(self.base, self.param, v)  # reject bad values early


@dataclass(frozen=True)
class AggregateRecord:
    """Cross-run summary of one metric at one grid value (or step)."""

    x: float
    metric: str
    mean: float
    p10: float
    p90: float

    def __post_init__(self) -> None:
        if self.p10 > self.p90:
            raise ValueError("p10 must not exceed p90")


@dataclass(frozen=True)
class TrajectoryRow:
    """One (run, step) row of a per-run trajectory table."""

    run: int
    step: int
    model: str
    values: tuple


def metric_names(model: str) -> tuple[str, ...]:
    if model == POSSIBILISTIC:
        return ("mean_poss_best", "mean_nec_best")
    return ("mean_prob_best",)


def percentile(samples, q: float) -> float:
    """Linear-interpolation percentile at rank q*(N-1) on sorted samples."""
    arr = np.asarray(tuple(samples), dtype=float)
    if arr.size == 0:
        raise ValueError("percentile of an empty sample set")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    return float(np.percentile(arr, 100.0 * q))


def histogram(samples, bins: int = HISTOGRAM_BINS) -> tuple[tuple[float, int], ...]:
    """Equal-width bins over [0,1], last bin right-closed.

    Returns (bin lower edge, count) pairs; counts sum to len(samples).
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    arr = np.asarray(tuple(samples), dtype=float)
    if arr.size and (arr.min() < -1e-9 or arr.max() > 1.0 + 1e-9):
        raise ValueError("samples must lie in [0, 1]")
    arr = np.clip(arr, 0.0, 1.0)
    # direct multiply-and-floor keeps the emitted edges exactly i/bins,
    # so a sample sitting on an edge lands in the bin above it
    idx = np.minimum((arr * bins).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    return tuple((i / bins, int(counts[i])) for i in range(bins))


def derive_run_seed(base_seed: int, grid_index: int, run_index: int) -> int:
    """Fold grid and run indices into the base seed."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(grid_index, run_index))
    return int(ss.generate_state(2, np.uint64)[0])


# ---------------------------------------------------------------------------
# run fan-out
# ---------------------------------------------------------------------------

def _run_job(args):
    params, capture = args
    result = run(params)
    if capture == CAPTURE_TRAJECTORY:
        return tuple(result)
    return result[-1]


def _map_jobs(jobs, workers: int):
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    # chunked executor.map keeps results in submission order, so worker
    # count can't change what the fold below sees
    chunk = max(1, len(jobs) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs, chunksize=chunk))


def _jobs_for(spec: SweepSpec):
    jobs = []
    for gi, v in enumerate(spec.grid):
        p0 = apply_param(spec.base, spec.param, v)
        for ri in range(spec.runs):
            jobs.append((replace(p0, seed=derive_run_seed(spec.base.seed, gi, ri)),
                         spec.capture))
    return jobs


def collect_finals(spec: SweepSpec, workers: int = 1) -> list[MetricsRecord]:
    """Final-step record of every run of a single-point spec, in run order."""
    if len(spec.grid) != 1:
        raise ValueError("collect_finals needs a single-point grid")
    spec = replace(spec, capture=CAPTURE_FINAL)
    return _map_jobs(_jobs_for(spec), workers)


def collect_trajectories(spec: SweepSpec, workers: int = 1) -> list[tuple[MetricsRecord, ...]]:
    """All step records of every run of a single-point spec, in run order."""
    if len(spec.grid) != 1:
        raise ValueError("collect_trajectories needs a single-point grid")
    spec = replace(spec, capture=CAPTURE_TRAJECTORY)
    return _map_jobs(_jobs_for(spec), workers)


def aggregate_trajectories(trajectories: Sequence[Sequence[MetricsRecord]],
                           model: str) -> list[AggregateRecord]:
    """Per-step mean/p10/p90 across runs; x is the step number."""
    if not trajectories:
        raise ValueError("no trajectories to aggregate")
    names = metric_names(model)
    records = []
    series = {
        name: np.asarray([[getattr(rec, name) for rec in traj] for traj in trajectories])
        for name in names
    }
    steps = len(trajectories[0])
    for t in range(steps):
        for name in names:
            col = series[name][:, t]
            records.append(AggregateRecord(
                x=float(t), metric=name, mean=float(col.mean()),
                p10=percentile(col, 0.10), p90=percentile(col, 0.90)))
    return records


def sweep(spec: SweepSpec, workers: int = 1) -> list[AggregateRecord]:
    """Run the sweep and aggregate each grid point across its runs.

    Results are folded in grid order after all runs complete, so the output
    is a pure function of the SweepSpec regardless of worker count.
    """
    outs = _map_jobs(_jobs_for(spec), workers)
    if spec.capture == CAPTURE_TRAJECTORY:
        return aggregate_trajectories(outs, spec.base.model)
    names = metric_names(spec.base.model)
    records = []
    for gi, v in enumerate(spec.grid):
        finals = outs[gi * spec.runs:(gi + 1) * spec.runs]
        x = float(gi) if v is None else float(v)
        for name in names:
            vals = np.asarray([getattr(m, name) for m in finals], dtype=float)
            records.append(AggregateRecord(
                x=x, metric=name, mean=float(vals.mean()),
                p10=percentile(vals, 0.10), p90=percentile(vals, 0.90)))
    return records


def trajectory_rows(trajectories: Sequence[Sequence[MetricsRecord]],
                    model: str) -> list[TrajectoryRow]:
    """Flatten per-run trajectories into (run, step) CSV rows."""
    names = metric_names(model)
    rows = []
    for ri, traj in enumerate(trajectories):
        for rec in traj:
            rows.append(TrajectoryRow(
                run=ri, step=rec.step, model=model,
                values=tuple(getattr(rec, name) for name in names)))
    return rows


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def emit_csv(records: Iterable, path) -> None:
    """Write records as CSV: aggregate rows (x,metric,mean,p10,p90),
    trajectory rows (run,step,<metrics>), or histogram pairs
    (bin_lower,count). An empty record list writes the aggregate header.

    Writes to a temp file and renames, so a failure leaves no partial file.
    """
    records = list(records)
    if records and isinstance(records[0], TrajectoryRow):
        header = ["run", "step", *metric_names(records[0].model)]
        rows = [[r.run, r.step, *r.values] for r in records]
    elif records and isinstance(records[0], tuple):
        header = ["bin_lower", "count"]
        rows = [[lower, count] for lower, count in records]
    else:
        header = ["x", "metric", "mean", "p10", "p90"]
        rows = [[r.x, r.metric, r.mean, r.p10, r.p90] for r in records]

    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(",".join(header) + "\n")
                for row in rows:
                    fh.write(",".join(c if isinstance(c, str) else _fmt(c)
                                      for c in row) + "\n")
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PresetPart:
    """One output file of a preset: what to compute and the file stem."""

    stem: str
    kind: str  # trajectory | aggregate | histogram | frank_curve | reversal_curve
    spec: SweepSpec | None = None
    metric: str | None = None  # histogram source metric
    curve_grid: tuple = ()     # x grid for the simulation-free curves


@dataclass(frozen=True)
class Preset:
    name: str
    parts: tuple[PresetPart, ...]


PRESET_NAMES = ("fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b",
                "fig6a", "fig6b", "fig7", "fig8", "fig9", "fig10")

# Worked three-state example used for the fusion curve.
_EXAMPLE_PI1 = (1.0, 0.8, 0.7)
_EXAMPLE_PI2 = (0.4, 0.9, 1.0)

_THETA_CURVE_GRID = tuple(np.geomspace(0.1, 100.0, 25).tolist())
_THETA_SWEEP_GRID = tuple(np.geomspace(0.1, 100.0, 9).tolist())
_NOISE_GRID = tuple(np.round(np.linspace(0.0, 0.5, 11), 10).tolist())
_RHO_GRID = (0.01,) + tuple(np.round(np.linspace(0.1, 1.0, 10), 10).tolist())
_RHO_ZOOM_GRID = tuple(np.round(np.linspace(0.01, 0.11, 11), 10).tolist())


def _base_params(model: str = POSSIBILISTIC, *, rho: float = 0.05,
                 sigma: float = 0.0, steps: int = 1500, seed: int = DEFAULT_SEED,
                 fusion_enabled: bool = True) -> SimParams:
    """Shared experiment defaults: 100 agents, 5 states, theta=20."""
    return SimParams(agents=100, states=5, rho=rho, sigma=sigma,
                     theta=FrankParameter(theta=20.0), steps=steps,
                     model=model, seed=seed, fusion_enabled=fusion_enabled,
                     fusion_adoption=ADOPT_BOTH)


def preset(name: str, seed: int = DEFAULT_SEED) -> Preset:
    """The locked parameterisation behind each figure id."""
    if name not in PRESET_NAMES:
        raise ValueError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")

    def part(stem, *, model=POSSIBILISTIC, param=None, grid=(None,),
             capture=CAPTURE_FINAL, kind=None, metric=None, **kw):
        spec = SweepSpec(base=_base_params(model, seed=seed, **kw),
                         param=param, grid=grid, capture=capture)
        if kind is None:
            kind = "trajectory" if capture == CAPTURE_TRAJECTORY else "aggregate"
        return PresetPart(stem=stem, kind=kind, spec=spec, metric=metric)

    if name == "fig2":
        parts = (PresetPart(stem="fig2_fusion_curve", kind="frank_curve",
                            curve_grid=_THETA_CURVE_GRID),)
    elif name == "fig3":
        parts = (PresetPart(stem="fig3_reversal_curve", kind="reversal_curve",
                            curve_grid=_NOISE_GRID),)
    elif name == "fig4a":
        parts = (part("fig4a_trajectory", capture=CAPTURE_TRAJECTORY),)
    elif name == "fig4b":
        parts = (part("fig4b_trajectory", capture=CAPTURE_TRAJECTORY,
                      fusion_enabled=False),)
    elif name == "fig5a":
        parts = (part("fig5a_theta_sweep", param="theta", grid=_THETA_SWEEP_GRID),)
    elif name == "fig5b":
        parts = (part("fig5b_theta_sweep", param="theta", grid=_THETA_SWEEP_GRID,
                      sigma=0.3),)
    elif name == "fig6a":
        parts = (part("fig6a_noise_sweep", param="noise", grid=_NOISE_GRID),)
    elif name == "fig6b":
        parts = (part("fig6b_noise_sweep", param="noise", grid=_NOISE_GRID,
                      fusion_enabled=False),)
    elif name == "fig7":
        parts = (
            part("fig7_possibilistic_rho_sweep", param="evidence-rate",
                 grid=_RHO_GRID, sigma=0.3),
            part("fig7_probabilistic_rho_sweep", model=PROBABILISTIC,
                 param="evidence-rate", grid=_RHO_GRID, sigma=0.3),
            part("fig7_possibilistic_rho_zoom", param="evidence-rate",
                 grid=_RHO_ZOOM_GRID, sigma=0.3),
            part("fig7_probabilistic_rho_zoom", model=PROBABILISTIC,
                 param="evidence-rate", grid=_RHO_ZOOM_GRID, sigma=0.3),
        )
    elif name == "fig8":
        parts = (
            part("fig8_possibilistic_trajectory", capture=CAPTURE_TRAJECTORY,
                 sigma=0.3),
            part("fig8_probabilistic_trajectory", model=PROBABILISTIC,
                 capture=CAPTURE_TRAJECTORY, sigma=0.3),
        )
    elif name == "fig9":
        parts = (
            part("fig9_possibilistic_histogram", kind="histogram",
                 metric="mean_poss_best", sigma=0.3),
            part("fig9_probabilistic_histogram", model=PROBABILISTIC,
                 kind="histogram", metric="mean_prob_best", sigma=0.3),
        )
    else:  # fig10
        parts = (
            part("fig10_possibilistic_trajectory", capture=CAPTURE_TRAJECTORY,
                 rho=0.5, sigma=0.3, steps=3500),
            part("fig10_probabilistic_trajectory", model=PROBABILISTIC,
                 capture=CAPTURE_TRAJECTORY, rho=0.5, sigma=0.3, steps=3500),
        )
    return Preset(name=name, parts=parts)


def _frank_curve_records(grid) -> list[AggregateRecord]:
    pi1 = PossibilityDistribution(_EXAMPLE_PI1)
    pi2 = PossibilityDistribution(_EXAMPLE_PI2)
    records = []
    for theta in grid:
        fused = fuse(FrankParameter(theta=theta), pi1, pi2)
        for s, v in enumerate(fused.values, start=1):
            records.append(AggregateRecord(x=float(theta), metric=f"fused_s{s}",
                                           mean=v, p10=v, p90=v))
    return records


def _reversal_curve_records(grid, seed: int) -> list[AggregateRecord]:
    env = EnvironmentSpec.default(5)
    records = []
    for gi, sigma in enumerate(grid):
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(derive_run_seed(seed, gi, 0))))
        p = reversal_probability(env, NoiseSpec(sigma=sigma), i=5, j=4,
                                 samples=10 ** 6, rng=rng)
        records.append(AggregateRecord(x=float(sigma), metric="reversal_probability",
                                       mean=p, p10=p, p90=p))
    return records


def run_part(part: PresetPart, out_dir, workers: int = 1,
             seed: int = DEFAULT_SEED) -> str:
    """Compute one preset part and write its CSV; returns the path."""
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, part.stem + ".csv")
    if part.kind == "trajectory":
        trajs = collect_trajectories(part.spec, workers)
        emit_csv(trajectory_rows(trajs, part.spec.base.model), path)
    elif part.kind == "aggregate":
        emit_csv(sweep(part.spec, workers), path)
    elif part.kind == "histogram":
        finals = collect_finals(part.spec, workers)
        emit_csv(histogram([getattr(m, part.metric) for m in finals],
                           HISTOGRAM_BINS), path)
    elif part.kind == "frank_curve":
        emit_csv(_frank_curve_records(part.curve_grid), path)
    elif part.kind == "reversal_curve":
        emit_csv(_reversal_curve_records(part.curve_grid, seed), path)
    else:
        raise ValueError(f"unknown preset part kind: {part.kind!r}")
    return path


def run_preset(name: str, out_dir, workers: int = 1,
               seed: int = DEFAULT_SEED) -> list[str]:
    """Compute every part of a preset and write one CSV per part.

    Returns the written paths in part order.
    """
    bundle = preset(name, seed=seed)
    return [run_part(prt, out_dir, workers, seed) for prt in bundle.parts]
