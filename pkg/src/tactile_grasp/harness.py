"""Batch trials, success tables and trace files."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import yaml

from .controller import ControllerConfig, EasingParams
from .kinematics import DEG, Digit
from .sensors import SensorParams
from .slip import SlipParams
from .trial import TRACE_COLUMNS, FingerDrop, TrialResult, run_grasp
from .world import ObjectSpec, SimConfig, WorldParams

SYNTHETIC_BANNER = (
    "NOTE: object masses, friction coefficients and stiffnesses are synthetic; "
    "success rates describe the simulator, not hardware."
)


class InputError(Exception):
    """Unreadable or invalid dataset/config (CLI exit code 2)."""


class OutputError(Exception):
    """Output path cannot be written (CLI exit code 3)."""


# -- config ------------------------------------------------------------------

@dataclass(frozen=True)
class HarnessConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    sensors: SensorParams = field(default_factory=SensorParams)
    world: WorldParams = field(default_factory=WorldParams)


def _build(cls, data: dict | None, where: str, nested: dict[str, Any] | None = None):
    """Instantiate dataclass ``cls`` from a mapping, accepting ``<key>_deg`` for angles."""
    data = dict(data or {})
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = dict(nested or {})
    for key, value in data.items():
        if key.endswith("_deg") and key[:-4] in names:
            key, value = key[:-4], float(value) * DEG
        if key not in names or key in (nested or {}):
            raise InputError(f"{where}: unknown key {key!r}")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc


def config_from_dict(data: dict | None) -> HarnessConfig:
    data = dict(data or {})
    unknown = set(data) - {"sim", "controller", "slip", "sensors", "world"}
    if unknown:
        raise InputError(f"config: unknown section(s) {sorted(unknown)}")
    ctrl = dict(data.get("controller") or {})
    easing = _build(EasingParams, ctrl.pop("easing", None), "controller.easing")
    slip = _build(SlipParams, data.get("slip"), "slip")
    controller = _build(ControllerConfig, ctrl, "controller", {"easing": easing, "slip": slip})
    sim = data.get("sim") or {}
    if "seed" in sim:
        raise InputError("sim.seed is set per trial from --seed; remove it from the config")
    return HarnessConfig(
        sim=_build(SimConfig, sim, "sim"),
        controller=controller,
        sensors=_build(SensorParams, data.get("sensors"), "sensors"),
        world=_build(WorldParams, data.get("world"), "world"),
    )


def _read_yaml(path: str | Path, what: str) -> Any:
    try:
        with open(path) as fh:
            return yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise InputError(f"cannot read {what} {path}: {exc}") from exc


def load_config(path: str | Path | None) -> HarnessConfig:
    if path is None:
        return HarnessConfig()
    data = _read_yaml(path, "config")
    if data is not None and not isinstance(data, dict):
        raise InputError(f"config {path}: top level must be a mapping")
    return config_from_dict(data)


def config_to_dict(cfg: HarnessConfig) -> dict:
    ctrl = dataclasses.asdict(cfg.controller)
    slip = ctrl.pop("slip")
    sim = dataclasses.asdict(cfg.sim)
    sim.pop("seed")
    return {"sim": sim, "controller": ctrl, "slip": slip,
            "sensors": dataclasses.asdict(cfg.sensors), "world": dataclasses.asdict(cfg.world)}


# -- dataset -----------------------------------------------------------------

DATASET_FIELDS = ("name", "shape", "mass_kg", "mu_static", "mu_kinetic", "stiffness_n_per_m", "size_m")


def default_dataset_path() -> Path:
    return Path(str(resources.files("tactile_grasp") / "data" / "objects.yaml"))


def parse_dataset(data: Any, where: str = "dataset") -> list[ObjectSpec]:
    records = data.get("objects") if isinstance(data, dict) else data
    if not isinstance(records, list) or not records:
        raise InputError(f"{where}: no objects")
    out = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or set(rec) != set(DATASET_FIELDS):
            raise InputError(f"{where}: record {i} must have exactly the fields {DATASET_FIELDS}")
        try:
            out.append(ObjectSpec(
                name=str(rec["name"]), shape=rec["shape"], mass=float(rec["mass_kg"]),
                mu_static=float(rec["mu_static"]), mu_kinetic=float(rec["mu_kinetic"]),
                stiffness=float(rec["stiffness_n_per_m"]), size=float(rec["size_m"]),
            ))
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: record {i}: {exc}") from exc
    names = [o.name for o in out]
    if len(set(names)) != len(names):
        raise InputError(f"{where}: object names must be unique")
    return out


def load_dataset(path: str | Path | None = None) -> list[ObjectSpec]:
    path = path or default_dataset_path()
    return parse_dataset(_read_yaml(path, "dataset"), str(path))


def dataset_to_yaml(objects: Sequence[ObjectSpec]) -> str:
    recs = [{"name": o.name, "shape": o.shape.value, "mass_kg": o.mass, "mu_static": o.mu_static,
             "mu_kinetic": o.mu_kinetic, "stiffness_n_per_m": o.stiffness, "size_m": o.size}
            for o in objects]
    return yaml.safe_dump({"objects": recs}, sort_keys=False)


# -- traces ------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.9g}"


def trace_text(rows: Iterable[tuple], t_decimals: int = 4) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for row in rows:
        w.writerow([f"{row[0]:.{t_decimals}f}"] + [_fmt(v) for v in row[1:]])
    return buf.getvalue()


def export_trace(result: TrialResult, path: str | Path) -> Path:
    """Write the trial's per-tick trace as CSV; sets ``result.trace_path``."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(trace_text(result.trace))
    except OSError as exc:
        raise OutputError(f"cannot write trace {path}: {exc}") from exc
    result.trace_path = str(path)
    return path


def read_trace(path: str | Path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read trace {path}: {exc}") from exc
    if not rows:
        raise InputError(f"trace {path} is empty")
    header, body = rows[0], rows[1:]
    if header != TRACE_COLUMNS:
        raise InputError(f"trace {path}: unexpected header")
    if not body:
        raise InputError(f"trace {path} has no data rows")
    if any(len(r) != len(header) for r in body):
        raise InputError(f"trace {path}: ragged rows")
    return header, body


# -- batches -----------------------------------------------------------------

@dataclass(frozen=True)
class FingerDropSpec:
    digits: tuple[Digit, ...]
    t: float

    @classmethod
    def parse(cls, text: str) -> "FingerDropSpec":
        """Parse ``RF,LF@5.0`` (digits, then trial time in seconds)."""
        m = re.fullmatch(r"\s*([A-Za-z,\s]+)@\s*([0-9.]+)\s*", text)
        if not m:
            raise InputError(f"bad --drop-fingers value {text!r}; expected e.g. RF,LF@5.0")
        try:
            digits = tuple(Digit(d.strip().upper()) for d in m.group(1).split(",") if d.strip())
        except ValueError as exc:
            raise InputError(f"bad digit in {text!r}: {exc}") from exc
        return cls(digits, float(m.group(2)))


@dataclass(frozen=True)
class TrialJob:
    obj: ObjectSpec
    seed: int
    index: int
    config: HarnessConfig
    drops: tuple[FingerDropSpec, ...] = ()
    trace_path: str | None = None
    out_dir: str | None = None


def trial_seed(batch_seed: int, trial_index: int) -> int:
    return batch_seed ^ trial_index


def slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def run_job(job: TrialJob) -> TrialResult:
    cfg = job.config
    sim = replace(cfg.sim, seed=job.seed)
    events = [FingerDrop(d.digits, d.t) for d in job.drops]
    result = run_grasp(job.obj, cfg.controller, sim, cfg.world, cfg.sensors, events,
                       record=job.trace_path is not None)
    if job.trace_path is not None:
        export_trace(result, Path(job.out_dir or ".") / job.trace_path)
        result.trace_path = job.trace_path
    result.trace = []
    return result


@dataclass
class ObjectRow:
    object_name: str
    trials: int
    successes: int

    @property
    def success_pct(self) -> float:
        return 100.0 * self.successes / self.trials


@dataclass
class BatchReport:
    rows: list[ObjectRow]
    results: list[TrialResult]
    seed: int
    trials_per_object: int

    @property
    def total_trials(self) -> int:
        return len(self.results)

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.results)

    @property
    def overall_pct(self) -> float:
        return 100.0 * self.successes / self.total_trials

    def to_dict(self) -> dict:
        return {
            "note": SYNTHETIC_BANNER,
            "seed": self.seed,
            "trials_per_object": self.trials_per_object,
            "objects": [{"object": r.object_name, "trials": r.trials, "successes": r.successes,
                         "success_pct": round(r.success_pct, 6)} for r in self.rows],
            "overall": {"trials": self.total_trials, "successes": self.successes,
                        "success_pct": round(self.overall_pct, 6)},
            "trials": [r.summary() for r in self.results],
        }

    def table(self) -> str:
        """Success table: one row per object, then the overall rate."""
        width = max(len("Objects"), max(len(r.object_name) for r in self.rows), len("Overall"))
        lines = [SYNTHETIC_BANNER, "", f"| {'Objects':<{width}} | Success (%) |",
                 f"|{'-' * (width + 2)}|-------------|"]
        for r in self.rows:
            lines.append(f"| {r.object_name:<{width}} | {r.success_pct:11.1f} |")
        lines.append(f"| {'Overall':<{width}} | {self.overall_pct:11.1f} |")
        return "\n".join(lines) + "\n"


def make_jobs(dataset: Sequence[ObjectSpec], config: HarnessConfig, trials_per_object: int,
              seed: int, drops: Sequence[FingerDropSpec] = (), traces: bool = True,
              out_dir: str | Path | None = None) -> list[TrialJob]:
    jobs = []
    for oi, obj in enumerate(dataset):
        for k in range(trials_per_object):
            index = oi * trials_per_object + k
            path = f"traces/{slug(obj.name)}_{k:03d}.csv" if traces else None
            jobs.append(TrialJob(obj, trial_seed(seed, index), index, config, tuple(drops), path,
                                 str(out_dir) if out_dir is not None else None))
    return jobs


def run_batch(dataset: Sequence[ObjectSpec], config: HarnessConfig = HarnessConfig(),
              trials_per_object: int = 20, seed: int = 0, out_dir: str | Path | None = None,
              parallel: int = 1, drops: Sequence[FingerDropSpec] = ()) -> BatchReport:
    """Run ``trials_per_object`` seeded trials per object and assemble the report.

    Traces and the report are written under ``out_dir`` when given. Results
    are merged in trial order, so output does not depend on ``parallel``.
    """
    if not dataset:
        raise InputError("dataset is empty")
    if trials_per_object < 1:
        raise InputError("trials per object must be >= 1")
    if out_dir is not None:
        out_dir = Path(out_dir)
        try:
            (out_dir / "traces").mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError(f"cannot create output directory {out_dir}: {exc}") from exc
    jobs = make_jobs(dataset, config, trials_per_object, seed, drops,
                     traces=out_dir is not None, out_dir=out_dir)
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(run_job, jobs, chunksize=max(1, len(jobs) // (4 * parallel))))
    else:
        results = [run_job(j) for j in jobs]

    rows = []
    for oi, obj in enumerate(dataset):
        chunk = results[oi * trials_per_object:(oi + 1) * trials_per_object]
        rows.append(ObjectRow(obj.name, len(chunk), sum(r.success for r in chunk)))
    report = BatchReport(rows, results, seed, trials_per_object)
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def write_report(report: BatchReport, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    try:
        (out_dir / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        (out_dir / "report.md").write_text(report.table())
    except OSError as exc:
        raise OutputError(f"cannot write report in {out_dir}: {exc}") from exc


def expected_rows(duration: float, control_dt: float) -> int:
    return int(math.floor(duration / control_dt + 0.5))
