"""Closed-loop trial: sensors -> controller -> world, one control tick at a time."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .controller import ControllerConfig, ControllerPhase, GraspController, PHASE_ORDER
from .kinematics import DIGITS, Digit, Joint, base_joint
from .sensors import SensorParams, SensorSuite
from .world import ObjectSpec, SimConfig, WorldParams, WorldState, advance, disable_finger, make_world

FAILURE_REASONS = ("none", "dropped", "timeout", "config")

TRACE_COLUMNS = (
    ["t_s", "phase"]
    + [f"{d.value}_{q}" for d in DIGITS for q in ("s_biotac", "fsr_n", "j1_rad", "j2_rad", "j3_rad")]
    + ["palm_z_m", "object_z_m", "slip_speed_mps", "slip_flag"]
)


@dataclass(frozen=True)
class FingerDrop:
    digits: tuple[Digit, ...]
    t: float  # s from trial start


@dataclass
class TrialResult:
    object_name: str
    seed: int
    success: bool
    failure_reason: str
    phase_durations: dict[str, float]
    total_slip: float
    peak_grip_force: float
    trace_path: str | None = None
    duration: float = 0.0
    phases: list[str] = field(default_factory=list)
    trace: list[tuple] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.failure_reason not in FAILURE_REASONS:
            raise ValueError(f"unknown failure reason {self.failure_reason!r}")
        if self.success != (self.failure_reason == "none"):
            raise ValueError("success must coincide with failure_reason == 'none'")

    def summary(self) -> dict:
        return {
            "object_name": self.object_name,
            "seed": self.seed,
            "success": self.success,
            "failure_reason": self.failure_reason,
            "duration_s": round(self.duration, 6),
            "phase_durations": {k: round(v, 6) for k, v in self.phase_durations.items()},
            "total_slip_m": round(self.total_slip, 9),
            "peak_grip_force_n": round(self.peak_grip_force, 6),
            "trace_path": self.trace_path,
        }


class Trial:
    """Owns one world, sensor suite and controller, stepped in lockstep."""

    def __init__(self, world: WorldState, cfg: ControllerConfig, sim: SimConfig,
                 sensors: SensorSuite, events: Sequence[FingerDrop] = (), record: bool = True):
        self.world = world
        self.cfg = cfg
        self.sim = sim
        self.sensors = sensors
        self.controller = GraspController(cfg, sim.control_dt, sensors.params.tare_samples,
                                          sensors.params.tare_window)
        self.events = sorted(events, key=lambda e: e.t)
        self.record = record
        self.rows: list[tuple] = []
        self.phase_ticks = {p.value: 0 for p in PHASE_ORDER}
        self.peak_force = 0.0
        self.ticks = 0

    @property
    def t(self) -> float:
        return self.ticks * self.sim.control_dt

    def _apply_events(self) -> None:
        while self.events and self.t >= self.events[0].t - 1e-9:
            ev = self.events.pop(0)
            for d in ev.digits:
                self.world = disable_finger(self.world, d)

    def tick(self) -> ControllerPhase:
        ctl = self.controller
        self._apply_events()
        frame = self.sensors.sample(self.world)
        frame = replace(frame, t=self.t)
        phase_in = ctl.phase
        command, _ = ctl.tick(frame, self.world.hand)
        self.phase_ticks[phase_in.value] += 1
        if self.record:
            self.rows.append(self._row(ctl.frame, phase_in))
        self.world = advance(self.world, command, self.sim, self.sim.substeps)
        self.peak_force = max(self.peak_force, self.world.total_normal_force)
        self.ticks += 1
        if self.world.dropped or self.world.total_slip > self.cfg.drop_threshold:
            ctl.fail("dropped")
        elif not ctl.done and self.t >= self.cfg.time_budget - 1e-9:
            ctl.fail("timeout")
        return ctl.phase

    def _row(self, frame, phase: ControllerPhase) -> tuple:
        w = self.world
        row = [self.t, phase.value]
        for i, d in enumerate(DIGITS):
            f = w.hand[d]
            row += [frame.s_biotac[i], frame.fsr_force[i], f[Joint.J1], f[Joint.J2], f[base_joint(d)]]
        row += [w.hand.palm_z, w.object_z, w.slip_speed, int(self.controller.slip_flag)]
        return tuple(row)

    def run(self, until: ControllerPhase | None = None) -> "Trial":
        while not self.controller.done:
            if until is not None and self.controller.phase is until:
                break
            self.tick()
        return self

    def result(self, object_name: str, seed: int) -> TrialResult:
        ctl = self.controller
        reason = "none" if ctl.phase is ControllerPhase.Done else (ctl.failure_reason or "timeout")
        return TrialResult(
            object_name=object_name,
            seed=seed,
            success=reason == "none",
            failure_reason=reason,
            phase_durations={k: v * self.sim.control_dt for k, v in self.phase_ticks.items()},
            total_slip=self.world.total_slip,
            peak_grip_force=self.peak_force,
            duration=self.t,
            phases=[p.value for p in ctl.history],
            trace=self.rows,
        )


def setup_trial(obj: ObjectSpec, cfg: ControllerConfig = ControllerConfig(),
                sim: SimConfig = SimConfig(), world_params: WorldParams = WorldParams(),
                sensor_params: SensorParams = SensorParams(),
                events: Iterable[FingerDrop] = (), record: bool = True) -> Trial:
    """Build a trial whose every random draw comes from ``sim.seed``."""
    rng = np.random.default_rng(sim.seed)
    world = make_world(obj, world_params, rng)
    sensors = SensorSuite(sensor_params, rng)
    return Trial(world, cfg, sim, sensors, tuple(events), record)


def run_grasp(obj: ObjectSpec, cfg: ControllerConfig = ControllerConfig(),
              sim: SimConfig = SimConfig(), world_params: WorldParams = WorldParams(),
              sensor_params: SensorParams = SensorParams(),
              events: Iterable[FingerDrop] = (), record: bool = True) -> TrialResult:
    """Run one grasp-lift-hold trial to Done or Failed."""
    trial = setup_trial(obj, cfg, sim, world_params, sensor_params, events, record)
    return trial.run().result(obj.name, sim.seed)


def capacity_at_lift(obj: ObjectSpec, cfg: ControllerConfig = ControllerConfig(),
                     sim: SimConfig = SimConfig(), world_params: WorldParams = WorldParams(),
                     sensor_params: SensorParams = SensorParams()) -> float:
    """Static friction capacity (N) of the grasp when lifting is about to start."""
    trial = setup_trial(obj, cfg, sim, world_params, sensor_params, record=False)
    trial.run(until=ControllerPhase.LiftAndHold)
    return trial.world.capacity()


def with_capacity_deficit(obj: ObjectSpec, deficit: float, cfg: ControllerConfig = ControllerConfig(),
                          sim: SimConfig = SimConfig(), world_params: WorldParams = WorldParams(),
                          sensor_params: SensorParams = SensorParams()) -> ObjectSpec:
    """Re-weigh ``obj`` so the grasp reached under ``sim.seed`` holds (1 - deficit) of its weight.

    The object rests on the table until lifting starts, so its mass does not
    influence anything before that point and the grasp is reproduced exactly.
    """
    cap = capacity_at_lift(obj, cfg, sim, world_params, sensor_params)
    if not cap > 0 or sim.gravity <= 0:
        raise ValueError("grasp carries no load; cannot script a capacity deficit")
    mass = cap / ((1.0 - deficit) * sim.gravity)
    if not math.isfinite(mass):
        raise ValueError("bad scripted mass")
    return replace(obj, mass=mass)
