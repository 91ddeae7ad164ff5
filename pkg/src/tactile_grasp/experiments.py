"""Reusable scenario runners behind the scripts and acceptance checks."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .controller import ControllerConfig
from .kinematics import DIGITS, Digit
from .sensors import RawBiotacSample, SensorParams, SensorSuite, synthetic_pressure_trace, tare
from .slip import SlipDetector, SlipParams, detect_stream
from .trial import FingerDrop, TrialResult, run_grasp, with_capacity_deficit
from .world import ObjectSpec, SimConfig, advance, scripted_grip

NOMINAL_BOX = ObjectSpec("Electronics Box", "box", 0.30, 0.60, 0.45, 3000.0, 0.05)


# -- slip detection ROC --------------------------------------------------------

@dataclass(frozen=True)
class RocResult:
    false_positive_rate: float  # slipping windows / windows without slip
    detection_rate: float  # slip traces flagged within max_latency of onset
    latencies: tuple[float | None, ...]
    windows: int


def slip_roc(n_static: int = 100, n_slip: int = 100, duration: float = 3.0,
             slip_speed: float = 0.005, max_latency: float = 0.2,
             params: SlipParams = SlipParams(), sensors: SensorParams = SensorParams(),
             seed: int = 0) -> RocResult:
    """False alarms on static traces and detection latency on injected-slip traces.

    Contact force is drawn from U(0.3, 1.2) N and slip onset from U(1, 2) s.
    Windows that end before the onset count toward the false-positive rate.
    """
    flagged = windows = 0
    lat: list[float | None] = []
    ss = np.random.SeedSequence(seed)
    static_seeds, slip_seeds = ss.spawn(2)
    for child in static_seeds.spawn(n_static):
        rng = np.random.default_rng(child)
        t, s, _ = synthetic_pressure_trace(rng, duration, contact_force=rng.uniform(0.3, 1.2),
                                           params=sensors)
        est = detect_stream(t, s, params)
        flagged += sum(e.slipping for e in est)
        windows += len(est)
    detected = 0
    for child in slip_seeds.spawn(n_slip):
        rng = np.random.default_rng(child)
        onset = rng.uniform(1.0, 2.0)
        t, s, _ = synthetic_pressure_trace(rng, duration, contact_force=rng.uniform(0.3, 1.2),
                                           slip_onset=onset, slip_speed=slip_speed, params=sensors)
        est = detect_stream(t, s, params)
        pre = [e for e in est if e.t < onset]
        flagged += sum(e.slipping for e in pre)
        windows += len(pre)
        hits = [e.t - onset for e in est if e.t >= onset and e.slipping]
        lat.append(hits[0] if hits else None)
        detected += bool(hits) and hits[0] <= max_latency + 1e-9
    return RocResult(flagged / windows, detected / n_slip if n_slip else 1.0, tuple(lat), windows)


# -- slip compensation A/B -----------------------------------------------------

def compensation_ab(obj: ObjectSpec = NOMINAL_BOX, seed: int = 0, deficit: float = 0.05,
                    cfg: ControllerConfig = ControllerConfig(),
                    sim: SimConfig = SimConfig()) -> tuple[TrialResult, TrialResult]:
    """Same seed with and without slip compensation on an object re-weighed to exceed grip capacity."""
    sim = replace(sim, seed=seed)
    heavy = with_capacity_deficit(obj, deficit, cfg, sim)
    on = run_grasp(heavy, replace(cfg, slip_compensation=True), sim, record=False)
    off = run_grasp(heavy, replace(cfg, slip_compensation=False), sim, record=False)
    return on, off


# -- soft vs hard slope change -------------------------------------------------

def slip_script_delta_slopes(stiffness: float, seed: int, mass: float = 0.3, mu: float = 0.6,
                             hold_windows: int = 2, slip_windows: int = 3, margin: float = 1.2,
                             deficit: float = 0.05, sim: SimConfig = SimConfig(),
                             sensors: SensorParams = SensorParams()) -> list[float]:
    """|delta_slope| of every digit's windows after a scripted loss of grip.

    The object is held airborne with pad forces ``margin`` times what static
    friction needs. After ``hold_windows`` windows the pads back off to
    ``1 - deficit`` of that need and the object starts to slide. The script
    depends only on mass and friction, so objects differing in stiffness see
    identical force histories.
    """
    obj = ObjectSpec("scripted", "box", mass, mu, mu, stiffness, 0.05)
    need = mass * sim.gravity / mu / (2 * len(DIGITS))
    world, cmd = scripted_grip(obj, [margin * need] * 5, [margin * need] * 5)
    loose, _ = scripted_grip(obj, [(1 - deficit) * need] * 5, [(1 - deficit) * need] * 5)
    rng = np.random.default_rng(seed)
    suite = SensorSuite(sensors, rng)
    bases = [tare([RawBiotacSample(suite.bias[i] + sensors.noise_sigma * rng.standard_normal(), j)
                   for j in range(sensors.tare_samples)], sensors.tare_samples, sensors.tare_window)
             for i in range(len(DIGITS))]
    dets = [SlipDetector(sample_period=sim.control_dt) for _ in DIGITS]
    per_window = int(round(0.1 / sim.control_dt))
    release = hold_windows * per_window
    out = []
    for k in range((hold_windows + slip_windows) * per_window):
        if k == release:
            world = replace(world, touch=loose.touch)
        frame = suite.sample(world).normalized(bases)
        for i in range(len(DIGITS)):
            e = dets[i].update(k * sim.control_dt, frame.s_biotac[i])
            if e is not None and k >= release:
                out.append(abs(e.delta_slope))
        world = advance(world, cmd, sim, sim.substeps)
    return out


def soft_hard_ratio(soft_stiffness: float = 100.0, ratio: float = 10.0,
                    seeds: Sequence[int] = range(20), **kw) -> tuple[float, float]:
    """Mean |delta_slope| after slip onset for (hard, soft) objects over ``seeds``."""
    hard = np.mean([np.mean(slip_script_delta_slopes(soft_stiffness * ratio, s, **kw)) for s in seeds])
    soft = np.mean([np.mean(slip_script_delta_slopes(soft_stiffness, s, **kw)) for s in seeds])
    return float(hard), float(soft)


# -- finger removal ------------------------------------------------------------

def finger_removal(obj: ObjectSpec = NOMINAL_BOX, seeds: Sequence[int] = range(20),
                   digits: tuple[Digit, ...] = (Digit.RF, Digit.LF), at: float = 5.0,
                   cfg: ControllerConfig = ControllerConfig(),
                   sim: SimConfig = SimConfig()) -> list[TrialResult]:
    """Disable ``digits`` at trial time ``at`` (during the hold) for each seed."""
    return [run_grasp(obj, cfg, replace(sim, seed=s), events=[FingerDrop(digits, at)])
            for s in seeds]
