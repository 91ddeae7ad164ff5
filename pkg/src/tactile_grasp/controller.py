"""Tactile-only grasp state machine.

Phases run strictly in order::

    PreGrasp -> Taring -> FsrContact -> CoupledClose -> LiftAndHold -> Done

with ``Failed`` reachable from anywhere. The controller only sees tactile
frames and the hand's joint state; it never looks at the object.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from . import kinematics as kin
from .kinematics import DIGITS, Digit, HandState
from .sensors import Baseline, RawBiotacSample, TactileFrame, tare
from .slip import SlipDetector, SlipEstimate, SlipParams, severity_to_correction

log = logging.getLogger(__name__)


class ControllerPhase(str, enum.Enum):
    PreGrasp = "PreGrasp"
    Taring = "Taring"
    FsrContact = "FsrContact"
    CoupledClose = "CoupledClose"
    LiftAndHold = "LiftAndHold"
    Done = "Done"
    Failed = "Failed"


PHASE_ORDER = tuple(ControllerPhase)
TERMINAL = (ControllerPhase.Done, ControllerPhase.Failed)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EasingParams:
    kappa1: float = 3.0
    kappa2: float = 2.0
    a1: float = 0.0
    a2: float = 1.0
    b1: float = 0.05
    b2: float = 0.005
    theta_min: float = 0.005
    theta_max: float = 0.05

    def __post_init__(self):
        if self.a1 == self.a2:
            raise ConfigError("easing a1 and a2 must differ")
        if not (0.0 <= self.a1 < self.a2 <= 1.0):
            raise ConfigError("easing needs 0 <= a1 < a2 <= 1")
        for b in (self.b1, self.b2):
            if not self.theta_min <= b <= self.theta_max:
                raise ConfigError("easing b1, b2 must lie in [theta_min, theta_max]")


def bezier_ease(s_biotac: float, p: EasingParams) -> float:
    """Cubic easing of the normalized fingertip reading: s^2 * (kappa1 - kappa2 * s)."""
    return s_biotac * s_biotac * (p.kappa1 - p.kappa2 * s_biotac)


def control_step_size(theta_beta: float, p: EasingParams) -> float:
    """Affine map of the eased value from [a1, a2] onto [b1, b2] (radians)."""
    if p.a2 == p.a1:
        raise ConfigError("easing a1 and a2 must differ")
    lo, hi = (p.a1, p.a2)
    theta_beta = lo if theta_beta < lo else hi if theta_beta > hi else theta_beta
    u = (theta_beta - p.a1) / (p.a2 - p.a1)
    # lerp form is exact at both ends: u=0 -> b1, u=1 -> b2
    return (1.0 - u) * p.b1 + u * p.b2


def closing_step(s_biotac: float, p: EasingParams) -> float:
    return control_step_size(bezier_ease(s_biotac, p), p)


@dataclass(frozen=True)
class ControllerConfig:
    tau_termination: float = 0.1
    fsr_contact_threshold: float = 0.5  # N
    base_step: float = 0.02  # rad per tick
    hold_duration: float = 10.0  # s
    lift_height: float = 0.10  # m
    lift_step: float = 0.001  # m per tick
    drop_threshold: float = 0.03  # m of slide relative to the hand
    time_budget: float = 60.0  # s simulated
    slip_compensation: bool = True
    easing: EasingParams = field(default_factory=EasingParams)
    slip: SlipParams = field(default_factory=SlipParams)

    def __post_init__(self):
        if not self.tau_termination > 0:
            raise ConfigError("tau_termination must be positive")
        if not self.hold_duration > 0:
            raise ConfigError("hold_duration must be positive")
        if not (self.lift_step > 0 and self.lift_height >= 0 and self.base_step > 0):
            raise ConfigError("lift_step and base_step must be positive")


class GraspController:
    """One trial's controller. Call ``tick`` once per control period."""

    def __init__(self, cfg: ControllerConfig = ControllerConfig(), control_dt: float = 0.01,
                 tare_samples: int = 50, tare_window: float = 200.0):
        self.cfg = cfg
        self.control_dt = control_dt
        self.tare_samples = tare_samples
        self.tare_window = tare_window
        self.phase = ControllerPhase.PreGrasp
        self.history: list[ControllerPhase] = [self.phase]
        self.failure_reason: str | None = None
        self.baselines: tuple[Baseline, ...] | None = None
        self._tare_buf: list[list[RawBiotacSample]] = [[] for _ in DIGITS]
        self._contacted: set[Digit] = set()
        self._terminated: set[Digit] = set()
        self._prev_p: tuple[float, ...] | None = None
        self.termination_log: list[tuple[float, str, float, float]] = []  # t, digit, s, p_t - p_t+1
        self.detectors = [SlipDetector(cfg.slip, control_dt) for _ in DIGITS]
        self.last_estimates: list[SlipEstimate | None] = [None] * len(DIGITS)
        self.slip_flag = False
        self._last_t: float | None = None
        self._hold_start: float | None = None

    # -- phase bookkeeping --------------------------------------------------
    def _enter(self, phase: ControllerPhase) -> None:
        if phase is not ControllerPhase.Failed and PHASE_ORDER.index(phase) <= PHASE_ORDER.index(self.phase):
            raise RuntimeError(f"illegal transition {self.phase.value} -> {phase.value}")
        log.debug("phase %s -> %s", self.phase.value, phase.value)
        self.phase = phase
        self.history.append(phase)

    def fail(self, reason: str) -> None:
        if self.phase in TERMINAL:
            return
        self.failure_reason = reason
        self._enter(ControllerPhase.Failed)

    @property
    def done(self) -> bool:
        return self.phase in TERMINAL

    # -- main entry ---------------------------------------------------------
    def tick(self, frame: TactileFrame, hand: HandState) -> tuple[HandState, ControllerPhase]:
        if self.done:
            return hand, self.phase
        if self._last_t is not None and frame.t <= self._last_t:
            raise ValueError(f"frame at t={frame.t} is not after t={self._last_t}")
        self._last_t = frame.t
        if self.baselines is not None and frame.p_dc:
            frame = frame.normalized(self.baselines)
        self.slip_flag = False
        handler = {
            ControllerPhase.PreGrasp: self._pre_grasp,
            ControllerPhase.Taring: self._taring,
            ControllerPhase.FsrContact: self._fsr_contact,
            ControllerPhase.CoupledClose: self._coupled_close,
            ControllerPhase.LiftAndHold: self._lift_and_hold,
        }[self.phase]
        command = handler(frame, hand)
        if frame.p_dc:
            self._prev_p = frame.p_dc
        self.frame = frame
        return command, self.phase

    def _pre_grasp(self, frame: TactileFrame, hand: HandState) -> HandState:
        target = kin.set_pre_grasp(hand)
        if target == hand:
            self._enter(ControllerPhase.Taring)
        return target

    def _taring(self, frame: TactileFrame, hand: HandState) -> HandState:
        for i, p in enumerate(frame.p_dc):
            self._tare_buf[i].append(RawBiotacSample(p, frame.t))
        if len(self._tare_buf[0]) >= self.tare_samples:
            self.baselines = tuple(tare(buf, self.tare_samples, self.tare_window) for buf in self._tare_buf)
            self._enter(ControllerPhase.FsrContact)
        return hand

    def _fsr_contact(self, frame: TactileFrame, hand: HandState) -> HandState:
        command = hand
        for i, d in enumerate(DIGITS):
            f = hand[d]
            if not f.enabled or d in self._contacted:
                continue
            joint = kin.base_joint(d)
            if frame.fsr_force[i] >= self.cfg.fsr_contact_threshold or f[joint] >= f.limits[joint][1]:
                self._contacted.add(d)
                continue
            command = command.with_digit(kin.actuate_base(f, self.cfg.base_step))
        if all(d in self._contacted for d in hand.enabled_digits):
            self._enter(ControllerPhase.CoupledClose)
        return command

    def _coupled_close(self, frame: TactileFrame, hand: HandState) -> HandState:
        command = hand
        for i, d in enumerate(DIGITS):
            f = hand[d]
            if not f.enabled or d in self._terminated:
                continue
            s = frame.s_biotac[i]
            if s >= self.cfg.tau_termination or kin.coupled_exhausted(f):
                diff = self._prev_p[i] - frame.p_dc[i] if self._prev_p and frame.p_dc else 0.0
                self.termination_log.append((frame.t, d.value, s, diff))
                self._terminated.add(d)
                continue
            step = closing_step(s, self.cfg.easing)
            command = command.with_digit(kin.actuate_virtual_j0(f, step))
        if all(d in self._terminated for d in hand.enabled_digits):
            self._enter(ControllerPhase.LiftAndHold)
        return command

    def _lift_and_hold(self, frame: TactileFrame, hand: HandState) -> HandState:
        command = hand
        for i, d in enumerate(DIGITS):
            est = self.detectors[i].update(frame.t, frame.s_biotac[i])
            if est is not None:
                self.last_estimates[i] = est
            if est is None or not hand[d].enabled:
                continue
            if est.slipping:
                self.slip_flag = True
                if self.cfg.slip_compensation:
                    delta = severity_to_correction(est, self.cfg.slip)
                    command = command.with_digit(kin.actuate_virtual_j0(command[d], delta))

        if hand.palm_z < self.cfg.lift_height - 1e-12:
            command = command.with_palm_z(min(hand.palm_z + self.cfg.lift_step, self.cfg.lift_height))
        else:
            if self._hold_start is None:
                self._hold_start = frame.t
            elif frame.t - self._hold_start >= self.cfg.hold_duration - 1e-9:
                self._enter(ControllerPhase.Done)
        return command
