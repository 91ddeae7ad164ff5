"""Four-finger-plus-thumb hand model with coupled J1/J2 joints.

All angles are radians. Fingers (FF, MF, RF, LF) expose J1-J4, the thumb
exposes J1-J5. For fingers J3 is the sagittal flexion of the base joint and
J4 carries its transverse (abduction) axis, which the grasp never commands.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

DEG = math.pi / 180.0

# Alg. joint-limit test: a commanded J2 change smaller than this means J2 is pinned.
J2_SATURATION_EPS = 0.1
COUPLED_SUM_MAX = math.pi
THUMB_PREGRASP = 70.0 * DEG


class Digit(str, enum.Enum):
    FF = "FF"
    MF = "MF"
    RF = "RF"
    LF = "LF"
    TH = "TH"


class Joint(str, enum.Enum):
    J1 = "J1"
    J2 = "J2"
    J3 = "J3"
    J4 = "J4"
    J5 = "J5"


FINGERS = (Digit.FF, Digit.MF, Digit.RF, Digit.LF)
DIGITS = FINGERS + (Digit.TH,)


@dataclass(frozen=True)
class JointId:
    digit: Digit
    joint: Joint

    def __post_init__(self):
        if self.joint is Joint.J5 and self.digit is not Digit.TH:
            raise ValueError(f"{self.digit.value} has no J5; only the thumb does")


FINGER_LIMITS = {
    Joint.J1: (0.0, 90.0 * DEG),
    Joint.J2: (0.0, 90.0 * DEG),
    Joint.J3: (0.0, 90.0 * DEG),
    Joint.J4: (-20.0 * DEG, 20.0 * DEG),
}

THUMB_LIMITS = {
    Joint.J1: (0.0, 90.0 * DEG),
    Joint.J2: (-40.0 * DEG, 40.0 * DEG),
    Joint.J3: (-15.0 * DEG, 15.0 * DEG),
    Joint.J4: (0.0, 90.0 * DEG),
    Joint.J5: (0.0, 90.0 * DEG),
}


def base_joint(digit: Digit) -> Joint:
    """Joint driven during the base-contact phase (J3 for fingers, J4 for the thumb)."""
    return Joint.J4 if digit is Digit.TH else Joint.J3


def closure_joints(digit: Digit) -> tuple[Joint, ...]:
    """Sagittal joints whose sum drives the fingertip toward the palm."""
    if digit is Digit.TH:
        return (Joint.J1, Joint.J4)
    return (Joint.J1, Joint.J2, Joint.J3)


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


@dataclass(frozen=True)
class FingerState:
    digit: Digit
    angles: Mapping[Joint, float]
    limits: Mapping[Joint, tuple[float, float]]
    enabled: bool = True

    def __post_init__(self):
        if set(self.angles) != set(self.limits):
            raise ValueError("angles and limits must cover the same joints")
        object.__setattr__(self, "angles", MappingProxyType(dict(self.angles)))
        object.__setattr__(self, "limits", MappingProxyType(dict(self.limits)))

    @classmethod
    def extended(cls, digit: Digit) -> "FingerState":
        limits = THUMB_LIMITS if digit is Digit.TH else FINGER_LIMITS
        angles = {j: _clamp(0.0, lo, hi) for j, (lo, hi) in limits.items()}
        return cls(digit, angles, limits)

    def __getitem__(self, joint: Joint) -> float:
        return self.angles[joint]

    def with_angles(self, **updates: float) -> "FingerState":
        """Return a copy with the named joints set (clamped to their limits)."""
        angles = dict(self.angles)
        for name, value in updates.items():
            joint = Joint(name)
            lo, hi = self.limits[joint]
            angles[joint] = _clamp(value, lo, hi)
        return replace(self, angles=angles)

    @property
    def is_thumb(self) -> bool:
        return self.digit is Digit.TH


@dataclass(frozen=True)
class HandState:
    digits: Mapping[Digit, FingerState] = field(
        default_factory=lambda: {d: FingerState.extended(d) for d in DIGITS}
    )
    palm_z: float = 0.0

    def __post_init__(self):
        if tuple(self.digits) != DIGITS:
            raise ValueError("hand must hold FF, MF, RF, LF, TH in order")
        object.__setattr__(self, "digits", MappingProxyType(dict(self.digits)))

    @property
    def fingers(self) -> tuple[FingerState, ...]:
        return tuple(self.digits[d] for d in FINGERS)

    @property
    def thumb(self) -> FingerState:
        return self.digits[Digit.TH]

    def __getitem__(self, digit: Digit) -> FingerState:
        return self.digits[digit]

    def with_digit(self, finger: FingerState) -> "HandState":
        digits = dict(self.digits)
        digits[finger.digit] = finger
        return replace(self, digits=digits)

    def with_palm_z(self, palm_z: float) -> "HandState":
        return replace(self, palm_z=palm_z)

    @property
    def enabled_digits(self) -> tuple[Digit, ...]:
        return tuple(d for d in DIGITS if self.digits[d].enabled)


def set_pre_grasp(hand: HandState) -> HandState:
    """Fully extend the fingers and bend the thumb base to 70 degrees."""
    digits = {}
    for d, f in hand.digits.items():
        angles = {j: _clamp(0.0, *f.limits[j]) for j in f.angles}
        if d is Digit.TH:
            angles[Joint.J5] = THUMB_PREGRASP
        digits[d] = replace(f, angles=angles)
    return replace(hand, digits=digits)


def _check_delta(delta: float) -> None:
    if not delta >= 0.0:
        raise ValueError(f"joint increment must be non-negative, got {delta!r}")


def actuate_virtual_j0(finger: FingerState, delta: float) -> FingerState:
    """Advance the coupled J1/J2 pair by ``delta``.

    J2 moves first. Once a commanded J2 step yields less than
    ``J2_SATURATION_EPS`` of real motion, J2 is treated as pinned and the
    remainder goes to J1. J1 never passes J2 and J1 + J2 stays <= 180 deg.
    On the thumb there is no coupling and J1 is driven directly.
    """
    _check_delta(delta)
    if delta == 0.0:
        return finger
    if finger.is_thumb:
        return finger.with_angles(J1=finger[Joint.J1] + delta)

    j1, j2 = finger[Joint.J1], finger[Joint.J2]
    j2_hi = finger.limits[Joint.J2][1]
    new_j2 = min(j2 + delta, j2_hi)
    moved = new_j2 - j2
    if moved < delta and (j2_hi - j2) < J2_SATURATION_EPS:
        # J2 (nearly) pinned: spill the unused part of the step into J1
        spill = delta - moved
        new_j1 = min(j1 + spill, new_j2, COUPLED_SUM_MAX - new_j2)
        new_j1 = max(new_j1, j1)
    else:
        new_j1 = j1
    return finger.with_angles(J1=new_j1, J2=new_j2)


def actuate_base(finger: FingerState, delta: float) -> FingerState:
    """Flex the base joint (finger J3, thumb J4) by ``delta``, clamped at its limit."""
    _check_delta(delta)
    joint = base_joint(finger.digit)
    return finger.with_angles(**{joint.value: finger[joint] + delta})


def closure_angle(finger: FingerState) -> float:
    return sum(finger[j] for j in closure_joints(finger.digit))


def closure_range(finger: FingerState) -> float:
    return sum(finger.limits[j][1] - finger.limits[j][0] for j in closure_joints(finger.digit))


def fingertip_closure(finger: FingerState) -> float:
    """Linear proxy in [0, 1] for how far the fingertip has curled toward the palm.

    Fingers: (J1 + J2 + J3) / 270 deg. Thumb: (J1 + J4) / 180 deg.
    """
    lo = sum(finger.limits[j][0] for j in closure_joints(finger.digit))
    return (closure_angle(finger) - lo) / closure_range(finger)


def coupled_sum(finger: FingerState) -> float:
    if finger.is_thumb:
        return finger[Joint.J1]
    return finger[Joint.J1] + finger[Joint.J2]


def coupled_exhausted(finger: FingerState, tol: float = 1e-9) -> bool:
    """True when the distal closure joints can no longer advance."""
    if finger.is_thumb:
        return finger[Joint.J1] >= finger.limits[Joint.J1][1] - tol
    return coupled_sum(finger) >= COUPLED_SUM_MAX - tol


def within_limits(finger: FingerState, tol: float = 0.0) -> bool:
    return all(lo - tol <= finger[j] <= hi + tol for j, (lo, hi) in finger.limits.items())
