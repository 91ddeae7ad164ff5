"""Physics-lite grasp world: one object held between five digits.

Contacts are aggregated per digit (fingertip pad + base-phalanx pad) and
modelled as capped linear springs. The object only moves vertically. It
sticks to the hand while static friction can carry its weight; otherwise it
slides with kinetic friction, and the slide acceleration is low-pass
filtered with a time constant inversely proportional to object stiffness so
soft objects start slipping gradually.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .kinematics import (
    DIGITS,
    Digit,
    HandState,
    base_joint,
    closure_angle,
    set_pre_grasp,
)

SLIP_WINDOW = 0.100


class Shape(str, enum.Enum):
    sphere = "sphere"
    box = "box"
    cylinder = "cylinder"
    soft_blob = "soft_blob"


@dataclass(frozen=True)
class ObjectSpec:
    name: str
    shape: Shape
    mass: float  # kg
    mu_static: float
    mu_kinetic: float
    stiffness: float  # N/m
    size: float  # m, characteristic radius / half-width

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if not self.mass > 0:
            raise ValueError(f"{self.name}: mass must be positive")
        if not 0 < self.mu_kinetic <= self.mu_static:
            raise ValueError(f"{self.name}: need 0 < mu_kinetic <= mu_static")
        if not self.stiffness > 0:
            raise ValueError(f"{self.name}: stiffness must be positive")
        if not self.size > 0:
            raise ValueError(f"{self.name}: size must be positive")


@dataclass(frozen=True)
class SimConfig:
    physics_dt: float = 0.001
    control_dt: float = 0.01
    gravity: float = 9.81
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.physics_dt <= self.control_dt:
            raise ValueError("need 0 < physics_dt <= control_dt")
        for name, ratio in (("control_dt / physics_dt", self.control_dt / self.physics_dt),
                            ("slip window / control_dt", SLIP_WINDOW / self.control_dt)):
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"{name} must be an integer, got {ratio}")

    @property
    def substeps(self) -> int:
        return int(round(self.control_dt / self.physics_dt))


@dataclass(frozen=True)
class WorldParams:
    """Contact geometry and compliance constants (synthetic)."""

    finger_stiffness: float = 1000.0  # N/m, fingertip skin / pad compliance
    base_lever: float = 0.05  # m of base-pad travel per rad of base flexion
    tip_lever: float = 0.01  # m of tip-pad travel per rad of closure
    max_penetration: float = 0.01  # m, pads bottom out here
    soft_time_constant: float = 50.0  # N*s/m; slip filter tau = this / stiffness
    skin_relax: float = 2.0  # s, relaxation of fingertip skin stretch
    arm_speed: float = 0.5  # m/s, max vertical palm speed
    contact_length: float = 0.03  # m of relative slide before the pads lose the object
    base_touch_offset: float = 1.1  # rad
    base_touch_size_gain: float = 6.0  # rad per m of object size
    wrap_touch_offset: float = 2.2  # rad
    wrap_touch_size_gain: float = 12.0  # rad per m
    thumb_wrap_scale: float = 0.5
    placement_jitter: float = 0.05  # rad, per-digit randomness in first-touch angles


@dataclass(frozen=True, slots=True)
class Contact:
    base_force: float = 0.0
    tip_force: float = 0.0
    base_penetration: float = 0.0
    tip_penetration: float = 0.0
    stretch: float = 0.0  # m, fingertip skin stretch from slip

    @property
    def normal_force(self) -> float:
        return self.base_force + self.tip_force

    @property
    def penetration(self) -> float:
        return self.base_penetration + self.tip_penetration

    @property
    def in_contact(self) -> bool:
        return self.base_force > 0.0 or self.tip_force > 0.0


NO_CONTACT = Contact()


@dataclass(frozen=True)
class WorldState:
    object: ObjectSpec
    hand: HandState
    params: WorldParams = field(default_factory=WorldParams)
    touch: tuple[tuple[float, float], ...] = ()  # per digit (base first-touch, tip first-touch) rad
    object_z: float = 0.0
    contacts: tuple[Contact, ...] = (NO_CONTACT,) * len(DIGITS)
    slip_speed: float = 0.0  # m/s, object relative to hand, downward positive
    slip_accel: float = 0.0  # filtered slide acceleration
    time: float = 0.0
    grip_offset: float = 0.0  # palm_z - object_z when the grasp was first loaded
    dropped: bool = False

    @property
    def total_normal_force(self) -> float:
        return sum(c.normal_force for c in self.contacts)

    @property
    def total_slip(self) -> float:
        return max(0.0, self.hand.palm_z - self.object_z - self.grip_offset)

    @property
    def airborne(self) -> bool:
        return self.object_z > 0.0

    def capacity(self) -> float:
        return self.object.mu_static * self.total_normal_force


def first_touch_angles(obj: ObjectSpec, params: WorldParams,
                       rng: np.random.Generator | None = None) -> tuple[tuple[float, float], ...]:
    """Per-digit closure angles at which base and tip pads first meet the object."""
    base = min(max(params.base_touch_offset - params.base_touch_size_gain * obj.size, 0.15), 1.4)
    wrap = max(params.wrap_touch_offset - params.wrap_touch_size_gain * obj.size, 0.3)
    jitter = (params.placement_jitter * rng.standard_normal((len(DIGITS), 2))
              if rng is not None else np.zeros((len(DIGITS), 2)))
    out = []
    for i, d in enumerate(DIGITS):
        w = wrap * params.thumb_wrap_scale if d is Digit.TH else wrap
        b = max(base + jitter[i, 0], 0.05)
        out.append((b, b + max(w + jitter[i, 1], 0.1)))
    return tuple(out)


def make_world(obj: ObjectSpec, params: WorldParams = WorldParams(),
               rng: np.random.Generator | None = None) -> WorldState:
    """Object resting on the table under a hand in the pre-grasp pose."""
    hand = set_pre_grasp(HandState())
    return WorldState(object=obj, hand=hand, params=params,
                      touch=first_touch_angles(obj, params, rng))


def _contact_forces(world: WorldState, hand: HandState, stretch: Sequence[float],
                    lost: bool) -> tuple[Contact, ...]:
    p = world.params
    k = min(world.object.stiffness, p.finger_stiffness)
    out = []
    for i, d in enumerate(DIGITS):
        f = hand.digits[d]
        if lost or not f.enabled:
            out.append(NO_CONTACT)
            continue
        b_touch, t_touch = world.touch[i]
        pen_b = min(p.base_lever * max(0.0, f.angles[base_joint(d)] - b_touch), p.max_penetration)
        pen_t = min(p.tip_lever * max(0.0, closure_angle(f) - t_touch), p.max_penetration)
        s = stretch[i] if pen_t > 0.0 else 0.0
        out.append(Contact(k * pen_b, k * pen_t, pen_b, pen_t, s))
    return tuple(out)


def _apply_command(world: WorldState, command: HandState) -> HandState:
    digits = {}
    for d in DIGITS:
        cur = world.hand.digits[d]
        # disabled digits ignore commands; the world's enabled flag is authoritative
        digits[d] = replace(command.digits[d], enabled=cur.enabled) if cur.enabled else cur
    return replace(world.hand, digits=digits)


def advance(world: WorldState, hand_command: HandState, cfg: SimConfig,
            steps: int = 1) -> WorldState:
    """Run ``steps`` physics steps holding ``hand_command`` fixed.

    Joint targets are reached immediately (position control); the palm
    moves toward ``hand_command.palm_z`` at no more than ``arm_speed``.
    """
    p = world.params
    obj = world.object
    dt = cfg.physics_dt
    g = cfg.gravity
    hand = _apply_command(world, hand_command)
    palm_z = world.hand.palm_z
    target_z = max(hand_command.palm_z, palm_z)
    obj_z = world.object_z
    v = world.slip_speed
    a_f = world.slip_accel
    dropped = world.dropped
    stretch = [c.stretch for c in world.contacts]
    contacts = _contact_forces(world, hand, stretch, dropped)
    offset = world.grip_offset
    weight = obj.mass * g
    normal = sum(c.normal_force for c in contacts)
    tau = p.soft_time_constant / obj.stiffness
    alpha = 1.0 - math.exp(-dt / tau)
    relax = math.exp(-dt / p.skin_relax)
    step_max = p.arm_speed * dt
    tipped = [c.tip_force > 0.0 for c in contacts]
    rel_speed = 0.0

    for _ in range(steps):
        dz = target_z - palm_z
        dz = step_max if dz > step_max else dz
        capacity = obj.mu_static * normal
        palm_z += dz
        if capacity >= weight:
            obj_z += dz
            v = a_f = 0.0
            rel_speed = 0.0
        elif obj_z <= 0.0:
            # resting on the table: the hand slides past it
            a_f = v = 0.0
            rel_speed = dz / dt
        else:
            a_raw = g - obj.mu_kinetic * normal / obj.mass
            a_f += (a_raw - a_f) * alpha
            v = max(0.0, v + a_f * dt)
            new_z = obj_z + dz - v * dt
            if new_z <= 0.0:
                new_z = 0.0
                v = a_f = 0.0
            rel_speed = max(0.0, (dz - (new_z - obj_z)) / dt)
            obj_z = new_z
        for i in range(len(stretch)):
            stretch[i] = stretch[i] * relax + rel_speed * dt if tipped[i] else 0.0
        if not dropped and palm_z - obj_z - offset > p.contact_length:
            dropped = True
            contacts = _contact_forces(world, hand, stretch, True)
            normal = 0.0
            tipped = [False] * len(stretch)

    if not dropped:
        contacts = tuple(replace(c, stretch=stretch[i]) if c.tip_force > 0.0 else c
                         for i, c in enumerate(contacts))
    hand = replace(hand, palm_z=palm_z)
    return replace(world, hand=hand, object_z=obj_z, contacts=contacts, slip_speed=rel_speed,
                   slip_accel=a_f, time=world.time + steps * dt, dropped=dropped)


def step(world: WorldState, hand_command: HandState, cfg: SimConfig) -> WorldState:
    """Advance the world by one physics_dt."""
    return advance(world, hand_command, cfg, 1)


def raise_arm(world: WorldState, dz: float, dt: float = 0.001) -> WorldState:
    """Move the palm up by ``dz``; a held object follows, a slipping one lags by slip_speed*dt."""
    if not dz >= 0.0:
        raise ValueError(f"raise_arm only moves up, got dz={dz!r}")
    obj_z = world.object_z + dz
    if world.slip_speed > 0.0:
        obj_z = max(0.0, obj_z - world.slip_speed * dt)
    hand = world.hand.with_palm_z(world.hand.palm_z + dz)
    return replace(world, hand=hand, object_z=obj_z)


def disable_finger(world: WorldState, digit: Digit) -> WorldState:
    """Take one finger out of the grasp (its pads stop pushing, commands are ignored)."""
    digit = Digit(digit)
    if digit is Digit.TH:
        raise ValueError("the thumb cannot be disabled; it is the opposing surface")
    finger = world.hand.digits[digit]
    if not finger.enabled:
        raise ValueError(f"{digit.value} is already disabled")
    if len(world.hand.enabled_digits) - 1 < 2:
        raise ValueError("at least two digits must remain in the grasp")
    hand = world.hand.with_digit(replace(finger, enabled=False))
    i = DIGITS.index(digit)
    contacts = list(world.contacts)
    contacts[i] = NO_CONTACT
    return replace(world, hand=hand, contacts=tuple(contacts))


def scripted_grip(obj: ObjectSpec, tip_forces: Sequence[float], base_forces: Sequence[float],
                  height: float = 0.1, params: WorldParams = WorldParams()) -> tuple[WorldState, HandState]:
    """Airborne object held with prescribed per-digit pad forces, independent of stiffness.

    First-touch angles are back-solved so that a fixed hand pose produces
    exactly the requested forces. Returns the world and the hand command that
    keeps them. Used to run identical slip scripts on different objects.
    """
    k = min(obj.stiffness, params.finger_stiffness)
    hand = set_pre_grasp(HandState()).with_palm_z(height)
    touch = []
    for i, d in enumerate(DIGITS):
        f = hand.digits[d]
        j = base_joint(d)
        f = f.with_angles(**{j.value: 0.6})
        f = f.with_angles(J1=0.5) if d is Digit.TH else f.with_angles(J1=0.3, J2=0.6)
        hand = hand.with_digit(f)
        pen_b = base_forces[i] / k
        pen_t = tip_forces[i] / k
        if max(pen_b, pen_t) > params.max_penetration:
            raise ValueError("requested force exceeds pad travel for this stiffness")
        # a digit with zero requested force is parked far from the object
        b = f[j] - pen_b / params.base_lever if pen_b > 0 else math.pi
        t = closure_angle(f) - pen_t / params.tip_lever if pen_t > 0 else 2 * math.pi
        touch.append((b, t))
    world = WorldState(object=obj, hand=hand, params=params, touch=tuple(touch), object_z=height)
    contacts = _contact_forces(world, hand, [0.0] * len(DIGITS), False)
    return replace(world, contacts=contacts), hand
