"""Synthetic fingertip pressure and base-of-finger force sensing.

The fingertip channel mimics a BioTac DC pressure reading (``p_dc``, raw
counts). It is tared against a resting baseline and mapped to [0, 1]. The
base channel mimics an FSR read through a 10-bit ADC and converted to newtons
by a least-squares calibration line.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .kinematics import DIGITS

if TYPE_CHECKING:
    from .world import WorldState


class InsufficientDataError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


@dataclass(frozen=True)
class RawBiotacSample:
    p_dc: float
    t: float


@dataclass(frozen=True)
class Baseline:
    mean: float
    window: float = 200.0
    n_samples: int = 50

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("baseline needs at least 2 samples")
        if not self.window > 0:
            raise ValueError("normalization window must be positive")


def tare(samples: Sequence[RawBiotacSample], n_samples: int = 50, window: float = 200.0) -> Baseline:
    """Baseline from the first ``n_samples`` resting readings."""
    if len(samples) < n_samples:
        raise InsufficientDataError(f"tare needs {n_samples} samples, got {len(samples)}")
    values = [s.p_dc for s in samples[:n_samples]]
    return Baseline(mean=math.fsum(values) / n_samples, window=window, n_samples=n_samples)


def normalize(raw: RawBiotacSample | float, base: Baseline) -> float:
    """Deviation above the baseline as a fraction of the window, clamped to [0, 1]."""
    p = raw.p_dc if isinstance(raw, RawBiotacSample) else raw
    s = (p - base.mean) / base.window
    return 0.0 if s < 0.0 else 1.0 if s > 1.0 else s


@dataclass(frozen=True)
class FsrCalibration:
    slope: float  # N per count
    intercept: float  # N
    valid_range: tuple[float, float] = (0.0, 50.0)

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError(f"FSR calibration slope must be positive, got {self.slope}")

    def force(self, counts: float) -> float:
        lo, hi = self.valid_range
        f = self.slope * counts + self.intercept
        return lo if f < lo else hi if f > hi else f

    def counts(self, force: float) -> float:
        """Inverse map (unclamped), used to synthesize readings."""
        return (force - self.intercept) / self.slope


def fit_fsr_calibration(pairs: Iterable[tuple[float, float]]) -> FsrCalibration:
    """Ordinary least-squares line through (raw counts, newtons) pairs."""
    xy = np.asarray(list(pairs), dtype=float)
    if xy.ndim != 2 or xy.shape[0] < 2 or xy.shape[1] != 2:
        raise DegenerateFitError("need at least two (counts, newtons) pairs")
    x, y = xy[:, 0], xy[:, 1]
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateFitError("all raw readings identical; slope undefined")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    return FsrCalibration(slope=slope, intercept=intercept)


def load_calibration_csv(path: str | Path) -> FsrCalibration:
    """Fit a calibration from a two-column CSV of raw_counts, newtons.

    A non-numeric first row is treated as a header.
    """
    pairs = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                pairs.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise ValueError(f"{path}: bad calibration row {i + 1}: {row!r}")
    return fit_fsr_calibration(pairs)


@dataclass(frozen=True)
class SensorParams:
    baseline_counts: float = 2000.0
    baseline_spread: float = 30.0  # per-digit bias, drawn once per trial
    contact_gain: float = 100.0  # counts per N of fingertip force
    noise_sigma: float = 2.0  # counts
    vibration_freq: float = 20.0  # Hz
    vibration_gain: float = 1000.0  # counts per (m/s) of slip speed
    stretch_gain: float = 40000.0  # counts per m of skin stretch
    fsr_slope: float = 0.05  # N per ADC count, ground-truth line
    fsr_intercept: float = 0.0
    fsr_noise: float = 0.5  # counts
    fsr_adc_max: int = 1023
    tare_samples: int = 50
    tare_window: float = 200.0

    @property
    def fsr_truth(self) -> FsrCalibration:
        return FsrCalibration(self.fsr_slope, self.fsr_intercept)


@dataclass(frozen=True)
class TactileFrame:
    """One control-rate sample for all five digits (FF, MF, RF, LF, TH)."""

    t: float
    s_biotac: tuple[float, ...]
    fsr_force: tuple[float, ...]
    p_dc: tuple[float, ...] = ()

    def normalized(self, baselines: Sequence[Baseline]) -> "TactileFrame":
        s = tuple(normalize(p, b) for p, b in zip(self.p_dc, baselines))
        return TactileFrame(self.t, s, self.fsr_force, self.p_dc)


def pressure_counts(
    bias: float,
    tip_force: float,
    slip_speed: float,
    stretch: float,
    t: float,
    phase: float,
    noise: float,
    p: SensorParams,
) -> float:
    """Raw fingertip pressure: affine in contact force plus slip signature.

    Slip adds a zero-mean 20 Hz vibration scaled by slip speed and a skin
    stretch offset. ``noise`` is a pre-drawn standard normal.
    """
    value = bias + p.contact_gain * tip_force + p.stretch_gain * stretch
    if slip_speed > 0.0:
        value += p.vibration_gain * slip_speed * math.sin(2.0 * math.pi * p.vibration_freq * t + phase)
    return value + p.noise_sigma * noise


class SensorSuite:
    """Per-trial sensor front end: fixed per-digit biases, vibration phases, seeded noise."""

    def __init__(self, params: SensorParams, rng: np.random.Generator,
                 calibration: FsrCalibration | None = None):
        self.params = params
        self.rng = rng
        self.calibration = calibration or params.fsr_truth
        n = len(DIGITS)
        self.bias = params.baseline_counts + params.baseline_spread * rng.standard_normal(n)
        self.phase = rng.uniform(0.0, 2.0 * math.pi, n)

    def sample(self, world: "WorldState") -> TactileFrame:
        return sample_sensors(world, self)


def sample_sensors(world: "WorldState", suite: SensorSuite) -> TactileFrame:
    """Synthesize raw readings for every digit from the world state.

    ``s_biotac`` is left at zero; it is filled in by ``TactileFrame.normalized``
    once baselines exist.
    """
    p = suite.params
    noise = suite.rng.standard_normal(2 * len(DIGITS))
    truth = p.fsr_truth
    p_dc, fsr = [], []
    for i, c in enumerate(world.contacts):
        slip = world.slip_speed if c.tip_force > 0.0 else 0.0
        p_dc.append(pressure_counts(suite.bias[i], c.tip_force, slip, c.stretch, world.time,
                                    suite.phase[i], noise[i], p))
        if c.base_force > 0.0:
            counts = truth.counts(c.base_force) + p.fsr_noise * noise[len(DIGITS) + i]
            counts = min(max(round(counts), 0), p.fsr_adc_max)
            fsr.append(suite.calibration.force(counts) if counts > 0 else 0.0)
        else:
            # unloaded FSR sits at open-circuit: ADC reads 0
            fsr.append(0.0)
    zeros = (0.0,) * len(DIGITS)
    return TactileFrame(world.time, zeros, tuple(fsr), tuple(p_dc))


def synthetic_pressure_trace(
    rng: np.random.Generator,
    duration: float,
    dt: float = 0.01,
    contact_force: float = 0.6,
    slip_onset: float | None = None,
    slip_speed: float = 0.0,
    slip_rise: float = 0.02,
    stretch_relax: float = 2.0,
    params: SensorParams = SensorParams(),
) -> tuple[np.ndarray, np.ndarray, Baseline]:
    """Single-digit pressure stream with an optional injected slip segment.

    A resting tare segment is recorded first so the returned stream can be
    normalized the same way the controller does. Slip speed rises to
    ``slip_speed`` with first-order time constant ``slip_rise`` from
    ``slip_onset`` (seconds, relative to the returned stream's start).

    Returns (t, s_biotac, baseline).
    """
    bias = params.baseline_counts + params.baseline_spread * rng.standard_normal()
    phase = rng.uniform(0.0, 2.0 * math.pi)
    rest = [RawBiotacSample(bias + params.noise_sigma * rng.standard_normal(), -dt * (params.tare_samples - k))
            for k in range(params.tare_samples)]
    base = tare(rest, params.tare_samples, params.tare_window)

    n = int(round(duration / dt))
    t = np.arange(n) * dt
    noise = rng.standard_normal(n)
    s = np.empty(n)
    v = stretch = 0.0
    for k in range(n):
        if slip_onset is not None and t[k] >= slip_onset:
            v += (slip_speed - v) * (1.0 - math.exp(-dt / slip_rise))
        stretch += (v - stretch / stretch_relax) * dt
        raw = pressure_counts(bias, contact_force, v, stretch, t[k], phase, noise[k], params)
        s[k] = normalize(raw, base)
    return t, s, base
