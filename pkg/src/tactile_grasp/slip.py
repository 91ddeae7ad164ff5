"""Slip detection from the slope of fingertip pressure over fixed windows.

Each digit gets its own ``SlipDetector``. Samples are grouped into
contiguous, non-overlapping 100 ms windows; at the end of each window the
least-squares slope is compared with the previous window's slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class OutOfOrderError(ValueError):
    pass


@dataclass(frozen=True)
class SlipParams:
    window: float = 0.100  # s
    theta_slip: float = 0.75  # 1/s, |change in slope| threshold (synthetic)
    theta_abs: float = 0.6  # 1/s, |slope| threshold (synthetic)
    g_slip: float = 0.02  # rad per unit severity
    theta_max_slip: float = 0.08  # rad, largest single correction


@dataclass(frozen=True)
class SlipEstimate:
    t: float  # end of the window
    slope: float
    delta_slope: float
    severity: float
    slipping: bool


def window_slope(samples: Iterable[tuple[float, float]]) -> float:
    """OLS slope of s against t."""
    ts, ss = [], []
    for t, s in samples:
        ts.append(t)
        ss.append(s)
    n = len(ts)
    if n < 2:
        raise ValueError("slope needs at least two samples")
    t_mean = math.fsum(ts) / n
    s_mean = math.fsum(ss) / n
    sxx = math.fsum((t - t_mean) ** 2 for t in ts)
    if sxx <= 0.0:
        raise ValueError("slope undefined: all timestamps identical")
    return math.fsum((t - t_mean) * (s - s_mean) for t, s in zip(ts, ss)) / sxx


def severity(slope: float, delta_slope: float, p: SlipParams) -> float:
    return (max(0.0, abs(delta_slope) / p.theta_slip - 1.0)
            + max(0.0, abs(slope) / p.theta_abs - 1.0))


def severity_to_correction(est: SlipEstimate | None, p: SlipParams = SlipParams()) -> float:
    """Extra distal flexion (rad) to command in response to a slip estimate."""
    if est is None or not est.slipping:
        return 0.0
    return min(max(p.g_slip * est.severity, 0.0), p.theta_max_slip)


class SlipDetector:
    """Single-digit windowed slope tracker.

    ``sample_period`` is the nominal spacing of incoming samples. When not
    given it is taken from the first two timestamps. A window closes on the
    sample that brings its span to ``window - sample_period``, so a stream at
    a fixed rate yields exactly floor(T / window) estimates.
    """

    def __init__(self, params: SlipParams = SlipParams(), sample_period: float | None = None):
        self.params = params
        self.sample_period = sample_period
        self._buf: list[tuple[float, float]] = []
        self._start: float | None = None
        self._last_t: float | None = None
        self._prev_slope: float | None = None
        self.estimates: list[SlipEstimate] = []

    def reset(self) -> None:
        self._buf.clear()
        self._start = self._last_t = self._prev_slope = None
        self.estimates = []

    def update(self, t: float, s: float) -> SlipEstimate | None:
        if self._last_t is not None and t <= self._last_t:
            raise OutOfOrderError(f"sample at t={t} does not follow t={self._last_t}")
        if self.sample_period is None and self._last_t is not None:
            self.sample_period = t - self._last_t
        self._last_t = t
        if self._start is None:
            self._start = t
        self._buf.append((t, s))
        if self.sample_period is None or len(self._buf) < 2:
            return None
        span = t - self._start
        if span < self.params.window - 1.5 * self.sample_period:
            return None
        return self._close()

    def _close(self) -> SlipEstimate:
        p = self.params
        slope = window_slope(self._buf)
        delta = 0.0 if self._prev_slope is None else slope - self._prev_slope
        sev = severity(slope, delta, p)
        est = SlipEstimate(self._buf[-1][0], slope, delta, sev, sev > 0.0)
        self._prev_slope = slope
        self._buf = []
        # next window starts one sample period after this one's last sample
        self._start = None
        self.estimates.append(est)
        return est


def fuse(estimates: Sequence[SlipEstimate | None]) -> bool:
    """Hand-level slip flag: any contacting digit reporting slip."""
    return any(e is not None and e.slipping for e in estimates)


def detect_stream(t: np.ndarray, s: np.ndarray, params: SlipParams = SlipParams(),
                  sample_period: float | None = None) -> list[SlipEstimate]:
    det = SlipDetector(params, sample_period)
    out = []
    for ti, si in zip(t, s):
        est = det.update(float(ti), float(si))
        if est is not None:
            out.append(est)
    return out
