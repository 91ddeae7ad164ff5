"""False alarms and detection latency of the windowed slope detector on synthetic traces."""

import argparse

import numpy as np

from tactile_grasp.experiments import slip_roc
from tactile_grasp.slip import SlipParams

ap = argparse.ArgumentParser()
ap.add_argument("--speed", type=float, default=0.005, help="injected slip speed, m/s")
ap.add_argument("--theta-slip", type=float, default=SlipParams.theta_slip)
ap.add_argument("--theta-abs", type=float, default=SlipParams.theta_abs)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

r = slip_roc(slip_speed=args.speed, params=SlipParams(theta_slip=args.theta_slip, theta_abs=args.theta_abs),
             seed=args.seed)
lat = np.array([x for x in r.latencies if x is not None])
print(f"false-positive rate {r.false_positive_rate:.4f} over {r.windows} windows")
print(f"detected within 200 ms: {r.detection_rate:.0%}; missed entirely: {sum(x is None for x in r.latencies)}")
if lat.size:
    print(f"latency median {np.median(lat) * 1e3:.0f} ms, max {lat.max() * 1e3:.0f} ms")
