"""Slope-change magnitude after a scripted grip loss, soft vs hard object."""

import argparse

import numpy as np

from tactile_grasp.experiments import slip_script_delta_slopes

ap = argparse.ArgumentParser()
ap.add_argument("--soft", type=float, default=100.0, help="soft stiffness, N/m")
ap.add_argument("--ratio", type=float, default=10.0)
ap.add_argument("--seeds", type=int, default=20)
ap.add_argument("--slip-windows", type=int, default=3)
args = ap.parse_args()

means = {}
for label, k in (("soft", args.soft), ("hard", args.soft * args.ratio)):
    per_seed = [np.mean(slip_script_delta_slopes(k, s, slip_windows=args.slip_windows))
                for s in range(args.seeds)]
    means[label] = float(np.mean(per_seed))
    print(f"{label:4s} k={k:7.1f} N/m  mean |delta_slope| {means[label]:.3f} /s  "
          f"(seed range {min(per_seed):.3f}-{max(per_seed):.3f})")
print(f"hard/soft = {means['hard'] / means['soft']:.2f}")
