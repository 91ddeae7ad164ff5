"""Same seed with and without slip compensation when grip capacity is short of the weight."""

import argparse

from tactile_grasp.experiments import compensation_ab

ap = argparse.ArgumentParser()
ap.add_argument("--deficit", type=float, default=0.05)
ap.add_argument("--seeds", type=int, default=5)
args = ap.parse_args()

for s in range(args.seeds):
    on, off = compensation_ab(seed=s, deficit=args.deficit)
    print(f"seed {s}: on={on.failure_reason:8s} ({on.total_slip * 1e3:4.1f} mm)  "
          f"off={off.failure_reason:8s} ({off.total_slip * 1e3:4.1f} mm)")
