"""Disable two fingers mid-hold on the nominal box and count successful holds."""

import argparse

from tactile_grasp.experiments import finger_removal
from tactile_grasp.harness import FingerDropSpec, export_trace

ap = argparse.ArgumentParser()
ap.add_argument("--drop", default="RF,LF@5.0")
ap.add_argument("--seeds", type=int, default=20)
ap.add_argument("--trace-dir", help="write every trace here")
args = ap.parse_args()

spec = FingerDropSpec.parse(args.drop)
results = finger_removal(seeds=range(args.seeds), digits=spec.digits, at=spec.t)
for r in results:
    flagged = sum(row[-1] for row in r.trace)
    print(f"seed {r.seed:2d}: {r.failure_reason:8s} slip {r.total_slip * 1e3:5.2f} mm  "
          f"slip-flag ticks {flagged}")
    if args.trace_dir:
        export_trace(r, f"{args.trace_dir}/box_seed{r.seed:02d}.csv")
print(f"{sum(r.success for r in results)}/{len(results)} Done")
