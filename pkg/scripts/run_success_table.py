"""Full synthetic-dataset batch: 10 objects x N seeds, success table + traces."""

import argparse
import time

from tactile_grasp.harness import load_config, load_dataset, run_batch

ap = argparse.ArgumentParser()
ap.add_argument("--out", default="runs/success_table")
ap.add_argument("--trials", type=int, default=20)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--parallel", type=int, default=1)
ap.add_argument("--config")
args = ap.parse_args()

t0 = time.perf_counter()
rep = run_batch(load_dataset(), load_config(args.config), args.trials, args.seed, args.out, args.parallel)
print(rep.table())
fails = [r for r in rep.results if not r.success]
for r in fails:
    print(f"failed: {r.object_name} seed={r.seed} reason={r.failure_reason} slip={r.total_slip * 1e3:.1f} mm")
print(f"{rep.total_trials} trials in {time.perf_counter() - t0:.1f}s -> {args.out}")
