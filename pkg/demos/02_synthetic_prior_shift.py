#!/usr/bin/env python3
# Reproduce the headline univariate experiment: train on prior 0.4, adapt the
# threshold to a test set drawn at prior 0.6, and compare the resulting
# decision boundary with the shifted-optimal one and with unbiased PU
# learning (which cannot adapt).  A handful of seeds takes ~30 s.

import math

import numpy as np

from pushift import gaussian_case_experiment

X_STAR = math.log(2.0 / 3.0) / 2.0  # where 0.6 N(+1,1) equals 0.4 N(-1,1)
SEEDS = range(5)

records = []
for seed in SEEDS:
    rec = gaussian_case_experiment(case=1, seed=seed)
    records.append(rec)
    print(
        f"seed {seed}: pi_hat={rec['pi_hat']:.3f} pi_prime={rec['pi_prime_hat']:.3f} "
        f"theta={rec['theta']:.3f} boundary={rec['boundary_drpu']:+.3f} "
        f"(upu {rec['boundary_upu']:+.3f}) auc={rec['auc_drpu']:.3f}"
    )

b_drpu = np.array([r["boundary_drpu"] for r in records])
b_upu = np.array([r["boundary_upu"] for r in records])
print(f"\nshifted-optimal boundary      {X_STAR:+.4f}")
print(f"mean adapted boundary         {b_drpu.mean():+.4f} (|err| {np.abs(b_drpu - X_STAR).mean():.3f})")
print(f"mean unbiased-PU boundary     {b_upu.mean():+.4f} (|err| {np.abs(b_upu - X_STAR).mean():.3f})")
print("\nThe adapted threshold tracks the shifted optimum; the baseline")
print("keeps aiming near the training-time boundary, to the right of it.")
