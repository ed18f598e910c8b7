#!/usr/bin/env python3
# Desk-scale analogue of the benchmark study: 10-dimensional Gaussian pair,
# small MLPs, test priors sweeping 0.2 to 0.8.  The adapted classifier is
# compared with non-negative PU trained once with the true prior (never
# adapts) and once with a deliberately misestimated prior.

import numpy as np

from pushift import shift_robustness_experiment

rec = shift_robustness_experiment(seed=0)

print(f"estimated training prior: {rec['pi_hat']:.3f} (true 0.4)")
print(f"estimated test priors:    {np.round(rec['pi_prime_hat'], 3)}")
print()
header = "method                " + "".join(f"  pi'={p:<5g}" for p in rec["test_priors"]) + "      avg"
print(header)
for name in ("drpu", "nnpu_true", "nnpu_misestimated"):
    row = "".join(f"  {a*100:8.2f}" for a in rec["accuracy"][name])
    print(f"{name:20s}{row}  {rec['average'][name]*100:8.2f}")

print(
    "\nnnPU with the true prior wins near the training distribution but cannot\n"
    "follow the shift; the adapted threshold holds accuracy across the sweep."
)
