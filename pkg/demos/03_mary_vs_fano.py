"""M-ary testing: the uniform-delta bound against Fano's inequality.

Three nearly identical categoricals on three symbols, every pairwise KL equal
to 0.01. With so few hypotheses Fano's bound is negative and says nothing,
while the sub-Gaussian bound still forces the worst-case error above 0.596.
The second half maps which bound is larger over a grid of (M, n).

Run: python3 demos/03_mary_vs_fano.py
"""

from pathlib import Path

import numpy as np

from sgbounds import confusion_matrix, dominance_map, kl, load, mary_bounds, verify_mary

files = sorted((Path(__file__).parent / "data" / "delta001").glob("*.json"))
hyps = [load(f) for f in files]
matrix = np.array([[kl(a, b) for b in hyps] for a in hyps])
np.set_printoptions(precision=5, suppress=True)
print("pairwise KL:\n", matrix)

report = mary_bounds(matrix, n=1, delta=0.01)
print(f"\nuniform-delta bound : {report.uniform_delta:.5f}")
print(f"Fano bound          : {report.fano:.5f}")
print(f"reference-j bounds  : {report.theorem3}")

cm = confusion_matrix(hyps, n=1, trials=100_000, seed=7)
print("\nconfusion matrix (100000 trials per row):\n", cm.matrix)
print(f"alpha_max = {cm.alpha_max:.5f} +- {cm.alpha_half_widths.max():.5f}")
print("all bounds hold:", verify_mary(cm, report).all_ok)

exact = confusion_matrix(hyps, n=1)
print(f"exact alpha_max = {exact.alpha_max:.5f}")

# Dominance map: '.' sub-Gaussian larger, 'F' Fano larger.
ms, ns = list(range(3, 51)), list(range(1, 101))
win = {(r.M, r.n): r.winner for r in dominance_map(ms, ns, 0.01)}
print("\nwinner at delta=0.01 (rows n, columns M = 3..50)")
for n in ns[::9]:
    row = "".join("F" if win[M, n] == "fano" else "." for M in ms)
    print(f"n={n:3d} {row}")
