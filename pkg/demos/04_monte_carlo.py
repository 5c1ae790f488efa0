"""Monte Carlo estimates of the error rates, checked against exact values.

Trials are cut into fixed chunks, each with its own Philox stream, so the
estimate does not depend on the number of worker threads. The Gaussian case has
a closed form: for N(0,1) vs N(1,1) at c = 0 both errors equal P(Z > sqrt(n)/2).

Run: python3 demos/04_monte_carlo.py
"""

import math
import time

from scipy import stats

from sgbounds import Bernoulli, BinaryTestConfig, Gaussian, exact_binary, simulate_binary

p0, p1 = Bernoulli(0.5), Bernoulli(0.6)
cfg = BinaryTestConfig(c=0.0, n=3)
exact = exact_binary(p0, p1, cfg)
print(f"exact           alpha={exact.alpha:.5f} beta={exact.beta:.5f}")
for jobs in (1, 2, 8):
    t0 = time.perf_counter()
    r = simulate_binary(p0, p1, cfg, trials=100_000, seed=7, jobs=jobs)
    dt = time.perf_counter() - t0
    print(
        f"jobs={jobs}          alpha={r.alpha:.5f} beta={r.beta:.5f}"
        f"  (+- {r.half_width:.5f}, {dt * 1e3:.0f} ms)"
    )

n = 10
tail = stats.norm.sf(math.sqrt(n) / 2)
g = simulate_binary(Gaussian(0, 1), Gaussian(1, 1), BinaryTestConfig(0, n), 100_000, seed=7)
print(f"\nGaussian n={n}: closed form {tail:.5f}")
print(f"  simulated alpha={g.alpha:.5f} beta={g.beta:.5f} (+- {g.half_width:.5f})")
