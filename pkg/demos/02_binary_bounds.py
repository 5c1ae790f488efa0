"""Binary testing: exact error rates against the Pinsker and sub-Gaussian bounds.

H0: Bernoulli(0.5), H1: Bernoulli(0.6), likelihood-ratio test at c = 0. For
each sample size we enumerate the exact (alpha, beta), then compare alpha + beta
with both lower bounds. The sub-Gaussian bound uses the norm at the achieved
alpha, so it is never weaker than Pinsker and strictly stronger once alpha
moves away from 0.5.

Run: python3 demos/02_binary_bounds.py
"""

from pathlib import Path

from sgbounds import (
    BinaryTestConfig,
    exact_binary,
    kl,
    load,
    subgauss_binary,
    subgauss_binary_symmetric,
    verify_binary,
)

data = Path(__file__).parent / "data"
p0, p1 = load(data / "bern05.json"), load(data / "bern06.json")
kl_10, kl_01 = kl(p1, p0), kl(p0, p1)
print(f"D(P1||P0) = {kl_10:.6f}   D(P0||P1) = {kl_01:.6f}\n")

print(f"{'n':>3} {'c':>5} {'alpha':>8} {'beta':>8} {'a+b':>8} {'subgauss':>9} {'pinsker':>8}  ok")
for n in (1, 3, 5, 10, 20, 40):
    for c in (0.0, 0.05):
        rates = exact_binary(p0, p1, BinaryTestConfig(c, n))
        report = subgauss_binary(rates.alpha, n, kl_10, kl_01)
        v = verify_binary(rates, report)
        print(
            f"{n:3d} {c:5.2f} {rates.alpha:8.5f} {rates.beta:8.5f} {v.error_sum:8.5f}"
            f" {report.subgauss:9.5f} {report.pinsker:8.5f}  {v.all_ok}"
        )

# Exchanging the hypotheses bounds beta only implicitly; the grid scan finds
# the smallest beta consistent with a given alpha.
alpha, n = 0.05, 5
print(f"\nat alpha={alpha}, n={n}:")
print("  explicit beta floor :", round(subgauss_binary(alpha, n, kl_10).beta_floor, 5))
print("  implicit beta floor :", subgauss_binary_symmetric(alpha, n, kl_01))
