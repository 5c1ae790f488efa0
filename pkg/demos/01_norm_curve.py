"""The sub-Gaussian norm of a test indicator as a function of its type I error.

An indicator with mean alpha is bounded, so it is sub-Gaussian with norm at
most 0.5. The exact norm is smaller everywhere except alpha = 0.5, and the gap
is largest for small alpha. This script prints the curve, checks it against the
variance floor sqrt(alpha(1-alpha)), and shows the tangency that pins it down.

Run: python3 demos/01_norm_curve.py [--csv norm_curve.csv]
"""

import argparse

import numpy as np

from sgbounds import norm_table, solve_norm
from sgbounds.subgauss import log_mgf_centered

parser = argparse.ArgumentParser()
parser.add_argument("--csv", help="also write alpha,sigma,s_star to this file")
args = parser.parse_args()

alphas = np.round(np.arange(1, 100) * 0.01, 2)
fits = norm_table(alphas)

print(f"{'alpha':>6} {'sigma':>10} {'sqrt(a(1-a))':>13} {'s*':>9}")
for f in fits[::7]:
    print(f"{f.alpha:6.2f} {f.sigma:10.6f} {np.sqrt(f.alpha * (1 - f.alpha)):13.6f} {f.s_star:9.4f}")

sig = np.array([f.sigma for f in fits])
print("\nincreasing on (0, 0.5]:", bool(np.all(np.diff(sig[:50]) > 0)))
print("max asymmetry |sigma(a) - sigma(1-a)|:", float(np.abs(sig - sig[::-1]).max()))

# At the norm, h(s) = f(s) - sigma^2 s^2 / 2 touches zero from below at s*.
# Shrinking sigma by 0.1% makes h positive there.
fit = solve_norm(0.05)
s = np.linspace(-20, 20, 40001)
for scale in (1.0, 0.999):
    h = log_mgf_centered(0.05, s) - 0.5 * (scale * fit.sigma) ** 2 * s**2
    at_star = log_mgf_centered(0.05, fit.s_star) - 0.5 * (scale * fit.sigma * fit.s_star) ** 2
    print(f"alpha=0.05, sigma x {scale}: max h = {h.max():+.3e}, h(s*={fit.s_star:.4f}) = {at_star:+.3e}")

if args.csv:
    np.savetxt(
        args.csv,
        [(f.alpha, f.sigma, f.s_star) for f in fits],
        delimiter=",",
        header="alpha,sigma,s_star",
        comments="",
        fmt="%.12g",
    )
    print("wrote", args.csv)
