"""Reference ratios for the regularized extremal spinor family.

Evaluates, in the kappa = -1 channel, the ratio

    int |psi|^2 / r  /  int r |(i a.grad - m beta + i eps) psi|^2

for f = r^(-1+delta) exp(-mu r), g = i lam f, mu = sqrt(eps^2 + m^2),
lam = (eps + i m) / mu, with adaptive quadrature at 30 digits. Writes
sharpness_oracle.json next to this file.
"""

import json
import os

import mpmath as mp

mp.mp.dps = 30

PARAMS = [(1, 0), (1, 1), (2, mp.mpf("0.5"))]
DELTAS = [1, mp.mpf("0.4"), mp.mpf("0.2"), mp.mpf("0.1"), mp.mpf("0.05")]


def ratio(eps, m, delta):
    eps, m, delta = mp.mpf(eps), mp.mpf(m), mp.mpf(delta)
    mu = mp.sqrt(eps**2 + m**2)
    lam = (eps + 1j * m) / mu

    def f(r):
        return r ** (delta - 1) * mp.exp(-mu * r)

    def df(r):
        return ((delta - 1) / r - mu) * f(r)

    def lhs_density(r):
        return (abs(f(r)) ** 2 + abs(1j * lam * f(r)) ** 2) * r

    def rhs_density(r):
        g, dg = 1j * lam * f(r), 1j * lam * df(r)
        up = -m * f(r) + dg + 2 * g / r + 1j * eps * f(r)
        lo = -df(r) + m * g + 1j * eps * g
        return r**3 * (abs(up) ** 2 + abs(lo) ** 2)

    pts = [0, mp.mpf("1e-8"), mp.mpf("1e-4"), mp.mpf("1e-2"), 1, 10, mp.inf]
    lhs = mp.quad(lhs_density, pts)
    rhs = mp.quad(rhs_density, pts)
    return lhs / rhs


def main():
    rows = []
    for eps, m in PARAMS:
        for d in DELTAS:
            rows.append({"eps": float(eps), "m": float(m), "delta": float(d), "ratio": float(ratio(eps, m, d))})
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "sharpness_oracle.json")
    with open(out, "w") as fh:
        json.dump({"dps": mp.mp.dps, "rows": rows}, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
