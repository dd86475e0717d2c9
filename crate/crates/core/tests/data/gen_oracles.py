"""Regenerates the frozen oracle values used by the Rust test-suite.

Generalized binomials come from direct Gamma-ratio evaluation at 50 digits
(mpmath); operator values come from exact rational arithmetic (fractions).
"""
import json
from fractions import Fraction
from math import comb

import mpmath

mpmath.mp.dps = 50


def gamma_ratio(tau, i):
    tau = mpmath.mpf(tau)
    den = tau - i + 1
    if den <= 0 and den == int(den):
        return mpmath.mpf(0)
    return mpmath.gamma(tau + 1) / (mpmath.factorial(i) * mpmath.gamma(den))


def frac_binom_exact(tau, i):
    c = Fraction(1)
    for j in range(1, i + 1):
        c = c * (tau - j + 1) / j
    return c


def phat(tau, n):
    m = [[Fraction(0)] * n for _ in range(n)]
    for r in range(n):
        for k in range(r + 1):
            m[r][k] = sum(
                comb(r, r - i) * (-1) ** (i - k) * frac_binom_exact(tau, i - k)
                for i in range(k, r + 1)
            )
    return m


def lp_norm(v, p):
    return mpmath.power(sum(abs(mpmath.mpf(x.numerator) / x.denominator) ** p for x in v), mpmath.mpf(1) / p)


def main():
    out = {"binom_grid": {}, "absoluteness": {}}
    for tau in ["0.5", "1.5", "-0.5", "2.3"]:
        out["binom_grid"][tau] = [mpmath.nstr(gamma_ratio(tau, i), 30) for i in range(41)]

    tau = Fraction(1, 2)
    n = 16
    m = phat(tau, n)
    w = [Fraction(1), Fraction(-1)]
    aw = [Fraction(1), Fraction(1)]
    yw = [sum(m[r][k] * w[k] for k in range(min(2, r + 1))) for r in range(n)]
    ya = [sum(m[r][k] * aw[k] for k in range(min(2, r + 1))) for r in range(n)]
    nw = lp_norm(yw, 2)
    na = lp_norm(ya, 2)
    out["absoluteness"] = {
        "tau": "0.5",
        "p": 2,
        "horizon": n,
        "norm_w": mpmath.nstr(nw, 30),
        "norm_abs_w": mpmath.nstr(na, 30),
        "gap": mpmath.nstr(abs(nw - na), 30),
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
