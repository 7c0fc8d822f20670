"""Exact lower bound for n = 2, Sigma = diag(s1, s2), x = (g, 0).

Conditional on X1 > X2 the standardized difference at margin delta is a
standard normal truncated below at -delta / v, so the bound is the root of
    sf((g - delta) / v) / sf(-delta / v) = alpha
found here by 400-step bisection at 60 digits.
"""
from mpmath import mp, mpf, erfc, sqrt

mp.dps = 60


def sf(x):
    return erfc(x / sqrt(2)) / 2


def bound(g, alpha, var_sum=mpf(2)):
    v = sqrt(var_sum)
    f = lambda d: sf((g - d) / v) / sf(-d / v) - alpha
    lo, hi = mpf(-200), mpf(g)  # f(lo) < 0, f(g) > 0
    for _ in range(400):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


if __name__ == "__main__":
    cases = [(3.5, 0.1, 2), (3.5, 0.05, 2), (1.0, 0.1, 2), (6.0, 0.01, 2), (2.0, 0.2, 5), (0.3, 0.1, 2)]
    for g, a, s in cases:
        print(f"{{{g}, {a}, {s}, {mp.nstr(bound(mpf(g), mpf(a), mpf(s)), 20)}}},")
