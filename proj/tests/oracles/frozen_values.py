"""Offline oracle for the constants frozen into the C++ unit tests.

Everything here is computed with mpmath at 50 significant digits by
direct quadrature of the Gaussian density or by brute-force summation,
never through the library under test. Re-run with `python3
frozen_values.py` to regenerate.
"""
import mpmath as mp

mp.mp.dps = 50

phi = lambda x: mp.exp(-x * x / 2) / mp.sqrt(2 * mp.pi)


def cdf_quad(x):
    x = mp.mpf(x)
    if x > -1:
        return mp.quad(phi, [-mp.inf, -1, x])
    # Deep left tail: integrate phi(x - s) over s >= 0 with breakpoints on the
    # 1/|x| scale the density decays on; a plain [-inf, x] quad loses digits.
    h = 1 / abs(x)
    return mp.quad(lambda s: phi(x - s), mp.linspace(0, 100 * h, 200))


# Arbitrary-precision erfc; cross-checked against cdf_quad below.
cdf = mp.ncdf


def quantile(p):
    lo, hi = mp.mpf(-40), mp.mpf(40)
    for _ in range(200):
        mid = (lo + hi) / 2
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def expected_max(n):
    f = lambda x: x * n * phi(x) * cdf(x) ** (n - 1)
    return mp.quad(f, [-mp.inf, -5, 0, 2, 4, 6, mp.inf])


def euler_partial(n):
    return mp.harmonic(n) - mp.log(n)


print("cdf(1)            =", mp.nstr(cdf(1), 20))
print("quantile(0.975)   =", mp.nstr(quantile(mp.mpf("0.975")), 20))
print("100*ln cdf(-8)    =", mp.nstr(100 * mp.log(cdf(-8)), 20))
print("40*ln cdf(2)      =", mp.nstr(40 * mp.log(cdf(2)), 20))
print("1e6*ln cdf(-30)   =", mp.nstr(10**6 * mp.log(cdf(-30)), 20))
print("ln cdf(-40)       =", mp.nstr(mp.log(cdf(-40)), 20))
print("ln cdf(-12)       =", mp.nstr(mp.log(cdf(-12)), 20))
print("ln cdf(5)         =", mp.nstr(mp.log(cdf(5)), 20))
print("1-cdf(2)          =", mp.nstr(1 - cdf(2), 20))
print("cdf(3.2)^40       =", mp.nstr(cdf(mp.mpf("3.2")) ** 40, 20))
print("E max n=2         =", mp.nstr(expected_max(2), 20), mp.nstr(1 / mp.sqrt(mp.pi), 20))
for n in (10, 100, 1000, 10000):
    e = expected_max(n)
    print(f"E max n={n:<6}    =", mp.nstr(e, 20), " ratio", mp.nstr(e / mp.sqrt(2 * mp.log(n)), 12))
print("gamma prefactor n=100 =", mp.nstr(mp.mpf("0.5772") * mp.sqrt(2 * mp.log(100)), 20))
print("euler gamma       =", mp.nstr(mp.euler, 20))
for x in (1, -8, -12, -30, -40):
    assert abs(mp.log(cdf_quad(x)) / mp.log(cdf(x)) - 1) < mp.mpf(10) ** -12, x
print("euler partial 1e6 =", mp.nstr(euler_partial(10**6), 20))
