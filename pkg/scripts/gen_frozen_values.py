#!/usr/bin/env python3
"""Regenerate the frozen high-precision constants used by the test suite.

Requires mpmath (not a package dependency; install separately).  All test
oracles that cannot be computed cheaply at test time are produced here in
40-digit arithmetic and pasted into the tests as literals:

  * the kernel series at full correlation, summed with Richardson/Levin
    acceleration, independently of the trigamma implementation;
  * direct partial sums of the kernel series at interior arguments;
  * gamma-family and hypergeometric reference points.
"""

import mpmath as mp

mp.mp.dps = 40


def kernel_series(tau, m):
    half = mp.mpf(m) / 2
    term = lambda n: mp.factorial(n) * mp.mpf(tau) ** n / (mp.rf(half, n) * n**2)
    return mp.nsum(term, [1, mp.inf], method="r+l")


def main():
    print("# kernel series at tau=1, m=1..40")
    vals = [kernel_series(1, m) for m in range(1, 41)]
    for i in range(0, 40, 4):
        print("    " + ", ".join(mp.nstr(v, 17) for v in vals[i : i + 4]) + ",")

    print("\n# 500-term partial sum at (tau=0.25, m=4)")
    s = mp.mpf(0)
    for n in range(1, 501):
        s += mp.factorial(n) * mp.mpf(0.25) ** n / (mp.rf(mp.mpf(2), n) * n**2)
    print("   ", mp.nstr(s, 20))

    print("\n# hypergeometric-form kernel value at (tau=0.6, m=3)")
    v = 2 * mp.mpf("0.6") / 3 * mp.hyp3f2(1, 1, 1, 2, mp.mpf(3) / 2 + 1, "0.6")
    print("   ", mp.nstr(v, 20))

    print("\n# log-gamma reference points")
    for x in ("0.001", "0.5", "1", "10", "123.456", "1000000"):
        print(f"    lgamma({x}) = {mp.nstr(mp.loggamma(mp.mpf(x)), 22)}")

    print("\n# trigamma reference points")
    for x in ("0.25", "0.5", "1", "1.5", "2", "7.75", "10", "25", "100"):
        print(f"    trigamma({x}) = {mp.nstr(mp.polygamma(1, mp.mpf(x)), 20)}")

    print("\n# digamma reference points")
    for x in ("0.5", "1", "2.5", "60"):
        print(f"    digamma({x}) = {mp.nstr(mp.digamma(mp.mpf(x)), 20)}")

    print("\n# scattered hypergeometric references")
    print("    1F1(2.2,3.3;-7.5) =", mp.nstr(mp.hyp1f1(2.2, 3.3, -7.5), 20))
    print("    2F1(0.4,0.8,2.3;-3.5) =", mp.nstr(mp.hyp2f1(0.4, 0.8, 2.3, -3.5), 20))
    print("    2F1(1,1,2;0.5) =", mp.nstr(mp.hyp2f1(1, 1, 2, 0.5), 20))
    print("    2F1(0.5,0.3,2;1) =", mp.nstr(mp.hyp2f1(0.5, 0.3, 2, 1), 22))


if __name__ == "__main__":
    main()
