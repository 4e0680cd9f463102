"""Independent reference computations used by the tests (Fraction arithmetic only)."""
from fractions import Fraction
from math import comb, factorial


def bernoulli_oracle(m):
    """sum_{k<=m} C(m+1, k) B_k = 0, so B_1 = -1/2."""
    b = [Fraction(1)]
    for n in range(1, m + 1):
        b.append(-sum(comb(n + 1, k) * b[k] for k in range(n)) / (n + 1))
    return b[m]


def fp_oracle(g):
    b1, b2 = abs(bernoulli_oracle(2 * g)), abs(bernoulli_oracle(2 * g - 2))
    return (-1) ** g * b1 * b2 / (2 * (2 * g) * (2 * g - 2) * factorial(2 * g - 2))


def as_fraction(x):
    return Fraction(int(x.p), int(x.q))
