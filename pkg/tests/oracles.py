"""Independent reference computations used by the tests.

Nothing here imports from ``hdmt``; each routine takes a different route to
the quantity it checks (exact rationals, high-precision quadrature, literal
product formulas).
"""

from fractions import Fraction
from math import comb

import mpmath
import numpy as np


def bernoulli_numbers(count):
    """B_0 .. B_{count-1} as exact fractions (B_1 = -1/2 convention)."""
    B = [Fraction(1)]
    for m in range(1, count):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / Fraction(m + 1))
    return B


_B = bernoulli_numbers(64)


def digamma_series(x, terms=30, start=30.0):
    """Recurrence up to ``start`` then a ``terms``-term Stirling series, in mpmath."""
    with mpmath.workdps(40):
        x = mpmath.mpf(x)
        acc = mpmath.mpf(0)
        while x < start:
            acc -= 1 / x
            x += 1
        s = mpmath.log(x) - 1 / (2 * x)
        for k in range(1, terms + 1):
            s -= mpmath.mpf(_B[2 * k].numerator) / _B[2 * k].denominator / (2 * k * x ** (2 * k))
        return float(s + acc)


def trigamma_series(x, cutoff=200000):
    """sum_{k>=0} 1/(x+k)^2: partial sum plus Euler-Maclaurin tail."""
    with mpmath.workdps(30):
        x = mpmath.mpf(x)
        head = mpmath.fsum(1 / (x + k) ** 2 for k in range(cutoff))
        a = x + cutoff
        tail = 1 / a + 1 / (2 * a**2) + 1 / (6 * a**3) - 1 / (30 * a**5)
        return float(head + tail)


def t_log_integral(nu, power):
    """int_0^inf (1+z^2)^{-(nu+1)/2} log(1+z^2)^power dz via z = tan(theta)."""
    with mpmath.workdps(30):
        nu = mpmath.mpf(nu)
        f = lambda th: mpmath.cos(th) ** (nu - 1) * (-2 * mpmath.log(mpmath.cos(th))) ** power
        return mpmath.quad(f, [0, mpmath.pi / 4, mpmath.pi / 2])


def moment_ratios(nu):
    """(E log(1+t^2/nu), E log(1+t^2/nu)^2) for t ~ t_nu, by quadrature."""
    with mpmath.workdps(30):
        i0 = t_log_integral(nu, 0)
        return float(t_log_integral(nu, 1) / i0), float(t_log_integral(nu, 2) / i0)


def xi_direct(n_scale, nu, k):
    """Order-k expansion with each a_i built as an explicit product of fractions."""
    total = Fraction(0)
    for i in range(1, k + 1):
        a_i = Fraction(1)
        for l in range(1, i + 1):
            a_i *= Fraction(2 * l - 1, nu - 2 * l)
        total += Fraction((-1) ** (i + 1), i) * a_i
    return float(n_scale * total)


def neg2_log_lambda_one_sample(x, mu0):
    """-2 log of the likelihood ratio, from its product-of-sums form."""
    x = np.asarray(x, float)
    n = x.shape[0]
    with mpmath.workdps(50):
        num = mpmath.mpf(1)
        den = mpmath.mpf(1)
        for j in range(x.shape[1]):
            col = [mpmath.mpf(float(v)) for v in x[:, j]]
            mean = mpmath.fsum(col) / n
            num *= mpmath.fsum((v - mean) ** 2 for v in col) ** (mpmath.mpf(n) / 2)
            den *= mpmath.fsum((v - mpmath.mpf(float(mu0[j]))) ** 2 for v in col) ** (mpmath.mpf(n) / 2)
        return float(-2 * mpmath.log(num / den))


def neg2_log_lambda_two_sample(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n1, n2 = x.shape[0], y.shape[0]
    N = n1 + n2
    with mpmath.workdps(50):
        ratio = mpmath.mpf(1)
        for j in range(x.shape[1]):
            a = [mpmath.mpf(float(v)) for v in x[:, j]]
            b = [mpmath.mpf(float(v)) for v in y[:, j]]
            ma, mb = mpmath.fsum(a) / n1, mpmath.fsum(b) / n2
            mu = (n1 * ma + n2 * mb) / N
            alt = (mpmath.fsum((v - ma) ** 2 for v in a) + mpmath.fsum((v - mb) ** 2 for v in b)) / N
            null = (mpmath.fsum((v - mu) ** 2 for v in a) + mpmath.fsum((v - mu) ** 2 for v in b)) / N
            # max L under H0 over max L under H1
            ratio *= (null ** (-mpmath.mpf(N) / 2)) / (alt ** (-mpmath.mpf(N) / 2))
        return float(-2 * mpmath.log(ratio))
