"""Independent high-precision re-implementations of every closed formula.

These are written directly from the formula statements in 50-digit mpmath
arithmetic and share no code with the package; the acceptance suite pins
the float implementations against them at 1e-10 relative.
"""

import mpmath as mp

mp.mp.dps = 50

E2 = mp.exp(2)
EXP_CONSTANT = mp.mpf(1007156)
SHARP_EXP_CONSTANT = mp.mpf(86400) / (1 - 1 / mp.sqrt(2)) ** 2


def beta_threshold(alpha):
    alpha = mp.mpf(alpha)
    return (3 * (1 - alpha) / (2 * alpha)) ** ((1 - alpha) / (2 * alpha))


def theorem1_constant(alpha, x, D, C1):
    alpha, x, D, C1 = map(mp.mpf, (alpha, x, D, C1))
    inner = 1 / (x ** (2 * alpha) * 16 ** (1 - alpha) * D ** (2 * (1 - alpha)))
    inner += (3 * (1 - alpha) / (2 * alpha)) ** ((1 - alpha) / alpha) / x**2
    return 2 + EXP_CONSTANT * E2 * D**2 * C1 * inner


def theorem1_bound(n, x, D, alpha, C1):
    n, x, D = mp.mpf(n), mp.mpf(x), mp.mpf(D)
    c = theorem1_constant(alpha, x, D, C1)
    return c * mp.exp(-((x / (4 * D)) ** (2 * mp.mpf(alpha))) * n ** mp.mpf(alpha))


def pretrunc_bound(total_x, n, t, u, D, alpha, C1):
    total_x, n, t, u, D, alpha, C1 = map(mp.mpf, (total_x, n, t, u, D, alpha, C1))
    beta = beta_threshold(alpha)
    shape = 2 * alpha / (1 - alpha)
    term1 = 2 * mp.exp(-(total_x**2) * t**2 / (8 * D**2 * u**2 * n))
    term2 = (
        12 * 7200 * E2 * D**2 * C1 * n / ((1 - t) ** 2 * total_x**2)
        * (u**2 + beta**2)
        * mp.exp(-(u**shape))
    )
    return term1 + term2


def substituted_bound(total_x, n, D, alpha, C1):
    """The closed n-dependent form after t = 1/sqrt(2), u = (x/(4 D sqrt(n)))^(1-a)."""
    total_x, n, D, alpha, C1 = map(mp.mpf, (total_x, n, D, alpha, C1))
    beta = beta_threshold(alpha)
    c_n = 2 + SHARP_EXP_CONSTANT * E2 * D**2 * C1 * n * (
        1 / (total_x ** (2 * alpha) * (16 * D**2 * n) ** (1 - alpha))
        + beta**2 / total_x**2
    )
    return c_n * mp.exp(-((total_x**2 / (16 * D**2 * n)) ** alpha))


def theorem2_constants(p1, p2, r, D):
    p1, p2, r, D = map(mp.mpf, (p1, p2, r, D))
    pref = 2 ** (2 * p2) / (2 ** (2 * p2) - 1) * 2 ** (1 - r)
    k1 = pref * 2 ** (p1 + 2 * p1 * p2 / r) * D ** (p1 / r)
    k2 = pref * 2 ** (p2 + 2 * p2**2 / r) * D ** (p2 / r) * (p2 / (p2 - r)) ** (p2 / r)
    return k1, k2


def theorem2_bound(n, x, r, D, p1, p2, C1, C2):
    n, x = mp.mpf(n), mp.mpf(x)
    k1, k2 = theorem2_constants(p1, p2, r, D)
    r, p1, p2, C1, C2 = map(mp.mpf, (r, p1, p2, C1, C2))
    return k1 * C1 * x**-p1 * n ** (1 - p1) + k2 * C2 * x**-p2 * n ** (p2 / r - p2)


def corollary_bound(n, x, r, D, p, C, sup_moment):
    n, x, r, D, p, C, sup_moment = map(mp.mpf, (n, x, r, D, p, C, sup_moment))
    p2 = (p - 1) * r / (r - 1)
    pref = 2 ** (2 * p2) / (2 ** (2 * p2) - 1) * 2 ** (1 - r)
    k = pref * 2 ** (p + 2 * p * p2 / r) * D ** (p / r)
    return k * (C * x**-p + sup_moment * x ** (-(p - 1) * r / (r - 1))) * n ** (1 - p)


def lesigne_volny_bound(n, x, p, M):
    n, x, p, M = map(mp.mpf, (n, x, p, M))
    return (18 * p * mp.sqrt(p / (p - 1))) ** p * M**p * x**-p * n ** (-p / 2)


def fan_real_bound(n, x, alpha, C1):
    n, x, alpha, C1 = map(mp.mpf, (n, x, alpha, C1))
    inner = 1 / (x ** (2 * alpha) * 16 ** (1 - alpha))
    inner += (3 * (1 - alpha) / (2 * alpha)) ** ((1 - alpha) / alpha) / x**2
    c = 2 + 35 * C1 * inner
    return c * mp.exp(-((x / 4) ** (2 * alpha)) * n**alpha)


def pinelis_hoeffding(n, x_abs, b, D):
    n, x_abs, b, D = map(mp.mpf, (n, x_abs, b, D))
    return mp.exp(-(x_abs**2) / (2 * D**2 * n * b**2))


def theorem2_general_q(q, n, x, r, D, p1, p2, C1, C2):
    q, n, x, r, D, p1, p2, C1, C2 = map(mp.mpf, (q, n, x, r, D, p1, p2, C1, C2))
    coef = 2 ** (q - r) * q / (2**q - 1)
    t1 = 2 ** ((1 + q / r) * p1) * D ** (p1 / r) * C1 * x**-p1 * n ** (1 - p1) / (q - p1)
    t2 = (
        2 ** ((1 + q / r) * p2)
        * D ** (p2 / r)
        * (p2 / (p2 - r)) ** (p2 / r)
        * C2
        * x**-p2
        * n ** (p2 / r - p2)
        / (q - p2)
    )
    return coef * (t1 + t2)


def rel_err(got, want) -> float:
    got, want = mp.mpf(got), mp.mpf(want)
    if want == 0:
        return float(abs(got))
    return float(abs(got - want) / abs(want))
