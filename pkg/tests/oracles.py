"""Independent reference computations.

Nothing here imports the package's numerical code.  Survival functions,
code sizes and optima are rebuilt from first principles with plain Python,
exact rationals where practical, and brute-force enumeration.
"""
import itertools
import math
from fractions import Fraction

from scipy import integrate


def survival_geometric(alpha, t):
    return (1.0 - alpha) ** t


def survival_weibull(alpha, beta, t):
    return (1.0 - alpha) ** (t ** beta)


def survival_uniform(a, b, t):
    if t < a:
        return 1.0
    if t >= b:
        return 0.0
    return (b - t) / (b - a + 1)


def survival_empirical(support, masses, t):
    return float(sum(Fraction(p) for s, p in zip(support, masses) if s > t))


def q_tail(x):
    """Gaussian upper tail by numerical integration of the density."""
    val, _ = integrate.quad(lambda u: math.exp(-u * u / 2) / math.sqrt(2 * math.pi), x, math.inf,
                            epsabs=1e-15, epsrel=1e-13)
    return val


def q_inverse(p, lo=-40.0, hi=40.0):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if q_tail(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bsc_capacity(eps):
    return 1.0 + eps * math.log2(eps) + (1 - eps) * math.log2(1 - eps)


def bsc_dispersion(eps):
    return eps * (1 - eps) * math.log2((1 - eps) / eps) ** 2


def strassen(eps, eta, n, qinv=None):
    qinv = q_inverse(eta) if qinv is None else qinv
    return max(0.0, n * bsc_capacity(eps) - math.sqrt(n * bsc_dispersion(eps)) * qinv)


def binom_tail_exact(n, r, eps):
    """P[Binomial(n, eps) > r] as an exact rational in the binary value of eps."""
    e = Fraction(eps)
    return sum(math.comb(n, s) * e ** s * (1 - e) ** (n - s) for s in range(r + 1, n + 1))


def radius_brute(eps, eta, n):
    """Largest r with exact tail P[X > r] >= eta, scanning every r."""
    e, target = Fraction(eps), Fraction(eta)
    pmf = [math.comb(n, s) * e ** s * (1 - e) ** (n - s) for s in range(n + 1)]
    best, tail = None, Fraction(0)
    for r in range(n, -1, -1):
        if tail >= target and best is None:
            best = r
        tail += pmf[r]
    return best


def sphere(eps, eta, n):
    r = radius_brute(eps, eta, n)
    if r is None:
        return 0.0
    return n - math.log2(sum(math.comb(n, s) for s in range(r + 1)))


def compositions(N):
    """All ordered partitions of N, lexicographic."""
    out = []
    for cuts in itertools.product((0, 1), repeat=N - 1):
        lengths, run = [], 1
        for c in cuts:
            if c:
                lengths.append(run)
                run = 1
            else:
                run += 1
        lengths.append(run)
        out.append(tuple(lengths))
    return out


def volume(lengths, surv, logm):
    """Exact rational objective from tabulated floats, rounded once."""
    total, e = Fraction(0), 0
    for n in lengths:
        e += n
        total += Fraction(surv(e)) * Fraction(logm(n))
    return float(total)


def best_by_enumeration(N, surv, logm):
    best_v, best_p = -1.0, None
    for p in compositions(N):
        v = volume(p, surv, logm)
        if v > best_v:
            best_v, best_p = v, p
    return best_v, best_p


def repetition_perr(eps, m):
    """ML error for one bit from m looks, by direct summation over outcomes."""
    if m == 0:
        return 0.5
    err = 0.0
    for s in range(m + 1):  # s flips out of m
        p = math.comb(m, s) * eps ** s * (1 - eps) ** (m - s)
        if 2 * s > m:
            err += p
        elif 2 * s == m:
            err += 0.5 * p
    return err


def bsc_cascade_crossover(a, b):
    """Crossover c with BSC(a) followed by BSC(c) equal to BSC(b); needs a <= b < 1/2."""
    return (b - a) / (1 - 2 * a)


def feedback_value(N, surv, logm):
    """Optimal volume when the sender sees whether the channel is still alive.

    Backward induction conditional on survival so far: from stage n alive
    (T > n - 1) the channel survives use n with hazard complement
    R(n) / R(n - 1); a dead channel earns nothing, so only the alive branch
    needs a value.  Returns the unconditional expected volume.
    """
    U = [[0.0] * (N + 2) for _ in range(N + 2)]
    for n in range(N, 0, -1):
        prev = surv(n - 1)
        h = surv(n) / prev if prev > 0 else 0.0
        for z in range(n):
            close = h * (logm(z + 1) + U[n + 1][0])
            cont = h * U[n + 1][z + 1]
            U[n][z] = max(close, cont)
    return surv(0) * U[1][0]
