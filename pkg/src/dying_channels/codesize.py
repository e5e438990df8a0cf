"""Models for ``n -> log2 M*(n, eta)``, the largest log-codebook at length n.

Three families are provided: Strassen's normal approximation (from channel
capacity and dispersion), the BSC sphere-packing bound with an n-dependent
decoding radius, and lookup in a user-supplied table of ``(n, M, d)`` codes.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import norm

from .death import DeathDistribution
from .dmc import ChannelScalars, bsc_scalars


def q_inverse(p: float) -> float:
    """Inverse of the Gaussian tail ``Q(x) = P[Z > x]``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"Q^-1 needs 0 < p < 1, got {p}")
    return float(norm.isf(p))


def _check_eta(eta):
    if not 0.0 < eta <= 0.5:
        raise ValueError(f"eta must lie in (0, 1/2], got {eta}")


class CodeSizeModel:
    kind = "abstract"
    eta: float

    def log_m(self, n: int) -> float:
        return float(self.table(max(int(n), 0))[n]) if n > 0 else 0.0

    def table(self, n_max: int) -> np.ndarray:
        """``log2 M*(n)`` for ``n = 0..n_max`` (entry 0 is always 0)."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class StrassenModel(CodeSizeModel):
    """``max(0, n C - sqrt(n V) Q^-1(eta))``, the O(log n) term dropped."""

    scalars: ChannelScalars
    eta: float
    kind = "strassen"

    def __post_init__(self):
        _check_eta(self.eta)

    @classmethod
    def bsc(cls, eps: float, eta: float) -> "StrassenModel":
        return cls(bsc_scalars(eps), eta)

    def log_m(self, n):
        if n <= 0:
            return 0.0
        s = self.scalars
        return max(0.0, n * s.capacity - math.sqrt(n * s.dispersion) * q_inverse(self.eta))

    def table(self, n_max):
        return _strassen_table(self.scalars.capacity, self.scalars.dispersion,
                               self.eta, int(n_max))

    def describe(self):
        return {"kind": self.kind, "eta": self.eta,
                "capacity": self.scalars.capacity,
                "dispersion": self.scalars.dispersion}


@lru_cache(maxsize=64)
def _strassen_table(cap, disp, eta, n_max):
    n = np.arange(n_max + 1, dtype=float)
    raw = n * cap - np.sqrt(n * disp) * q_inverse(eta)
    out = np.maximum(raw, 0.0)
    out.setflags(write=False)
    return out


def strassen_log_m(model: StrassenModel, n: int) -> float:
    if n < 0:
        raise ValueError("blocklength must be nonnegative")
    return model.log_m(n)


def _log_binom_pmf(n, s, eps):
    return (math.lgamma(n + 1) - math.lgamma(s + 1) - math.lgamma(n - s + 1)
            + s * math.log(eps) + (n - s) * math.log1p(-eps))


def binomial_upper_tail(n: int, r: int, eps: float) -> float:
    """``P[Binomial(n, eps) > r]`` summed term by term in log space."""
    if r >= n:
        return 0.0
    if r < 0:
        return 1.0
    terms = [math.exp(_log_binom_pmf(n, s, eps)) for s in range(n, r, -1)]
    return min(math.fsum(terms), 1.0)


def decoding_radius(eps: float, eta: float, n: int) -> int | None:
    """Largest r with ``P[Binomial(n, eps) <= r] <= 1 - eta``.

    Equivalently the largest r whose upper tail ``P[X > r]`` is still at
    least ``eta``.  ``None`` means no radius qualifies (even r = 0 keeps
    too much mass), in which case the sphere-packing size is zero.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if n < 1:
        raise ValueError("blocklength must be positive")
    # Suffix sums from the smallest terms up; tail[r] = P[X > r].
    terms = [math.exp(_log_binom_pmf(n, s, eps)) for s in range(n + 1)]
    tail = [0.0] * (n + 1)
    acc = 0.0
    for r in range(n - 1, -1, -1):
        acc += terms[r + 1]
        tail[r] = acc
    radius = None
    for r in range(n):
        if tail[r] < eta:
            break
        radius = r
    return radius


def hamming_ball_volume(n: int, r: int) -> int:
    return sum(math.comb(n, s) for s in range(r + 1))


@dataclass(frozen=True)
class SpherePackingModel(CodeSizeModel):
    """BSC sphere-packing bound ``n - log2 sum_{s<=r(n)} C(n, s)``."""

    eps: float
    eta: float
    kind = "sphere"

    def __post_init__(self):
        _check_eta(self.eta)
        if not 0.0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 1/2), got {self.eps}")

    def table(self, n_max):
        return _sphere_table(self.eps, self.eta, int(n_max))

    def describe(self):
        return {"kind": self.kind, "eta": self.eta, "eps": self.eps}


@lru_cache(maxsize=64)
def _sphere_table(eps, eta, n_max):
    out = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        r = decoding_radius(eps, eta, n)
        if r is not None:
            # Exact integer ball volume; log2 is exact on powers of two.
            out[n] = n - math.log2(hamming_ball_volume(n, r))
    out.setflags(write=False)
    return out


def sphere_packing_log_m(model: SpherePackingModel, n: int) -> float:
    if n < 1:
        raise ValueError("blocklength must be positive")
    return model.log_m(n)


@dataclass(frozen=True)
class CodeEntry:
    n: int
    M: int
    d: int

    def __post_init__(self):
        if self.n < 1 or self.M < 2 or self.d < 1:
            raise ValueError(f"invalid code entry {self}")
        if self.d > self.n:
            raise ValueError(f"minimum distance exceeds length in {self}")
        if self.M > 2 ** self.n:
            raise ValueError(f"more codewords than binary words in {self}")


@dataclass(frozen=True)
class AlwaysAdmissible:
    kind = "always"

    def admits(self, entry: CodeEntry, eta: float) -> bool:
        return True


@dataclass(frozen=True)
class BoundedDistanceTail:
    """Admit a code if bounded-distance decoding on BSC(eps) meets eta."""

    eps: float
    kind = "tail"

    def admits(self, entry: CodeEntry, eta: float) -> bool:
        t = (entry.d - 1) // 2
        return binomial_upper_tail(entry.n, t, self.eps) <= eta


@dataclass(frozen=True)
class CodeTableModel(CodeSizeModel):
    """Best admissible code of exactly length n from a finite collection."""

    entries: tuple
    eta: float
    admissibility: object = field(default_factory=AlwaysAdmissible)
    kind = "table"

    def __post_init__(self):
        _check_eta(self.eta)
        object.__setattr__(self, "entries", tuple(self.entries))

    def table(self, n_max):
        out = np.zeros(int(n_max) + 1)
        for e in self.entries:
            if e.n <= n_max and self.admissibility.admits(e, self.eta):
                out[e.n] = max(out[e.n], math.log2(e.M))
        return out

    def describe(self):
        return {"kind": self.kind, "eta": self.eta,
                "admissibility": self.admissibility.kind,
                "entries": [[e.n, e.M, e.d] for e in self.entries]}


def table_log_m(model: CodeTableModel, n: int) -> float:
    if n < 1:
        raise ValueError("blocklength must be positive")
    return model.log_m(n)


def load_code_table(path) -> list[CodeEntry]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["n", "M", "d"]:
            raise ValueError(f"{path}: expected CSV header 'n,M,d'")
        return [CodeEntry(int(r["n"]), int(r["M"]), int(r["d"])) for r in reader]


def repetition_error(eps: float, m: int) -> float:
    """ML error of deciding one equiprobable bit from m BSC(eps) looks.

    Ties (possible for even m) are broken by a fair coin.
    """
    if m <= 0:
        return 0.5
    err = binomial_upper_tail(m, m // 2, eps)
    if m % 2 == 0:
        err += 0.5 * math.exp(_log_binom_pmf(m, m // 2, eps))
    return err


def repetition_error_floor(eps: float, d: DeathDistribution, n: int) -> float:
    """Average error of a length-n repetition code when the channel dies.

    Only the ``min(T, n)`` symbols sent before death carry information.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if n < 1:
        raise ValueError("blocklength must be positive")
    R = d.survival_array(n)
    p = np.maximum(R[:-1] - R[1:], 0.0)  # p(1..n)
    terms = [p[t - 1] * repetition_error(eps, t) for t in range(1, n + 1)]
    terms.append(R[n] * repetition_error(eps, n))
    return math.fsum(terms)
