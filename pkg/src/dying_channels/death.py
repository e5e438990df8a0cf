"""Death-time distributions: pmf, survival ``R(t) = P[T > t]``, sampling."""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Survival below this is treated as zero by the finite-horizon solvers.
TAIL_CUTOFF = 1e-15
NORMALIZE_SLACK = 0.01


class DeathDistribution:
    """Base class; subclasses implement :meth:`survival_array`."""

    kind = "abstract"
    horizon: int | None = None  # smallest t with R(t) = 0, if finite

    def survival_array(self, t_max: int) -> np.ndarray:
        """``R(0), R(1), ..., R(t_max)`` as a float array."""
        raise NotImplementedError

    def survival(self, t: int) -> float:
        if t < 0:
            raise ValueError("survival is defined for t >= 0")
        return float(self.survival_array(int(t))[-1])

    def pmf(self, t: int) -> float:
        if t < 1:
            raise ValueError("pmf is defined for t >= 1")
        R = self.survival_array(int(t))
        return float(max(R[t - 1] - R[t], 0.0))

    def pmf_array(self, t_max: int) -> np.ndarray:
        """``p(1), ..., p(t_max)``."""
        return np.maximum(-np.diff(self.survival_array(t_max)), 0.0)

    @property
    def effective_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon
        return self._tail_horizon()

    def _tail_horizon(self) -> int:
        raise NotImplementedError

    def _refine_tail(self, guess: int) -> int:
        t = max(int(guess), 1)
        while t > 1 and self.survival_array(t - 1)[-1] < TAIL_CUTOFF:
            t -= 1
        while self.survival_array(t)[-1] >= TAIL_CUTOFF:
            t += 1
        return t

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Inverse-CDF draws of T as an int64 array."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class Geometric(DeathDistribution):
    alpha: float
    kind = "geometric"

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"geometric alpha must lie in (0, 1], got {self.alpha}")

    def survival_array(self, t_max):
        t = np.arange(t_max + 1, dtype=float)
        if self.alpha == 1.0:
            return (t == 0).astype(float)
        return np.exp(t * math.log1p(-self.alpha))

    def _tail_horizon(self):
        if self.alpha == 1.0:
            return 1
        return self._refine_tail(math.ceil(math.log(TAIL_CUTOFF) / math.log1p(-self.alpha)))

    def sample(self, size, rng):
        u = 1.0 - rng.random(size)  # (0, 1]
        if self.alpha == 1.0:
            return np.ones(size, dtype=np.int64)
        t = np.ceil(np.log(u) / math.log1p(-self.alpha))
        return np.maximum(t, 1).astype(np.int64)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha}


@dataclass(frozen=True, eq=True)
class DiscreteWeibull(DeathDistribution):
    """``R(t) = (1 - alpha) ** (t ** beta)``; beta = 1 is geometric."""

    alpha: float
    beta: float
    kind = "weibull"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"weibull alpha must lie in (0, 1), got {self.alpha}")
        if not self.beta > 0.0:
            raise ValueError(f"weibull beta must be positive, got {self.beta}")

    def survival_array(self, t_max):
        t = np.arange(t_max + 1, dtype=float)
        return np.exp(t ** self.beta * math.log1p(-self.alpha))

    def _tail_horizon(self):
        x = math.log(TAIL_CUTOFF) / math.log1p(-self.alpha)
        return self._refine_tail(math.ceil(x ** (1.0 / self.beta)))

    def sample(self, size, rng):
        u = 1.0 - rng.random(size)
        x = np.log(u) / math.log1p(-self.alpha)
        t = np.ceil(x ** (1.0 / self.beta))
        return np.maximum(t, 1).astype(np.int64)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha, "beta": self.beta}


class _FiniteSupport(DeathDistribution):
    support: np.ndarray
    masses: np.ndarray

    def survival_array(self, t_max):
        # R(t) summed from the upper tail so that R(horizon) is exactly 0.
        R = np.zeros(t_max + 1)
        tail = np.concatenate([np.cumsum(self.masses[::-1])[::-1], [0.0]])
        idx = np.searchsorted(self.support, np.arange(t_max + 1), side="right")
        R[:] = tail[idx]
        return R

    def sample(self, size, rng):
        cdf = np.cumsum(self.masses)
        cdf[-1] = 1.0
        u = rng.random(size)
        return self.support[np.searchsorted(cdf, u, side="right")].astype(np.int64)


class FiniteUniform(_FiniteSupport):
    """Uniform death time on ``{t_min, ..., t_max}``."""

    kind = "uniform"

    def __init__(self, t_min: int, t_max: int):
        if t_min < 1 or t_max < t_min:
            raise ValueError(f"need 1 <= t_min <= t_max, got {t_min}, {t_max}")
        self.t_min, self.t_max = int(t_min), int(t_max)
        count = self.t_max - self.t_min + 1
        self.support = np.arange(self.t_min, self.t_max + 1, dtype=np.int64)
        self.masses = np.full(count, 1.0 / count)
        self.horizon = self.t_max

    def survival_array(self, t_max):
        t = np.arange(t_max + 1)
        count = self.t_max - self.t_min + 1
        R = (self.t_max - np.clip(t, self.t_min - 1, self.t_max)) / count
        return R.astype(float)

    def __eq__(self, other):
        return isinstance(other, FiniteUniform) and (self.t_min, self.t_max) == (
            other.t_min, other.t_max)

    def __hash__(self):
        return hash(("uniform", self.t_min, self.t_max))

    def __repr__(self):
        return f"FiniteUniform(t_min={self.t_min}, t_max={self.t_max})"

    def describe(self):
        return {"kind": self.kind, "t_min": self.t_min, "t_max": self.t_max}


class Empirical(_FiniteSupport):
    kind = "empirical"

    def __init__(self, support, masses):
        support = np.asarray(support, dtype=np.int64)
        masses = np.asarray(masses, dtype=float)
        if support.shape != masses.shape or support.ndim != 1 or support.size == 0:
            raise ValueError("support and masses must be equal-length 1-D sequences")
        if support.min() < 1 or np.any(masses < 0) or not masses.sum() > 0:
            raise ValueError("need positive death times and nonnegative masses")
        order = np.argsort(support)
        self.support, self.masses = support[order], masses[order]
        keep = self.masses > 0
        self.horizon = int(self.support[keep].max())

    def __eq__(self, other):
        return (isinstance(other, Empirical)
                and np.array_equal(self.support, other.support)
                and np.array_equal(self.masses, other.masses))

    def __hash__(self):
        return hash(("empirical", self.support.tobytes(), self.masses.tobytes()))

    def __repr__(self):
        return f"Empirical(n_points={self.support.size}, horizon={self.horizon})"

    def describe(self):
        return {"kind": self.kind,
                "pmf": [[int(t), float(p)] for t, p in zip(self.support, self.masses)]}


def survival(d: DeathDistribution, t: int) -> float:
    return d.survival(t)


def pmf(d: DeathDistribution, t: int) -> float:
    return d.pmf(t)


def load_empirical(rows) -> Empirical:
    """Build an empirical distribution from ``(t, p)`` pairs.

    Masses within 1% of unit total are rescaled; anything further off, a
    repeated ``t``, a non-positive ``t`` or a negative mass is rejected.
    """
    rows = [(int(t), float(p)) for t, p in rows]
    if not rows:
        raise ValueError("empirical pmf needs at least one row")
    ts = [t for t, _ in rows]
    if len(set(ts)) != len(ts):
        dup = sorted({t for t in ts if ts.count(t) > 1})
        raise ValueError(f"duplicate death times in pmf: {dup}")
    if min(ts) < 1:
        raise ValueError("death times must be positive integers")
    ps = np.array([p for _, p in rows])
    if np.any(ps < 0) or not np.all(np.isfinite(ps)):
        raise ValueError("pmf masses must be finite and nonnegative")
    total = float(ps.sum())
    if abs(total - 1.0) > NORMALIZE_SLACK:
        raise ValueError(f"pmf sums to {total:.6g}; more than 1% away from 1")
    return Empirical(ts, ps / total)


def load_empirical_csv(path) -> Empirical:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["t", "p"]:
            raise ValueError(f"{path}: expected CSV header 't,p'")
        rows = [(int(r["t"]), float(r["p"])) for r in reader]
    return load_empirical(rows)


def sample_death(d: DeathDistribution, rng_seed: int) -> int:
    rng = np.random.default_rng(rng_seed)
    return int(d.sample(1, rng)[0])


_KEY_ALIASES = {"α": "alpha", "β": "beta", "a": "alpha", "b": "beta"}


def parse_death(spec: str) -> DeathDistribution:
    """Parse ``geometric:alpha=0.05``, ``weibull:α=0.05,β=2``,
    ``uniform:min=2,max=40`` or ``file:PATH``."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "file":
        if not rest or not Path(rest).is_file():
            raise ValueError(f"death pmf file not found: {rest!r}")
        return load_empirical_csv(rest)
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        if "=" not in item:
            raise ValueError(f"malformed death parameter {item!r} in {spec!r}")
        k, v = item.split("=", 1)
        k = _KEY_ALIASES.get(k.strip(), k.strip().lower())
        if not re.fullmatch(r"[-+0-9.eE]+", v.strip()):
            raise ValueError(f"non-numeric value for {k} in {spec!r}")
        params[k] = float(v)
    try:
        if kind == "geometric":
            return Geometric(params["alpha"])
        if kind == "weibull":
            return DiscreteWeibull(params["alpha"], params["beta"])
        if kind == "uniform":
            lo, hi = params["min"], params["max"]
            if lo != int(lo) or hi != int(hi):
                raise ValueError("uniform bounds must be integers")
            return FiniteUniform(int(lo), int(hi))
    except KeyError as exc:
        raise ValueError(f"missing parameter {exc.args[0]!r} in death spec {spec!r}") from None
    raise ValueError(f"unknown death distribution {kind!r}")
