"""Alive-state discrete memoryless channels: capacity and dispersion."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

STOCHASTIC_TOL = 1e-12
MAX_ITER = 10_000


@dataclass(frozen=True)
class ChannelScalars:
    capacity: float  # bits per channel use
    dispersion: float  # bits^2 per channel use


@dataclass(frozen=True)
class ChannelModel:
    """A BSC (``eps`` set) or a general row-stochastic transition matrix."""

    matrix: np.ndarray = field(repr=False)
    eps: float | None = None

    def __post_init__(self):
        W = np.array(self.matrix, dtype=float)
        W.setflags(write=False)
        object.__setattr__(self, "matrix", W)
        validate_stochastic(W)

    @classmethod
    def bsc(cls, eps: float) -> "ChannelModel":
        if not 0.0 < eps < 1.0:
            raise ValueError(f"BSC crossover must lie in (0, 1), got {eps}")
        return cls(np.array([[1 - eps, eps], [eps, 1 - eps]]), eps=float(eps))

    @property
    def input_alphabet_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_alphabet_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def kind(self) -> str:
        return "bsc" if self.eps is not None else "dmc"

    def scalars(self, tol: float = 1e-12) -> ChannelScalars:
        if self.eps is not None:
            return bsc_scalars(self.eps)
        return general_dmc_scalars(self.matrix, tol)

    def __eq__(self, other):
        if not isinstance(other, ChannelModel):
            return NotImplemented
        # Same transition law means the same channel, however it was built.
        return self.matrix.shape == other.matrix.shape and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.matrix.tobytes(), self.matrix.shape))


def validate_stochastic(W: np.ndarray) -> None:
    if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 1:
        raise ValueError(f"transition matrix must be 2-D and nonempty, got shape {W.shape}")
    if not np.all(np.isfinite(W)) or W.min() < 0.0 or W.max() > 1.0:
        raise ValueError("transition probabilities must lie in [0, 1]")
    dev = np.abs(W.sum(axis=1) - 1.0).max()
    if dev > STOCHASTIC_TOL:
        raise ValueError(f"rows must sum to 1 (worst deviation {dev:.3g})")


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bsc_scalars(eps: float) -> ChannelScalars:
    """Closed-form capacity ``1 - h2(eps)`` and dispersion of a BSC.

    The dispersion uses ``log2((1-eps)/eps)`` squared, so the square-root
    penalty in Strassen's approximation is always subtractive.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"BSC crossover must lie in (0, 1), got {eps}")
    if eps == 0.5:
        raise ValueError("BSC(1/2) has zero capacity; nothing can be sent")
    cap = 1.0 - binary_entropy(eps)
    disp = eps * (1 - eps) * math.log2((1 - eps) / eps) ** 2
    return ChannelScalars(cap, disp)


def _divergences(W, r):
    """Per-input D(W(.|x) || rW) in bits, plus the output law."""
    q = r @ W
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(W > 0, W / q[np.newaxis, :], 1.0)
        d = np.sum(np.where(W > 0, W * np.log2(ratio), 0.0), axis=1)
    return d, q


def blahut_arimoto(W: np.ndarray, tol: float = 1e-12, max_iter: int = MAX_ITER):
    """Capacity-achieving input law by Blahut-Arimoto iteration.

    Stops once the gap between the upper bound ``max_x D(W_x || q)`` and the
    lower bound ``sum_x r(x) D(W_x || q)`` drops below ``tol`` (so the returned
    capacity is within ``tol`` of the true one), or after ``max_iter`` rounds.

    Returns ``(capacity_bits, r, iterations)``.
    """
    W = np.asarray(W, dtype=float)
    r = np.full(W.shape[0], 1.0 / W.shape[0])
    lower = 0.0
    for it in range(1, max_iter + 1):
        d, _ = _divergences(W, r)
        lower = float(r @ d)
        upper = float(d.max())
        if upper - lower < tol:
            break
        r = r * np.exp2(d)
        r /= r.sum()
    return max(lower, 0.0), r, it


def general_dmc_scalars(W, tol: float = 1e-12) -> ChannelScalars:
    if tol <= 0:
        raise ValueError("tol must be positive")
    W = np.asarray(W, dtype=float)
    validate_stochastic(W)
    cap, r, _ = blahut_arimoto(W, tol)
    q = r @ W
    joint = r[:, np.newaxis] * W
    live = joint > 0
    dens = np.zeros_like(W)
    dens[live] = np.log2(W[live] / np.broadcast_to(q, W.shape)[live])
    mean = float(np.sum(joint[live] * dens[live]))
    var = float(np.sum(joint[live] * (dens[live] - mean) ** 2))
    return ChannelScalars(cap, max(var, 0.0))
