"""Partial orders between channels that die.

Two dimensions are compared: death times by pointwise survival dominance,
and alive channels by output degradation (the better channel can simulate
the worse one by post-processing its output through a stochastic matrix).
Convention: the better channel is the one that includes the worse.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .death import DeathDistribution
from .dmc import ChannelModel

RESIDUAL_TOL = 1e-8


@dataclass
class DominanceVerdict:
    dominates: bool
    witness_t: int | None = None


@dataclass
class DegradationVerdict:
    degraded: bool
    witness_matrix: np.ndarray | None = None
    residual: float | None = None


def stochastic_dominance(d1: DeathDistribution, d2: DeathDistribution,
                         horizon: int | None = None, atol: float = 1e-12) -> DominanceVerdict:
    """Does ``d2`` dominate ``d1``, i.e. ``R1(t) <= R2(t)`` for ``1 <= t <= horizon``?"""
    if horizon is None:
        horizon = max(d1.effective_horizon, d2.effective_horizon)
    R1 = d1.survival_array(horizon)
    R2 = d2.survival_array(horizon)
    bad = np.flatnonzero(R1[1:] > R2[1:] + atol)
    if bad.size:
        return DominanceVerdict(False, int(bad[0]) + 1)
    return DominanceVerdict(True)


def output_degradation(p: ChannelModel, q: ChannelModel, tol: float = 1e-9) -> DegradationVerdict:
    """Is ``q`` a degraded version of ``p``: some row-stochastic T with ``P T = Q``?

    Solved as an LP minimizing the l1 residual; feasible when the recovered
    witness reproduces ``Q`` to within ``tol`` (never looser than 1e-8) in
    max-norm.
    """
    P, Q = p.matrix, q.matrix
    if P.shape[0] != Q.shape[0]:
        raise ValueError(
            f"input alphabets differ: {P.shape[0]} vs {Q.shape[0]}")
    nx, ny = P.shape
    nz = Q.shape[1]
    nt = ny * nz  # T flattened row-major
    ns = nx * nz  # residual slacks, split into positive and negative parts
    c = np.concatenate([np.zeros(nt), np.ones(2 * ns)])

    A_eq = np.zeros((ns + ny, nt + 2 * ns))
    b_eq = np.zeros(ns + ny)
    for x in range(nx):
        for z in range(nz):
            row = x * nz + z
            for y in range(ny):
                A_eq[row, y * nz + z] = P[x, y]
            A_eq[row, nt + row] = 1.0
            A_eq[row, nt + ns + row] = -1.0
            b_eq[row] = Q[x, z]
    for y in range(ny):
        A_eq[ns + y, y * nz:(y + 1) * nz] = 1.0
        b_eq[ns + y] = 1.0

    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return DegradationVerdict(False)
    T = np.clip(res.x[:nt].reshape(ny, nz), 0.0, None)
    T /= T.sum(axis=1, keepdims=True)
    residual = float(np.abs(P @ T - Q).max())
    if residual <= min(tol, RESIDUAL_TOL):
        return DegradationVerdict(True, T, residual)
    return DegradationVerdict(False, residual=residual)


ORDER_VERDICTS = ("ch2>=ch1", "ch1>=ch2", "incomparable", "equivalent")


@dataclass
class CombinedVerdict:
    verdict: str
    channel_2_includes_1: DegradationVerdict
    channel_1_includes_2: DegradationVerdict
    death_2_dominates_1: DominanceVerdict
    death_1_dominates_2: DominanceVerdict


def combined_order(ch1: tuple, ch2: tuple, horizon: int | None = None) -> CombinedVerdict:
    """Order two ``(ChannelModel, DeathDistribution)`` pairs.

    One pair is at least as good as the other when it wins or ties in both
    dimensions; otherwise they are incomparable.
    """
    (w1, d1), (w2, d2) = ch1, ch2
    inc21 = output_degradation(w2, w1)  # w1 is a degraded w2
    inc12 = output_degradation(w1, w2)
    dom21 = stochastic_dominance(d1, d2, horizon)
    dom12 = stochastic_dominance(d2, d1, horizon)
    two_better = inc21.degraded and dom21.dominates
    one_better = inc12.degraded and dom12.dominates
    if two_better and one_better:
        verdict = "equivalent"
    elif two_better:
        verdict = "ch2>=ch1"
    elif one_better:
        verdict = "ch1>=ch2"
    else:
        verdict = "incomparable"
    return CombinedVerdict(verdict, inc21, inc12, dom21, dom12)
