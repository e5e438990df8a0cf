"""Monte Carlo replay of schedules, and parameter sweeps for figure data."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .codesize import SpherePackingModel, StrassenModel
from .death import DeathDistribution, DiscreteWeibull, Geometric
from .optimizer import Partition, geometric_optimal_volume, optimal_epoch_size, solve

# Trials per independent RNG stream; block b draws from SeedSequence([seed, b]).
BLOCK = 1 << 16


@dataclass
class SimulationResult:
    trials: int
    mean_volume: float
    std_error: float
    per_epoch_completion_rate: list
    seed: int
    completed_histogram: list


def _death_draws(d: DeathDistribution, trials: int, seed: int):
    for b, start in enumerate(range(0, trials, BLOCK)):
        rng = np.random.default_rng([seed, b])
        yield d.sample(min(BLOCK, trials - start), rng)


def simulate(p, d: DeathDistribution, m, trials: int, seed: int) -> SimulationResult:
    """Draw T per trial and credit every epoch i with ``T > e_i``.

    Results depend only on ``(p, d, m, trials, seed)``: each block of trials
    has its own seed-derived stream and only integer tallies are combined.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    p = p if isinstance(p, Partition) else Partition(tuple(p))
    bounds = np.array(p.boundaries, dtype=np.int64)
    hist = np.zeros(p.k + 1, dtype=np.int64)
    for deaths in _death_draws(d, trials, seed):
        hist += kernels.completed_hist(deaths, bounds)

    logm = m.table(max(p.lengths))
    epoch_bits = np.array([logm[n] for n in p.lengths])
    cum = np.concatenate([[0.0], np.cumsum(epoch_bits)])  # volume after j epochs
    freq = hist / trials
    mean = float(freq @ cum)
    second = float(freq @ cum ** 2)
    var = max(second - mean * mean, 0.0) * trials / max(trials - 1, 1)
    # Epoch i completes whenever at least i epochs complete.
    completed = np.cumsum(hist[::-1])[::-1][1:] / trials
    return SimulationResult(
        trials=trials,
        mean_volume=mean,
        std_error=math.sqrt(var / trials),
        per_epoch_completion_rate=[float(x) for x in completed],
        seed=int(seed),
        completed_histogram=[int(x) for x in hist],
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

SWEEP_MODES = ("optimize", "strassen_curve", "epoch_length", "five_bit_reliability")
# Fixed column order for each CSV mode.
SWEEP_COLUMNS = {
    "optimize": ["eps", "alpha", "beta", "eta", "N", "solver", "codesize",
                 "volume", "partition", "local_cert", "global_cert", "neighborhood_cert",
                 "ordered_cert"],
    "strassen_curve": ["eps", "eta", "n", "log_m", "normalized"],
    "epoch_length": ["eps", "alpha", "eta", "codesize", "epoch_length", "stationary_epoch_length"],
    "five_bit_reliability": ["eps", "alpha", "target_bits", "solver", "eta"],
}


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _death_for(alpha, beta):
    if beta is None or beta == 1.0:
        return Geometric(alpha)
    return DiscreteWeibull(alpha, beta)


def _model_for(kind, eps, eta):
    if kind == "strassen":
        return StrassenModel.bsc(eps, eta)
    if kind == "sphere":
        return SpherePackingModel(eps, eta)
    raise ValueError(f"sweeps support codesize 'strassen' or 'sphere', not {kind!r}")


def best_volume(d, m, solver="dp", N=None) -> float:
    N = d.effective_horizon if N is None else N
    return solve(solver, d, m, N, certify=False).volume


def five_bit_reliability(eps: float, alpha: float, target: float = 5.0,
                         solver: str = "stationary", rtol: float = 1e-9) -> float:
    """Smallest eta whose optimized schedule carries ``target`` expected bits.

    Bisection in log(eta) over (1e-15, 1/2]; the optimal volume grows with
    eta, so the search is well posed.  ``stationary`` solves the infinite
    horizon exactly; ``dp`` and ``greedy`` work on the effective horizon.
    Returns ``nan`` when even eta = 1/2 falls short.
    """
    d = Geometric(alpha)

    def reach(eta):
        m = StrassenModel.bsc(eps, eta)
        if solver == "stationary":
            return geometric_optimal_volume(d, m)[1] >= target
        return best_volume(d, m, solver) >= target

    hi = 0.5
    if not reach(hi):
        return math.nan
    lo = 1e-15
    if reach(lo):
        return lo
    llo, lhi = math.log(lo), math.log(hi)
    while lhi - llo > rtol:
        mid = 0.5 * (llo + lhi)
        if reach(math.exp(mid)):
            lhi = mid
        else:
            llo = mid
    return math.exp(lhi)


def sweep(grid: dict) -> list[dict]:
    """Evaluate one row per point of the cartesian grid.

    ``grid["mode"]`` selects the data product: ``optimize`` (one optimization
    report per point), ``strassen_curve`` (log M* and its normalized form for
    ``n`` in ``[1, n_max]``), ``epoch_length`` (geometric optimal epoch size)
    or ``five_bit_reliability``.
    """
    mode = grid.get("mode", "optimize")
    if mode not in SWEEP_MODES:
        raise ValueError(f"unknown sweep mode {mode!r}")
    rows = []
    if mode == "strassen_curve":
        points = list(itertools.product(_as_list(grid["eps"]), _as_list(grid["eta"])))
        if not points:
            raise ValueError("empty sweep grid")
        n_max = int(grid.get("n_max", 3000))
        for eps, eta in points:
            L = StrassenModel.bsc(eps, eta).table(n_max)
            for n in range(1, n_max + 1):
                rows.append({"eps": eps, "eta": eta, "n": n, "log_m": float(L[n]),
                             "normalized": float(L[n] / n)})
        return rows
    if mode == "epoch_length":
        points = list(itertools.product(_as_list(grid["eps"]), _as_list(grid["alpha"]),
                                        _as_list(grid["eta"]),
                                        _as_list(grid.get("codesize", "strassen"))))
        if not points:
            raise ValueError("empty sweep grid")
        for eps, alpha, eta, kind in points:
            d, m = Geometric(alpha), _model_for(kind, eps, eta)
            rows.append({"eps": eps, "alpha": alpha, "eta": eta, "codesize": kind,
                         "epoch_length": optimal_epoch_size(d, m),
                         "stationary_epoch_length": geometric_optimal_volume(d, m)[0]})
        return rows
    if mode == "five_bit_reliability":
        target = float(grid.get("target_bits", 5.0))
        solvers = _as_list(grid.get("solver", "stationary"))
        points = list(itertools.product(_as_list(grid["eps"]), _as_list(grid["alpha"]), solvers))
        if not points:
            raise ValueError("empty sweep grid")
        for eps, alpha, solver in points:
            rows.append({"eps": eps, "alpha": alpha, "target_bits": target, "solver": solver,
                         "eta": five_bit_reliability(eps, alpha, target, solver)})
        return rows

    points = list(itertools.product(
        _as_list(grid["eps"]), _as_list(grid["alpha"]), _as_list(grid.get("beta", [None])),
        _as_list(grid["eta"]), _as_list(grid.get("N", [None])),
        _as_list(grid.get("solver", "dp")), _as_list(grid.get("codesize", "strassen"))))
    if not points:
        raise ValueError("empty sweep grid")
    for eps, alpha, beta, eta, N, solver, kind in points:
        d = _death_for(alpha, beta)
        m = _model_for(kind, eps, eta)
        if solver != "greedy" and N is None:
            N = d.effective_horizon
        rep = solve(solver, d, m, N)
        rows.append({
            "eps": eps, "alpha": alpha, "beta": beta, "eta": eta, "N": N,
            "solver": solver, "codesize": kind, "volume": rep.volume,
            "partition": " ".join(map(str, rep.partition.lengths)) if rep.partition else "",
            "local_cert": rep.local_cert, "global_cert": rep.global_cert,
            "neighborhood_cert": rep.neighborhood_cert,
            "ordered_cert": rep.ordered_cert, "report": rep,
        })
    return rows
