"""Blocklength schedules maximizing expected transmission volume.

The objective for a composition ``(n_1, ..., n_k)`` with boundaries
``e_i = n_1 + ... + n_i`` is ``sum_i R(e_i) * log2 M*(n_i)``.  Solvers:
greedy epoch-by-epoch argmax, backward induction (exact), and exhaustive
enumeration (exact, small horizons only).
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .codesize import CodeSizeModel
from .death import DeathDistribution, Geometric

MAX_EXHAUSTIVE = 22
# Relative slack in certificate inequalities, for rounding only.
CERT_RTOL = 1e-12


@dataclass(frozen=True)
class Partition:
    lengths: tuple

    def __post_init__(self):
        lengths = tuple(int(n) for n in self.lengths)
        if not lengths:
            raise ValueError("a partition needs at least one epoch")
        if min(lengths) < 1:
            raise ValueError(f"epoch lengths must be positive, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @property
    def boundaries(self) -> tuple:
        """``(e_1, ..., e_k)``; ``e_0 = 0`` is implicit."""
        return tuple(int(x) for x in np.cumsum(self.lengths))

    @property
    def total_time(self) -> int:
        return sum(self.lengths)

    @property
    def k(self) -> int:
        return len(self.lengths)

    def __len__(self):
        return len(self.lengths)

    def __iter__(self):
        return iter(self.lengths)


@dataclass
class OptimizationReport:
    partition: Partition | None
    volume: float
    solver: str
    model: str
    local_cert: bool | None = None
    global_cert: bool | None = None
    neighborhood_cert: bool | None = None
    ordered_cert: bool = False
    horizon: int | None = None
    diagnostic: str | None = None
    extra: dict = field(default_factory=dict)


def _as_partition(p) -> Partition:
    return p if isinstance(p, Partition) else Partition(tuple(p))


def _arrays(d: DeathDistribution, m: CodeSizeModel, t_max: int):
    return d.survival_array(t_max), m.table(t_max)


def _volume_from_arrays(lengths, surv, logm) -> float:
    # Exact rational sum of exact products, rounded once: schedules that tie
    # on the tabulated R and log M values report bit-identical volumes.
    total = Fraction(0)
    e = 0
    for n in lengths:
        e += n
        total += Fraction(float(surv[e])) * Fraction(float(logm[n]))
    return float(total)


def evaluate_volume(p, d: DeathDistribution, m: CodeSizeModel) -> float:
    p = _as_partition(p)
    surv, logm = _arrays(d, m, p.total_time)
    return _volume_from_arrays(p.lengths, surv, logm)


def _is_nonincreasing(lengths) -> bool:
    # Trailing zero-volume filler epochs are ignored by the caller.
    return all(a >= b for a, b in zip(lengths, lengths[1:]))


def _slack(*values):
    return CERT_RTOL * max(1.0, *(abs(v) for v in values))


def _boundary_verdicts(lengths, surv, logm, max_shift):
    """Two-sided shift test at each interior boundary.

    Moving boundary i left by K must not help:
        R(e_i) L(n_i) - R(e_i - K) L(n_i - K) >= R(e_{i+1}) [L(n_{i+1} + K) - L(n_{i+1})]
    and moving it right by K must not help either:
        R(e_i + K) L(n_i + K) - R(e_i) L(n_i) <= R(e_{i+1}) [L(n_{i+1}) - L(n_{i+1} - K)].
    Comparisons are made in product form, so zero gains need no special case.
    """
    bounds = np.cumsum(lengths)
    verdicts = []
    for i in range(len(lengths) - 1):
        n_i, n_j = lengths[i], lengths[i + 1]
        e_i, e_j = bounds[i], bounds[i + 1]
        base_left = surv[e_i] * logm[n_i]
        ok = True
        for K in range(1, min(max_shift, n_i) + 1):
            loss = base_left - surv[e_i - K] * logm[n_i - K]
            gain = surv[e_j] * (logm[n_j + K] - logm[n_j])
            if loss < gain - _slack(loss, gain):
                ok = False
                break
        if ok:
            for K in range(1, min(max_shift, n_j) + 1):
                gain = surv[e_i + K] * logm[n_i + K] - base_left
                loss = surv[e_j] * (logm[n_j] - logm[n_j - K])
                if gain > loss + _slack(loss, gain):
                    ok = False
                    break
        verdicts.append(ok)
    return verdicts


def check_local_optimality(p, d: DeathDistribution, m: CodeSizeModel) -> list[bool]:
    """Per interior boundary: can a unit shift of that boundary alone help?"""
    p = _as_partition(p)
    surv, logm = _arrays(d, m, p.total_time + 1)
    return _boundary_verdicts(p.lengths, surv, logm, 1)


def _splits_ok(lengths, surv, logm) -> bool:
    """No epoch gains from being cut in two at any interior point."""
    e = 0
    for n in lengths:
        base = surv[e + n] * logm[n]
        for a in range(1, n):
            split = surv[e + a] * logm[a] + surv[e + n] * logm[n - a]
            if split > base + _slack(base, split):
                return False
        e += n
    return True


def _merges_ok(lengths, surv, logm) -> bool:
    """No run of two or more consecutive epochs gains from being fused."""
    bounds = np.concatenate([[0], np.cumsum(lengths)])
    contrib = np.array([surv[bounds[i + 1]] * logm[n] for i, n in enumerate(lengths)])
    prefix = np.concatenate([[0.0], np.cumsum(contrib)])
    k = len(lengths)
    for i in range(k):
        for j in range(i + 1, k):
            cur = prefix[j + 1] - prefix[i]
            fused = surv[bounds[j + 1]] * logm[bounds[j + 1] - bounds[i]]
            if fused > cur + _slack(cur, fused):
                return False
    return True


def check_global_optimality(p, d: DeathDistribution, m: CodeSizeModel) -> bool:
    """Every single-boundary shift of every admissible size fails to help.

    Not sufficient on its own: it never considers adding or removing
    boundaries, see :func:`check_neighborhood_optimality`.
    """
    p = _as_partition(p)
    surv, logm = _arrays(d, m, p.total_time + max(p.lengths))
    return all(_boundary_verdicts(p.lengths, surv, logm, max(p.lengths)))


def certificate_details(p, d: DeathDistribution, m: CodeSizeModel) -> dict:
    """Verdicts per move family.

    ``shift``: every boundary moved alone by every admissible K, both ways.
    ``split``: every epoch cut once.  ``merge``: every contiguous run fused.
    Shifts alone miss schedules that need an extra boundary, and zero-volume
    plateaus where only fusing several short epochs helps.
    """
    p = _as_partition(p)
    surv, logm = _arrays(d, m, p.total_time + max(p.lengths))
    shifts = _boundary_verdicts(p.lengths, surv, logm, max(p.lengths))
    return {"shift": all(shifts), "shift_per_boundary": shifts,
            "split": _splits_ok(p.lengths, surv, logm),
            "merge": _merges_ok(p.lengths, surv, logm)}


def check_neighborhood_optimality(p, d: DeathDistribution, m: CodeSizeModel) -> bool:
    """No shift, split or merge helps.

    ``False`` means "not certified"; moves that change several boundaries
    at once are outside its scope.
    """
    v = certificate_details(p, d, m)
    return v["shift"] and v["split"] and v["merge"]


def _finish(lengths, d, m, solver, horizon=None, diagnostic=None, certify=True, **extra):
    if not lengths:
        return OptimizationReport(None, 0.0, solver, m.kind, horizon=horizon,
                                  diagnostic=diagnostic, extra=extra)
    p = Partition(tuple(lengths))
    vol = evaluate_volume(p, d, m)
    rep = OptimizationReport(p, vol, solver, m.kind, horizon=horizon,
                             diagnostic=diagnostic, extra=extra)
    # Ordering is judged on the epochs that actually carry volume.
    logm = m.table(max(p.lengths))
    carrying = list(p.lengths)
    surv = d.survival_array(p.total_time)
    while carrying and surv[sum(carrying)] * logm[carrying[-1]] == 0.0:
        carrying.pop()
    rep.ordered_cert = _is_nonincreasing(carrying)
    if certify:
        rep.local_cert = all(check_local_optimality(p, d, m))
        rep.global_cert = check_global_optimality(p, d, m)
        rep.neighborhood_cert = check_neighborhood_optimality(p, d, m)
    return rep


def greedy_schedule(d: DeathDistribution, m: CodeSizeModel, cap: int | None = None,
                    certify: bool = True) -> OptimizationReport:
    """Algorithm: choose each epoch to maximize its own expected credit.

    ``n_i = argmax_nu R(e_{i-1} + nu) L(nu)``, smallest nu on ties.  Stops when
    no positive increment remains, when the total-time ``cap`` is used up,
    or once the effective horizon of the death distribution is passed.
    """
    h = d.effective_horizon
    window = h if cap is None else min(h, cap)
    limit = window
    logm = m.table(window)
    lengths = []
    e = 0
    while e < limit:
        span = window if cap is None else min(window, cap - e)
        surv = d.survival_array(e + span)
        gains = surv[e + 1:e + span + 1] * logm[1:span + 1]
        best = int(np.argmax(gains))
        if not gains[best] > 0.0:
            break
        lengths.append(best + 1)
        e += best + 1
    diag = None if lengths else "no blocklength yields a positive expected increment"
    return _finish(lengths, d, m, "greedy", horizon=cap, diagnostic=diag, certify=certify)


def _policy_partition(policy, horizon):
    lengths = []
    z = 0
    for n in range(1, horizon + 1):
        if policy[n, z] == 0:
            lengths.append(z + 1)
            z = 0
        else:
            z += 1
    if z:
        lengths.append(z)  # unfinished tail; it earns nothing
    return lengths


def dp_schedule(d: DeathDistribution, m: CodeSizeModel, N: int,
                certify: bool = True, return_tables: bool = False):
    """Exact optimum by backward induction over (time n, epoch position z).

    ``V_n(z) = max(R(n) L(z + 1) + V_{n+1}(0), V_{n+1}(z + 1))`` with
    ``V_{N+1} = 0``; the first option ends the epoch at time n.  Ties go to
    continuing the epoch.
    """
    if N < 1:
        raise ValueError("horizon N must be positive")
    surv, logm = _arrays(d, m, N + 1)
    value, policy = kernels.dp_backward(surv, logm, N)
    lengths = _policy_partition(policy, N)
    rep = _finish(lengths, d, m, "dp", horizon=N, certify=certify,
                  dp_value=float(value[1, 0]))
    if return_tables:
        return rep, value, policy
    return rep


def dp_schedule_explicit_state(d: DeathDistribution, m: CodeSizeModel, N: int):
    """Backward induction carrying the channel-state bit explicitly.

    State at stage n is ``(z, w)``: position in the current epoch and whether
    the channel is alive.  The control ``s`` continues (1) or closes (0) the
    epoch; closing credits ``L(z + 1)`` in expectation over the death
    disturbance, i.e. with weight ``R(n)``.  The disturbance keeps ``w`` with
    probability ``R(n)`` and clears it otherwise.  Costs are negated volume.

    Returns ``(report, J, policy)`` where ``J[n, z, w]`` and ``policy[n, z, w]``
    cover stages ``1..N+1``.
    """
    if N < 1:
        raise ValueError("horizon N must be positive")
    surv, logm = _arrays(d, m, N + 1)
    J = np.zeros((N + 2, N + 2, 2))
    policy = np.ones((N + 1, N + 1, 2), dtype=np.int8)
    for n in range(N, 0, -1):
        keep = surv[n]
        for z in range(n):
            for w in (0, 1):
                best, best_s = None, None
                for s in (1, 0):  # continue first so ties favour it
                    stage = -(1 - s) * keep * logm[z + 1]
                    zn = (z + 1) * s
                    future = keep * J[n + 1, zn, w] + (1 - keep) * J[n + 1, zn, 0]
                    total = stage + future
                    if best is None or total < best:
                        best, best_s = total, s
                J[n, z, w] = best
                policy[n, z, w] = best_s
    lengths = _policy_partition(policy[:, :, 1], N)
    rep = _finish(lengths, d, m, "dp-state", horizon=N, certify=False,
                  dp_value=float(-J[1, 0, 1]))
    return rep, J, policy


def feedback_invariant(policy, N: int) -> bool:
    """True when the optimal control never depends on the channel-state bit."""
    for n in range(1, N + 1):
        if not np.array_equal(policy[n, :n, 0], policy[n, :n, 1]):
            return False
    return True


def exhaustive_schedule(d: DeathDistribution, m: CodeSizeModel, N: int,
                        certify: bool = True) -> OptimizationReport:
    """Best of all ``2**(N-1)`` compositions of N; lexicographically smallest on ties."""
    if N < 1:
        raise ValueError("horizon N must be positive")
    if N > MAX_EXHAUSTIVE:
        raise ValueError(
            f"exhaustive search over 2^{N - 1} compositions refused; "
            f"N must be <= {MAX_EXHAUSTIVE}")
    surv, logm = _arrays(d, m, N)
    mask, _ = kernels.exhaustive(surv, logm, N)
    lengths = kernels.mask_to_lengths(mask, N)
    return _finish(lengths, d, m, "exhaustive", horizon=N, certify=certify)


def optimal_epoch_size(d: Geometric, m: CodeSizeModel) -> int:
    """``argmax_nu (1 - alpha)^nu L(nu)`` over the effective horizon."""
    if not isinstance(d, Geometric):
        raise TypeError("equal-epoch optimum holds for geometric death only")
    h = d.effective_horizon
    score = d.survival_array(h) * m.table(h)
    best = int(np.argmax(score))
    if not score[best] > 0.0:
        raise ValueError("no blocklength within the horizon has positive value")
    return best


def stationary_epoch_size(d: Geometric, m: CodeSizeModel) -> int:
    """Epoch length of the optimal infinite-horizon schedule under geometric death.

    Memorylessness makes the problem after each surviving epoch a scaled copy
    of the original, so the value V obeys ``V = max_nu q^nu (L(nu) + V)`` and
    the maximizer of the rate ``q^nu L(nu) / (1 - q^nu)`` is repeated forever.
    Greedy instead maximizes ``q^nu L(nu)``, which ignores the future.
    """
    if not isinstance(d, Geometric):
        raise TypeError("stationary schedules need geometric death")
    h = d.effective_horizon
    q = d.survival_array(h)
    logm = m.table(h)
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.where(q < 1.0, q * logm / (1.0 - q), 0.0)
    best = int(np.argmax(rate))
    if not rate[best] > 0.0:
        raise ValueError("no blocklength within the horizon has positive value")
    return best


def geometric_optimal_volume(d: Geometric, m: CodeSizeModel) -> tuple[int, float]:
    """``(nu, V)`` for the optimal infinite-horizon schedule of equal epochs."""
    nu = stationary_epoch_size(d, m)
    return nu, expected_geometric_volume(d.alpha, nu, m)


def solve(solver: str, d, m, N=None, certify=True) -> OptimizationReport:
    if solver == "greedy":
        return greedy_schedule(d, m, cap=N, certify=certify)
    if N is None:
        raise ValueError(f"solver {solver!r} needs a horizon N")
    if solver == "dp":
        return dp_schedule(d, m, N, certify=certify)
    if solver == "exhaustive":
        return exhaustive_schedule(d, m, N, certify=certify)
    raise ValueError(f"unknown solver {solver!r}")


def expected_geometric_volume(alpha: float, nu: int, m: CodeSizeModel) -> float:
    """Infinite equal-epoch schedule under geometric death, in closed form."""
    q = math.exp(nu * math.log1p(-alpha))
    return m.log_m(nu) * q / (1.0 - q)
