"""Hot numeric loops, compiled with numba when available.

Every kernel has a pure-numpy twin producing bit-identical results; set
``DYING_CHANNELS_DISABLE_NUMBA=1`` to force the numpy path.  No kernel uses
``fastmath`` because the exhaustive and DP solvers are compared for exact
floating-point equality.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get(
    "DYING_CHANNELS_DISABLE_NUMBA", ""
).strip().lower() in ("", "0", "false", "no")

# Masks handled per numpy chunk in the exhaustive fallback.
_CHUNK = 1 << 16


def _njit(func):
    if numba is None:
        return func
    return numba.njit(cache=True)(func)


# ---------------------------------------------------------------------------
# Backward induction over (time, position-in-epoch)
# ---------------------------------------------------------------------------

def _dp_backward_py(surv, logm, horizon):
    N = horizon
    value = np.zeros((N + 2, N + 2))
    policy = np.ones((N + 1, N + 1), dtype=np.int8)
    for n in range(N, 0, -1):
        restart_tail = value[n + 1, 0]
        for z in range(n):
            stop = surv[n] * logm[z + 1] + restart_tail
            cont = value[n + 1, z + 1]
            if cont >= stop:
                value[n, z] = cont
                policy[n, z] = 1
            else:
                value[n, z] = stop
                policy[n, z] = 0
    return value, policy


def dp_backward_numpy(surv, logm, horizon):
    """Vectorised over the epoch position; same arithmetic as the loop form."""
    N = horizon
    value = np.zeros((N + 2, N + 2))
    policy = np.ones((N + 1, N + 1), dtype=np.int8)
    for n in range(N, 0, -1):
        stop = surv[n] * logm[1:n + 1] + value[n + 1, 0]
        cont = value[n + 1, 1:n + 1]
        keep = cont >= stop
        value[n, :n] = np.where(keep, cont, stop)
        policy[n, :n] = np.where(keep, 1, 0)
    return value, policy


# ---------------------------------------------------------------------------
# Exhaustive search over compositions
# ---------------------------------------------------------------------------
# A composition of N is encoded as an (N-1)-bit mask; bit (N-1-t) set means an
# epoch boundary after channel use t.  Position 1 is the most significant bit,
# so among equal volumes the largest mask is the lexicographically smallest
# composition.

def _exhaustive_py(surv, logm, horizon):
    N = horizon
    nbits = N - 1
    best_val = -1.0
    best_mask = 0
    for mask in range(1 << nbits):
        v = 0.0
        last = 0
        for t in range(1, N + 1):
            if t == N or (mask >> (nbits - t)) & 1:
                v = v + surv[t] * logm[t - last]
                last = t
        if v >= best_val:
            best_val = v
            best_mask = mask
    return best_mask, best_val


def exhaustive_numpy(surv, logm, horizon):
    N = horizon
    nbits = N - 1
    total = 1 << nbits
    best_val = -1.0
    best_mask = 0
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        v = np.zeros(masks.size)
        last = np.zeros(masks.size, dtype=np.int64)
        for t in range(1, N + 1):
            if t == N:
                here = np.ones(masks.size, dtype=bool)
            else:
                here = ((masks >> (nbits - t)) & 1).astype(bool)
            cand = v + surv[t] * logm[t - last]
            v = np.where(here, cand, v)
            last = np.where(here, t, last)
        top = v.max()
        if top >= best_val:
            best_val = float(top)
            best_mask = int(masks[np.flatnonzero(v == top)[-1]])
    return best_mask, best_val


# ---------------------------------------------------------------------------
# Monte Carlo tallies
# ---------------------------------------------------------------------------

def _completed_hist_py(deaths, boundaries):
    k = boundaries.size
    hist = np.zeros(k + 1, dtype=np.int64)
    for j in range(deaths.size):
        t = deaths[j]
        lo, hi = 0, k
        while lo < hi:  # count of boundaries strictly below t
            mid = (lo + hi) // 2
            if boundaries[mid] < t:
                lo = mid + 1
            else:
                hi = mid
        hist[lo] += 1
    return hist


def completed_hist_numpy(deaths, boundaries):
    """Histogram of the number of completed epochs per trial (T > e_i)."""
    done = np.searchsorted(boundaries, deaths, side="left")
    return np.bincount(done, minlength=boundaries.size + 1).astype(np.int64)


if numba is not None:
    dp_backward_numba = _njit(_dp_backward_py)
    exhaustive_numba = _njit(_exhaustive_py)
    completed_hist_numba = _njit(_completed_hist_py)
else:  # pragma: no cover
    dp_backward_numba = _dp_backward_py
    exhaustive_numba = _exhaustive_py
    completed_hist_numba = _completed_hist_py


def backend():
    return "numba" if USE_NUMBA else "numpy"


def dp_backward(surv, logm, horizon):
    surv = np.ascontiguousarray(surv, dtype=np.float64)
    logm = np.ascontiguousarray(logm, dtype=np.float64)
    if USE_NUMBA:
        return dp_backward_numba(surv, logm, int(horizon))
    return dp_backward_numpy(surv, logm, int(horizon))


def exhaustive(surv, logm, horizon):
    surv = np.ascontiguousarray(surv, dtype=np.float64)
    logm = np.ascontiguousarray(logm, dtype=np.float64)
    if USE_NUMBA:
        mask, val = exhaustive_numba(surv, logm, int(horizon))
        return int(mask), float(val)
    return exhaustive_numpy(surv, logm, int(horizon))


def completed_hist(deaths, boundaries):
    deaths = np.ascontiguousarray(deaths, dtype=np.int64)
    boundaries = np.ascontiguousarray(boundaries, dtype=np.int64)
    if USE_NUMBA:
        return completed_hist_numba(deaths, boundaries)
    return completed_hist_numpy(deaths, boundaries)


def mask_to_lengths(mask, horizon):
    """Decode an exhaustive-search mask into composition lengths."""
    nbits = horizon - 1
    lengths = []
    last = 0
    for t in range(1, horizon + 1):
        if t == horizon or (mask >> (nbits - t)) & 1:
            lengths.append(t - last)
            last = t
    return lengths
