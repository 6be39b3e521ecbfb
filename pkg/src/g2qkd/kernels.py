"""Hot inner loops, each in a numba and a pure-numpy flavour.

All randomness is passed in as pre-drawn uniforms so that the two backends
are bitwise interchangeable: the public names below are bound to one or the
other according to :data:`g2qkd._accel.USE_NUMBA`.
"""
import numpy as np

from ._accel import USE_NUMBA, jit

NMAX = 3


# --- inverse-CDF sampling -------------------------------------------------


@jit
def _histogram_inverse_cdf_nb(u, cdf):
    out = np.zeros(NMAX + 1, np.int64)
    for i in range(u.shape[0]):
        v = u[i]
        k = 0
        while k < NMAX and v >= cdf[k]:
            k += 1
        out[k] += 1
    return out


def _histogram_inverse_cdf_np(u, cdf):
    return np.bincount(np.searchsorted(cdf, u, side="right"), minlength=NMAX + 1).astype(np.int64)


@jit
def _events_inverse_cdf_nb(u, cdf):
    out = np.empty(u.shape[0], np.int8)
    for i in range(u.shape[0]):
        v = u[i]
        k = 0
        while k < NMAX and v >= cdf[k]:
            k += 1
        out[i] = k
    return out


def _events_inverse_cdf_np(u, cdf):
    return np.searchsorted(cdf, u, side="right").astype(np.int8)


# --- per-event PNS attack -------------------------------------------------


@jit
def _attack_events_nb(events, u, x, hard):
    out = events.copy()
    for i in range(events.shape[0]):
        n = events[i]
        if n >= 2:
            if u[i] < x:
                out[i] = n - 1
        elif n == 1 and hard:
            if u[i] < x:
                out[i] = 0
    return out


def _attack_events_np(events, u, x, hard):
    hit = u < x
    eligible = events >= (1 if hard else 2)
    return (events - (hit & eligible)).astype(events.dtype)


# --- binomial thinning (linear loss) --------------------------------------


@jit
def _thin_events_nb(events, u, eta):
    out = np.empty_like(events)
    j = 0
    for i in range(events.shape[0]):
        kept = 0
        for _ in range(events[i]):
            if u[j] < eta:
                kept += 1
            j += 1
        out[i] = kept
    return out


def _thin_events_np(events, u, eta):
    owner = np.repeat(np.arange(events.shape[0]), events.astype(np.int64))
    kept = np.bincount(owner, weights=(u < eta), minlength=events.shape[0])
    return kept.astype(events.dtype)


# --- beam splitter + threshold detectors ----------------------------------


@jit
def _route_photons_nb(photons, u, p_a, p_b):
    m = photons.shape[0]
    hit_a = np.zeros(m, np.bool_)
    hit_b = np.zeros(m, np.bool_)
    j = 0
    for i in range(m):
        for _ in range(photons[i]):
            v = u[j]
            if v < p_a:
                hit_a[i] = True
            elif v < p_a + p_b:
                hit_b[i] = True
            j += 1
    return hit_a, hit_b


def _route_photons_np(photons, u, p_a, p_b):
    m = photons.shape[0]
    owner = np.repeat(np.arange(m), photons.astype(np.int64))
    hit_a = np.bincount(owner, weights=(u < p_a), minlength=m) > 0
    hit_b = np.bincount(owner, weights=(u >= p_a) & (u < p_a + p_b), minlength=m) > 0
    return hit_a, hit_b


# --- coincidence histogram in pulse-index space ---------------------------


@jit
def _coincidences_nb(a_idx, b_idx, max_lag):
    hist = np.zeros(2 * max_lag + 1, np.int64)
    nb = b_idx.shape[0]
    start = 0
    for i in range(a_idx.shape[0]):
        a = a_idx[i]
        while start < nb and b_idx[start] < a - max_lag:
            start += 1
        j = start
        while j < nb and b_idx[j] <= a + max_lag:
            hist[b_idx[j] - a + max_lag] += 1
            j += 1
    return hist


def _coincidences_np(a_idx, b_idx, max_lag):
    lo = np.searchsorted(b_idx, a_idx - max_lag, side="left")
    hi = np.searchsorted(b_idx, a_idx + max_lag, side="right")
    width = hi - lo
    total = int(width.sum())
    if total == 0:
        return np.zeros(2 * max_lag + 1, np.int64)
    a_rep = np.repeat(a_idx, width)
    offsets = np.arange(total) - np.repeat(np.cumsum(width) - width, width)
    b_sel = b_idx[np.repeat(lo, width) + offsets]
    return np.bincount(b_sel - a_rep + max_lag, minlength=2 * max_lag + 1).astype(np.int64)


NUMBA_KERNELS = {
    "histogram_inverse_cdf": _histogram_inverse_cdf_nb,
    "events_inverse_cdf": _events_inverse_cdf_nb,
    "attack_events": _attack_events_nb,
    "thin_events": _thin_events_nb,
    "route_photons": _route_photons_nb,
    "coincidences": _coincidences_nb,
}
NUMPY_KERNELS = {
    "histogram_inverse_cdf": _histogram_inverse_cdf_np,
    "events_inverse_cdf": _events_inverse_cdf_np,
    "attack_events": _attack_events_np,
    "thin_events": _thin_events_np,
    "route_photons": _route_photons_np,
    "coincidences": _coincidences_np,
}

_active = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

histogram_inverse_cdf = _active["histogram_inverse_cdf"]
events_inverse_cdf = _active["events_inverse_cdf"]
attack_events = _active["attack_events"]
thin_events = _active["thin_events"]
route_photons = _active["route_photons"]
coincidences = _active["coincidences"]
