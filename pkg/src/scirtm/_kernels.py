"""
Compiled inner loops shared by the rotation-number and raster code.

All kernels work on plain floats and numpy arrays. Phases are kept reduced
to [-pi, pi) so that long orbits never lose accuracy in cos/sin.
"""

import math

import numpy as np
from numba import njit, prange

TWO_PI = 2.0 * math.pi

STATUS_OK = 0
STATUS_ESCAPED = 1
STATUS_DEGENERATE = 2

# escape_step 的哨兵值：预算内未逃逸
NO_ESCAPE = 1 << 62

DEGENERATE_RADIUS_SQ = 1e-26


@njit(cache=True)
def wrap(psi):
    if -math.pi <= psi < math.pi:
        return psi
    r = (psi + math.pi) % TWO_PI - math.pi
    if r >= math.pi:
        r -= TWO_PI
    return r


@njit(cache=True)
def forward(psi, w, mu):
    psi1 = psi + w
    w1 = w + TWO_PI * (math.cos(psi1) - 1.0) - mu * math.sin(psi1)
    return wrap(psi1), w1


@njit(cache=True)
def backward(psi1, w1, mu):
    w = w1 - (TWO_PI * (math.cos(psi1) - 1.0) - mu * math.sin(psi1))
    return wrap(psi1 - w), w


@njit(cache=True)
def escape_step(psi, w, mu, budget, control_w):
    """
    Signed step at which |w| first exceeds control_w, forward and backward
    interleaved: +n forward, -n backward, 0 if the start is outside,
    NO_ESCAPE when the budget is exhausted.
    """
    if not abs(w) <= control_w:
        return 0
    fp, fw = psi, w
    bp, bw = psi, w
    for n in range(1, budget + 1):
        fp, fw = forward(fp, fw, mu)
        if not abs(fw) <= control_w:
            return n
        bp, bw = backward(bp, bw, mu)
        if not abs(bw) <= control_w:
            return -n
    return NO_ESCAPE


@njit(parallel=True, cache=True)
def escape_many(psis, ws, mu, budget, control_w, out):
    for k in prange(psis.shape[0]):
        out[k] = escape_step(psis[k], ws[k], mu, budget, control_w)


@njit(parallel=True, cache=True)
def fast_pass(psi_c, w_c, mu, budget, control_w, white):
    n_w, n_psi = white.shape
    for j in prange(n_w):
        for i in range(n_psi):
            if escape_step(psi_c[i], w_c[j], mu, budget, control_w) != NO_ESCAPE:
                white[j, i] = 1


@njit(cache=True)
def _mark(psi, w, ell, i_min, white):
    # 下半平面的点用其 r0 像代表
    if w < 0.0:
        psi = wrap(psi + w)
        w = -w
    i = int(math.floor(psi / ell)) - i_min
    j = int(math.floor(w / ell + 0.5))
    if 0 <= j < white.shape[0] and 0 <= i < white.shape[1]:
        white[j, i] = 1


@njit(parallel=True, cache=True)
def mark_escaping_orbits(psis, ws, steps, mu, ell, i_min, white):
    """Whitens every cell visited by the orbits whose escape step is known."""
    for k in prange(psis.shape[0]):
        n = steps[k]
        if n == NO_ESCAPE:
            continue
        if n < 0:
            n = -n
        fp, fw = psis[k], ws[k]
        bp, bw = fp, fw
        _mark(fp, fw, ell, i_min, white)
        for _ in range(n):
            fp, fw = forward(fp, fw, mu)
            _mark(fp, fw, ell, i_min, white)
            bp, bw = backward(bp, bw, mu)
            _mark(bp, bw, ell, i_min, white)


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bp = s - a
    return s, (a - (s - bp)) + (b - bp)


@njit(cache=True)
def _dd_add(hi, lo, x_hi, x_lo):
    s, e = _two_sum(hi, x_hi)
    e += lo + x_lo
    return _two_sum(s, e)


@njit(cache=True)
def _accumulate(sums_hi, sums_lo, total, turns, P):
    total[0], total[1] = _dd_add(total[0], total[1], turns, 0.0)
    sums_hi[1], sums_lo[1] = _dd_add(sums_hi[1], sums_lo[1], total[0], total[1])
    for p in range(2, P + 1):
        sums_hi[p], sums_lo[p] = _dd_add(
            sums_hi[p], sums_lo[p], sums_hi[p - 1], sums_lo[p - 1]
        )


@njit(cache=True)
def checkpoints_from_turns(turns, P, q_lo, out):
    """
    Streams S^P_n over increments given in turns; out[q - q_lo] receives
    (hi, lo) of S^P_{2^q} for every q >= q_lo reached by the data.
    """
    sums_hi = np.zeros(P + 1)
    sums_lo = np.zeros(P + 1)
    total = np.zeros(2)
    next_q = q_lo
    next_n = 1 << q_lo
    for n in range(1, turns.shape[0] + 1):
        _accumulate(sums_hi, sums_lo, total, turns[n - 1], P)
        if n == next_n:
            out[next_q - q_lo, 0] = sums_hi[P]
            out[next_q - q_lo, 1] = sums_lo[P]
            next_q += 1
            next_n <<= 1


@njit(cache=True)
def rotation_checkpoints(psi, w, mu, P, Q, q_lo, control_w, reverse, ref0, use_ref, out):
    """
    Iterates 2^Q steps, measuring the clockwise argument around p_s, and
    records S^P_{2^q} for q = q_lo..Q. With reverse the inverse map is used
    and increments are negated, so the sums still describe the forward map.
    """
    if psi * psi + w * w < DEGENERATE_RADIUS_SQ:
        return STATUS_DEGENERATE
    sums_hi = np.zeros(P + 1)
    sums_lo = np.zeros(P + 1)
    total = np.zeros(2)
    prev = math.atan2(-w, psi)
    ref = ref0
    next_q = q_lo
    next_n = 1 << q_lo
    n_steps = 1 << Q
    for n in range(1, n_steps + 1):
        if reverse:
            psi, w = backward(psi, w, mu)
        else:
            psi, w = forward(psi, w, mu)
        if not abs(w) <= control_w:
            return STATUS_ESCAPED
        if psi * psi + w * w < DEGENERATE_RADIUS_SQ:
            return STATUS_DEGENERATE
        a = math.atan2(-w, psi)
        delta = prev - a if reverse else a - prev
        prev = a
        d = delta - ref
        d -= TWO_PI * math.floor(d / TWO_PI + 0.5)
        _accumulate(sums_hi, sums_lo, total, (ref + d) / TWO_PI, P)
        if use_ref and n >= 3:
            ref = TWO_PI * (total[0] + total[1]) / n
        if n == next_n:
            out[next_q - q_lo, 0] = sums_hi[P]
            out[next_q - q_lo, 1] = sums_lo[P]
            next_q += 1
            next_n <<= 1
    return STATUS_OK


@njit(cache=True)
def combine(buf, weights, binoms, P):
    """Theta(P, Q) and Theta(P, Q-1) from the recorded checkpoints."""
    now = 0.0
    before = 0.0
    for p in range(P + 1):
        now += weights[p] * ((buf[p + 1, 0] + buf[p + 1, 1]) / binoms[p + 1])
        before += weights[p] * ((buf[p, 0] + buf[p, 1]) / binoms[p])
    return now, before


@njit(parallel=True, cache=True)
def rotation_many(
    psis, ws, mu, P, Q, control_w, reverse, ref0, use_ref, weights, binoms,
    theta_out, prev_out, status_out,
):
    q_lo = Q - P - 1
    for k in prange(psis.shape[0]):
        buf = np.zeros((P + 2, 2))
        status = rotation_checkpoints(
            psis[k], ws[k], mu, P, Q, q_lo, control_w, reverse, ref0, use_ref, buf
        )
        status_out[k] = status
        if status == STATUS_OK:
            theta_out[k], prev_out[k] = combine(buf, weights, binoms, P)
        else:
            theta_out[k] = np.nan
            prev_out[k] = np.nan
