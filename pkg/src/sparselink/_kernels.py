"""Compiled inner loops.

Everything in here is deliberately free of Python objects: plain float64 /
int64 arrays in, scalars or arrays out, so numba can compile once (cached on
disk) and the results are bit-for-bit reproducible regardless of how many
worker processes run them.
"""

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True, inline="always")
def _maxstar(a, b):
    # exact log(exp(a) + exp(b)); order so the log1p argument is <= 1
    if a < b:
        a, b = b, a
    if b == NEG_INF:
        return a
    return a + np.log1p(np.exp(b - a))


@njit(cache=True)
def forward_backward_llr(bm, next_state):
    """Exact log-domain forward/backward pass over a binary-input trellis.

    bm[t, s, u] is the branch metric for taking input u out of state s at
    step t (already includes channel and prior terms; -inf marks a forbidden
    branch). The trellis starts and ends in state 0. Returns the posterior
    log-likelihood ratio log P(u_t=1 | z) - log P(u_t=0 | z) for every step;
    steps whose u=1 branches are all forbidden come out as -inf and are
    dropped by the caller.
    """
    t_len, s_count, _ = bm.shape

    alpha = np.full((t_len + 1, s_count), NEG_INF)
    alpha[0, 0] = 0.0
    for t in range(t_len):
        for s in range(s_count):
            a = alpha[t, s]
            if a == NEG_INF:
                continue
            for u in range(2):
                g = bm[t, s, u]
                if g == NEG_INF:
                    continue
                ns = next_state[s, u]
                alpha[t + 1, ns] = _maxstar(alpha[t + 1, ns], a + g)
        mx = NEG_INF
        for s in range(s_count):
            if alpha[t + 1, s] > mx:
                mx = alpha[t + 1, s]
        for s in range(s_count):
            alpha[t + 1, s] -= mx

    beta = np.full((t_len + 1, s_count), NEG_INF)
    beta[t_len, 0] = 0.0
    for t in range(t_len - 1, -1, -1):
        for s in range(s_count):
            acc = NEG_INF
            for u in range(2):
                g = bm[t, s, u]
                if g == NEG_INF:
                    continue
                nb = beta[t + 1, next_state[s, u]]
                if nb == NEG_INF:
                    continue
                acc = _maxstar(acc, g + nb)
            beta[t, s] = acc
        mx = NEG_INF
        for s in range(s_count):
            if beta[t, s] > mx:
                mx = beta[t, s]
        for s in range(s_count):
            beta[t, s] -= mx

    llr = np.empty(t_len)
    for t in range(t_len):
        num = NEG_INF
        den = NEG_INF
        for s in range(s_count):
            a = alpha[t, s]
            if a == NEG_INF:
                continue
            for u in range(2):
                g = bm[t, s, u]
                if g == NEG_INF:
                    continue
                v = a + g + beta[t + 1, next_state[s, u]]
                if u == 1:
                    num = _maxstar(num, v)
                else:
                    den = _maxstar(den, v)
        llr[t] = num - den
    return llr


@njit(cache=True)
def biht_inner(phi, phit, target, x, k, tau, max_inner):
    """One-sided binary iterative hard thresholding with a fixed target.

    Runs up to max_inner gradient steps of the one-sided l1 sign-consistency
    objective against `target` (entries +/-1, already flip-adjusted), keeping
    the k largest-magnitude entries of x after each step. x is modified in
    place. sign(0) counts as +1, so a zero measurement violates a -1 target.

    Returns (steps_taken, consistent). `consistent` is True when every
    measurement sign matched the target, in which case x was not touched on
    that final check.
    """
    m, n = phi.shape
    y = np.empty(m)
    sel_idx = np.empty(k, np.int64)
    sel_val = np.empty(k)
    keep = np.empty(k)
    supp = np.empty(n, np.int64)

    cnt = 0
    for j in range(n):
        if x[j] != 0.0:
            supp[cnt] = j
            cnt += 1

    steps = 0
    consistent = False
    for _ in range(max_inner):
        for i in range(m):
            y[i] = 0.0
        for t in range(cnt):
            j = supp[t]
            xv = x[j]
            for i in range(m):
                y[i] += xv * phit[j, i]

        nv = 0
        for i in range(m):
            ti = target[i]
            yi = y[i]
            if (ti > 0.0 and yi < 0.0) or (ti < 0.0 and yi >= 0.0):
                nv += 1
                tt = tau * ti
                for j in range(n):
                    x[j] += tt * phi[i, j]
        if nv == 0:
            consistent = True
            break
        steps += 1

        # keep the k largest |x|; ties go to the lowest index
        sc = 0
        for j in range(n):
            a = x[j] if x[j] >= 0.0 else -x[j]
            if a == 0.0:
                continue
            if sc == k and a <= sel_val[k - 1]:
                continue
            pos = sc if sc < k else k - 1
            while pos > 0 and sel_val[pos - 1] < a:
                sel_val[pos] = sel_val[pos - 1]
                sel_idx[pos] = sel_idx[pos - 1]
                pos -= 1
            sel_val[pos] = a
            sel_idx[pos] = j
            if sc < k:
                sc += 1
        for t in range(sc):
            keep[t] = x[sel_idx[t]]
        for j in range(n):
            x[j] = 0.0
        for t in range(sc):
            x[sel_idx[t]] = keep[t]
            supp[t] = sel_idx[t]
        cnt = sc

    return steps, consistent
