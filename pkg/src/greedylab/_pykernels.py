"""Pure-Python/numpy versions of the hot kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is not built or ``GREEDYLAB_PURE=1`` is set.
"""
import math

import numpy as np


def _kt_weights(n):
    return 1.0 / np.sqrt(np.arange(1, n + 1, dtype=float))


def kt_norm_rows(Y):
    Y = np.asarray(Y, dtype=float)
    l2 = np.sqrt(np.einsum("ij,ij->i", Y, Y))
    ps = np.abs(np.cumsum(Y * _kt_weights(Y.shape[1]), axis=1)).max(axis=1)
    return np.maximum(l2, ps)


def kt_chebyshev_rows(x, masks, Y0, rounds, iters, step0, shrink):
    """Minimize the summing norm over the free coordinates of each row.

    Row ``s`` starts at ``Y0[s]`` (normally ``x`` with the ``masks[s]``
    coordinates zeroed, i.e. the plain projection residual) and runs ``rounds`` restarts of normalized
    subgradient descent with step ``c/sqrt(k)``; ``c`` starts at
    ``step0 * value`` and is multiplied by ``shrink`` after every round.
    Each round restarts from the best point so far and also tries the
    running average of its iterates.

    Returns ``(values, Y, iterations)`` where ``Y[s]`` is the best residual
    vector found and ``values[s]`` its norm.
    """
    x = np.asarray(x, dtype=float)
    free = np.asarray(masks, dtype=bool)
    S, n = free.shape
    w = _kt_weights(n)
    Y = np.where(free, np.asarray(Y0, dtype=float), x[None, :])
    best = kt_norm_rows(Y)
    bestY = Y.copy()
    active = best > 0
    c = step0 * best
    total = 0
    for _ in range(rounds):
        if not active.any():
            break
        Y = bestY.copy()
        avg = np.zeros_like(Y)
        done = ~active
        cnt = np.zeros(S)
        for k in range(1, iters + 1):
            total += 1
            run = ~done
            l2 = np.sqrt(np.einsum("ij,ij->i", Y, Y))
            cs = np.cumsum(Y * w, axis=1)
            kstar = np.abs(cs).argmax(axis=1)
            ps = np.abs(cs[np.arange(S), kstar])
            val = np.maximum(l2, ps)
            better = run & (val < best)
            best[better] = val[better]
            bestY[better] = Y[better]
            use_l2 = l2 >= ps
            with np.errstate(invalid="ignore", divide="ignore"):
                g_l2 = Y / l2[:, None]
            sgn = np.sign(cs[np.arange(S), kstar])
            g_ps = sgn[:, None] * w[None, :] * (np.arange(n)[None, :] <= kstar[:, None])
            g = np.where(use_l2[:, None], g_l2, g_ps)
            g = np.where(free, g, 0.0)
            gn = np.sqrt(np.einsum("ij,ij->i", g, g))
            done = done | (gn == 0) | ~np.isfinite(gn)
            run = ~done
            if not run.any():
                break
            step = np.where(run, c / math.sqrt(k) / np.where(gn > 0, gn, 1.0), 0.0)
            Y = Y - step[:, None] * g
            avg[run] += Y[run]
            cnt[run] += 1
        have = cnt > 0
        if have.any():
            A = bestY.copy()
            A[have] = avg[have] / cnt[have, None]
            A = np.where(free, A, x[None, :])
            va = kt_norm_rows(A)
            better = have & (va < best)
            best[better] = va[better]
            bestY[better] = A[better]
        c = c * shrink
    return best, bestY, total


def extremal_sequence(A, alpha, m_max, a1):
    out = np.empty(m_max)
    prev = float(a1)
    out[0] = prev
    for m in range(2, m_max + 1):
        mp = math.pow(m, alpha)
        v = (1.0 - 2.0 / mp) * prev + A / (mp * mp)
        prev = v if v > 0.0 else 0.0
        out[m - 1] = prev
    return out


def power_bound_scan(seq, A, alpha, rtol):
    seq = np.asarray(seq, dtype=float)
    m = np.arange(1, seq.size + 1, dtype=float)
    ratio = seq * m ** alpha / A
    bad = np.flatnonzero(ratio > 1.0 + rtol)
    first = int(bad[0]) + 1 if bad.size else 0
    return first, float(ratio.max()) if ratio.size else 0.0
