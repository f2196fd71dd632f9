"""Numpy implementation of the hot kernels.

Used when the compiled core is missing or ``DIVEST_PURE=1`` is set.
"""
import numpy as np

_CHUNK_ELEMS = 1 << 21


def _poly(coeffs, u):
    out = np.full_like(u, coeffs[-1])
    for c in coeffs[-2::-1]:
        out *= u
        out += c
    return out


def kde_sum(samples, queries, coeffs, h):
    """Unnormalised product-kernel sums at each query.

    Parameters
    ----------
    samples : (n, d) array, sorted ascending by column 0
    queries : (q, d) array
    coeffs : power-basis coefficients of the 1D kernel on (-1, 1)
    h : bandwidth

    Returns
    -------
    (q,) array with ``sum_i prod_j K((queries[q, j] - samples[i, j]) / h)``.
    """
    xs = np.ascontiguousarray(samples, dtype=np.float64)
    qs = np.ascontiguousarray(queries, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if qs.shape[1] != xs.shape[1]:
        raise ValueError("queries and samples differ in dimension")
    out = np.zeros(qs.shape[0])
    if qs.shape[0] == 0 or xs.shape[0] == 0:
        return out
    starts = np.searchsorted(xs[:, 0], qs[:, 0] - h, side="right")
    stops = np.searchsorted(xs[:, 0], qs[:, 0] + h, side="left")
    order = np.argsort(qs[:, 0], kind="stable")
    pos = 0
    while pos < len(order):
        # grow a block of queries whose joint window stays affordable
        end = pos + 1
        lo, hi = starts[order[pos]], stops[order[pos]]
        while end < len(order):
            nlo = min(lo, starts[order[end]])
            nhi = max(hi, stops[order[end]])
            if (end + 1 - pos) * max(nhi - nlo, 1) * xs.shape[1] > _CHUNK_ELEMS:
                break
            lo, hi = nlo, nhi
            end += 1
        idx = order[pos:end]
        if hi > lo:
            # same arithmetic and per-query window as the compiled core
            u = (qs[idx, None, :] - xs[None, lo:hi, :]) * (1.0 / h)
            col = np.arange(lo, hi)
            inside = np.all(np.abs(u) < 1.0, axis=2)
            inside &= (col >= starts[idx, None]) & (col < stops[idx, None])
            vals = np.where(np.abs(u) < 1.0, _poly(coeffs, u), 0.0)
            prod = np.where(inside, np.prod(vals, axis=2), 0.0)
            out[idx] = prod.sum(axis=1)
        pos = end
    return out
