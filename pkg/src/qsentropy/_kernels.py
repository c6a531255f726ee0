"""Compiled inner loops.

Two hot paths live here, both too slow in pure numpy at the scale the
benchmark experiments need:

* averaging order statistics over many without-replacement subsets
  (the quantile estimation step), and
* pairwise Gaussian-kernel row sums over a sorted sample (the KD
  density / likelihood step).

Both kernels are deterministic functions of their inputs; all
randomness is drawn by the caller.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def subset_order_stat_sums(sorted_values, u):
    """Column sums of row-sorted random subsets of a sorted sample.

    For each of the u.shape[0] rows, draws a uniformly random subset of
    size m = u.shape[1] from the n positions of `sorted_values` via a
    partial Fisher-Yates shuffle fed by the uniforms in that row, then
    adds the subset's ascending values into the accumulator. Dividing
    the result by the number of rows gives the averaged j-th order
    statistics.
    """
    n = sorted_values.size
    n_k, m = u.shape
    acc = np.zeros(m)
    perm = np.arange(n)
    mask = np.zeros(n, dtype=np.uint8)
    for k in range(n_k):
        for t in range(m):
            j = t + int(u[k, t] * (n - t))
            if j >= n:  # u just below 1.0 can round the product up
                j = n - 1
            tmp = perm[t]
            perm[t] = perm[j]
            perm[j] = tmp
        for t in range(m):
            mask[perm[t]] = 1
        r = 0
        for p in range(n):
            if mask[p]:
                acc[r] += sorted_values[p]
                mask[p] = 0
                r += 1
        # undo the swaps so perm is a clean identity for the next row
        for t in range(m - 1, -1, -1):
            j = t + int(u[k, t] * (n - t))
            if j >= n:
                j = n - 1
            tmp = perm[t]
            perm[t] = perm[j]
            perm[j] = tmp
    return acc


@njit(cache=True)
def gaussian_rowsums_sorted(sorted_values, inv_sigma, cutoff):
    """Row sums of exp(-0.5*((x_i-x_j)/sigma)^2) over j != i.

    Input must be sorted ascending. Pairs farther apart than `cutoff`
    are skipped; with cutoff = 10*sigma the dropped terms are below
    exp(-50) ~ 2e-22 of the row's dominant term.
    """
    n = sorted_values.size
    acc = np.zeros(n)
    for i in range(n):
        si = sorted_values[i]
        for j in range(i + 1, n):
            d = sorted_values[j] - si
            if d > cutoff:
                break
            z = d * inv_sigma
            e = np.exp(-0.5 * z * z)
            acc[i] += e
            acc[j] += e
    return acc
