"""Compiled inner loops for tree-statistic sampling.

A tree drawn from a Markov branching model never needs to be
materialized to know its statistics: walking the subtree sizes with an
explicit stack and accumulating the tolls gives (Sackin, Colless, F) in
O(n) per tree (plus O(sqrt(size)) per node for the uniform-model split
search). Randomness is pre-drawn with numpy generators outside the
kernels, one uniform per internal node in preorder, so results are
reproducible and independent of numba's internal RNG.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .models import ModelKind, log_catalan_table


@njit(cache=True, nogil=True)
def _yule_walk(n, u, out_s, out_c, out_f):
    reps = u.shape[0]
    stack = np.empty(2 * n + 4, dtype=np.int64)
    for r in range(reps):
        s = 0
        c = 0
        f = 0.0
        top = 0
        stack[0] = n
        used = 0
        while top >= 0:
            m = stack[top]
            top -= 1
            if m < 2:
                continue
            s += m
            f += math.log(m - 1.0)
            i = 1 + int(u[r, used] * (m - 1))
            if i > m - 1:
                i = m - 1
            used += 1
            c += abs(2 * i - m)
            top += 1
            stack[top] = i
            top += 1
            stack[top] = m - i
        out_s[r] = s
        out_c[r] = c
        out_f[r] = f


@njit(cache=True, nogil=True)
def _catalan_walk(n, u, ln_cat, out_s, out_c, out_f):
    reps = u.shape[0]
    stack = np.empty(2 * n + 4, dtype=np.int64)
    for r in range(reps):
        s = 0
        c = 0
        f = 0.0
        top = 0
        stack[0] = n
        used = 0
        while top >= 0:
            m = stack[top]
            top -= 1
            if m < 2:
                continue
            s += m
            f += math.log(m - 1.0)
            # left vertex count j of the (m-1)-vertex shape split, pmf
            # C_j C_{M-1-j} / C_M walked from both ends (U-shaped mass)
            M = m - 1
            uu = u[r, used]
            used += 1
            j = M // 2
            lo = 0
            hi = M - 1
            acc = 0.0
            base = ln_cat[M]
            while lo <= hi:
                acc += math.exp(ln_cat[lo] + ln_cat[M - 1 - lo] - base)
                if uu < acc:
                    j = lo
                    break
                if hi != lo:
                    acc += math.exp(ln_cat[hi] + ln_cat[M - 1 - hi] - base)
                    if uu < acc:
                        j = hi
                        break
                lo += 1
                hi -= 1
            i = j + 1
            c += abs(2 * i - m)
            top += 1
            stack[top] = i
            top += 1
            stack[top] = m - i
        out_s[r] = s
        out_c[r] = c
        out_f[r] = f


def sample_statistics(
    model: ModelKind, n: int, reps: int, seed: int, workers: int = 1
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Sackin, Colless, F) for ``reps`` independent trees of size n.

    Work is split into fixed-size chunks; chunk i draws its uniforms
    from the substream (seed, i), and results land in slices indexed by
    i, so the output is identical for any worker count.
    """
    model = ModelKind(model)
    if not model.is_phylo:
        raise ValueError(f"sampling is defined for phylogenetic models, not {model.value}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if reps < 1:
        raise ValueError("reps must be positive")

    out_s = np.empty(reps, dtype=np.int64)
    out_c = np.empty(reps, dtype=np.int64)
    out_f = np.empty(reps)
    ln_cat = log_catalan_table(n) if model is ModelKind.UNIFORM else None
    chunk = max(1, (1 << 22) // max(n - 1, 1))
    bounds = [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]

    def run(ci: int) -> None:
        lo, hi = bounds[ci]
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, ci))))
        u = rng.random((hi - lo, max(n - 1, 1)))
        if model is ModelKind.YULE:
            _yule_walk(n, u, out_s[lo:hi], out_c[lo:hi], out_f[lo:hi])
        else:
            _catalan_walk(n, u, ln_cat, out_s[lo:hi], out_c[lo:hi], out_f[lo:hi])

    if workers <= 1 or len(bounds) == 1:
        for ci in range(len(bounds)):
            run(ci)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(bounds))))
    return out_s, out_c, out_f
