"""Deterministic stripe-parallel grid reductions.

Grid averages are split into row stripes; each stripe is reduced on its own
(numpy, single pass) and the per-stripe sums are merged with exactly rounded
summation in stripe-index order.  The result is bit-identical whether stripes
run sequentially or on a thread pool.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

_DEFAULT_STRIPE = 128


def stripe_ranges(n: int, stripe: int = _DEFAULT_STRIPE) -> list[tuple[int, int]]:
    return [(lo, min(lo + stripe, n + 1)) for lo in range(1, n + 1, stripe)]


def striped_complex_mean(
    row_block_sum: Callable[[np.ndarray], complex], n: int, threads: int = 1
) -> complex:
    """Mean over m = 1..n of per-row quantities produced in blocks.

    row_block_sum receives the m-values of one stripe and returns the exact
    complex sum of all grid contributions for those rows.
    """
    ranges = stripe_ranges(n)
    blocks = [np.arange(lo, hi, dtype=np.int64) for lo, hi in ranges]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sums = list(pool.map(row_block_sum, blocks))
    else:
        sums = [row_block_sum(b) for b in blocks]
    total = complex(
        math.fsum(s.real for s in sums), math.fsum(s.imag for s in sums)
    )
    return total / (n * n)
