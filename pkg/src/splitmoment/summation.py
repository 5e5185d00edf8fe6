"""Order-fixed compensated summation.

Reductions in this package always run in a fixed index order, so the result
depends only on the inputs, never on how the work was chunked.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = ["neumaier_sum", "ordered_sum"]


@njit
def _neumaier_nb(x):
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def neumaier_sum(x) -> float:
    """Neumaier-compensated sum of a 1-D float array in index order.

    The numpy backend substitutes ``math.fsum`` (correctly rounded), which
    is at least as accurate and equally order-independent of chunking.
    """
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if USE_NUMBA:
        return float(_neumaier_nb(arr))
    return math.fsum(arr.tolist())


def ordered_sum(values) -> float:
    return neumaier_sum(np.asarray(list(values), dtype=np.float64))
