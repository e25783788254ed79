"""
Modified Bessel functions of the second kind K_n for integer orders.

K_0 and K_1 come from the exponentially scaled Cephes evaluations in
scipy.special (power series below x = 2, Chebyshev expansion of the
asymptotic form above); higher orders follow by upward recurrence

    K_{n+1}(x) = K_{n-1}(x) + (2n/x) K_n(x),

which is stable for K because every term is positive. The recurrence is
run on the scaled values e^x K_n(x) so the seam at x = 2 is the only
regime switch; tests probe both sides of it.
"""

from numbers import Integral
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import k0e, k1e

from core.errors import DomainError

BesselOrder = int

# Cephes switches from series to asymptotic form at this argument.
SERIES_SPLIT = 2.0


def _validate_order(n: BesselOrder) -> int:
    if isinstance(n, bool) or not isinstance(n, Integral) or n < 0:
        raise DomainError(f"Bessel order must be a non-negative integer, got {n!r}")
    return int(n)


def _validate_argument(x: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Bessel argument must be finite")
    if np.any(arr <= 0.0):
        raise DomainError("Bessel argument must be strictly positive")
    return arr


def bessel_k_orders_scaled(n_max: BesselOrder, x: ArrayLike) -> NDArray[np.float64]:
    """
    Scaled values e^x K_n(x) for n = 0..n_max stacked along the first axis.

    Args:
        n_max (int): Highest order required.
        x (array-like): Positive finite arguments.

    Returns:
        np.ndarray: Array of shape (n_max + 1, *x.shape).

    Raises:
        DomainError: If the order or the argument is out of domain.
    """
    n_max = _validate_order(n_max)
    arr = _validate_argument(x)
    out = np.empty((n_max + 1,) + arr.shape)
    out[0] = k0e(arr)
    if n_max >= 1:
        out[1] = k1e(arr)
    for m in range(1, n_max):
        out[m + 1] = out[m - 1] + (2.0 * m / arr) * out[m]
    return out


def bessel_k(n: BesselOrder, x: ArrayLike) -> Union[float, NDArray[np.float64]]:
    """
    Modified Bessel function of the second kind K_n(x).

    Args:
        n (int): Non-negative integer order.
        x (array-like): Positive finite argument(s).

    Returns:
        float or np.ndarray: K_n(x), a float for scalar input.

    Raises:
        DomainError: If x <= 0, x is not finite, or n is not a non-negative integer.
    """
    arr = _validate_argument(x)
    scaled = bessel_k_orders_scaled(n, arr)[_validate_order(n)]
    values = scaled * np.exp(-arr)
    if values.ndim == 0:
        return float(values)
    return values
