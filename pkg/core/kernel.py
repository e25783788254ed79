"""
The dimensionless 3x3 kernel J_ij(u) that weights the corrugation spectrum.

With r = |u| and the products r^2 K_2(r), r^3 K_3(r):

    J_kl = delta_kl (3/8) r^3 K_3 - (3/8) u_k u_l r^2 K_2          (k, l = x, y)
    J_zz = (2 + (3/8) r^2) r^2 K_2 + (1/4) r^3 K_3
    J_kz = i u_k [r^2 K_2 - (3/8) r^3 K_3]                          (k = x, y)

The in-plane block and J_zz are even and real; J_xz, J_yz are odd and
purely imaginary. Integrators consume the real decomposition so the
assembled K matrices are manifestly real.
"""

from typing import NamedTuple, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from core.errors import DomainError
from core.special import bessel_k_orders_scaled

# Below this |u| the analytic limit diag(3, 3, 6) is used.
SMALL_U = 1e-6

JMatrix = NDArray[np.complex128]


class PlanarVector(NamedTuple):
    """Dimensionless in-plane wave vector u = z0 q."""

    u_x: float
    u_y: float


class JDecomposition(NamedTuple):
    """
    Real decomposition of J.

    even: real symmetric (..., 3, 3) array holding J_xx, J_yy, J_zz, J_xy
        (the xz/yz slots are zero).
    odd: real (..., 2) array g with J_kz = i g_k.
    """

    even: NDArray[np.float64]
    odd: NDArray[np.float64]


def bessel_products(r: ArrayLike) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Return (r^2 K_2(r), r^3 K_3(r)) for positive r."""
    r = np.asarray(r, dtype=float)
    scaled = bessel_k_orders_scaled(3, r)
    decay = np.exp(-r)
    return r**2 * scaled[2] * decay, r**3 * scaled[3] * decay


def j_components(u_x: ArrayLike, u_y: ArrayLike) -> JDecomposition:
    """
    Evaluate the real decomposition of J on (broadcast) arrays of u.

    Args:
        u_x (array-like): x components of u.
        u_y (array-like): y components of u.

    Returns:
        JDecomposition: even (..., 3, 3) and odd (..., 2) parts.

    Raises:
        DomainError: If any component is not finite.
    """
    ux, uy = np.broadcast_arrays(
        np.asarray(u_x, dtype=float), np.asarray(u_y, dtype=float)
    )
    if not (np.all(np.isfinite(ux)) and np.all(np.isfinite(uy))):
        raise DomainError("Kernel argument u must be finite")

    r = np.hypot(ux, uy)
    small = r < SMALL_U
    r2k2, r3k3 = bessel_products(np.where(small, 1.0, r))

    even = np.zeros(ux.shape + (3, 3))
    even[..., 0, 0] = 0.375 * r3k3 - 0.375 * ux * ux * r2k2
    even[..., 1, 1] = 0.375 * r3k3 - 0.375 * uy * uy * r2k2
    even[..., 0, 1] = -0.375 * ux * uy * r2k2
    even[..., 1, 0] = even[..., 0, 1]
    even[..., 2, 2] = (2.0 + 0.375 * r * r) * r2k2 + 0.25 * r3k3

    radial = r2k2 - 0.375 * r3k3
    odd = np.stack([ux * radial, uy * radial], axis=-1)

    if np.any(small):
        even[small] = np.diag([3.0, 3.0, 6.0])
        odd[small] = 0.0
    return JDecomposition(even=even, odd=odd)


def assemble_j(parts: JDecomposition) -> JMatrix:
    """Combine a real decomposition back into the complex matrix J."""
    j = parts.even.astype(complex)
    j[..., 0, 2] = 1j * parts.odd[..., 0]
    j[..., 2, 0] = j[..., 0, 2]
    j[..., 1, 2] = 1j * parts.odd[..., 1]
    j[..., 2, 1] = j[..., 1, 2]
    return j


def j_matrix(u: Union[PlanarVector, Tuple[float, float]]) -> JMatrix:
    """
    Complex 3x3 kernel J(u).

    Args:
        u (PlanarVector): Dimensionless in-plane vector (u_x, u_y).

    Returns:
        np.ndarray: Symmetric complex (3, 3) matrix; diag(3, 3, 6) at u = 0.

    Raises:
        DomainError: If u is not finite.
    """
    u_x, u_y = u
    return assemble_j(j_components(u_x, u_y))
