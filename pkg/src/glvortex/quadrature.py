"""Quadrature rules on the reference triangle.

Rules are built from tensor-product Gauss-Legendre points mapped through the
collapsed-square (Duffy) transform, which gives positive weights at machine
precision for any requested polynomial exactness degree.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["QuadRule", "quadrature_rule", "integrate_barycentric_monomial"]


@dataclass(frozen=True)
class QuadRule:
    """Points and weights on the reference triangle (0,0)-(1,0)-(0,1).

    ``points`` are barycentric triples (lambda0, lambda1, lambda2) with
    lambda0 = 1 - x - y; ``weights`` sum to the reference area 1/2.
    """

    degree: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n_points(self):
        return self.weights.shape[0]

    @property
    def xy(self):
        """Reference-triangle coordinates (x, y) of the quadrature points."""
        return self.points[:, 1:3]


def quadrature_rule(degree: int) -> QuadRule:
    """Smallest collapsed Gauss-Legendre rule exact for polynomials of `degree`.

    A tensor rule with n points per direction integrates all reference-triangle
    monomials of total degree <= 2n - 2 exactly (the Duffy Jacobian raises the
    collapsed-direction degree by one).
    """
    if degree < 0:
        raise ValueError("quadrature degree must be nonnegative")
    n = max(1, (degree + 2 + 1) // 2)  # smallest n with 2n - 2 >= degree
    gx, gw = np.polynomial.legendre.leggauss(n)
    # map [-1, 1] -> [0, 1]
    u = 0.5 * (gx + 1.0)
    wu = 0.5 * gw
    # collapsed square: x = u (1 - v), y = v, jacobian (1 - v)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    wuu, wvv = np.meshgrid(wu, wu, indexing="ij")
    x = (uu * (1.0 - vv)).ravel()
    y = vv.ravel()
    w = (wuu * wvv * (1.0 - vv)).ravel()
    pts = np.column_stack([1.0 - x - y, x, y])
    return QuadRule(degree=2 * n - 2, points=pts, weights=w)


def integrate_barycentric_monomial(a: int, b: int, c: int) -> float:
    """Exact integral of lambda0^a lambda1^b lambda2^c over the reference triangle.

    Closed form: a! b! c! * 2A / (a + b + c + 2)! with A = 1/2.
    """
    from math import factorial

    return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2)
