"""Composite Gauss-Legendre quadrature."""

import numpy as np

_GL_CACHE = {}


def gauss_legendre(points: int = 4):
    if points not in _GL_CACHE:
        _GL_CACHE[points] = np.polynomial.legendre.leggauss(points)
    return _GL_CACHE[points]


def composite_nodes(a: float, b: float, subintervals: int, points: int = 4):
    """Nodes and weights of a composite rule on ``[a, b]`` with equal panels."""
    if subintervals < 1:
        raise ValueError("need at least one subinterval")
    if not b > a:
        raise ValueError("empty interval [%r, %r]" % (a, b))
    xi, wi = gauss_legendre(points)
    edges = np.linspace(a, b, subintervals + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    w = (half[:, None] * wi[None, :]).ravel()
    return x, w


def integrate(f, a: float, b: float, subintervals: int, points: int = 4) -> float:
    """Integrate ``f`` over ``[a, b]``.

    Panel edges are equispaced, so callers put kinks of ``f`` on edges by
    choosing ``subintervals`` accordingly.
    """
    x, w = composite_nodes(a, b, subintervals, points)
    return float(np.dot(w, f(x)))
