"""Numerical checks on the positive part u^+ of functions with u in L^2(H^1), u_t in L^2((H^1)*).

Modules: ``fem1d`` (P1 discretization of H^1, L^2 and the dual), ``families``
(closed-form mode and bump families), ``experiments`` (series ledger and
brute-force oracle), ``parabolic`` (heat solver, positivity and the
integration-by-parts identity), ``cli`` (command-line driver).
"""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
