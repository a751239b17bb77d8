"""Closed-form function families and their exact norms.

``CosineMode`` is the spatial factor cos(n pi x) of the counterexample,
``RescaledBump`` its temporal factor squeezed onto (1/(n+1), 1/n), and
``TestFunctions`` holds the constant one and the trapezoid v_e used to bound
the dual norm of the clamped cosine from below.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import integrate

__all__ = [
    "CosineMode", "SineMode", "BumpFunction", "RescaledBump", "TestFunctions",
    "make_default_bump", "rescale_bump", "exact_mode_norms", "positive_lobe_integral",
    "sine_dual_norm_exact",
]


@dataclass(frozen=True)
class CosineMode:
    n: int

    def __post_init__(self):
        _check_index(self.n)

    def __call__(self, x):
        return np.cos(self.n * np.pi * np.asarray(x, dtype=np.float64))

    def derivative(self, x):
        return -self.n * np.pi * np.sin(self.n * np.pi * np.asarray(x, dtype=np.float64))

    def positive(self, x):
        return np.maximum(self(x), 0.0)

    @property
    def eigenvalue(self) -> float:
        """``n^2 pi^2 + 1``: the mode solves ``-z'' + z = eigenvalue * z`` with Neumann data."""
        return (self.n * np.pi) ** 2 + 1.0

    @property
    def norm_V(self) -> float:
        return float(np.sqrt(self.eigenvalue / 2.0))

    @property
    def norm_H(self) -> float:
        return float(1.0 / np.sqrt(2.0))

    @property
    def norm_dual(self) -> float:
        return float(1.0 / np.sqrt(2.0 * self.eigenvalue))


@dataclass(frozen=True)
class SineMode:
    """sin(2 pi n x); its positive part has mean 1/pi for every n."""

    n: int

    def __post_init__(self):
        _check_index(self.n)

    def __call__(self, x):
        return np.sin(2.0 * np.pi * self.n * np.asarray(x, dtype=np.float64))

    def positive(self, x):
        return np.maximum(self(x), 0.0)

    @property
    def norm_dual(self) -> float:
        return sine_dual_norm_exact(self.n)


def sine_dual_norm_exact(n: int) -> float:
    """Exact V* norm of sin(2 pi n x) on (0,1).

    The Riesz representative solves ``-z'' + z = sin(kx)``, ``z'(0) = z'(1) = 0``,
    k = 2 pi n. Unlike cos(n pi x) the sine violates the natural boundary
    condition, so z carries a cosh boundary correction:
    ``||f||^2 = 1/(2(1+k^2)) + 2 k^2 tanh(1/2) / (1+k^2)^2``.
    """
    k2 = (2.0 * np.pi * n) ** 2
    return float(np.sqrt(0.5 / (1.0 + k2) + 2.0 * k2 * np.tanh(0.5) / (1.0 + k2) ** 2))


@dataclass(frozen=True)
class BumpFunction:
    """Nonnegative profile on [0,1] vanishing at both ends, with known norms.

    ``value`` and ``derivative`` are evaluated only on [0,1]; callers handle
    the support.
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    l1: float
    l1_derivative: float
    l2: float
    l2_derivative: float
    name: str = "bump"


def _sin2(t):
    return np.sin(np.pi * t) ** 2


def _sin2_derivative(t):
    return np.pi * np.sin(2.0 * np.pi * t)


def make_default_bump() -> BumpFunction:
    """phi(t) = sin^2(pi t)."""
    return BumpFunction(
        value=_sin2,
        derivative=_sin2_derivative,
        l1=0.5,
        l1_derivative=2.0,
        l2=float(np.sqrt(3.0 / 8.0)),
        l2_derivative=float(np.pi / np.sqrt(2.0)),
        name="sin2",
    )


@dataclass(frozen=True)
class RescaledBump:
    """phi_n(t) = s^b phi(s t - n) with s = n(n+1); b = 1 gives the standard family.

    Supported in [1/(n+1), 1/n].
    """

    n: int
    base: BumpFunction
    height_exponent: float = 1.0

    def __post_init__(self):
        _check_index(self.n)

    @property
    def scale(self) -> int:
        return self.n * (self.n + 1)

    @property
    def support(self):
        return 1.0 / (self.n + 1), 1.0 / self.n

    @property
    def height(self) -> float:
        return float(self.scale) ** self.height_exponent

    def _local(self, t):
        s = np.asarray(t, dtype=np.float64) * self.scale - self.n
        inside = (s >= 0.0) & (s <= 1.0)
        return np.where(inside, s, 0.5), inside

    def __call__(self, t):
        s, inside = self._local(t)
        return np.where(inside, self.height * self.base.value(s), 0.0)

    def derivative(self, t):
        s, inside = self._local(t)
        return np.where(inside, self.height * self.scale * self.base.derivative(s), 0.0)

    # exact norms by change of variables t -> s t - n
    @property
    def l1(self) -> float:
        return self.height / self.scale * self.base.l1

    @property
    def l1_derivative(self) -> float:
        return self.height * self.base.l1_derivative

    @property
    def l2(self) -> float:
        return self.height / np.sqrt(self.scale) * self.base.l2

    @property
    def l2_derivative(self) -> float:
        return self.height * np.sqrt(self.scale) * self.base.l2_derivative

    def quadrature_norms(self, panels: int = 256):
        """The four norms by composite Gauss-Legendre over the support."""
        a, b = self.support
        # even panel count puts the kink of |phi'| at the midpoint on an edge
        panels += panels % 2
        return (
            integrate(lambda t: np.abs(self(t)), a, b, panels),
            integrate(lambda t: np.abs(self.derivative(t)), a, b, panels),
            float(np.sqrt(integrate(lambda t: self(t) ** 2, a, b, panels))),
            float(np.sqrt(integrate(lambda t: self.derivative(t) ** 2, a, b, panels))),
        )


def rescale_bump(base: BumpFunction, n: int, height_exponent: float = 1.0) -> RescaledBump:
    return RescaledBump(n, base, height_exponent)


@dataclass(frozen=True)
class TestFunctions:
    """e(x) = 1 and v_e(x) = min(4x, 1, 4(1-x))."""

    __test__ = False  # keep pytest from collecting this

    @staticmethod
    def e(x):
        return np.ones_like(np.asarray(x, dtype=np.float64))

    @staticmethod
    def v_e(x):
        x = np.asarray(x, dtype=np.float64)
        return np.minimum(np.minimum(4.0 * x, 1.0), 4.0 * (1.0 - x))

    @staticmethod
    def v_e_derivative(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x < 0.25, 4.0, np.where(x > 0.75, -4.0, 0.0))

    gap_H_squared = 1.0 / 6.0
    norm_V_squared = 26.0 / 3.0


def exact_mode_norms(n: int):
    """(||psi_n||_V, ||psi_n||_H, ||psi_n||_V*) for psi_n = cos(n pi x)."""
    mode = CosineMode(n)
    return mode.norm_V, mode.norm_H, mode.norm_dual


def positive_lobe_integral(n: int, variant: str = "cosine") -> float:
    """Integral over (0,1) of (cos(n pi x))^+, or of (sin(2 pi n x))^+.

    Panels are aligned so every zero crossing sits on a panel edge.
    """
    _check_index(n)
    if variant == "cosine":
        f, panels = CosineMode(n).positive, 64 * n
    elif variant == "sine":
        f, panels = SineMode(n).positive, 128 * n
    else:
        raise ValueError("variant must be 'cosine' or 'sine', got %r" % (variant,))
    return integrate(f, 0.0, 1.0, panels)


def _check_index(n):
    if int(n) != n or n < 1:
        raise ValueError("mode index must be a positive integer, got %r" % (n,))
