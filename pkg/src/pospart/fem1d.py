"""P1 finite elements on the unit interval.

Discrete versions of V = H^1(0,1), H = L^2(0,1) and the dual V*: mass and
stiffness matrices, the three norms, and nodal clamping for the positive part.
All matrices are symmetric tridiagonal and stored as ``(diag, off)`` pairs.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels

__all__ = [
    "Mesh1D", "SymTridiag", "FemOperators", "NodalFunction", "RieszRepresentative",
    "TridiagonalFactor", "SolverError", "build_mesh", "assemble", "interpolate", "norm_H", "norm_V",
    "dual_norm", "dual_norms", "positive_part", "negative_part", "solve_tridiagonal", "elements_for_mode",
]


class SolverError(ArithmeticError):
    """Raised when an LDL^T factorization meets a non-positive pivot."""


@dataclass(frozen=True)
class Mesh1D:
    num_elements: int

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 2:
            raise ValueError("mesh needs an integer num_elements >= 2, got %r" % (self.num_elements,))

    @property
    def h(self) -> float:
        return 1.0 / self.num_elements

    @property
    def num_nodes(self) -> int:
        return self.num_elements + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.num_nodes) / self.num_elements


@dataclass(frozen=True, eq=False)
class SymTridiag:
    """Symmetric tridiagonal matrix: main diagonal and first off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        if self.off.shape[0] != self.diag.shape[0] - 1:
            raise ValueError("off-diagonal must be one shorter than the diagonal")

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def __add__(self, other: "SymTridiag") -> "SymTridiag":
        return SymTridiag(self.diag + other.diag, self.off + other.off)

    def __sub__(self, other: "SymTridiag") -> "SymTridiag":
        return SymTridiag(self.diag - other.diag, self.off - other.off)

    def scaled(self, c: float) -> "SymTridiag":
        return SymTridiag(c * self.diag, c * self.off)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return kernels.tridiag_matvec(self.diag, self.off, x)

    def quad(self, x: np.ndarray, y: np.ndarray = None) -> float:
        """Bilinear form ``x^T A y`` (``y = x`` when omitted)."""
        y = x if y is None else y
        return float(np.dot(x, self.matvec(y)))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


@dataclass(frozen=True, eq=False)
class FemOperators:
    mesh: Mesh1D
    mass: SymTridiag
    stiffness: SymTridiag
    v_product: SymTridiag
    lumped_mass: SymTridiag
    _v_factor: "TridiagonalFactor" = field(default=None, repr=False)

    @property
    def v_factor(self) -> "TridiagonalFactor":
        """Cached LDL^T factor of the V product ``A = M + K``."""
        if self._v_factor is None:
            object.__setattr__(self, "_v_factor", TridiagonalFactor(self.v_product))
        return self._v_factor


@dataclass(frozen=True, eq=False)
class NodalFunction:
    mesh: Mesh1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.mesh.num_nodes,):
            raise ValueError(
                "expected %d nodal values, got shape %s" % (self.mesh.num_nodes, values.shape))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __add__(self, other):
        _check_same_mesh(self, other)
        return NodalFunction(self.mesh, self.values + other.values)

    def __sub__(self, other):
        _check_same_mesh(self, other)
        return NodalFunction(self.mesh, self.values - other.values)

    def __neg__(self):
        return NodalFunction(self.mesh, -self.values)

    def __mul__(self, c: float):
        return NodalFunction(self.mesh, c * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True)
class RieszRepresentative:
    source: NodalFunction
    z: NodalFunction
    dual_norm_value: float


class TridiagonalFactor:
    """Reusable LDL^T factorization of an SPD symmetric tridiagonal matrix."""

    def __init__(self, matrix: SymTridiag):
        self.matrix = matrix
        try:
            self.d, self.l = kernels.ldl_factor(matrix.diag, matrix.off)
        except ZeroDivisionError as exc:
            raise SolverError(str(exc)) from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape[0] != self.d.shape[0]:
            raise ValueError("rhs has %d rows, matrix has %d" % (rhs.shape[0], self.d.shape[0]))
        return kernels.ldl_solve(self.d, self.l, rhs)


def _check_same_mesh(f, g):
    if f.mesh != g.mesh:
        raise ValueError("nodal functions live on different meshes")


def elements_for_mode(n: int, per_mode: int = 64) -> int:
    """Mesh size policy: ``per_mode`` elements per half-period of cos(n pi x)."""
    return max(2, per_mode * n)


def build_mesh(num_elements: int) -> Mesh1D:
    return Mesh1D(num_elements)


def assemble(mesh: Mesh1D) -> FemOperators:
    """Assemble consistent/lumped mass, stiffness and ``A = M + K``."""
    n, h = mesh.num_nodes, mesh.h
    m_diag = np.full(n, 2.0 * h / 3.0)
    m_diag[[0, -1]] = h / 3.0
    m_off = np.full(n - 1, h / 6.0)
    k_diag = np.full(n, 2.0 / h)
    k_diag[[0, -1]] = 1.0 / h
    k_off = np.full(n - 1, -1.0 / h)
    mass = SymTridiag(m_diag, m_off)
    stiffness = SymTridiag(k_diag, k_off)
    lumped = np.full(n, h)
    lumped[[0, -1]] = h / 2.0
    return FemOperators(
        mesh=mesh,
        mass=mass,
        stiffness=stiffness,
        v_product=mass + stiffness,
        lumped_mass=SymTridiag(lumped, np.zeros(n - 1)),
    )


def interpolate(mesh: Mesh1D, f: Callable[[np.ndarray], np.ndarray]) -> NodalFunction:
    x = mesh.nodes
    values = np.broadcast_to(np.asarray(f(x), dtype=np.float64), x.shape)
    return NodalFunction(mesh, np.array(values))


def _values(f, ops: FemOperators) -> np.ndarray:
    if f.mesh != ops.mesh:
        raise ValueError("function and operators use different meshes")
    return f.values


def norm_H(f: NodalFunction, ops: FemOperators) -> float:
    v = _values(f, ops)
    return float(np.sqrt(max(ops.mass.quad(v), 0.0)))


def norm_V(f: NodalFunction, ops: FemOperators) -> float:
    v = _values(f, ops)
    return float(np.sqrt(max(ops.v_product.quad(v), 0.0)))


def dual_norm(f: NodalFunction, ops: FemOperators, rtol: float = 1e-9) -> RieszRepresentative:
    """V* norm of an H element through its Riesz representative.

    Solves ``A z = M f`` and returns ``sqrt(z^T M f)``; ``z^T A z`` must agree
    to ``rtol`` or the solve is treated as failed.
    """
    v = _values(f, ops)
    mf = ops.mass.matvec(v)
    z = ops.v_factor.solve(mf)
    pairing = float(np.dot(z, mf))
    energy = ops.v_product.quad(z)
    if abs(pairing - energy) > rtol * max(abs(energy), 1e-300) + 1e-300:
        raise SolverError("Riesz solve inconsistent: z^T M f = %r, z^T A z = %r" % (pairing, energy))
    return RieszRepresentative(f, NodalFunction(f.mesh, z), float(np.sqrt(max(pairing, 0.0))))


def dual_norms(values: np.ndarray, ops: FemOperators) -> np.ndarray:
    """Column-wise V* norms of a ``(num_nodes, m)`` block of nodal vectors."""
    mf = ops.mass.matvec(values)
    z = ops.v_factor.solve(mf)
    return np.sqrt(np.maximum(np.einsum("ij,ij->j", z, mf), 0.0))


def positive_part(f: NodalFunction) -> NodalFunction:
    return NodalFunction(f.mesh, np.maximum(f.values, 0.0))


def negative_part(f: NodalFunction) -> NodalFunction:
    """``u^- = -(-u)^+``, so ``u = u^+ + u^-`` with ``u^- <= 0``."""
    return NodalFunction(f.mesh, np.minimum(f.values, 0.0))


def solve_tridiagonal(matrix: SymTridiag, rhs: np.ndarray) -> np.ndarray:
    return TridiagonalFactor(matrix).solve(rhs)
