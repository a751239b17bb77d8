"""Neumann heat equation on (0,1) and the integration-by-parts identity for u^+.

The theta-scheme ``(Mt/tau + theta K) u^{k+1} = (Mt/tau - (1-theta) K) u^k + Mt f^{k+theta}``
uses either the consistent or the lumped mass matrix ``Mt``. Neumann
conditions are natural, so no rows are constrained.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import fem1d, kernels

__all__ = [
    "HeatProblem", "HeatSolution", "NegativePartLedger", "SpaceTimeField",
    "heat_solve", "check_nonnegativity", "discrete_negative_part_energy", "ibp_check",
    "NONNEG_TOL",
]

NONNEG_TOL = 1e-12

Source = Callable[[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class HeatProblem:
    mesh: fem1d.Mesh1D
    T_final: float
    num_steps: int
    initial: fem1d.NodalFunction
    source: Optional[Source] = None
    theta: float = 1.0
    mass_mode: str = "lumped"

    def __post_init__(self):
        if not self.T_final > 0:
            raise ValueError("T_final must be positive, got %r" % (self.T_final,))
        if int(self.num_steps) != self.num_steps or self.num_steps < 1:
            raise ValueError("num_steps must be a positive integer, got %r" % (self.num_steps,))
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1], got %r" % (self.theta,))
        if self.mass_mode not in ("consistent", "lumped"):
            raise ValueError("mass_mode must be 'consistent' or 'lumped', got %r" % (self.mass_mode,))
        if self.initial.mesh != self.mesh:
            raise ValueError("initial datum lives on a different mesh")

    @property
    def tau(self) -> float:
        return self.T_final / self.num_steps


@dataclass(frozen=True, eq=False)
class HeatSolution:
    problem: HeatProblem
    ops: fem1d.FemOperators
    times: np.ndarray
    values: np.ndarray  # (num_steps + 1, num_nodes)
    min_values: np.ndarray = field(init=False)
    energies: np.ndarray = field(init=False)
    masses: np.ndarray = field(init=False)

    def __post_init__(self):
        self.values.setflags(write=False)
        object.__setattr__(self, "min_values", self.values.min(axis=1))
        m = self.ops.mass
        object.__setattr__(self, "energies", np.einsum("kj,kj->k", self.values, m.matvec(self.values.T).T))
        object.__setattr__(self, "masses", self.values @ self.ops.lumped_mass.diag)

    @property
    def mass_matrix(self) -> fem1d.SymTridiag:
        return self.ops.lumped_mass if self.problem.mass_mode == "lumped" else self.ops.mass

    @property
    def snapshots(self) -> List[fem1d.NodalFunction]:
        return [fem1d.NodalFunction(self.problem.mesh, row) for row in self.values]


def heat_solve(problem: HeatProblem, ops: fem1d.FemOperators = None) -> HeatSolution:
    ops = fem1d.assemble(problem.mesh) if ops is None else ops
    tau, theta = problem.tau, problem.theta
    mass = ops.lumped_mass if problem.mass_mode == "lumped" else ops.mass
    lhs = mass.scaled(1.0 / tau) + ops.stiffness.scaled(theta)
    rhs = mass.scaled(1.0 / tau) - ops.stiffness.scaled(1.0 - theta)
    factor = fem1d.TridiagonalFactor(lhs)
    steps, nodes = problem.num_steps, problem.mesh.num_nodes
    times = np.arange(steps + 1) * tau
    src = None
    if problem.source is not None:
        src = np.empty((steps, nodes))
        for k in range(steps):
            fk = np.asarray(problem.source(times[k] + theta * tau), dtype=np.float64)
            if fk.shape != (nodes,):
                fk = np.broadcast_to(fk, (nodes,))
            src[k] = fk
        if not np.all(np.isfinite(src)):
            raise ValueError("source produced non-finite values")
        src = mass.matvec(src.T).T
    out = np.empty((steps + 1, nodes))
    kernels.heat_march(factor.d, factor.l, rhs.diag, rhs.off,
                       problem.initial.values, src, out)
    return HeatSolution(problem, ops, times, out)


def check_nonnegativity(solution: HeatSolution, tol: float = NONNEG_TOL):
    """(minimum nodal value over all snapshots, whether it is >= -tol)."""
    lo = float(solution.min_values.min())
    return lo, lo >= -tol


@dataclass(frozen=True)
class NegativePartLedger:
    """Per step: 1/2 ||w(t_k)||_H^2 and sum_{1<=j<=k} tau w_j^T K w_j, w = u^- (or u^+)."""

    half_energy: np.ndarray
    dissipation: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.half_energy + self.dissipation

    @property
    def maximum(self) -> float:
        return float(self.values.max())


def discrete_negative_part_energy(solution: HeatSolution, part: str = "negative") -> NegativePartLedger:
    """Energy ledger of u^- = -(-u)^+ along a trajectory.

    Norms use the scheme's own mass matrix. ``part="positive"`` runs the same
    functional on u^+ (mirror check: the negative ledger of u equals the
    positive ledger of -u).
    """
    u = solution.values
    if part == "negative":
        w = np.minimum(u, 0.0)
    elif part == "positive":
        w = np.maximum(u, 0.0)
    else:
        raise ValueError("part must be 'negative' or 'positive', got %r" % (part,))
    mass = solution.mass_matrix
    K = solution.ops.stiffness
    wt = w.T
    half = 0.5 * np.einsum("ik,ik->k", wt, mass.matvec(wt))
    grad = np.einsum("ik,ik->k", wt, K.matvec(wt))
    grad[0] = 0.0
    return NegativePartLedger(half, solution.problem.tau * np.cumsum(grad))


@dataclass(frozen=True)
class SpaceTimeField:
    """A field u(t, .) given by its nodal values; ``time_derivative`` may be None."""

    value: Callable[[float], np.ndarray]
    time_derivative: Optional[Callable[[float], np.ndarray]] = None
    T: float = 1.0


def ibp_check(u: SpaceTimeField, ops: fem1d.FemOperators, tau: float) -> float:
    """|int_0^T (d_t u)^T M u^+ dt - (||u^+(T)||^2 - ||u^+(0)||^2)/2|.

    Midpoint rule in time, clamp taken at the midpoint sample. Without an
    analytic derivative the centered difference over each cell is used.
    """
    steps = u.T / tau
    if not tau > 0 or abs(steps - round(steps)) > 1e-9 * max(steps, 1.0):
        raise ValueError("tau=%r does not divide T=%r" % (tau, u.T))
    steps = int(round(steps))
    nodes = ops.mesh.num_nodes

    def sample(fn, t):
        v = np.asarray(fn(t), dtype=np.float64)
        if v.shape != (nodes,):
            raise ValueError("field sample has shape %s, mesh has %d nodes" % (v.shape, nodes))
        return v

    M = ops.mass
    lhs = 0.0
    prev = sample(u.value, 0.0)
    for k in range(steps):
        t0, t1 = k * tau, (k + 1) * tau
        mid = sample(u.value, 0.5 * (t0 + t1))
        if u.time_derivative is not None:
            dt = sample(u.time_derivative, 0.5 * (t0 + t1))
        else:
            nxt = sample(u.value, t1)
            dt = (nxt - prev) / tau
            prev = nxt
        lhs += tau * M.quad(dt, np.maximum(mid, 0.0))
    end = np.maximum(sample(u.value, u.T), 0.0)
    start = np.maximum(sample(u.value, 0.0), 0.0)
    rhs = 0.5 * (M.quad(end) - M.quad(start))
    return abs(lhs - rhs)
