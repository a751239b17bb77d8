"""The counterexample in numbers.

Per-mode norm ledger for the series u = sum_n n^-a phi_n(t) psi_n(x), its
partial sums, and an independent tensor-grid evaluation of the same three
Bochner norms. Also the lower bound on ||psi_n^+||_V* and the weak
convergence demonstration with sin(2 pi n x).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from . import fem1d
from .families import (
    BumpFunction, CosineMode, RescaledBump, SineMode, TestFunctions, make_default_bump,
)

__all__ = [
    "SeriesShape", "ModeNormRecord", "SeriesReport", "SpaceTimeGrid", "Lemma22Result",
    "WeakDemoRow", "lemma22_lower_bound", "weak_convergence_demo", "psi_plus_dual_norm",
    "compute_mode_record", "series_report", "make_grid", "brute_force_norms",
    "LEMMA22_CONSTANT",
]

# (psi_n^+, e)_H - ||psi_n^+||_H ||v_e - e||_H >= 1/pi - 1/sqrt(12)
LEMMA22_CONSTANT = 1.0 / np.pi - 1.0 / np.sqrt(12.0)

CAUCHY_TOL = 0.05
OCTAVE_TOL = 0.25
DIVERGENCE_RATIO = 1.8


@dataclass(frozen=True)
class SeriesShape:
    """Exponents of the generalized series sum_n n^-a phi_n^(b)(t) psi_{m(n)}(x).

    ``a`` is the amplitude decay, ``b`` the bump height exponent
    (phi_n = (n(n+1))^b phi(n(n+1) t - n)) and ``c`` the spatial frequency
    exponent, m(n) = round(n^c). Defaults reproduce the counterexample.
    """

    a: float = 3.0
    b: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise ValueError("series exponents must be positive, got %r" % ((self.a, self.b, self.c),))

    def mode_index(self, n: int) -> int:
        return max(1, int(round(n ** self.c)))

    def amplitude(self, n: int) -> float:
        return float(n) ** -self.a


DEFAULT_SHAPE = SeriesShape()


@dataclass(frozen=True)
class ModeNormRecord:
    n: int
    c_V: float
    c_dual: float
    c_plus: float
    psi_plus_dual: float
    mesh_elements: int
    refinement_change: Optional[float] = None


@dataclass(frozen=True)
class SeriesReport:
    records: List[ModeNormRecord]
    S_V: np.ndarray
    S_dual: np.ndarray
    S_plus: np.ndarray
    octaves: List[tuple] = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.records)

    def partial(self, which: str, N: int) -> float:
        return float(getattr(self, which)[N - 1]) if N > 0 else 0.0

    def last_octave_fraction(self, which: str) -> float:
        """(S(N) - S(N/2)) / S(N); small for a convergent series."""
        total = self.partial(which, self.N)
        return (total - self.partial(which, self.N // 2)) / total

    def classified_octaves(self) -> List[tuple]:
        used = [(k, inc) for k, inc in self.octaves if k >= 8]
        return used if len(used) >= 2 else self.octaves[-2:]

    def octave_spread(self) -> float:
        """Largest relative deviation of an octave increment from their mean."""
        inc = np.array([v for _, v in self.classified_octaves()])
        return float(np.max(np.abs(inc / inc.mean() - 1.0)))

    def harmonic_constant(self) -> float:
        """C in S_plus(2k) - S_plus(k) ~ C ln 2."""
        inc = np.array([v for _, v in self.classified_octaves()])
        return float(inc.mean() / np.log(2.0))

    def divergence_ratio(self, base: int = 8) -> float:
        return self.partial("S_plus", self.N) / self.partial("S_plus", base)

    def verdicts(self) -> dict:
        out = {
            "S_V_cauchy": self.last_octave_fraction("S_V") <= CAUCHY_TOL,
            "S_dual_cauchy": self.last_octave_fraction("S_dual") <= CAUCHY_TOL,
            "S_plus_harmonic": self.octave_spread() <= OCTAVE_TOL,
        }
        if self.N >= 128:
            out["S_plus_ratio"] = self.divergence_ratio() >= DIVERGENCE_RATIO
        return out


class Lemma22Result(NamedTuple):
    pairing: float
    bound_holds: bool
    threshold: float


class WeakDemoRow(NamedTuple):
    n: int
    dual_sin: float
    dual_sin_exact: float
    dual_sin_plus: float
    mean_sin_plus: float


def _require_resolution(ops: fem1d.FemOperators, elements: int, what: str):
    if ops.mesh.num_elements < elements:
        raise ValueError("mesh with %d elements under-resolves %s (need >= %d)"
                         % (ops.mesh.num_elements, what, elements))


def lemma22_lower_bound(n: int, ops: fem1d.FemOperators, per_mode: int = 64) -> Lemma22Result:
    """Discrete pairing of psi_n^+ with the trapezoid v_e against 1/pi - 1/sqrt(12)."""
    _require_resolution(ops, fem1d.elements_for_mode(n, per_mode), "mode %d" % n)
    mesh = ops.mesh
    psi_plus = fem1d.interpolate(mesh, CosineMode(n).positive).values
    v_e = fem1d.interpolate(mesh, TestFunctions.v_e).values
    pairing = ops.mass.quad(psi_plus, v_e)
    threshold = LEMMA22_CONSTANT - 10.0 * mesh.h
    return Lemma22Result(pairing, pairing >= threshold, threshold)


def psi_plus_dual_norm(m: int, per_mode: int = 64) -> tuple:
    """Discrete ||cos(m pi x)^+||_V* at the mode's mesh policy; returns (value, elements)."""
    elements = fem1d.elements_for_mode(m, per_mode)
    ops = fem1d.assemble(fem1d.build_mesh(elements))
    f = fem1d.interpolate(ops.mesh, CosineMode(m).positive)
    return fem1d.dual_norm(f, ops).dual_norm_value, elements


def weak_convergence_demo(n_list: Sequence[int], ops: fem1d.FemOperators = None,
                          per_mode: int = 64) -> List[WeakDemoRow]:
    """Dual norms of sin(2 pi n x) (tends to 0) and of its positive part (does not).

    Without ``ops`` each n gets its own mesh with ``per_mode`` elements per
    half-period.
    """
    rows = []
    for n in n_list:
        need = fem1d.elements_for_mode(2 * n, per_mode)
        if ops is None:
            local = fem1d.assemble(fem1d.build_mesh(need))
        else:
            _require_resolution(ops, need, "sin(2 pi %d x)" % n)
            local = ops
        mode = SineMode(n)
        f = fem1d.interpolate(local.mesh, mode)
        fp = fem1d.positive_part(f)
        ones = np.ones(local.mesh.num_nodes)
        rows.append(WeakDemoRow(
            n=n,
            dual_sin=fem1d.dual_norm(f, local).dual_norm_value,
            dual_sin_exact=mode.norm_dual,
            dual_sin_plus=fem1d.dual_norm(fp, local).dual_norm_value,
            mean_sin_plus=local.mass.quad(fp.values, ones),
        ))
    return rows


def _temporal_factors(bump_n: RescaledBump, quadrature: bool):
    """(||phi_n||_L2^2, ||phi_n'||_L2^2, ||phi_n'||_L1)."""
    if quadrature:
        _, l1d, l2, l2d = bump_n.quadrature_norms()
    else:
        l1d, l2, l2d = bump_n.l1_derivative, bump_n.l2, bump_n.l2_derivative
    return l2 ** 2, l2d ** 2, l1d


def compute_mode_record(n: int, bump: BumpFunction = None, *, shape: SeriesShape = DEFAULT_SHAPE,
                        per_mode: int = 64, refine_check: bool = False,
                        time_quadrature: bool = False) -> ModeNormRecord:
    """Contributions of mode n to the three Bochner norms.

    Spatial factors of c_V, c_dual are exact; c_plus uses the discrete
    ||psi_m^+||_V*. With ``time_quadrature`` the temporal factors are
    integrated over the slab instead of taken from the closed forms.
    """
    bump = make_default_bump() if bump is None else bump
    m = shape.mode_index(n)
    mode = CosineMode(m)
    phi_n = RescaledBump(n, bump, shape.b)
    l2sq, l2dsq, l1d = _temporal_factors(phi_n, time_quadrature)
    amp = shape.amplitude(n)
    psi_plus, elements = psi_plus_dual_norm(m, per_mode)
    change = None
    if refine_check:
        finer, _ = psi_plus_dual_norm(m, 2 * per_mode)
        change = abs(finer - psi_plus) / psi_plus
    return ModeNormRecord(
        n=n,
        c_V=amp ** 2 * l2sq * mode.norm_V ** 2,
        c_dual=amp ** 2 * l2dsq * mode.norm_dual ** 2,
        c_plus=amp * l1d * psi_plus,
        psi_plus_dual=psi_plus,
        mesh_elements=elements,
        refinement_change=change,
    )


def series_report(N: int, bump: BumpFunction = None, *, shape: SeriesShape = DEFAULT_SHAPE,
                  per_mode: int = 64, workers: int = 1) -> SeriesReport:
    """Ledger for n = 1..N with partial sums and the octave growth table."""
    if N < 8:
        raise ValueError("series_report needs N >= 8 to classify growth, got %r" % (N,))
    bump = make_default_bump() if bump is None else bump

    def one(n):
        return compute_mode_record(n, bump, shape=shape, per_mode=per_mode)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(1, N + 1)))
    else:
        records = [one(n) for n in range(1, N + 1)]
    # ascending-n cumulative sums: identical for any worker count
    S_V = np.cumsum([r.c_V for r in records])
    S_dual = np.cumsum([r.c_dual for r in records])
    S_plus = np.cumsum([r.c_plus for r in records])
    octaves = []
    k = 1
    while 2 * k <= N:
        octaves.append((k, float(S_plus[2 * k - 1] - S_plus[k - 1])))
        k *= 2
    return SeriesReport(records, S_V, S_dual, S_plus, octaves)


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Space mesh times a uniform time partition of (0,1); samples at cell midpoints."""

    mesh: fem1d.Mesh1D
    num_time_cells: int

    @property
    def tau(self) -> float:
        return 1.0 / self.num_time_cells

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.num_time_cells) + 0.5) * self.tau

    def resolves(self, N: int, samples_per_slab: int = 16, per_mode: int = 64,
                 shape: SeriesShape = DEFAULT_SHAPE) -> bool:
        if N == 0:
            return True
        m_max = max(shape.mode_index(n) for n in range(1, N + 1))
        return (self.mesh.num_elements >= fem1d.elements_for_mode(m_max, per_mode)
                and self.tau <= 1.0 / (4 * N * (N + 1) * samples_per_slab))

    def sample(self, N: int, bump: BumpFunction = None, shape: SeriesShape = DEFAULT_SHAPE,
               times: np.ndarray = None):
        """u_N and its analytic time derivative, shape ``(num_nodes, num_times)``."""
        bump = make_default_bump() if bump is None else bump
        t = self.times if times is None else times
        x = self.mesh.nodes
        u = np.zeros((x.size, t.size))
        du = np.zeros_like(u)
        for n in range(1, N + 1):
            phi_n = RescaledBump(n, bump, shape.b)
            lo, hi = phi_n.support
            cols = np.nonzero((t >= lo) & (t <= hi))[0]
            if cols.size == 0:
                continue
            psi = shape.amplitude(n) * CosineMode(shape.mode_index(n))(x)
            u[:, cols] += np.outer(psi, phi_n(t[cols]))
            du[:, cols] += np.outer(psi, phi_n.derivative(t[cols]))
        return u, du


def make_grid(N: int, samples_per_slab: int = 16, per_mode: int = 64,
              shape: SeriesShape = DEFAULT_SHAPE) -> SpaceTimeGrid:
    N = max(N, 1)
    m_max = max(shape.mode_index(n) for n in range(1, N + 1))
    mesh = fem1d.build_mesh(fem1d.elements_for_mode(m_max, per_mode))
    return SpaceTimeGrid(mesh, 4 * N * (N + 1) * samples_per_slab)


def brute_force_norms(N: int, grid: SpaceTimeGrid, bump: BumpFunction = None, *,
                      shape: SeriesShape = DEFAULT_SHAPE, samples_per_slab: int = 16,
                      per_mode: int = 64, block: int = 2048):
    """(S_V, S_dual, S_plus) of u_N by midpoint quadrature on the tensor grid.

    The plus path clamps nodally: d/dt u^+ = d/dt u where u > 0, else 0.
    """
    if N == 0:
        return 0.0, 0.0, 0.0
    if N > 8:
        raise ValueError("brute force is limited to N <= 8, got %r" % (N,))
    if not grid.resolves(N, samples_per_slab, per_mode, shape):
        raise ValueError("grid does not resolve slab %d" % N)
    ops = fem1d.assemble(grid.mesh)
    tau = grid.tau
    t_all = grid.times
    t_all = t_all[t_all >= 1.0 / (N + 1)]  # u_N vanishes below its last slab
    s_v = s_dual = s_plus = 0.0
    for start in range(0, t_all.size, block):
        t = t_all[start:start + block]
        u, du = grid.sample(N, bump, shape, times=t)
        s_v += tau * float(np.einsum("ij,ij->", u, ops.v_product.matvec(u)))
        s_dual += tau * float(np.sum(fem1d.dual_norms(du, ops) ** 2))
        du_plus = np.where(u > 0.0, du, 0.0)
        s_plus += tau * float(np.sum(fem1d.dual_norms(du_plus, ops)))
    return s_v, s_dual, s_plus
