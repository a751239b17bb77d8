import numpy as np
import pytest
from scipy import integrate

from pospart import fem1d
from pospart.experiments import (
    LEMMA22_CONSTANT, SeriesShape, SpaceTimeGrid, brute_force_norms, compute_mode_record,
    lemma22_lower_bound, make_grid, psi_plus_dual_norm, series_report, weak_convergence_demo,
)
from pospart.families import BumpFunction, CosineMode, make_default_bump

PI = np.pi


def ops_for(n, per_mode=64):
    return fem1d.assemble(fem1d.build_mesh(64 * n if per_mode == 64 else per_mode * n))


@pytest.fixture(scope="module")
def report128():
    return series_report(128)


class TestLemma22:
    def test_constant(self):
        assert LEMMA22_CONSTANT == pytest.approx(0.0296, abs=1e-4)
        assert LEMMA22_CONSTANT < 0.2  # the displayed '>= 1/5' cannot hold

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 16, 64])
    def test_pairing(self, n):
        res = lemma22_lower_bound(n, ops_for(n))
        assert res.bound_holds
        assert res.pairing >= 0.029

    def test_pairing_vs_adaptive_quadrature(self):
        # P1 pairing of interpolants converges to the continuous (psi_n^+, v_e)
        n = 3
        knots = [0.25, 0.75] + list((2 * np.arange(n) + 1) / (2 * n))
        exact, _ = integrate.quad(lambda x: max(np.cos(n * PI * x), 0) * min(4 * x, 1, 4 * (1 - x)),
                                  0, 1, points=knots, limit=200)
        errs = [abs(lemma22_lower_bound(n, fem1d.assemble(fem1d.build_mesh(m))).pairing - exact)
                for m in (192, 384, 768)]
        assert errs[0] <= 1e-3 * exact
        assert np.log2(errs[0] / errs[1]) >= 1.8 and np.log2(errs[1] / errs[2]) >= 1.8

    def test_under_resolved(self):
        with pytest.raises(ValueError):
            lemma22_lower_bound(4, fem1d.assemble(fem1d.build_mesh(100)))

    def test_dual_norm_n4(self):
        value, _ = psi_plus_dual_norm(4)
        assert value >= 0.0296 / np.sqrt(26 / 3)
        assert 0.0296 / np.sqrt(26 / 3) == pytest.approx(0.0101, abs=1e-4)

    def test_dual_norm_tends_to_inv_pi(self):
        # oracle: refined meshes for the same interpolated function
        for n in (64, 100):
            value, _ = psi_plus_dual_norm(n)
            finer, _ = psi_plus_dual_norm(n, 128)
            assert abs(value - finer) / finer <= 0.005
            assert value == pytest.approx(1 / PI, rel=0.02)

    def test_dual_norm_bounded_below_by_mean(self):
        # ||f||_V* >= (f, 1)_H / ||1||_V and (psi_n^+, 1) = 1/pi
        for n in (1, 2, 7, 33):
            assert psi_plus_dual_norm(n)[0] >= 1 / PI * (1 - 1e-3)


class TestWeakDemo:
    def test_table(self):
        rows = weak_convergence_demo([1, 2, 4, 8, 16, 64])
        for r in rows:
            assert r.dual_sin <= 2.0 / r.n
            assert r.dual_sin == pytest.approx(r.dual_sin_exact, rel=1e-3)
            assert r.mean_sin_plus == pytest.approx(1 / PI, rel=1e-3)
            if r.n >= 4:
                assert r.dual_sin_plus >= 0.25
        last = rows[-1]
        assert last.dual_sin <= 0.01
        assert last.dual_sin_plus == pytest.approx(1 / PI, rel=0.05)
        sins = [r.dual_sin for r in rows]
        assert all(a > b for a, b in zip(sins, sins[1:]))

    def test_shared_mesh(self):
        ops = fem1d.assemble(fem1d.build_mesh(128 * 8))
        rows = weak_convergence_demo([2, 8], ops)
        own = weak_convergence_demo([2, 8])
        assert rows[1] == own[1]
        with pytest.raises(ValueError):
            weak_convergence_demo([16], ops)


class TestModeRecord:
    def test_n1_c_V(self):
        r = compute_mode_record(1)
        assert r.c_V == pytest.approx(0.75 * (PI ** 2 + 1) / 2, rel=1e-12)
        phi = make_default_bump()
        # oracle for ||phi_1||_L2^2 = 2 * 3/8 by direct quadrature
        val, _ = integrate.quad(lambda t: (2 * phi.value(2 * t - 1)) ** 2, 0.5, 1.0)
        assert val == pytest.approx(0.75, rel=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 5, 20, 90])
    def test_c_plus_lower_bound(self, n):
        r = compute_mode_record(n)
        assert r.c_plus >= 0.029 * n ** -3 * n * (n + 1) * 2
        assert r.c_plus >= 0.058 / n

    def test_nonnegative_and_n_minus_2(self):
        base = compute_mode_record(1)
        for n in (2, 5, 11, 40, 128):
            r = compute_mode_record(n)
            assert min(r.c_V, r.c_dual, r.c_plus, r.psi_plus_dual) >= 0
            assert n * n * r.c_V <= 10 * base.c_V
            assert n * n * r.c_dual <= 10 * base.c_dual
            assert r.mesh_elements == 64 * n

    def test_refinement_check(self):
        r = compute_mode_record(5, refine_check=True)
        assert r.refinement_change <= 0.005

    def test_time_quadrature_matches_closed_form(self):
        a = compute_mode_record(6)
        b = compute_mode_record(6, time_quadrature=True)
        for f in ("c_V", "c_dual", "c_plus"):
            assert getattr(b, f) == pytest.approx(getattr(a, f), rel=1e-8)

    def test_slab_locality(self):
        # garbage in the base profile outside [0, 1] must not reach mode n
        phi = make_default_bump()

        def wild(t):
            return np.where((t < 0) | (t > 1), 1e6 * np.cos(37 * t), phi.value(t))

        def wild_d(t):
            return np.where((t < 0) | (t > 1), -3e7, phi.derivative(t))

        bad = BumpFunction(wild, wild_d, phi.l1, phi.l1_derivative, phi.l2, phi.l2_derivative)
        for n in (1, 2, 3):
            a = compute_mode_record(n, phi, time_quadrature=True)
            b = compute_mode_record(n, bad, time_quadrature=True)
            assert a == b

    def test_records_independent_of_other_modes(self):
        # n = 2 computed alone equals its row inside a report
        rep = series_report(8)
        assert rep.records[1] == compute_mode_record(2)


class TestSeriesReport:
    def test_rejects_small_N(self):
        with pytest.raises(ValueError):
            series_report(4)

    def test_monotone_partial_sums(self, report128):
        for S in (report128.S_V, report128.S_dual, report128.S_plus):
            assert np.all(np.diff(S) > 0)

    def test_convergent_sums(self, report128):
        # S(2N) - S(N) <= c / N
        for which in ("S_V", "S_dual"):
            for N in (8, 16, 32, 64):
                inc = report128.partial(which, 2 * N) - report128.partial(which, N)
                assert inc * N <= 2.0
            assert report128.last_octave_fraction(which) <= 0.05
            assert report128.partial(which, 128) <= 4 * report128.partial(which, 8)

    def test_harmonic_octaves(self, report128):
        incs = dict(report128.octaves)
        vals = np.array([incs[k] for k in (8, 16, 32, 64)])
        assert np.max(np.abs(vals / vals.mean() - 1)) <= 0.25
        C = report128.harmonic_constant()
        for v in vals:
            assert v == pytest.approx(C * np.log(2), rel=0.05)
        # C approaches 2 ||phi'||_L1-scaled 1/pi: c_plus ~ 2 (1 + 1/n) ||psi_n^+|| / n
        assert C == pytest.approx(2 / PI, rel=0.05)

    def test_verdict_keys(self, report128):
        v = report128.verdicts()
        assert v["S_V_cauchy"] and v["S_dual_cauchy"] and v["S_plus_harmonic"]
        assert "S_plus_ratio" in v
        assert "S_plus_ratio" not in series_report(16).verdicts()

    def test_parallel_identical(self):
        a = series_report(24)
        b = series_report(24, workers=4)
        assert a.records == b.records
        np.testing.assert_array_equal(a.S_plus, b.S_plus)

    def test_generalized_shape(self):
        # faster amplitude decay a = 4 makes the plus-series converge
        rep = series_report(64, shape=SeriesShape(a=4.0))
        assert rep.last_octave_fraction("S_plus") <= 0.05
        with pytest.raises(ValueError):
            SeriesShape(a=0.0)


class TestBruteForce:
    def test_empty(self):
        assert brute_force_norms(0, make_grid(1)) == (0.0, 0.0, 0.0)

    def test_n1_single_slab(self):
        b = brute_force_norms(1, make_grid(1))
        r = compute_mode_record(1)
        assert b[2] == pytest.approx(r.c_plus, rel=0.01)
        assert b[2] == pytest.approx(make_default_bump().l1_derivative * 2 * r.psi_plus_dual, rel=0.01)

    @pytest.mark.parametrize("N", [2, 4, 8])
    def test_matches_ledger(self, N):
        b = brute_force_norms(N, make_grid(N))
        recs = [compute_mode_record(n) for n in range(1, N + 1)]
        ledger = [sum(getattr(r, f) for r in recs) for f in ("c_V", "c_dual", "c_plus")]
        np.testing.assert_allclose(b, ledger, rtol=0.01)

    def test_rejects_bad_grids(self):
        with pytest.raises(ValueError):
            brute_force_norms(9, make_grid(8))
        coarse = SpaceTimeGrid(fem1d.build_mesh(64 * 4), 100)
        with pytest.raises(ValueError):
            brute_force_norms(4, coarse)

    def test_sampled_field(self):
        grid = make_grid(2)
        t = np.array([0.4, 0.75])
        u, du = grid.sample(2, times=t)
        x = grid.mesh.nodes
        phi = make_default_bump()
        # t = 0.4 is in slab 2 = (1/3, 1/2); t = 0.75 in slab 1
        np.testing.assert_allclose(u[:, 0], 2.0 ** -3 * 6 * phi.value(6 * 0.4 - 2) * np.cos(2 * PI * x))
        np.testing.assert_allclose(du[:, 1], 2 * 2 * phi.derivative(2 * 0.75 - 1) * np.cos(PI * x))
