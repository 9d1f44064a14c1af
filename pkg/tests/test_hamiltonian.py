import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from shadowmd.errors import BondRangeError, TableError
from shadowmd.hamiltonian import (
    HamiltonianTable,
    force_observable,
    ground_state_curve_point,
    hamiltonian_at,
    load_table,
)
from shadowmd.pauli import PauliWord, expectation_exact, ground_state_exact


def write_table(tmp_path, text, name="t.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


GOOD_SMALL = (
    "R_angstrom,II,IZ\n"
    "0.5,1.0,0.10\n"
    "0.6,0.9,0.20\n"
    "0.7,0.85,0.15\n"
    "0.8,0.84,0.05\n"
)


class TestLoadTable:
    def test_shipped_fixture_counts(self, table):
        assert table.grid.shape[0] == 221
        assert len(table.words) == 15
        assert table.n_nonidentity_terms() == 14
        assert table.n == 4
        assert table.r_min == pytest.approx(0.30)
        assert table.r_max == pytest.approx(2.50)

    def test_small_table_round_trip(self, tmp_path):
        t = load_table(write_table(tmp_path, GOOD_SMALL))
        assert [w.ops for w in t.words] == ["II", "IZ"]
        np.testing.assert_allclose(t.grid, [0.5, 0.6, 0.7, 0.8])

    def test_decreasing_grid_rejected(self, tmp_path):
        bad = GOOD_SMALL.replace("0.7,", "0.55,")
        with pytest.raises(TableError, match="increasing"):
            load_table(write_table(tmp_path, bad))

    def test_duplicate_grid_rejected(self, tmp_path):
        bad = GOOD_SMALL.replace("0.6,", "0.5,")
        with pytest.raises(TableError, match="increasing"):
            load_table(write_table(tmp_path, bad))

    def test_empty_file_rejected(self, tmp_path):
        with pytest.raises(TableError, match="empty"):
            load_table(write_table(tmp_path, ""))

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(TableError, match="cannot read"):
            load_table(tmp_path / "nope.csv")

    def test_bad_header_rejected(self, tmp_path):
        with pytest.raises(TableError, match="header"):
            load_table(write_table(tmp_path, "radius,II\n0.5,1.0\n"))

    def test_column_count_mismatch_reports_line(self, tmp_path):
        bad = GOOD_SMALL.replace("0.7,0.85,0.15", "0.7,0.85")
        with pytest.raises(TableError, match="line 4"):
            load_table(write_table(tmp_path, bad))

    def test_non_numeric_cell_reports_line(self, tmp_path):
        bad = GOOD_SMALL.replace("0.20", "twenty")
        with pytest.raises(TableError, match="line 3"):
            load_table(write_table(tmp_path, bad))

    def test_too_few_rows_rejected(self, tmp_path):
        bad = "".join(GOOD_SMALL.splitlines(keepends=True)[:4])
        with pytest.raises(TableError, match="4 grid points"):
            load_table(write_table(tmp_path, bad))

    def test_duplicate_word_column_rejected(self, tmp_path):
        bad = GOOD_SMALL.replace("II,IZ", "IZ,IZ")
        with pytest.raises(TableError, match="duplicate"):
            load_table(write_table(tmp_path, bad))

    def test_invalid_word_rejected(self, tmp_path):
        bad = GOOD_SMALL.replace("IZ", "IQ")
        with pytest.raises(TableError):
            load_table(write_table(tmp_path, bad))


class TestInterpolation:
    def test_grid_nodes_reproduced(self, table):
        for idx in (0, 50, 87, 220):
            obs = hamiltonian_at(table, float(table.grid[idx]))
            got = np.array([c for c, _ in obs.terms])
            np.testing.assert_allclose(
                got, table.coefficients[idx], rtol=0, atol=1e-12
            )

    def test_continuity_under_tiny_shift(self, table):
        r = 1.2345
        a = table.coefficients_at(r)
        b = table.coefficients_at(r + 1e-6)
        assert np.abs(a - b).max() < 1e-5

    def test_out_of_range_error_carries_interval(self, table):
        with pytest.raises(BondRangeError) as err:
            hamiltonian_at(table, 2.6)
        assert err.value.r == 2.6
        assert err.value.lo == pytest.approx(0.3)
        assert err.value.hi == pytest.approx(2.5)

    def test_word_order_preserved(self, table):
        obs = hamiltonian_at(table, 0.777)
        assert tuple(w.ops for w in obs.words) == tuple(
            w.ops for w in table.words
        )


class TestPotentialCurve:
    def test_equilibrium_energy(self, table):
        e0 = ground_state_curve_point(table, 0.735)
        assert e0 == pytest.approx(-1.13730603, abs=2e-6)

    def test_argmin_near_equilibrium(self, table):
        res = minimize_scalar(
            lambda r: ground_state_curve_point(table, r),
            bounds=(0.6, 0.9),
            method="bounded",
            options={"xatol": 1e-7},
        )
        assert abs(res.x - 0.735) < 0.01

    def test_single_interior_minimum_and_convexity(self, table):
        rs = np.linspace(table.r_min, table.r_max, 441)
        es = np.array([ground_state_curve_point(table, float(r)) for r in rs])
        diffs = np.diff(es)
        # derivative changes sign exactly once: decreasing then increasing
        signs = np.sign(diffs)
        changes = np.count_nonzero(np.diff(signs) != 0)
        assert changes == 1
        i_min = int(np.argmin(es))
        assert 0 < i_min < len(rs) - 1
        # convex near the minimum
        window = es[i_min - 4 : i_min + 5]
        assert np.all(np.diff(window, 2) > 0)

    def test_dissociation_tail_monotone(self, table):
        res = minimize_scalar(
            lambda r: ground_state_curve_point(table, r),
            bounds=(0.6, 0.9),
            method="bounded",
        )
        start = 1.5 * res.x
        rs = np.linspace(start, table.r_max, 60)
        es = [ground_state_curve_point(table, float(r)) for r in rs]
        assert np.all(np.diff(es) > 0)


class TestForceObservable:
    def test_constant_columns_give_zero(self, tmp_path):
        text = (
            "R_angstrom,II,IZ\n"
            "0.5,1.0,0.3\n0.6,1.0,0.3\n0.7,1.0,0.3\n0.8,1.0,0.3\n"
        )
        t = load_table(write_table(tmp_path, text))
        obs = force_observable(t, 0.65, 1e-3)
        assert np.abs(obs.coefficients).max() < 1e-12

    def test_range_check_includes_stencil(self, table):
        with pytest.raises(BondRangeError):
            force_observable(table, table.r_max, 1e-3)
        with pytest.raises(BondRangeError):
            force_observable(table, table.r_min + 5e-4, 1e-3)
        with pytest.raises(ValueError):
            force_observable(table, 1.0, 0.0)

    def test_stationary_at_curve_minimum(self, table):
        res = minimize_scalar(
            lambda r: ground_state_curve_point(table, r),
            bounds=(0.6, 0.9),
            method="bounded",
            options={"xatol": 1e-9},
        )
        r_star = float(res.x)
        obs = force_observable(table, r_star, 1e-3)
        _, gs = ground_state_exact(hamiltonian_at(table, r_star))
        assert abs(expectation_exact(gs, obs)) < 1e-3

    def test_central_difference_second_order(self, table):
        """Halving d quarters the error against the spline derivative."""
        from shadowmd.pauli import Observable

        r = 1.005  # interior of a spline interval so the cubic piece is fixed
        _, gs = ground_state_exact(hamiltonian_at(table, r))
        # exact slope of <H(R)> on the frozen ground state, from the
        # analytic spline derivative of each coefficient column
        word_vals = np.array(
            [expectation_exact(gs, Observable([(1.0, w)])) for w in table.words]
        )
        exact_slope = float(table.derivative_at(r) @ word_vals)
        errs = []
        for d in (2e-3, 1e-3):
            est = expectation_exact(gs, force_observable(table, r, d))
            errs.append(est - exact_slope)
        ratio = errs[0] / errs[1]
        assert 3.5 < ratio < 4.5

    def test_force_sign_convention(self, table):
        # on the inner repulsive wall the energy falls with R: dE/dR < 0,
        # so the physical force -<dH/dR> on the ground state is positive
        r = 0.5
        _, gs = ground_state_exact(hamiltonian_at(table, r))
        slope = expectation_exact(gs, force_observable(table, r, 1e-3))
        assert slope < 0.0
