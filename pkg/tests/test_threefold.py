import itertools
from fractions import Fraction as F

import pytest

from abelcount.arith import sigma
from abelcount.lattice import nu_subgroup_formula
from abelcount.series import (
    Kind,
    PLaurent,
    QSeries,
    SeriesError,
    Symmetry,
    WindowError,
    product_form,
    sign_flip_p,
)
from abelcount.threefold import (
    Convention,
    DTSeries,
    diagonal_count,
    dt_1,
    dt_2,
    dt_degenerate,
    dt_hat_1,
    dt_hat_1_assembled,
    dt_hat_2_assembled,
    dt_hat_2_closed,
    dt_mc,
    dt_primitive,
    f_a_series,
    gw_11d_series,
    gw_from_dt,
    gw_primitive,
    mc_threefold_f,
    n_g_imprimitive,
    n_mc_factor,
    nodal_factor,
    sym_prod_euler,
    theta_K_fourth,
)


def laurent(mapping):
    return PLaurent.from_p(mapping)


SECOND_DIFF = laurent({1: 1, 0: -2, -1: 1})


class TestDTSeries:
    def test_dt_hat_1(self):
        dt = dt_hat_1(8)
        assert dt.convention is Convention.PLAIN_P
        assert dt.series[0] == SECOND_DIFF
        assert dt.series[1] == laurent({2: -2, 1: 8, 0: -12, -1: 8, -2: -2})
        assert all(c.symmetry is Symmetry.SYMMETRIC for c in dt.series.coeffs)

    def test_dt_1_signs(self):
        hat, dt = dt_hat_1(6), dt_1(6)
        assert dt.convention is Convention.MINUS_P
        assert dt.series[0] == -SECOND_DIFF
        for d in range(7):
            for n in range(-3, 4):
                assert dt.invariant(n, d) == -(-1) ** n * hat.invariant(n, d)

    def test_convention_roundtrip(self):
        dt = dt_1(4)
        plain = dt.with_convention(Convention.PLAIN_P)
        assert plain.with_convention(Convention.MINUS_P).series == dt.series
        assert all(plain.invariant(n, 2) == dt.invariant(n, 2) for n in range(-3, 4))

    def test_json_tag(self):
        assert dt_1(1).to_json()["convention"] == "minus_p"


class TestComponents:
    def test_nodal_factor(self):
        n = nodal_factor(2, 6)
        assert n[0].kind is Kind.WINDOW
        assert [n[0].p_coeff(k) for k in range(4)] == [1, 1, 2, 3]
        assert n[1] == laurent({1: 1, -1: 1})
        assert n[2] == laurent({1: 1, -1: 1, 2: 2, -2: 2})

    def test_f_a(self):
        f = f_a_series(4)
        assert f[0] == PLaurent.constant(1)
        assert f[1] == laurent({1: 1, 0: -1, -1: 1})
        assert all(c.symmetry is Symmetry.SYMMETRIC for c in f.coeffs)

    def test_sym_prod_euler(self):
        f = f_a_series(5)
        direct = product_form(
            [t for m in range(1, 6) for t in ((1, 2, m, 2), (1, -2, m, 2), (1, 0, m, -2))],
            PLaurent.constant(1), 5)
        assert sym_prod_euler(f, -2) == direct
        assert sym_prod_euler(f, 0) == QSeries([PLaurent.constant(1)], 5)
        one_plus_q = QSeries([PLaurent.constant(1), PLaurent.constant(1), PLaurent()], 3)
        assert sym_prod_euler(one_plus_q, 3) == QSeries(
            [PLaurent.constant(c) for c in (1, 3, 3, 1)], 3)
        with pytest.raises(SeriesError):
            sym_prod_euler(QSeries([PLaurent.constant(2)], 2), 2)

    def test_assembly_one(self):
        assembled = dt_hat_1_assembled(8)
        assert assembled.series[0] == SECOND_DIFF
        assert assembled.series == dt_hat_1(8).series

    def test_assembly_two(self):
        closed, assembled = dt_hat_2_closed(8), dt_hat_2_assembled(8)
        assert closed.series == assembled.series
        # (p - 2 + 1/p)^2 (1/2 + 3p + 6p^2 + 9p^3 + ...) collapses to a finite polynomial
        q0 = closed.series[0]
        assert [q0.p_coeff(n) for n in range(6)] == [-3, 1, F(1, 2), 0, 0, 0]
        assert q0 == laurent({2: F(1, 2), 1: 1, 0: -3, -1: 1, -2: F(1, 2)})

    def test_diagonal_term_first_at_q2(self):
        k4 = theta_K_fourth(2)
        nodal_only = (k4 * nodal_factor(2)).scale(3) - k4.scale(F(5, 2))
        diff = dt_hat_2_closed(2).series - nodal_only
        assert diff[1].is_zero() or diff[1] == PLaurent()
        assert diff[2] == k4[0].scale(12).restrict(diff[2].validity)


class TestDT2:
    def test_forms_agree(self):
        closed = dt_2(8, form="closed").series
        assert closed == dt_2(8, form="proof").series
        assert closed == dt_2(8, form="finite").series
        assert all(c.is_finite for c in dt_2(8, form="finite").series.coeffs)

    def test_window_too_small(self):
        with pytest.raises(WindowError):
            dt_2(8, window=8)

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            dt_2(2, form="other")

    def test_q0_spot(self):
        # (3/2)(p - 2 + 1/p)^2 (1/12 + p + 2p^2 + ...) + (3/8)(p^2 - 2 + p^-2)
        expected = laurent({2: F(1, 2), 1: 1, 0: -3, -1: 1, -2: F(1, 2)})
        assert dt_2(0).series[0] == -expected

    def test_finite_support(self):
        for c in dt_2(8, form="finite").series.coeffs:
            assert c.symmetry is Symmetry.SYMMETRIC


class TestGW:
    def test_gw_from_dt1(self):
        gw = gw_from_dt(dt_1(8), 16)
        assert gw[0][2] == 1 and gw[0][4] == F(-1, 12)
        assert all(gw[d][0] == 0 for d in range(9))
        assert all(gw[d][2 * i + 1] == 0 for d in range(9) for i in range(8))
        assert all(gw[d][4] == 2 * sigma(d) for d in range(1, 9))

    def test_gw_rejects_asymmetric(self):
        bad = DTSeries(QSeries([laurent({1: 1})]), Convention.MINUS_P)
        with pytest.raises(SeriesError):
            gw_from_dt(bad, 4)
        windowed = DTSeries(dt_2(2, form="closed").series, Convention.MINUS_P)
        with pytest.raises(SeriesError):
            gw_from_dt(windowed, 4)

    def test_gw_11d(self):
        gw = gw_11d_series(8)
        assert gw.series[0] == laurent({1: 1, 0: 2, -1: 1})
        assert gw.series[1] == laurent({2: 2, 1: 8, 0: 12, -1: 8, -2: 2})
        assert gw.series == sign_flip_p(dt_1(8).series)

    def test_dt2_gw_side(self):
        gw = gw_from_dt(dt_2(4, form="finite"), 8)
        assert all(gw[d][0] == 0 for d in range(5))

    def test_primitive(self):
        assert gw_primitive(2, 0) == 1
        assert gw_primitive(3, 5) == 2 * sigma(5)
        with pytest.raises(ValueError):
            gw_primitive(0, 1)


class TestMultipleCover:
    def test_mc_threefold_f(self):
        assert mc_threefold_f(3, 2, 2) == 30
        assert all(mc_threefold_f(g, 1, d) == gw_primitive(g, d)
                   for g in range(2, 5) for d in range(1, 6))
        assert all(mc_threefold_f(3, 1, d) == 2 * sigma(d) for d in range(1, 9))

    def test_n_factor(self):
        assert n_mc_factor(1, 1, 5, 1) == 1
        assert n_mc_factor(2, 2, 4, 2) == 5
        assert n_mc_factor(2, 2, 1, 2) == 1
        with pytest.raises(ValueError):
            n_mc_factor(1, 1, 3, 3)

    def test_imprimitive(self):
        assert n_g_imprimitive(3, (2, 2, 1)) == 30
        assert n_g_imprimitive(3, (1, 2, 2)) == 30 == 2 * nu_subgroup_formula((1, 2, 2))
        assert all(n_g_imprimitive(3, (1, 1, d)) == 2 * sigma(d) for d in range(1, 9))

    def test_genus3_bridge(self):
        for t in itertools.product(range(1, 9), repeat=3):
            if t[0] * t[1] * t[2] <= 16:
                assert n_g_imprimitive(3, t) == 2 * nu_subgroup_formula(t), t

    def test_conjecture_c_inside_general_rule(self):
        for g, dp, d in itertools.product(range(2, 5), range(1, 5), range(1, 5)):
            assert mc_threefold_f(g, dp, d) == n_g_imprimitive(g, (1, dp, d))


class TestDTMultipleCover:
    def test_degenerate(self):
        assert dt_degenerate(2, 2) == F(-5, 2)
        assert all(dt_degenerate(1, d) == 1 for d in range(1, 8))
        assert all(dt_mc(n, (0, 0, d)) == dt_degenerate(n, d)
                   for n in range(1, 6) for d in range(1, 7))

    def test_primitive(self):
        dt = dt_1(8)
        for d in range(1, 6):
            for n in range(-2, 3):
                assert dt_mc(n, (1, 1, d)) == dt.invariant(n, d) == dt_primitive(n, d)

    def test_zero_n_allowed_with_two_positive(self):
        assert dt_mc(0, (1, 2, 2)) == dt_primitive(0, 4) + F(1, 2) * 1 * dt_primitive(0, 1)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            dt_mc(0, (0, 0, 3))
        with pytest.raises(ValueError):
            dt_mc(1, (2, 0, 0))
        with pytest.raises(ValueError):
            dt_degenerate(0, 2)


class TestDiagonal:
    def test_values(self):
        assert [diagonal_count(d) for d in (0, 2, 3, 4)] == [0, 12, 0, 36]
        with pytest.raises(ValueError):
            diagonal_count(-1)
