from fractions import Fraction as F

import pytest

from abelcount.arith import sigma
from abelcount.modular import (
    InsufficientOrderError,
    NoFitError,
    QModElement,
    bernoulli,
    eisenstein,
    qmod_dimension,
    qmod_fit,
    qmod_monomials,
    s_function,
    theta_d4,
    theta_K_pq,
    theta_K_u,
    weierstrass_p,
)
from abelcount.series import (
    Kind,
    PLaurent,
    QSeries,
    Symmetry,
    WindowError,
    antisymmetric_w_to_u,
    sin_series,
)


def laurent(mapping):
    return PLaurent.from_p(mapping)


class TestBernoulli:
    def test_values(self):
        assert [bernoulli(k) for k in (2, 4, 6, 8)] == [F(1, 6), F(-1, 30), F(1, 42), F(-1, 30)]

    @pytest.mark.parametrize("k", [0, 1, 3])
    def test_rejects(self, k):
        with pytest.raises(ValueError):
            bernoulli(k)


class TestEisenstein:
    def test_e2(self):
        assert eisenstein(2, 3).coeffs == (1, -24, -72, -96)
        assert all(eisenstein(2, 10)[d] == -24 * sigma(d) for d in range(1, 11))

    def test_e4_e6(self):
        assert eisenstein(4, 2).coeffs == (1, 240, 2160)
        assert eisenstein(6, 1).coeffs == (1, -504)

    def test_constant_term(self):
        assert all(eisenstein(w, 3)[0] == 1 for w in range(2, 14, 2))

    def test_rejects_odd(self):
        with pytest.raises(ValueError):
            eisenstein(3, 2)


class TestThetaK:
    def test_product_leading(self):
        k = theta_K_pq(4)
        assert k[0] == PLaurent({1: 1, -1: -1})
        assert k[1] == PLaurent({3: -1, 1: 3, -1: -3, -3: 1})
        assert all(c.symmetry is Symmetry.ANTISYMMETRIC for c in k.coeffs)

    def test_square_symmetric(self):
        k2 = theta_K_pq(6) ** 2
        assert all(c.symmetry is Symmetry.SYMMETRIC and c.is_finite for c in k2.coeffs)

    def test_window(self):
        with pytest.raises(WindowError):
            theta_K_pq(6, window=2)

    def test_u_form_leading(self):
        k = theta_K_u(4, 9)
        assert k[0] == sin_series(9, F(1, 2)).scale(2)
        assert k[0][1] == 1
        assert all(k[d][1] == 0 for d in range(1, 5))

    def test_two_representations(self):
        assert antisymmetric_w_to_u(theta_K_pq(8), 16) == theta_K_u(8, 16)


class TestWeierstrass:
    def test_values(self):
        wp = weierstrass_p(3, 24)
        assert wp[0].kind is Kind.WINDOW and wp[0].validity == 24
        assert wp[0].p_coeff(3) == 3
        assert wp[0].p_coeff(0) == F(1, 12)
        assert wp[0].p_coeff(-1) == 0
        assert wp[1] == laurent({1: 1, 0: -2, -1: 1})
        assert wp[2] == laurent({1: 1, 0: -6, -1: 1, 2: 2, -2: 2})


class TestThetaD4:
    def test_values(self):
        t = theta_d4(4)
        assert (t[1], t[3], t[4]) == (24, 96, 24)

    def test_rewrite(self):
        q_max = 12
        s = QSeries([F(-1, 4)], q_max)
        for d in range(1, q_max + 1):
            k_sum = sigma(d)
            s = s + QSeries.from_map({d: -6 * k_sum}, q_max, F(0))
            if 2 * d <= q_max:
                s = s + QSeries.from_map({2 * d: 12 * k_sum}, q_max, F(0))
        assert s == theta_d4(q_max).scale(F(-1, 4))


class TestS:
    def test_values(self):
        s = s_function(2)
        assert s[0].is_zero()
        assert s[1] == laurent({1: -1, 0: 2, -1: -1})
        assert s[2] == laurent({1: -2, 0: 4, -1: -2}) + laurent({2: -1, 0: 2, -2: -1})
        assert all(c.symmetry is Symmetry.SYMMETRIC for c in s.coeffs)


class TestQModFit:
    def test_basis_order(self):
        assert qmod_monomials(4) == [(0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 1, 0)]
        assert qmod_dimension(8) == 11

    def test_e2(self):
        fit = qmod_fit(eisenstein(2, 6), 2)
        assert fit.terms == {(1, 0, 0): 1} and fit.pure_weight == 2

    def test_minus_e2_over_12(self):
        series = QSeries([F(-1, 12), 2, 6, 8, 14, 12, 24], 6)
        fit = qmod_fit(series, 2)
        assert fit.terms == {(1, 0, 0): F(-1, 12)}

    def test_no_fit(self):
        with pytest.raises(NoFitError):
            qmod_fit(QSeries([0, 1, 1, 0, 0]), 0)

    def test_insufficient_order(self):
        with pytest.raises(InsufficientOrderError):
            qmod_fit(eisenstein(2, 3), 4)

    def test_refit_is_stable(self):
        elem = QModElement(6, {(3, 0, 0): F(1, 5), (1, 1, 0): -2, (0, 0, 1): F(7, 3)})
        fit = qmod_fit(elem.expansion(10), 6)
        assert fit.terms == elem.terms and fit.pure_weight == 6
        assert qmod_fit(fit.expansion(10), 6).terms == fit.terms

    def test_mixed_weight(self):
        fit = qmod_fit(eisenstein(2, 8) + eisenstein(4, 8), 4)
        assert fit.pure_weight is None

    def test_serialization(self):
        elem = QModElement(2, {(1, 0, 0): F(-1, 12)}, 2)
        assert elem.to_json() == {"weight_bound": 2,
                                  "terms": [{"e2": 1, "e4": 0, "e6": 0, "coeff": "-1/12"}]}

    def test_bound_validation(self):
        with pytest.raises(ValueError):
            QModElement(2, {(0, 1, 0): 1})
