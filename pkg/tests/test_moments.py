"""Shifted moments, bound forms, character-sum moments, contour identity,
circle-integral moments."""

import math
import random

import numpy as np
import pytest

from ffmoments.chargroup import factor_modulus
from ffmoments.ffpoly import FieldSpec, parse_poly
from ffmoments.lfunc import primitive_family, t_period, zeta_A
from ffmoments.moments import (
    CharSumMoment,
    ShiftSpec,
    char_sum,
    char_sums_from_coeffs,
    charsum_moment,
    integral_moment,
    moment_report,
    perron_aliasing_bound,
    perron_partial_sum,
    prop33_statistic,
    shifted_moment,
    theorem1_rhs_min,
    theorem1_rhs_zeta,
    theta_bar,
)

F3 = FieldSpec(3)


@pytest.fixture(scope="module")
def fam_t2():
    return primitive_family(factor_modulus(parse_poly(F3, "T^2")))


@pytest.fixture(scope="module")
def fam_cubic():
    return primitive_family(factor_modulus(parse_poly(F3, "T^3 + 2*T + 1")))


class TestThetaBar:
    def test_examples(self):
        assert theta_bar(2 * math.pi) == 0.0
        assert abs(theta_bar(math.pi) - math.pi) < 1e-15
        assert abs(theta_bar(7.0) - (7 - 2 * math.pi)) < 1e-12

    def test_even_and_range(self):
        rng = random.Random(1)
        for _ in range(200):
            x = rng.uniform(-50, 50)
            v = theta_bar(x)
            assert 0 <= v <= math.pi + 1e-15
            assert abs(v - theta_bar(-x)) < 1e-12


class TestShiftSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ShiftSpec(a=(1.0,), t=(0.0,))  # odd length
        with pytest.raises(ValueError):
            ShiftSpec(a=(1.0, -1.0), t=(0.0, 0.0))  # nonpositive exponent
        with pytest.raises(ValueError):
            ShiftSpec(a=(1.0, 1.0), t=(0.0,))  # mismatched lengths

    def test_round_trip_and_digest(self):
        spec = ShiftSpec(a=(1.0, 2.0), t=(0.0, 0.5))
        assert ShiftSpec.from_dict(spec.to_dict()) == spec
        assert spec.digest == ShiftSpec.from_dict(spec.to_dict()).digest
        with pytest.raises(ValueError):
            ShiftSpec.from_dict({"a": [1, 1], "t": [0, 0], "x": 1})


class TestShiftedMoment:
    def test_worked_value(self, fam_t2):
        lhs = shifted_moment(fam_t2, ShiftSpec(a=(1.0, 1.0), t=(0.0, 0.0)))
        expected = 4 + 2 * (1 - 1 / math.sqrt(3)) ** 2
        assert abs(lhs - expected) < 1e-10

    def test_even_power_reduction(self, fam_t2):
        # paired equal shifts with exponents (2, 2) give the 4th power moment
        spec = ShiftSpec(a=(2.0, 2.0), t=(0.3, 0.3))
        direct = shifted_moment(fam_t2, spec)
        spec4 = ShiftSpec(a=(1.0, 3.0), t=(0.3, 0.3))
        assert abs(direct - shifted_moment(fam_t2, spec4)) < 1e-10

    def test_period_invariance(self, fam_cubic):
        period = t_period(3)
        base = ShiftSpec(a=(1.2, 0.8), t=(0.1, 0.9))
        shifted = ShiftSpec(a=(1.2, 0.8), t=(0.1 + period, 0.9 + period))
        a = shifted_moment(fam_cubic, base)
        b = shifted_moment(fam_cubic, shifted)
        assert abs(a - b) / a < 1e-9

    def test_conjugate_pairing(self, fam_cubic):
        base = ShiftSpec(a=(1.2, 0.8), t=(0.1, 0.9))
        negated = ShiftSpec(a=(1.2, 0.8), t=(-0.1, -0.9))
        a = shifted_moment(fam_cubic, base)
        b = shifted_moment(fam_cubic, negated)
        assert abs(a - b) / a < 1e-9

    def test_degenerate_family_rejected(self):
        fam = primitive_family(
            factor_modulus(parse_poly(FieldSpec(2), "T^2 + T"))
        )
        with pytest.raises(ValueError):
            shifted_moment(fam, ShiftSpec(a=(1.0, 1.0), t=(0.0, 0.0)))

    def test_holder_sanity(self, fam_cubic):
        rng = random.Random(77)
        for _ in range(10):
            a = tuple(rng.uniform(0.5, 2.0) for _ in range(4))
            t = tuple(rng.uniform(0, t_period(3)) for _ in range(4))
            spec = ShiftSpec(a=a, t=t)
            lhs = shifted_moment(fam_cubic, spec)
            A = sum(a)
            bound = 1.0
            for aj, tj in zip(a, t):
                pure = shifted_moment(
                    fam_cubic, ShiftSpec(a=(A / 2, A / 2), t=(tj, tj))
                )
                bound *= pure ** (aj / A)
            assert lhs <= bound * (1 + 1e-9)


class TestBoundForms:
    def test_zeta_form_equal_shifts(self, fam_t2):
        m = fam_t2.modulus
        spec = ShiftSpec(a=(1.0, 1.0), t=(0.0, 0.0))
        zeta0 = abs(zeta_A(3, 1 + 1 / m.log_norm))
        expected = 6 * m.log_norm**0.5 * zeta0**0.5
        assert abs(theorem1_rhs_zeta(m, spec) - expected) < 1e-12
        assert zeta0 > 1
        assert abs(zeta0 - 1 / (1 - math.exp(-0.5))) < 1e-12

    def test_pair_count(self, fam_t2):
        # 2k = 4 gives k(2k-1) = 6 zeta factors
        m = fam_t2.modulus
        spec = ShiftSpec(a=(1.0,) * 4, t=(0.0,) * 4)
        zeta0 = abs(zeta_A(3, 1 + 1 / m.log_norm))
        expected = 6 * m.log_norm * zeta0**3  # (log|Q|)^{4/4} * zeta0^{6/2}
        assert abs(theorem1_rhs_zeta(m, spec) - expected) < 1e-10

    def test_min_form_equal_shifts(self, fam_t2):
        m = fam_t2.modulus
        spec = ShiftSpec(a=(1.0, 1.0), t=(0.0, 0.0))
        expected = 6 * m.log_norm**0.5 * m.log_norm**0.5
        assert abs(theorem1_rhs_min(m, spec) - expected) < 1e-12

    def test_min_form_half_period(self, fam_t2):
        m = fam_t2.modulus
        spec = ShiftSpec(a=(1.0, 1.0), t=(0.0, math.pi / math.log(3)))
        expected = 6 * m.log_norm**0.5 * min(m.log_norm, 1 / math.pi) ** 0.5
        assert abs(theorem1_rhs_min(m, spec) - expected) < 1e-12

    def test_rhs_periodicity(self, fam_cubic):
        m = fam_cubic.modulus
        period = t_period(3)
        base = ShiftSpec(a=(1.1, 0.9), t=(0.2, 1.4))
        moved = ShiftSpec(a=(1.1, 0.9), t=(0.2 + period, 1.4))
        assert (
            abs(theorem1_rhs_min(m, base) - theorem1_rhs_min(m, moved))
            <= 1e-9 * theorem1_rhs_min(m, base)
        )
        assert (
            abs(theorem1_rhs_zeta(m, base) - theorem1_rhs_zeta(m, moved))
            <= 1e-9 * theorem1_rhs_zeta(m, base)
        )

    def test_forms_agree_within_bounded_factor(self, fam_cubic):
        rng = random.Random(9)
        m = fam_cubic.modulus
        for _ in range(50):
            t = tuple(rng.uniform(0, t_period(3)) for _ in range(4))
            spec = ShiftSpec(a=(1.0,) * 4, t=t)
            rz = theorem1_rhs_zeta(m, spec)
            rm = theorem1_rhs_min(m, spec)
            ratio = rz / rm
            assert 0.05 < ratio < 20

    def test_report_fields(self, fam_t2):
        rep = moment_report(fam_t2, ShiftSpec(a=(1.0, 1.0), t=(0.0, 0.0)))
        assert rep.n_primitive == 4 and rep.phi == 6
        assert rep.ratio_zeta > 0 and rep.ratio_min > 0
        assert math.isfinite(rep.ratio_zeta) and math.isfinite(rep.ratio_min)
        assert math.isfinite(prop33_statistic(fam_t2, rep.lhs))


class TestCharSum:
    def test_at_y_one(self, fam_t2):
        for chi in fam_t2.primitive_chars:
            assert char_sum(chi, 1) == 1

    def test_worked_values(self, fam_t2):
        sums = char_sums_from_coeffs(fam_t2, 3)
        expected = {1j * math.sqrt(3): 1 + 1j * math.sqrt(3), -1 + 0j: 0j}
        for i, chi in enumerate(fam_t2.primitive_chars):
            c1 = fam_t2.coeffs[i, 1]
            for key, val in expected.items():
                if abs(c1 - key) < 1e-9:
                    assert abs(sums[i] - val) < 1e-9

    def test_direct_matches_coefficient_sums(self, fam_cubic):
        for Y in (1, 3, 9, 27, 81):
            fast = char_sums_from_coeffs(fam_cubic, Y)
            for i, chi in enumerate(fam_cubic.primitive_chars):
                assert abs(fast[i] - char_sum(chi, Y)) < 1e-10

    def test_invalid_y(self, fam_t2):
        with pytest.raises(ValueError):
            char_sum(fam_t2.primitive_chars[0], 10)


class TestCharSumMoment:
    def test_s1_worked(self, fam_t2):
        res = charsum_moment(fam_t2, 1.0, 3)
        assert isinstance(res, CharSumMoment)
        assert abs(res.moment - 8) < 1e-8

    def test_s0_counts_primitive(self, fam_t2):
        assert charsum_moment(fam_t2, 0.0, 3).moment == fam_t2.n_primitive

    def test_ratio_positive_finite(self, fam_cubic):
        for m in (2.5, 3.0):
            res = charsum_moment(fam_cubic, m, 9)
            assert res.ratio > 0 and math.isfinite(res.ratio)


class TestPerron:
    def test_partial_sums(self, fam_t2):
        L = fam_t2.l_polynomials()[0]
        chi = L.character
        assert abs(perron_partial_sum(L, 0, 0.5, 64) - 1) < 1e-8
        for N in range(0, 4):
            direct = complex(np.sum(L.coeffs[: N + 1]))
            quad = perron_partial_sum(L, N, 0.5, 64 * (N + 2))
            assert abs(quad - direct) < 1e-8
            assert abs(char_sum(chi, 3**N) - direct) < 1e-10

    def test_validation(self, fam_t2):
        L = fam_t2.l_polynomials()[0]
        with pytest.raises(ValueError):
            perron_partial_sum(L, 0, 1.0, 64)
        with pytest.raises(ValueError):
            perron_partial_sum(L, 0, 0.5, 8)

    def test_aliasing_bound_dominates_error(self, fam_cubic):
        for L in fam_cubic.l_polynomials()[:4]:
            for N in (0, 2, 4):
                M = 64 * (N + 3)
                err = abs(
                    perron_partial_sum(L, N, 0.5, M)
                    - complex(np.sum(L.coeffs[: N + 1]))
                )
                assert err <= perron_aliasing_bound(L, 0.5, M) + 1e-12


class TestIntegralMoment:
    def test_worked_integral(self, fam_t2):
        res = integral_moment(fam_t2, 2.5, 8192)
        idx = int(np.argmin(np.abs(fam_t2.coeffs[:, 1] - 1j * math.sqrt(3))))
        assert abs(res.integrals[idx] - 8) < 1e-6

    def test_quadrature_refinement(self, fam_t2):
        # second-order convergence: the change under doubling shrinks ~4x
        idx = int(np.argmin(np.abs(fam_t2.coeffs[:, 1] - 1j * math.sqrt(3))))
        deltas = []
        for M in (1024, 2048, 4096):
            a = integral_moment(fam_t2, 2.5, M).integrals[idx]
            b = integral_moment(fam_t2, 2.5, 2 * M).integrals[idx]
            deltas.append(abs(b - a))
        assert deltas[0] < 1e-5
        assert deltas[2] < deltas[1] < deltas[0]

    def test_floor_enforced(self, fam_t2):
        with pytest.raises(ValueError):
            integral_moment(fam_t2, 2.5, 128)

    def test_ratio_fields(self, fam_cubic):
        res = integral_moment(fam_cubic, 2.5)
        assert res.ratio > 0 and math.isfinite(res.ratio)
        assert res.bound == fam_cubic.modulus.phi * (
            fam_cubic.modulus.log_norm ** ((2.5 - 1) ** 2)
        )
