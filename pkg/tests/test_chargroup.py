"""Unit-group structure, Dirichlet characters, primitivity, caching."""

import json
import math
import random

import numpy as np
import pytest

from ffmoments.chargroup import (
    all_characters,
    character_values,
    euler_phi,
    factor_modulus,
    is_primitive,
    load_unit_group,
    primitive_count_inclusion_exclusion,
    unit_group,
    unit_group_cache_name,
)
from ffmoments.ffpoly import (
    FieldSpec,
    FqPoly,
    enumerate_monic,
    monic_from_index,
    parse_poly,
    poly_gcd,
)

F2 = FieldSpec(2)
F3 = FieldSpec(3)


def modulus(field, text):
    return factor_modulus(parse_poly(field, text))


class TestFactorModulus:
    def test_ramified_square(self):
        m = modulus(F3, "T^2")
        assert [(str(P), e) for P, e in m.factors] == [("T", 2)]
        assert m.phi == 6

    def test_split_product(self):
        m = modulus(F2, "T^2 + T")
        assert [(str(P), e) for P, e in m.factors] == [("T", 1), ("T + 1", 1)]
        assert m.phi == 1

    def test_irreducible(self):
        m = modulus(F3, "T^2 + 1")
        assert len(m.factors) == 1 and m.factors[0][1] == 1
        assert m.phi == 8

    def test_product_reconstructs(self):
        rng = random.Random(3)
        for _ in range(25):
            idx = rng.randrange(3**4)
            m = factor_modulus(monic_from_index(F3, 4, idx))
            prod = FqPoly.one(F3)
            for P, e in m.factors:
                for _ in range(e):
                    prod = prod * P
            assert prod == m.poly

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            factor_modulus(FqPoly(F3, (1, 1)))  # degree 1
        with pytest.raises(ValueError):
            factor_modulus(FqPoly(F3, (1, 0, 2)))  # not monic


class TestEulerPhi:
    def test_examples(self):
        assert euler_phi(modulus(F3, "T^2")) == 6
        assert euler_phi(modulus(F3, "T^2 + 1")) == 8
        assert euler_phi(modulus(F2, "T^3")) == 4

    @pytest.mark.parametrize("text", ["T^2", "T^2 + T", "T^3 + T + 1", "T^3"])
    def test_matches_exhaustive_unit_count(self, text):
        m = modulus(F3, text)
        count = 0
        for idx in range(3**m.degree):
            r = FqPoly(F3, [(idx // 3**k) % 3 for k in range(m.degree)])
            if not r.is_zero and poly_gcd(r, m.poly).degree == 0:
                count += 1
        assert m.phi == count


class TestUnitGroup:
    def test_t_squared_structure(self):
        g = unit_group(modulus(F3, "T^2"))
        assert math.prod(g.orders) == 6
        assert math.lcm(*g.orders) == 6  # the group is cyclic of order 6
        # the worked generator: 2+T has full order 6
        el = parse_poly(F3, "T + 2")
        cur, order = el, 1
        while cur != FqPoly.one(F3):
            cur = (cur * el) % g.modulus.poly
            order += 1
        assert order == 6
        assert g.dlog_of(FqPoly.one(F3)) == (0,) * g.rank

    def test_prime_modulus_cyclic(self):
        g = unit_group(modulus(F3, "T^2 + 1"))
        assert math.lcm(*g.orders) == 8 and math.prod(g.orders) == 8

    def test_degenerate_trivial_group(self):
        g = unit_group(modulus(F2, "T^2 + T"))
        assert g.rank == 0 and g.order == 1

    def test_bijection_verified(self):
        g = unit_group(modulus(F2, "T^3"))
        g.verify_bijection(exhaustive=True)
        g.verify_bijection(exhaustive=False)

    def test_dlog_covers_exactly_units(self):
        m = modulus(F3, "T^3 + T^2")
        g = unit_group(m)
        assert len(g.dlog) == m.phi
        for ridx in g.dlog:
            r = FqPoly(F3, [(ridx // 3**k) % 3 for k in range(m.degree)])
            assert poly_gcd(r, m.poly).degree == 0


class TestCharacters:
    def test_count_and_flags(self):
        g = unit_group(modulus(F3, "T^2"))
        chars = all_characters(g)
        assert len(chars) == 6
        assert sum(c.principal for c in chars) == 1
        assert sum(c.primitive for c in chars) == 4

    def test_primitive_counts_match_sieve(self):
        for text in ["T^2", "T^2 + 1", "T^2 + T", "T^3", "T^3 + T"]:
            m = modulus(F3, text)
            chars = all_characters(unit_group(m))
            assert sum(c.primitive for c in chars) == (
                primitive_count_inclusion_exclusion(m)
            )

    def test_principal_never_primitive(self):
        for text in ["T^2", "T^2 + 1", "T^3"]:
            g = unit_group(modulus(F3, text))
            principal = [c for c in all_characters(g) if c.principal]
            assert len(principal) == 1 and not principal[0].primitive

    def test_nonprincipal_mod_irreducible_primitive(self):
        g = unit_group(modulus(F3, "T^2 + 1"))
        for c in all_characters(g):
            assert c.primitive == (not c.principal)

    def test_kernel_primitivity_t_squared(self):
        # kernel of reduction mod T is {1, 1+T, 1+2T}; primitive characters
        # are exactly those non-trivial on it
        g = unit_group(modulus(F3, "T^2"))
        kernel = [parse_poly(F3, s) for s in ["1", "T + 1", "2*T + 1"]]
        for c in all_characters(g):
            trivial = all(abs(c(u) - 1) < 1e-12 for u in kernel)
            assert c.primitive == (not trivial)

    def test_conjugate_closure(self):
        for text in ["T^2", "T^3 + T^2 + 1"]:
            g = unit_group(modulus(F3, text))
            for c in all_characters(g):
                conj = c.conjugate()
                assert conj.primitive == c.primitive
                assert conj.principal == c.principal

    def test_is_primitive_matches_flag(self):
        g = unit_group(modulus(F2, "T^3"))
        for c in all_characters(g):
            assert is_primitive(c) == c.primitive


class TestCharEval:
    def test_vanishes_off_units(self):
        g = unit_group(modulus(F3, "T^2"))
        T = FqPoly.variable(F3)
        for c in all_characters(g):
            assert c(T) == 0
            assert c(FqPoly.zero(F3)) == 0
            assert c(T * T) == 0

    def test_principal_is_one_on_units(self):
        g = unit_group(modulus(F3, "T^2 + 1"))
        chi0 = [c for c in all_characters(g) if c.principal][0]
        for n in range(2):
            for f in enumerate_monic(F3, n):
                if poly_gcd(f, g.modulus.poly).degree == 0:
                    assert abs(chi0(f) - 1) < 1e-14

    def test_unit_modulus_values(self):
        g = unit_group(modulus(F3, "T^2"))
        for c in all_characters(g):
            for ridx in g.dlog:
                f = FqPoly(F3, [(ridx // 3**k) % 3 for k in range(2)])
                assert abs(abs(c(f)) - 1) < 1e-14

    def test_worked_value(self):
        import cmath

        g = unit_group(modulus(F3, "T^2"))
        # the primitive character sending 2+T to the primitive 6th root
        target = None
        for c in all_characters(g):
            if c.primitive and abs(
                c(parse_poly(F3, "T + 2")) - cmath.exp(1j * math.pi / 3)
            ) < 1e-12:
                target = c
        assert target is not None

    def test_multiplicativity_random_pairs(self):
        for text in ["T^2", "T^3 + T + 2"]:
            m = modulus(F3, text)
            g = unit_group(m)
            chars = all_characters(g)
            units = [
                FqPoly(F3, [(r // 3**k) % 3 for k in range(m.degree)])
                for r in g.dlog
            ]
            rng = random.Random(42)
            for _ in range(1000):
                a = units[rng.randrange(len(units))]
                b = units[rng.randrange(len(units))]
                c = chars[rng.randrange(len(chars))]
                assert abs(c(a * b) - c(a) * c(b)) < 1e-12

    def test_orthogonality_all_residues(self):
        for text in ["T^2", "T^2 + 1", "T^3 + T^2"]:
            m = modulus(F3, text)
            g = unit_group(m)
            for c in all_characters(g):
                if c.principal:
                    continue
                total = sum(
                    c(FqPoly(F3, [(r // 3**k) % 3 for k in range(m.degree)]))
                    for r in range(3**m.degree)
                )
                assert abs(total) < 1e-9

    def test_value_matrix_matches_char_eval(self):
        g = unit_group(modulus(F3, "T^2"))
        chars = all_characters(g)
        K = np.array([c.exponents for c in chars], dtype=np.int64)
        V = character_values(g, K)
        for j, c in enumerate(chars):
            for i, ridx in enumerate(g.residues):
                f = FqPoly(F3, [(int(ridx) // 3**k) % 3 for k in range(2)])
                assert abs(V[i, j] - c(f)) < 1e-12


class TestCache:
    def test_round_trip(self, tmp_path):
        m = modulus(F3, "T^2")
        g1 = unit_group(m, cache_dir=tmp_path)
        assert (tmp_path / unit_group_cache_name(m)).exists()
        assert not g1.from_cache
        g2 = unit_group(m, cache_dir=tmp_path)
        assert g2.from_cache
        assert g2.dlog == g1.dlog
        assert g2.orders == g1.orders

    def test_corrupted_cache_rejected(self, tmp_path):
        m = modulus(F3, "T^2")
        g = unit_group(m, cache_dir=tmp_path)
        path = tmp_path / unit_group_cache_name(m)
        payload = json.loads(path.read_text())
        payload["residues"] = payload["residues"][:-1]
        payload["dlog"] = payload["dlog"][:-1]
        path.write_text(json.dumps(payload))
        with pytest.raises(ArithmeticError):
            load_unit_group(m, path)

    def test_schema_mismatch_rejected(self, tmp_path):
        m = modulus(F3, "T^2")
        unit_group(m, cache_dir=tmp_path)
        path = tmp_path / unit_group_cache_name(m)
        payload = json.loads(path.read_text())
        payload["schema"] = 999
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError):
            load_unit_group(m, path)
