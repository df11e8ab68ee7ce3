"""Parity between the compiled kernel extension and the numpy fallback."""

import random

import numpy as np
import pytest

from ffmoments import _pykernels
from ffmoments.ffpoly import (
    FieldSpec,
    FqPoly,
    is_irreducible,
    monic_from_index,
    residue_from_index,
    residue_index,
)

try:
    from ffmoments import _ckernels
except ImportError:  # pragma: no cover - toolchain-less install
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels else [])


@pytest.mark.parametrize("q", [2, 3, 5])
def test_backend_parity_sieve(q):
    if _ckernels is None:
        pytest.skip("compiled kernels not built")
    py = _pykernels.irreducible_indices(q, 7)
    cc = _ckernels.irreducible_indices(q, 7)
    assert len(py) == len(cc)
    for n in range(1, 8):
        assert np.array_equal(py[n], cc[n])


@pytest.mark.parametrize("kernels", BACKENDS)
@pytest.mark.parametrize("q", [2, 3])
def test_sieve_matches_per_poly_test(kernels, q):
    field = FieldSpec(q)
    table = kernels.irreducible_indices(q, 8 if q == 2 else 6)
    for n in range(1, len(table)):
        expected = {
            i
            for i in range(q**n)
            if is_irreducible(monic_from_index(field, n, i))
        }
        assert set(int(i) for i in table[n]) == expected


@pytest.mark.parametrize("kernels", BACKENDS)
def test_sieve_sorted_lexicographic(kernels):
    table = kernels.irreducible_indices(3, 5)
    for n in range(1, 6):
        arr = table[n]
        assert np.all(arr[:-1] < arr[1:])


@pytest.mark.parametrize("kernels", BACKENDS)
@pytest.mark.parametrize("q,dmod", [(2, 3), (3, 2), (3, 4), (5, 3)])
def test_scale_mod_many_matches_poly_arithmetic(kernels, q, dmod):
    field = FieldSpec(q)
    rng = random.Random(100 * q + dmod)
    mod = FqPoly(field, [rng.randrange(q) for _ in range(dmod)] + [1])
    mod_digits = np.array([mod.coeff(k) for k in range(dmod + 1)], np.int64)
    rows = np.array([rng.randrange(q**dmod) for _ in range(80)], np.int64)
    c_idx = rng.randrange(q**dmod)
    got = kernels.scale_mod_many(q, mod_digits, rows, c_idx)
    c_poly = residue_from_index(field, dmod, c_idx)
    for row, out in zip(rows, got):
        r_poly = residue_from_index(field, dmod, int(row))
        expected = (r_poly * c_poly) % mod
        assert int(out) == residue_index(expected, dmod)
