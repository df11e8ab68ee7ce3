"""Vectorized numpy implementations of the bulk polynomial kernels.

These are the hot inner loops of the package: the irreducibility sieve that
backs monic-irreducible enumeration, and batched residue multiplication used
to assemble discrete-log tables.  A compiled twin (_ckernels) implements the
same two entry points; ffmoments._backend picks whichever is available.

Encoding: a monic polynomial of degree n <-> integer in [0, q^n) whose
base-q digits are the n low-order coefficients, constant term least
significant.  Residues mod a degree-d modulus use the same digits over d
slots.
"""

from __future__ import annotations

import numpy as np


def _digit_matrix(indices: np.ndarray, q: int, width: int) -> np.ndarray:
    """(N,) indices -> (N, width) int16 digit matrix, low digit first."""
    out = np.empty((indices.shape[0], width), dtype=np.int16)
    rem = indices.astype(np.int64, copy=True)
    for k in range(width):
        out[:, k] = rem % q
        rem //= q
    return out


def _powers(q: int, width: int) -> np.ndarray:
    return q ** np.arange(width, dtype=np.int64)


def irreducible_indices(q: int, n_max: int) -> list[np.ndarray]:
    """Per-degree index arrays of the monic irreducibles of degree 1..n_max.

    Returns a list L with L[n] the sorted int64 index array for degree n
    (L[0] is empty).  Works by sieving: for each degree n, every product of
    a known irreducible of degree d <= n/2 with an arbitrary monic cofactor
    is marked composite; the survivors are the irreducibles.
    """
    out: list[np.ndarray] = [np.empty(0, dtype=np.int64)]
    for n in range(1, n_max + 1):
        mask = np.ones(q**n, dtype=bool)
        for d in range(1, n // 2 + 1):
            m = n - d
            cof = _digit_matrix(np.arange(q**m, dtype=np.int64), q, m)
            cof = np.hstack([cof, np.ones((q**m, 1), dtype=np.int16)])
            pw = _powers(q, n)
            for pidx in out[d]:
                pdig = _digit_matrix(np.array([pidx], dtype=np.int64), q, d)[0]
                prod = np.zeros((q**m, n + 1), dtype=np.int16)
                for i in range(d + 1):
                    pi = int(pdig[i]) if i < d else 1
                    if pi:
                        prod[:, i : i + m + 1] += np.int16(pi) * cof
                prod %= q
                # leading coefficient is 1 by construction; drop it
                composite = prod[:, :n].astype(np.int64) @ pw
                mask[composite] = False
        out.append(np.nonzero(mask)[0].astype(np.int64))
    return out


def _reduction_rows(q: int, mod_digits: np.ndarray) -> np.ndarray:
    """Digit rows of T^(d+j) mod Q for j = 0..d-2, where d = deg(Q)."""
    d = len(mod_digits) - 1
    rows = np.zeros((max(d - 1, 0), d), dtype=np.int64)
    if d <= 1:
        return rows
    cur = [(-int(c)) % q for c in mod_digits[:d]]  # T^d mod Q
    rows[0] = cur
    base = list(rows[0])
    for j in range(1, d - 1):
        top = cur[d - 1]
        cur = [0] + cur[: d - 1]
        if top:
            cur = [(cur[k] + top * base[k]) % q for k in range(d)]
        rows[j] = cur
    return rows


def scale_mod_many(
    q: int, mod_digits: np.ndarray, rows: np.ndarray, c_index: int
) -> np.ndarray:
    """Multiply each encoded residue by the residue c_index, mod Q.

    mod_digits holds the d+1 coefficients of the monic degree-d modulus.
    rows is an int64 array of residue indices (degree < d); the result is
    the index array of (row * c) mod Q.
    """
    d = len(mod_digits) - 1
    rows = np.asarray(rows, dtype=np.int64)
    if d == 0:
        return np.zeros_like(rows)
    R = _digit_matrix(rows, q, d)
    cdig = _digit_matrix(np.array([c_index], dtype=np.int64), q, d)[0]
    prod = np.zeros((rows.shape[0], 2 * d - 1), dtype=np.int32)
    for i in range(d):
        ci = int(cdig[i])
        if ci:
            prod[:, i : i + d] += np.int32(ci) * R.astype(np.int32)
    prod %= q
    low = prod[:, :d].astype(np.int64)
    if d > 1:
        low += prod[:, d:].astype(np.int64) @ _reduction_rows(q, mod_digits)
    low %= q
    return low @ _powers(q, d)
