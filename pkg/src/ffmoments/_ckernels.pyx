# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the bulk polynomial kernels.

Same contract as ffmoments._pykernels (which is the import-time fallback):
irreducible_indices sieves the monic irreducibles of each degree, and
scale_mod_many multiplies a batch of encoded residues by a fixed residue
modulo a monic modulus.  Encodings are documented in _pykernels.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def irreducible_indices(int q, int n_max):
    """Per-degree int64 index arrays of monic irreducibles, degrees 1..n_max."""
    cdef list out = [np.empty(0, dtype=np.int64)]
    cdef cnp.ndarray[cnp.npy_bool, ndim=1] mask
    cdef cnp.ndarray[cnp.int64_t, ndim=1] primes_d
    cdef long long[64] pdig
    cdef long long[128] gdig
    cdef long long[192] prod
    cdef long long size, cof_count, gidx, rem, idx, pidx, pbits, gbits, b
    cdef Py_ssize_t n, d, m, i, j, k, t, pos
    for n in range(1, n_max + 1):
        size = 1
        for i in range(n):
            size *= q
        mask = np.ones(size, dtype=bool)
        for d in range(1, n // 2 + 1):
            m = n - d
            primes_d = out[d]
            cof_count = 1
            for i in range(m):
                cof_count *= q
            for t in range(primes_d.shape[0]):
                pidx = primes_d[t]
                if q == 2:
                    # carryless multiply on bit-packed polynomials
                    pbits = pidx | (1 << d)
                    for gidx in range(cof_count):
                        gbits = gidx | (1 << m)
                        idx = 0
                        b = pbits
                        i = 0
                        while b:
                            if b & 1:
                                idx ^= gbits << i
                            b >>= 1
                            i += 1
                        mask[idx & (size - 1)] = False
                    continue
                rem = pidx
                for i in range(d):
                    pdig[i] = rem % q
                    rem //= q
                pdig[d] = 1
                # cofactor digits advance as a base-q odometer
                for i in range(m):
                    gdig[i] = 0
                gdig[m] = 1
                for gidx in range(cof_count):
                    for k in range(n + 1):
                        prod[k] = 0
                    for i in range(d + 1):
                        if pdig[i] != 0:
                            for j in range(m + 1):
                                prod[i + j] += pdig[i] * gdig[j]
                    idx = 0
                    for k in range(n - 1, -1, -1):
                        idx = idx * q + (prod[k] % q)
                    mask[idx] = False
                    pos = 0
                    while pos < m:
                        gdig[pos] += 1
                        if gdig[pos] < q:
                            break
                        gdig[pos] = 0
                        pos += 1
        out.append(np.nonzero(mask)[0].astype(np.int64))
    return out


def scale_mod_many(int q, mod_digits, rows, long long c_index):
    """Multiply each encoded residue in rows by residue c_index, mod Q."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mdig = np.ascontiguousarray(
        mod_digits, dtype=np.int64
    )
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rr = np.ascontiguousarray(
        rows, dtype=np.int64
    )
    cdef Py_ssize_t d = mdig.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] res = np.empty(
        rr.shape[0], dtype=np.int64
    )
    cdef long long[64] cdig
    cdef long long[64] rdig
    cdef long long[128] prod
    cdef long long rem, idx, top
    cdef Py_ssize_t a, i, j, k
    if d == 0:
        res[:] = 0
        return res
    rem = c_index
    for i in range(d):
        cdig[i] = rem % q
        rem //= q
    for a in range(rr.shape[0]):
        rem = rr[a]
        for i in range(d):
            rdig[i] = rem % q
            rem //= q
        for k in range(2 * d - 1):
            prod[k] = 0
        for i in range(d):
            if cdig[i] != 0:
                for j in range(d):
                    prod[i + j] += cdig[i] * rdig[j]
        # reduce: eliminate T^k for k = 2d-2 .. d using monic modulus
        for k in range(2 * d - 2, d - 1, -1):
            top = prod[k] % q
            if top != 0:
                for i in range(d):
                    prod[k - d + i] -= top * mdig[i]
            prod[k] = 0
        idx = 0
        for k in range(d - 1, -1, -1):
            idx = idx * q + ((prod[k] % q + q) % q)
        res[a] = idx
    return res
