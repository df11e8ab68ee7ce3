"""Shifted moments over the primitive family, the two bound forms they are
compared against, character-sum moments, the contour-integral identity for
partial sums, and the circle-integral moment.

All sums over characters run in canonical character-index order with
pairwise summation, so family sweeps are reproducible and parallel runs
reduce to the same bits as serial ones.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ffmoments.chargroup import DirichletChar, Modulus
from ffmoments.lfunc import PrimitiveFamily, u_at_shift, zeta_A
from ffmoments.ffpoly import enumerate_monic


def theta_bar(theta: float) -> float:
    """Distance from theta to the nearest integer multiple of 2*pi."""
    r = theta % (2 * math.pi)
    return min(r, 2 * math.pi - r)


@dataclass(frozen=True)
class ShiftSpec:
    """An even-length tuple of positive exponents a_j with shifts t_j."""

    a: tuple[float, ...]
    t: tuple[float, ...]

    def __post_init__(self):
        if len(self.a) != len(self.t):
            raise ValueError("exponents and shifts must pair up")
        if len(self.a) < 2 or len(self.a) % 2:
            raise ValueError("need an even number 2k >= 2 of shift pairs")
        if any(a <= 0 for a in self.a):
            raise ValueError("exponents must be positive")

    @property
    def half_k(self) -> int:
        return len(self.a) // 2

    @property
    def sum_a(self) -> float:
        return float(sum(self.a))

    @property
    def sum_a_sq(self) -> float:
        return float(sum(a * a for a in self.a))

    def to_dict(self) -> dict:
        return {"a": list(self.a), "t": list(self.t)}

    @classmethod
    def from_dict(cls, d: dict) -> "ShiftSpec":
        extra = set(d) - {"a", "t"}
        if extra:
            raise ValueError(f"unknown shift spec fields: {sorted(extra)}")
        return cls(a=tuple(float(x) for x in d["a"]), t=tuple(float(x) for x in d["t"]))

    @property
    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Shifted moments and the two bound forms
# ---------------------------------------------------------------------------


def _abs_values_at_shifts(family: PrimitiveFamily, shifts) -> np.ndarray:
    """|L(1/2 + i t_j, chi)| for every primitive chi (rows) and shift (cols)."""
    q = family.modulus.field.q
    dQ = family.modulus.degree
    us = np.array([u_at_shift(q, t) for t in shifts], dtype=np.complex128)
    powers = us[None, :] ** np.arange(dQ)[:, None]  # (dQ, n_shifts)
    return np.abs(family.coeffs @ powers)


def shifted_moment(family: PrimitiveFamily, spec: ShiftSpec) -> float:
    """sum over primitive chi of prod_j |L(1/2 + i t_j, chi)|^(a_j)."""
    if family.n_primitive == 0:
        raise ValueError("modulus has no primitive characters")
    mags = _abs_values_at_shifts(family, spec.t)
    prod = np.prod(mags ** np.asarray(spec.a)[None, :], axis=1)
    return float(np.sum(prod))


def theorem1_rhs_zeta(modulus: Modulus, spec: ShiftSpec) -> float:
    """phi(Q) (log|Q|)^(sum a_j^2 / 4) * prod over pairs j < l of
    |zeta_A(1 + i(t_j - t_l) + 1/log|Q|)|^(a_j a_l / 2)."""
    q = modulus.field.q
    logq_norm = modulus.log_norm
    out = modulus.phi * logq_norm ** (spec.sum_a_sq / 4)
    n = len(spec.a)
    for j in range(n):
        for l in range(j + 1, n):
            s = 1 + 1.0 / logq_norm + 1j * (spec.t[j] - spec.t[l])
            out *= abs(zeta_A(q, s)) ** (spec.a[j] * spec.a[l] / 2)
    return out


def theorem1_rhs_min(modulus: Modulus, spec: ShiftSpec) -> float:
    """Same shape with each zeta factor replaced by
    min(log|Q|, 1/theta_bar(log q * (t_j - t_l))); a vanishing theta_bar
    resolves the min to log|Q|."""
    q = modulus.field.q
    logq_norm = modulus.log_norm
    out = modulus.phi * logq_norm ** (spec.sum_a_sq / 4)
    n = len(spec.a)
    for j in range(n):
        for l in range(j + 1, n):
            tb = theta_bar(math.log(q) * (spec.t[j] - spec.t[l]))
            factor = logq_norm if tb == 0 else min(logq_norm, 1.0 / tb)
            out *= factor ** (spec.a[j] * spec.a[l] / 2)
    return out


@dataclass(frozen=True)
class MomentReport:
    """One family/spec row of the shifted-moment comparison."""

    q: int
    modulus: str
    degree: int
    phi: int
    n_primitive: int
    spec: ShiftSpec
    lhs: float
    rhs_zeta: float
    rhs_min: float

    @property
    def ratio_zeta(self) -> float:
        return self.lhs / self.rhs_zeta

    @property
    def ratio_min(self) -> float:
        return self.lhs / self.rhs_min


def moment_report(family: PrimitiveFamily, spec: ShiftSpec) -> MomentReport:
    modulus = family.modulus
    lhs = shifted_moment(family, spec) if family.n_primitive else 0.0
    return MomentReport(
        q=modulus.field.q,
        modulus=str(modulus),
        degree=modulus.degree,
        phi=modulus.phi,
        n_primitive=family.n_primitive,
        spec=spec,
        lhs=lhs,
        rhs_zeta=theorem1_rhs_zeta(modulus, spec),
        rhs_min=theorem1_rhs_min(modulus, spec),
    )


def prop33_statistic(family: PrimitiveFamily, lhs: float) -> float:
    """log(lhs / phi(Q)) / log log |Q|; its family-wise sup is the empirical
    exponent in the crude moment bound phi(Q) (log|Q|)^O(1)."""
    loglog = math.log(family.modulus.log_norm)
    return math.log(lhs / family.modulus.phi) / loglog


# ---------------------------------------------------------------------------
# Character sums and their moments
# ---------------------------------------------------------------------------


def _y_exponent(q: int, Y) -> int:
    n = round(math.log(float(Y)) / math.log(q))
    if n < 0 or q**n != round(float(Y)):
        raise ValueError(f"{Y} is not a power of q={q}")
    return n


def char_sum(chi: DirichletChar, Y) -> complex:
    """sum over monic f with |f| <= Y of chi(f), by direct enumeration."""
    field = chi.group.modulus.field
    N = _y_exponent(field.q, Y)
    terms = []
    for n in range(N + 1):
        for f in enumerate_monic(field, n):
            terms.append(chi(f))
    return complex(np.sum(np.array(terms, dtype=np.complex128)))


def char_sums_from_coeffs(family: PrimitiveFamily, Y) -> np.ndarray:
    """Character sums up to norm Y for every primitive character, as partial
    coefficient sums of the L-polynomials (coefficients beyond deg(Q)-1
    vanish, so the slice is capped there)."""
    N = _y_exponent(family.modulus.field.q, Y)
    hi = min(N + 1, family.modulus.degree)
    return np.sum(family.coeffs[:, :hi], axis=1)


class CharSumMoment(NamedTuple):
    moment: float
    bound: float
    ratio: float
    n_primitive: int


def charsum_moment(family: PrimitiveFamily, m: float, Y) -> CharSumMoment:
    """S_m(Q, Y) = sum over primitive chi of |char sum|^(2m), with its ratio
    against phi(Q) Y^m (log|Q|)^((m-1)^2)."""
    if m < 0:
        raise ValueError("moment exponent must be nonnegative")
    sums = char_sums_from_coeffs(family, Y)
    moment = float(np.sum(np.abs(sums) ** (2 * m)))
    bound = (
        family.modulus.phi
        * float(Y) ** m
        * family.modulus.log_norm ** ((m - 1) ** 2)
    )
    return CharSumMoment(moment, bound, moment / bound, family.n_primitive)


# ---------------------------------------------------------------------------
# Contour-integral partial sums
# ---------------------------------------------------------------------------


def perron_partial_sum(L, N: int, r: float, M: int) -> complex:
    """Numerical evaluation of the contour-integral form of the partial
    coefficient sum sum_{n<=N} c_n:

        (1/2 pi i) * integral over |u|=r of L(u) du / ((1-u) u^(N+1)),

    by M-point uniform sampling of the circle.  Requires 0 < r < 1 and
    M >= 4 (deg(Q) + N + 2) so aliased powers are negligible.
    """
    if not 0 < r < 1:
        raise ValueError("radius must satisfy 0 < r < 1")
    dQ = L.character.group.modulus.degree
    if M < 4 * (dQ + N + 2):
        raise ValueError(f"sample count too small; need M >= {4 * (dQ + N + 2)}")
    k = np.arange(M)
    u = r * np.exp(2j * np.pi * k / M)
    values = np.polyval(L.coeffs[::-1], u)
    return complex(np.mean(values / ((1 - u) * u**N)))


def perron_aliasing_bound(L, r: float, M: int) -> float:
    """Rigorous bound on the circle-sampling aliasing error:
    r^M / (1 - r) times the coefficient-sum majorant of |L| on the circle."""
    majorant = float(np.sum(np.abs(L.coeffs)))
    return r**M / (1 - r) * majorant


# ---------------------------------------------------------------------------
# Circle-integral moment
# ---------------------------------------------------------------------------


class IntegralMoment(NamedTuple):
    moment: float
    bound: float
    ratio: float
    integrals: np.ndarray


def integral_moments_per_char(
    family: PrimitiveFamily, quad_points: int = 1024
) -> np.ndarray:
    """integral over [0, 2pi] of |L(e^(it)/sqrt(q))| dt per primitive chi,
    by the periodic trapezoid rule on a uniform grid."""
    if quad_points < 256:
        raise ValueError("at least 256 quadrature points are required")
    q = family.modulus.field.q
    dQ = family.modulus.degree
    t = 2 * np.pi * np.arange(quad_points) / quad_points
    u = np.exp(1j * t) / math.sqrt(q)
    powers = u[None, :] ** np.arange(dQ)[:, None]  # (dQ, M)
    mags = np.abs(family.coeffs @ powers)  # (n_prim, M)
    return 2 * np.pi * np.mean(mags, axis=1)


def integral_moment(
    family: PrimitiveFamily, m: float, quad_points: int = 1024
) -> IntegralMoment:
    """sum over primitive chi of (integral of |L| over the circle)^(2m),
    with its ratio against phi(Q) (log|Q|)^((m-1)^2)."""
    integrals = integral_moments_per_char(family, quad_points)
    moment = float(np.sum(integrals ** (2 * m)))
    bound = family.modulus.phi * family.modulus.log_norm ** ((m - 1) ** 2)
    return IntegralMoment(moment, bound, moment / bound, integrals)
