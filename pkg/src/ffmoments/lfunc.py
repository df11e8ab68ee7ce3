"""Exact L-polynomials for Dirichlet characters over F_q[T], the zeta
function of the polynomial ring, and explicit pointwise bounds on log|L|.

For a non-principal character mod Q the Dirichlet series collapses to a
polynomial in u = q^(-s) of degree at most deg(Q) - 1; coefficient n is the
full character sum over the monic polynomials of degree n.  Coefficients
are accumulated in enumeration order with pairwise summation (np.sum), so
results are reproducible bit-for-bit on a given platform.

Values on the critical line live on the circle |u| = q^(-1/2); the shift t
in L(1/2 + it, chi) corresponds to the angle theta = -t log q, and all
values are periodic in t with period 2*pi/log q.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ffmoments.chargroup import (
    DirichletChar,
    Modulus,
    UnitGroup,
    all_characters,
    character_values,
    modulus_slug,
    unit_group,
)
from ffmoments.ffpoly import FqPoly, enumerate_irreducible, monic_from_index, residue_index

L_CACHE_SCHEMA = 1
COEFF_TRIM_TOL = 1e-9


class ZetaPoleError(ArithmeticError):
    """Raised when zeta_A is evaluated at a pole (q^(1-s) = 1)."""


def zeta_A(q: int, s: complex) -> complex:
    """Zeta function of F_q[T]: 1 / (1 - q^(1-s))."""
    w = cmath.exp((1 - s) * math.log(q))
    denom = 1 - w
    if denom == 0:
        raise ZetaPoleError(f"zeta_A pole at s={s}")
    return 1 / denom


def t_period(q: int) -> float:
    """Period of all L-values in the shift t."""
    return 2 * math.pi / math.log(q)


def u_at_shift(q: int, t: float) -> complex:
    """u = q^(-(1/2 + i t)), with t reduced mod the period first."""
    t_red = t % t_period(q)
    return q**-0.5 * cmath.exp(-1j * t_red * math.log(q))


def u_on_circle(q: int, theta: float) -> complex:
    """u = e^(i theta) / sqrt(q)."""
    return cmath.exp(1j * theta) / math.sqrt(q)


@dataclass(frozen=True)
class ShiftPoint:
    """A point on the critical circle, as a shift t and an angle theta.

    The two coordinates satisfy theta = -t log q, so that evaluating the
    L-polynomial at e^(i theta)/sqrt(q) equals L(1/2 + i t, chi).
    """

    q: int
    t: float
    theta: float

    @classmethod
    def from_t(cls, q: int, t: float) -> "ShiftPoint":
        return cls(q=q, t=t, theta=-t * math.log(q))

    @classmethod
    def from_theta(cls, q: int, theta: float) -> "ShiftPoint":
        return cls(q=q, t=-theta / math.log(q), theta=theta)

    @property
    def u(self) -> complex:
        return u_on_circle(self.q, self.theta)


class LPolynomial:
    """Complex coefficients of the L-polynomial of a non-principal character."""

    __slots__ = ("character", "coeffs", "_roots")

    def __init__(self, character: DirichletChar, coeffs: np.ndarray):
        self.character = character
        self.coeffs = np.asarray(coeffs, dtype=np.complex128)
        self._roots = None

    @property
    def q(self) -> int:
        return self.character.group.modulus.field.q

    @property
    def degree(self) -> int:
        """Index of the last coefficient above the trim tolerance."""
        nz = np.nonzero(np.abs(self.coeffs) > COEFF_TRIM_TOL)[0]
        return int(nz[-1]) if len(nz) else 0

    def eval_u(self, u: complex) -> complex:
        """Horner evaluation at u."""
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * u + c
        return acc

    def inverse_roots(self) -> np.ndarray:
        """The alpha_i with L(u) = prod (1 - alpha_i u), from the
        companion-matrix eigenvalues of the reversed polynomial."""
        if self._roots is None:
            trimmed = self.coeffs[: self.degree + 1]
            if len(trimmed) <= 1:
                self._roots = np.empty(0, dtype=np.complex128)
            else:
                self._roots = np.roots(trimmed)
        return self._roots

    def __repr__(self):
        return f"LPolynomial(chi#{self.character.index}, coeffs={self.coeffs})"


def l_eval_u(L: LPolynomial, u: complex) -> complex:
    """Horner evaluation of the L-polynomial at u."""
    return L.eval_u(u)


def l_inverse_roots(L: LPolynomial) -> np.ndarray:
    return L.inverse_roots()


def log_abs_l(L: LPolynomial, t: float) -> float:
    """log |L(1/2 + i t, chi)|; -inf at an on-circle zero."""
    value = abs(L.eval_u(u_at_shift(L.q, t)))
    return math.log(value) if value > 0 else -math.inf


# ---------------------------------------------------------------------------
# Coefficient computation
# ---------------------------------------------------------------------------


def l_coefficients(group: UnitGroup, chars: list[DirichletChar]) -> np.ndarray:
    """Coefficient matrix (len(chars) x deg(Q)) of the L-polynomials.

    Accumulates the per-degree monic character sums from one unit-value
    matrix, characters in the given order; chunked so memory stays at a few
    hundred thousand complex entries.
    """
    dQ = group.modulus.degree
    out = np.zeros((len(chars), dQ), dtype=np.complex128)
    rows_by_degree = [group.monic_unit_rows(n) for n in range(dQ)]
    chunk = max(1, (1 << 18) // max(1, len(group.residues)))
    for start in range(0, len(chars), chunk):
        batch = chars[start : start + chunk]
        K = np.array([c.exponents for c in batch], dtype=np.int64).reshape(
            len(batch), group.rank
        )
        V = character_values(group, K)
        for n, rows in enumerate(rows_by_degree):
            out[start : start + len(batch), n] = np.sum(V[rows, :], axis=0)
    return out


def l_polynomial(chi: DirichletChar) -> LPolynomial:
    """The L-polynomial of a non-principal character."""
    if chi.principal:
        raise ValueError(
            "the principal character has a pole factor and no L-polynomial"
        )
    coeffs = l_coefficients(chi.group, [chi])[0]
    return LPolynomial(chi, coeffs)


def monic_residue_counts(group: UnitGroup, n: int) -> np.ndarray:
    """How many monic polynomials of degree n land on each unit residue
    (reduction mod Q done by explicit division; non-units are dropped)."""
    field = group.modulus.field
    Q = group.modulus.poly
    counts = np.zeros(len(group.residues), dtype=np.int64)
    for i in range(field.q**n):
        f = monic_from_index(field, n, i)
        ridx = residue_index(f % Q, group.modulus.degree)
        row = group._row_of.get(ridx)
        if row is not None:
            counts[row] += 1
    return counts


def l_coefficient_probe(
    group: UnitGroup, chars: list[DirichletChar], n: int
) -> np.ndarray:
    """Coefficient n of each character's Dirichlet series computed by brute
    reduction of every monic polynomial of degree n; used to check that the
    coefficients beyond deg(Q)-1 really vanish."""
    counts = monic_residue_counts(group, n)
    K = np.array([c.exponents for c in chars], dtype=np.int64).reshape(
        len(chars), group.rank
    )
    V = character_values(group, K)
    return counts.astype(np.complex128) @ V


# ---------------------------------------------------------------------------
# Primitive family bundle with caching
# ---------------------------------------------------------------------------


@dataclass
class PrimitiveFamily:
    """A modulus together with its primitive characters and their
    L-polynomial coefficients (rows in canonical character order)."""

    modulus: Modulus
    group: UnitGroup
    characters: tuple[DirichletChar, ...]
    primitive_chars: tuple[DirichletChar, ...]
    coeffs: np.ndarray  # (n_primitive, deg Q)
    coeffs_from_cache: bool = False

    @property
    def n_primitive(self) -> int:
        return len(self.primitive_chars)

    def l_polynomials(self) -> list[LPolynomial]:
        return [
            LPolynomial(chi, row)
            for chi, row in zip(self.primitive_chars, self.coeffs)
        ]


def l_cache_name(modulus: Modulus) -> str:
    return f"lpoly_{modulus_slug(modulus)}.json"


def save_l_coefficients(family: PrimitiveFamily, path: Path) -> None:
    payload = {
        "schema": L_CACHE_SCHEMA,
        "q": family.modulus.field.q,
        "modulus": str(family.modulus),
        "coeffs": {
            str(chi.index): [[float(c.real), float(c.imag)] for c in row]
            for chi, row in zip(family.primitive_chars, family.coeffs)
        },
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True))


def load_l_coefficients(
    modulus: Modulus, primitive_chars, path: Path
) -> np.ndarray:
    payload = json.loads(path.read_text())
    if payload.get("schema") != L_CACHE_SCHEMA:
        raise ValueError("L cache schema mismatch")
    if payload["q"] != modulus.field.q or payload["modulus"] != str(modulus):
        raise ValueError("L cache key mismatch")
    table = payload["coeffs"]
    if sorted(int(k) for k in table) != [c.index for c in primitive_chars]:
        raise ValueError("L cache character set mismatch")
    out = np.zeros((len(primitive_chars), modulus.degree), dtype=np.complex128)
    for i, chi in enumerate(primitive_chars):
        row = table[str(chi.index)]
        out[i] = [complex(re, im) for re, im in row]
    if not np.allclose(out[:, 0], 1.0, atol=1e-9):
        raise ValueError("L cache sanity check failed (c_0 != 1)")
    return out


def primitive_family(
    modulus: Modulus, cache_dir: Path | None = None
) -> PrimitiveFamily:
    """Build (or load from cache) the primitive-character family data."""
    group = unit_group(modulus, cache_dir=cache_dir)
    chars = all_characters(group)
    primitive = tuple(c for c in chars if c.primitive)
    from_cache = False
    coeffs = None
    if cache_dir is not None:
        path = Path(cache_dir) / l_cache_name(modulus)
        if path.exists():
            coeffs = load_l_coefficients(modulus, primitive, path)
            from_cache = True
    if coeffs is None:
        coeffs = l_coefficients(group, list(primitive))
        if cache_dir is not None:
            fam = PrimitiveFamily(
                modulus, group, tuple(chars), primitive, coeffs
            )
            save_l_coefficients(fam, Path(cache_dir) / l_cache_name(modulus))
    return PrimitiveFamily(
        modulus=modulus,
        group=group,
        characters=tuple(chars),
        primitive_chars=primitive,
        coeffs=coeffs,
        coeffs_from_cache=from_cache,
    )


# ---------------------------------------------------------------------------
# Explicit pointwise bounds on log |L|
# ---------------------------------------------------------------------------


def _require_primitive(chi: DirichletChar):
    if chi.principal or not chi.primitive:
        raise ValueError("a non-principal primitive character is required")


def _h_from_x(q: int, x) -> int:
    h = round(math.log(float(x)) / math.log(q))
    if h < 1 or q**h != round(float(x)):
        raise ValueError(f"{x} is not a positive power of q={q}")
    return h


def log_l_bound_pointwise(chi: DirichletChar, t: float, h: int) -> float:
    """Upper bound for log |L(1/2 + it, chi)| with smoothing length h:

        m/h + (1/h) * Re sum over prime powers P^j with j*deg(P) <= h of
        chi(P)^j (h - j*deg P) / (j |P|^(j(1/2 + it + 1/(h log q)))),

    where m = deg(Q) - 1.  The sum is complete (no truncation); terms with
    j*deg(P) = h carry weight zero.
    """
    _require_primitive(chi)
    field = chi.group.modulus.field
    q = field.q
    m = chi.group.modulus.degree - 1
    if not (1 <= h <= m):
        raise ValueError(f"h must satisfy 1 <= h <= {m}, got {h}")
    lnq = math.log(q)
    sexp = 0.5 + 1.0 / (h * lnq)
    terms = []
    for d in range(1, h + 1):
        for P in enumerate_irreducible(field, d):
            val = chi(P)
            if val == 0:
                continue
            j = 1
            while j * d <= h:
                weight = h - j * d
                if weight:
                    denom = math.exp(j * d * lnq * sexp)
                    phase = cmath.exp(-1j * t * j * d * lnq)
                    terms.append(val**j * phase * weight / (j * denom))
                j += 1
    total = complex(np.sum(np.array(terms, dtype=np.complex128))) if terms else 0j
    return m / h + total.real / h


def log_l_bound_simplified(chi: DirichletChar, t: float, x) -> float:
    """The smoothed two-sum upper-bound value for log |L(1/2 + it, chi)|
    at cutoff x = q^h, without its bounded remainder:

        Re[ sum_{|P|<=x} chi(P)/|P|^(1/2+it+1/log x) * log(x/|P|)/log x
          + (1/2) sum_{|P|<=sqrt(x)} chi(P^2)/|P|^(1+2it) ] + log|Q|/log x.

    The caller records the defect log|L| - value as the empirical constant.
    """
    _require_primitive(chi)
    field = chi.group.modulus.field
    q = field.q
    h = _h_from_x(q, x)
    lnq = math.log(q)
    terms = []
    for d in range(1, h + 1):
        for P in enumerate_irreducible(field, d):
            val = chi(P)
            if val == 0:
                continue
            weight = (h - d) / h
            if weight:
                denom = math.exp(d * lnq * (0.5 + 1.0 / (h * lnq)))
                terms.append(
                    val * cmath.exp(-1j * t * d * lnq) * weight / denom
                )
            if 2 * d <= h:
                terms.append(
                    0.5
                    * val**2
                    * cmath.exp(-2j * t * d * lnq)
                    / math.exp(d * lnq)
                )
    total = complex(np.sum(np.array(terms, dtype=np.complex128))) if terms else 0j
    return total.real + chi.group.modulus.degree / h


def h_weight(f: FqPoly, spec) -> complex:
    """The shift-averaging weight (1/2) sum_j a_j |f|^(-i t_j)."""
    if f.is_zero:
        raise ValueError("h-weight of the zero polynomial is undefined")
    return _h_weight_deg(f.degree, f.field.q, spec)


def _h_weight_deg(degree: int, q: int, spec) -> complex:
    lnq = math.log(q)
    return 0.5 * sum(
        a * cmath.exp(-1j * t * degree * lnq) for a, t in zip(spec.a, spec.t)
    )


def shifted_log_bound(chi: DirichletChar, spec, x) -> float:
    """Upper-bound value (without its bounded remainder) for the weighted sum
    sum_j a_j log |L(1/2 + i t_j, chi)|:

        2 Re sum_{|P|<=x} h(P) chi(P)/|P|^(1/2+1/log x) * log(x/|P|)/log x
        + Re sum_{|P|<=sqrt(x)} h(P^2) chi(P^2)/|P| + a log|Q|/log x,

    with a = a_1 + ... + a_2k + 10 and h the shift-averaging weight.
    """
    _require_primitive(chi)
    field = chi.group.modulus.field
    q = field.q
    h = _h_from_x(q, x)
    lnq = math.log(q)
    a_total = sum(spec.a) + 10.0
    terms = []
    for d in range(1, h + 1):
        for P in enumerate_irreducible(field, d):
            val = chi(P)
            if val == 0:
                continue
            weight = (h - d) / h
            if weight:
                denom = math.exp(d * lnq * (0.5 + 1.0 / (h * lnq)))
                terms.append(
                    2 * _h_weight_deg(d, q, spec) * val * weight / denom
                )
            if 2 * d <= h:
                terms.append(
                    _h_weight_deg(2 * d, q, spec) * val**2 / math.exp(d * lnq)
                )
    total = complex(np.sum(np.array(terms, dtype=np.complex128))) if terms else 0j
    return total.real + a_total * chi.group.modulus.degree / h


def loglog_norm(modulus: Modulus) -> float:
    """log log |Q|; positive for every admissible modulus with |Q| > e."""
    val = modulus.log_norm
    if val <= 1.0:
        raise ValueError("log log |Q| undefined or nonpositive at this modulus")
    return math.log(val)


def crude_single_bound_ratio(L: LPolynomial, t: float) -> float:
    """log|L(1/2+it)| divided by log|Q|/loglog|Q|; the family-wise sup is the
    empirical constant in the crude single-value bound."""
    modulus = L.character.group.modulus
    return log_abs_l(L, t) / (modulus.log_norm / loglog_norm(modulus))
