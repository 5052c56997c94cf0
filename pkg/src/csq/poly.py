"""Exact polynomial families: Hermite, Laguerre, terminating 1F1 and complex Hermite.

Coefficients are Python ints / ``fractions.Fraction`` so factorial growth never
overflows and identities can be checked with ``==`` instead of a tolerance.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping

#: total degree above which float evaluation of a bivariate poly is flagged
DEGREE_CAP = 40


class PrecisionWarning(UserWarning):
    """Float evaluation of a high-degree exact polynomial."""


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------


class UnivariatePoly:
    """Polynomial in one variable with exact rational coefficients.

    ``coeffs[k]`` multiplies ``x**k``. Trailing zeros are stripped, so the
    zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational | int] = ()):
        cs = [_norm(Fraction(c)) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @classmethod
    def x(cls) -> "UnivariatePoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        # Horner; exact for int/Fraction input, float otherwise
        if not isinstance(x, Rational) and self.degree > DEGREE_CAP:
            warnings.warn(f"float evaluation of degree {self.degree} > {DEGREE_CAP}", PrecisionWarning, stacklevel=2)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, Rational) else float(c))
        return acc

    def __add__(self, other):
        other = _as_upoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UnivariatePoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return UnivariatePoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_upoly(other))

    def __rsub__(self, other):
        return _as_upoly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return UnivariatePoly(c * other for c in self.coeffs)
        other = _as_upoly(other)
        if not self.coeffs or not other.coeffs:
            return UnivariatePoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UnivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = UnivariatePoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UnivariatePoly((other,))
        if not isinstance(other, UnivariatePoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def derivative(self) -> "UnivariatePoly":
        return UnivariatePoly(k * c for k, c in enumerate(self.coeffs) if k)

    def float_coeffs(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def __repr__(self):
        return f"UnivariatePoly({[str(c) for c in self.coeffs]})"


def _as_upoly(p) -> UnivariatePoly:
    if isinstance(p, UnivariatePoly):
        return p
    return UnivariatePoly((p,))


@lru_cache(maxsize=None)
def hermite(n: int) -> UnivariatePoly:
    """Physicists' Hermite polynomial ``H_n`` from the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return UnivariatePoly((1,))
    if n == 1:
        return UnivariatePoly((0, 2))
    x = UnivariatePoly.x()
    return 2 * x * hermite(n - 1) - 2 * (n - 1) * hermite(n - 2)


@lru_cache(maxsize=None)
def laguerre(s: int, alpha: int) -> UnivariatePoly:
    """Generalized Laguerre ``L_s^{(alpha)}``.

    Uses the explicit sum ``sum_k (-1)^k C(s+alpha, s-k) x^k / k!``.
    """
    if s < 0 or alpha < 0:
        raise ValueError("s and alpha must be nonnegative")
    return UnivariatePoly(
        Fraction((-1) ** k * math.comb(s + alpha, s - k), math.factorial(k))
        for k in range(s + 1)
    )


def hyp1f1_poly(s: int, b) -> UnivariatePoly:
    """Terminating ``1F1(-s; b; x)`` as a polynomial of degree ``s``.

    ``b`` may be any positive rational. Only the finite sum is ever formed.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    b = Fraction(b)
    if b <= 0 and b.denominator == 1 and -b < s:
        raise ValueError("1F1(-s; b; x) undefined for nonpositive integer b > -s")
    coeffs = [Fraction(1)]
    term = Fraction(1)
    for k in range(s):
        term = term * (k - s) / ((b + k) * (k + 1))
        coeffs.append(term)
    return UnivariatePoly(coeffs)


# ---------------------------------------------------------------------------
# bivariate (z, zbar)
# ---------------------------------------------------------------------------


class BivariatePoly:
    """Polynomial in ``z`` and ``zbar`` stored as ``{(i, j): coeff}``.

    ``(i, j)`` is the monomial ``z**i * zbar**j``. Zero coefficients are never
    stored. Coefficients are ints for every complex Hermite polynomial;
    rationals appear only after scaling by fractions (e.g. the ``z/2`` shift in
    the Gaussian-weighted ladder relations).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Rational | int] | None = None):
        clean = {}
        for key, c in (terms or {}).items():
            c = _norm(Fraction(c))
            if c != 0:
                clean[(int(key[0]), int(key[1]))] = c
        self.terms: dict[tuple[int, int], int | Fraction] = clean

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "BivariatePoly":
        return cls({(i, j): c})

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BivariatePoly(out)

    def __neg__(self):
        return BivariatePoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BivariatePoly({k: c * other for k, c in self.terms.items()})
        out: dict[tuple[int, int], int | Fraction] = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                key = (i + k, j + l)
                out[key] = out.get(key, 0) + a * b
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def d_z(self) -> "BivariatePoly":
        return BivariatePoly({(i - 1, j): i * c for (i, j), c in self.terms.items() if i})

    def d_zbar(self) -> "BivariatePoly":
        return BivariatePoly({(i, j - 1): j * c for (i, j), c in self.terms.items() if j})

    def conjugate(self) -> "BivariatePoly":
        """Swap the roles of ``z`` and ``zbar`` (coefficients are real)."""
        return BivariatePoly({(j, i): c for (i, j), c in self.terms.items()})

    def ratio_to(self, other: "BivariatePoly") -> Fraction | None:
        """Return ``k`` with ``self == k * other`` exactly, or None."""
        if not other.terms:
            return Fraction(0) if not self.terms else None
        if self.terms.keys() != other.terms.keys():
            return None
        key = next(iter(other.terms))
        k = Fraction(self.terms[key]) / Fraction(other.terms[key])
        if all(Fraction(c) == k * other.terms[m] for m, c in self.terms.items()):
            return k
        return None

    def __call__(self, z):
        if isinstance(z, Rational):
            return sum(c * z ** (i + j) for (i, j), c in self.terms.items())
        if self.degree > DEGREE_CAP:
            warnings.warn(
                f"float evaluation of degree-{self.degree} polynomial "
                f"(cap {DEGREE_CAP}); expect loss of relative precision",
                PrecisionWarning,
                stacklevel=2,
            )
        z = complex(z)
        zb = z.conjugate()
        return sum(float(c) * z**i * zb**j for (i, j), c in self.terms.items())

    def evaluate_grid(self, z):
        """Vectorised float evaluation on a numpy array of complex points."""
        import numpy as np

        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        out = np.zeros_like(z)
        for (i, j), c in self.terms.items():
            out += float(c) * z**i * zb**j
        return out

    def to_json(self) -> str:
        rows = [[i, j, str(c)] for (i, j), c in sorted(self.terms.items())]
        return json.dumps({"terms": rows})

    @classmethod
    def from_json(cls, text: str) -> "BivariatePoly":
        data = json.loads(text)
        return cls({(i, j): Fraction(c) for i, j, c in data["terms"]})

    def __repr__(self):
        return f"BivariatePoly({dict(sorted(self.terms.items()))})"


@lru_cache(maxsize=None)
def complex_hermite(r: int, s: int) -> BivariatePoly:
    """``h^{r,s}(z, zbar) = sum_k (-1)^k/k! r!s!/((r-k)!(s-k)!) z^{s-k} zbar^{r-k}``."""
    if r < 0 or s < 0:
        raise ValueError("r and s must be nonnegative")
    terms = {}
    fr, fs = math.factorial(r), math.factorial(s)
    for k in range(min(r, s) + 1):
        c = (-1) ** k * fr * fs // (
            math.factorial(k) * math.factorial(r - k) * math.factorial(s - k)
        )
        terms[(s - k, r - k)] = c
    return BivariatePoly(terms)


def laguerre_form(r: int, s: int) -> BivariatePoly:
    """``(-1)^s s! zbar^{r-s} L_s^{(r-s)}(z zbar)`` expanded, for ``r >= s``."""
    if r < s:
        raise ValueError("Laguerre form needs r >= s")
    n = r - s
    lag = laguerre(s, n)
    sign_fact = (-1) ** s * math.factorial(s)
    return BivariatePoly(
        {(k, k + n): sign_fact * c for k, c in enumerate(lag.coeffs)}
    )


# ---------------------------------------------------------------------------
# Gaussian-weighted basis functions phi_{n;s}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedBasisFunction:
    """``scale * sqrt(norm_sq) * exp(-|z|^2/2) * poly(z, zbar)``.

    The Gaussian is kept symbolic. ``norm_sq`` is the exact squared
    normalisation ``1/(s!(s+n)!)`` for the basis element; ``scale`` lets
    derived functions (after a ladder step) stay exact.
    """

    sector: int
    index: int
    poly: BivariatePoly
    norm_sq: Fraction
    gaussian_halfweight: bool = True

    def __call__(self, z):
        val = self.poly(complex(z))
        if self.gaussian_halfweight:
            val *= math.exp(-abs(z) ** 2 / 2)
        return math.sqrt(self.norm_sq) * val

    def evaluate_grid(self, z):
        import numpy as np

        z = np.asarray(z, dtype=complex)
        val = self.poly.evaluate_grid(z)
        if self.gaussian_halfweight:
            val = val * np.exp(-np.abs(z) ** 2 / 2)
        return math.sqrt(self.norm_sq) * val

    def weighted_d_zbar_plus_half_z(self) -> BivariatePoly:
        """Polynomial part of ``(d/dzbar + z/2)`` applied to the weighted function.

        The Gaussian derivative contributes ``-z/2 * poly``; the result (before
        the common ``sqrt(norm_sq) e^{-|z|^2/2}`` factor) is returned exactly.
        """
        half_z = BivariatePoly.monomial(1, 0, Fraction(1, 2))
        return self.poly.d_zbar() - half_z * self.poly + half_z * self.poly

    def weighted_minus_d_z_plus_half_zbar(self) -> BivariatePoly:
        """Polynomial part of ``(-d/dz + zbar/2)`` applied to the weighted function."""
        half_zb = BivariatePoly.monomial(0, 1, Fraction(1, 2))
        # d/dz e^{-z zbar/2} = -(zbar/2) e^{...}
        return -(self.poly.d_z() - half_zb * self.poly) + half_zb * self.poly


def phi(s: int, n: int) -> WeightedBasisFunction:
    """Orthonormal ``phi_{n;s} = e^{-|z|^2/2} h^{s+n,s} / sqrt(s!(s+n)!)``."""
    if s < 0 or n < 0:
        raise ValueError("s and n must be nonnegative")
    return WeightedBasisFunction(
        sector=s,
        index=n,
        poly=complex_hermite(s + n, s),
        norm_sq=Fraction(1, math.factorial(s) * math.factorial(s + n)),
    )


def _sqrt_ratio_matches(k: Fraction | None, target_sq: Fraction) -> bool:
    return k is not None and k >= 0 and k * k == target_sq


def ladder_check(s: int, n: int) -> bool:
    """Verify the four h-ladder and two phi-ladder relations exactly at (s, n).

    h relations::

        (-d/dz + zbar) h^{s+n,s}   = h^{s+n+1,s}
        d/dzbar h^{s+n+1,s}        = (s+n+1) h^{s+n,s}
        (-d/dzbar + z) h^{s+n,s}   = h^{s+n,s+1}
        d/dz h^{s+n,s+1}           = (s+1) h^{s+n,s}

    phi relations (with the Gaussian half-weight differentiated symbolically)::

        (d/dzbar + z/2) phi_{n+1;s}  = sqrt(s+n+1) phi_{n;s}
        (-d/dz + zbar/2) phi_{n;s}   = sqrt(s+n+1) phi_{n+1;s}
    """
    h = complex_hermite
    z = BivariatePoly.monomial(1, 0)
    zb = BivariatePoly.monomial(0, 1)
    base = h(s + n, s)
    ok = [
        -base.d_z() + zb * base == h(s + n + 1, s),
        h(s + n + 1, s).d_zbar() == (s + n + 1) * base,
        -base.d_zbar() + z * base == h(s + n, s + 1),
        h(s + n, s + 1).d_z() == (s + 1) * base,
    ]

    # phi relations: lhs_poly * sqrt(nu_lhs) == sqrt(s+n+1) * sqrt(nu_rhs) * rhs_poly
    # <=> lhs_poly == k * rhs_poly with k^2 == (s+n+1) nu_rhs / nu_lhs, k >= 0
    up, lo = phi(s, n + 1), phi(s, n)
    k1 = up.weighted_d_zbar_plus_half_z().ratio_to(lo.poly)
    ok.append(_sqrt_ratio_matches(k1, (s + n + 1) * lo.norm_sq / up.norm_sq))
    k2 = lo.weighted_minus_d_z_plus_half_zbar().ratio_to(up.poly)
    ok.append(_sqrt_ratio_matches(k2, (s + n + 1) * up.norm_sq / lo.norm_sq))
    return all(ok)


__all__ = [
    "DEGREE_CAP",
    "PrecisionWarning",
    "UnivariatePoly",
    "BivariatePoly",
    "WeightedBasisFunction",
    "hermite",
    "laguerre",
    "hyp1f1_poly",
    "complex_hermite",
    "laguerre_form",
    "phi",
    "ladder_check",
]
