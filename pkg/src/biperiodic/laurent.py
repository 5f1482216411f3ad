"""Exact two-variable Laurent polynomials and small matrices over them.

Coefficients are Python integers or :class:`fractions.Fraction`; floating
point only enters through :meth:`LaurentPoly2.evaluate` and
:meth:`LaurentPoly2.specialize_w`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, int]
Coefficient = int | Fraction


class ZeroSpecialization(ValueError):
    """Specializing one variable left the identically zero polynomial."""


def _normalize(c) -> Coefficient:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    if isinstance(c, bool) or not isinstance(c, (int, Fraction)):
        raise TypeError(f"coefficients must be int or Fraction, got {type(c).__name__}")
    return c


class LaurentPoly2:
    """Immutable Laurent polynomial in ``x`` and ``y`` with exact coefficients."""

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Mapping[Exponent, Coefficient] | Iterable[tuple[Exponent, Coefficient]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Coefficient] = {}
        for (a, b), c in items:
            e = (int(a), int(b))
            acc[e] = acc.get(e, 0) + _normalize(c)
        self._terms = {e: _normalize(c) for e, c in sorted(acc.items()) if c != 0}
        self._key = tuple(self._terms.items())

    @classmethod
    def monomial(cls, a: int = 0, b: int = 0, c: Coefficient = 1) -> "LaurentPoly2":
        return cls({(a, b): c})

    @classmethod
    def const(cls, c: Coefficient) -> "LaurentPoly2":
        return cls({(0, 0): c})

    @classmethod
    def zero(cls) -> "LaurentPoly2":
        return cls()

    @property
    def terms(self) -> dict[Exponent, Coefficient]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def support(self) -> list[Exponent]:
        return list(self._terms)

    def coefficient(self, a: int, b: int) -> Coefficient:
        return self._terms.get((a, b), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly2.const(other)
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"LaurentPoly2({str(self)!r})"

    def __str__(self):
        return format_poly(self)

    # ring operations

    @staticmethod
    def _coerce(other) -> "LaurentPoly2":
        if isinstance(other, LaurentPoly2):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPoly2.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly2(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly2({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, Coefficient] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                e = (a1 + a2, b1 + b2)
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly2(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            ((a, b), c), = self._terms.items()
            return LaurentPoly2.monomial(-a, -b, Fraction(1, 1) / c) ** (-k)
        result, base = LaurentPoly2.const(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: Coefficient) -> "LaurentPoly2":
        return LaurentPoly2({e: c * v for e, v in self._terms.items()})

    def shift(self, a: int, b: int) -> "LaurentPoly2":
        """Multiply by the monomial ``x^a y^b``."""
        return LaurentPoly2({(ea + a, eb + b): c for (ea, eb), c in self._terms.items()})

    def substitute_signs(self, sx: int = 1, sy: int = 1) -> "LaurentPoly2":
        """``p(sx * x, sy * y)`` for signs ``sx, sy`` in {1, -1}."""
        return LaurentPoly2({(a, b): c * sx ** (a % 2) * sy ** (b % 2) for (a, b), c in self._terms.items()})

    def inverted(self) -> "LaurentPoly2":
        """``p(1/x, 1/y)``."""
        return LaurentPoly2({(-a, -b): c for (a, b), c in self._terms.items()})

    def bounding_box(self) -> tuple[int, int, int, int]:
        if not self._terms:
            raise ValueError("zero polynomial has no support")
        xs = [a for a, _ in self._terms]
        ys = [b for _, b in self._terms]
        return min(xs), max(xs), min(ys), max(ys)

    def exact_div(self, other: "LaurentPoly2") -> "LaurentPoly2":
        """Quotient of an exact division; raises ``ArithmeticError`` if ``other`` does not divide."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly2()
        pa0, pa1, pb0, pb1 = self.bounding_box()
        qa0, qa1, qb0, qb1 = other.bounding_box()
        box = (pa0 - qa0, pa1 - qa1, pb0 - qb0, pb1 - qb1)
        lead_e = max(other._terms)
        lead_c = other._terms[lead_e]
        rem = dict(self._terms)
        quot: dict[Exponent, Coefficient] = {}
        while rem:
            e = max(rem)
            t = (e[0] - lead_e[0], e[1] - lead_e[1])
            if not (box[0] <= t[0] <= box[1] and box[2] <= t[1] <= box[3]):
                raise ArithmeticError("polynomial division is not exact")
            c = Fraction(rem[e]) / lead_c
            quot[t] = _normalize(c)
            for (qa, qb), qc in other._terms.items():
                k = (qa + t[0], qb + t[1])
                v = rem.get(k, 0) - c * qc
                if v == 0:
                    rem.pop(k, None)
                else:
                    rem[k] = v
        return LaurentPoly2(quot)

    # numerics

    def evaluate(self, z, w):
        """Value at ``(z, w)``; scalars or broadcastable numpy arrays."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        total = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        zp: dict[int, np.ndarray] = {}
        for (a, b), c in self._terms.items():
            if a not in zp:
                zp[a] = z ** a
            total = total + float(c) * zp[a] * w ** b
        return complex(total) if total.ndim == 0 else total

    def specialize_w(self, z0: complex, rtol: float = 1e-13) -> "ComplexPoly1":
        """The polynomial ``q(w) = p(z0, w) * w^shift`` with the smallest shift >= 0.

        Coefficients below ``rtol`` times the coefficient scale are treated
        as exact zeros at both ends of the support.
        """
        if self.is_zero():
            raise ZeroSpecialization("zero polynomial")
        _, _, b0, b1 = self.bounding_box()
        coeffs = np.zeros(b1 - b0 + 1, dtype=complex)
        scale = 0.0
        for (a, b), c in self._terms.items():
            term = complex(float(c) * z0 ** a)
            coeffs[b - b0] += term
            scale += abs(term)
        nz = np.flatnonzero(np.abs(coeffs) > rtol * scale)
        if nz.size == 0:
            raise ZeroSpecialization(f"p(z0, w) vanishes identically at z0 = {z0}")
        lo, hi = int(nz[0]), int(nz[-1])
        low = b0 + lo  # lowest surviving power of w
        if low >= 0:
            return ComplexPoly1((0j,) * low + tuple(coeffs[lo : hi + 1]), shift=0)
        return ComplexPoly1(tuple(coeffs[lo : hi + 1]), shift=-low)

    def is_reciprocal(self) -> bool:
        """Whether ``p(x, y) == p(1/x, 1/y)`` exactly."""
        return self == self.inverted()


def conjugate_reciprocal_check(p: LaurentPoly2) -> bool:
    return p.is_reciprocal()


X = LaurentPoly2.monomial(1, 0)
Y = LaurentPoly2.monomial(0, 1)
ONE = LaurentPoly2.const(1)


@dataclass(frozen=True)
class ComplexPoly1:
    """Dense one-variable polynomial, coefficients in ascending degree.

    ``shift`` records the power of ``w`` that was multiplied in to clear
    negative exponents.
    """

    coeffs: tuple[complex, ...]
    shift: int = 0

    def __post_init__(self):
        cs = list(self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __call__(self, w):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * w + c
        return acc


# ---------------------------------------------------------------------------
# Matrices and determinants
# ---------------------------------------------------------------------------


class LaurentMatrix:
    """Dense rectangular matrix of :class:`LaurentPoly2` entries."""

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(LaurentPoly2._coerce(e) for e in row) for row in rows)
        if not self.rows or not self.rows[0]:
            raise ValueError("matrix must have at least one entry")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValueError("ragged matrix")
        if any(e is NotImplemented for r in self.rows for e in r):
            raise TypeError("matrix entries must be Laurent polynomials or exact scalars")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "LaurentMatrix":
        return cls([[0] * ncols for _ in range(nrows)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def evaluate(self, z: complex, w: complex) -> np.ndarray:
        return np.array([[e.evaluate(z, w) for e in row] for row in self.rows], dtype=complex)

    def det(self) -> LaurentPoly2:
        return det(self)


COFACTOR_MAX_DIM = 8


def det(m: LaurentMatrix | Sequence[Sequence]) -> LaurentPoly2:
    """Exact determinant.

    Memoized cofactor expansion up to dimension 8, fraction-free (Bareiss)
    elimination above.
    """
    if not isinstance(m, LaurentMatrix):
        m = LaurentMatrix(m)
    n, k = m.shape
    if n != k:
        raise ValueError(f"determinant of a non-square {n}x{k} matrix")
    if n <= COFACTOR_MAX_DIM:
        return _det_cofactor(m.rows)
    return _det_bareiss(m.rows)


def _det_cofactor(rows) -> LaurentPoly2:
    # partial[mask]: signed sum over placements of the first popcount(mask) rows into columns `mask`
    n = len(rows)
    partial = {0: LaurentPoly2.const(1)}
    for r in range(n):
        nxt: dict[int, LaurentPoly2] = {}
        for mask, val in partial.items():
            for j in range(n):
                if mask >> j & 1 or rows[r][j].is_zero():
                    continue
                term = val * rows[r][j]
                if bin(mask >> (j + 1)).count("1") % 2:
                    term = -term
                key = mask | (1 << j)
                nxt[key] = nxt[key] + term if key in nxt else term
        partial = {k: v for k, v in nxt.items() if not v.is_zero()}
        if not partial:
            return LaurentPoly2()
    return partial.get((1 << n) - 1, LaurentPoly2())


def _det_bareiss(rows) -> LaurentPoly2:
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = LaurentPoly2.const(1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return LaurentPoly2()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Text format: terms in lexicographic exponent order, "c*x^a*y^b"
# ---------------------------------------------------------------------------


def _format_var(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def format_poly(p: LaurentPoly2) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for (a, b), c in p.items():
        mono = [_format_var(v, e) for v, e in (("x", a), ("y", b)) if e != 0]
        mag = abs(c)
        if mono and mag == 1:
            body = "*".join(mono)
        else:
            body = "*".join([str(mag)] + mono)
        neg = c < 0
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


_TERM = re.compile(
    r"\s*([+-])?\s*"
    r"(?:(\d+(?:/\d+)?)(?:\s*\*\s*)?)?"
    r"((?:[xy](?:\^-?\d+)?)(?:\s*\*\s*[xy](?:\^-?\d+)?)*)?"
    r"\s*"
)


def parse_poly(text: str) -> LaurentPoly2:
    """Inverse of :func:`format_poly`; also accepts any order and spacing of terms."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    pos, terms, first = 0, [], True
    while pos < len(s):
        mt = _TERM.match(s, pos)
        sign, num, mono = mt.group(1), mt.group(2), mt.group(3)
        if mt.end() == pos or (num is None and not mono) or (sign is None and not first):
            raise ValueError(f"cannot parse polynomial near {s[pos:]!r}")
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        a = b = 0
        for factor in re.split(r"\s*\*\s*", mono) if mono else []:
            var, _, exp = factor.partition("^")
            e = int(exp) if exp else 1
            if var == "x":
                a += e
            else:
                b += e
        terms.append(((a, b), c))
        pos, first = mt.end(), False
    return LaurentPoly2(terms)
