"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``dim`` variables is a mapping from exponent tuples (one
entry per variable) to nonzero rational coefficients.  All arithmetic is
exact: coefficients are :class:`fractions.Fraction` values, zero terms are
never stored, and equality is plain term-by-term comparison.

Terms are iterated and serialized in a fixed order -- total degree first,
then the exponent tuple, both descending -- so equal polynomials always
print and serialize identically.  The same order doubles as the monomial
order for exact division (the leading term is the maximum).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence, Union

MultiIndex = tuple[int, ...]
Rational = Union[int, Fraction, str]


def as_fraction(value: Rational) -> Fraction:
    """Coerce an int, Fraction, or "p/q" string to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def format_fraction(value: Fraction) -> str:
    """Render a rational as "p" or "p/q" (the serialization format)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# multi-index helpers

def mi_degree(a: MultiIndex) -> int:
    return sum(a)


def mi_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def mi_factorial(a: MultiIndex) -> int:
    out = 1
    for e in a:
        out *= factorial(e)
    return out


def mi_unit(dim: int, index: int) -> MultiIndex:
    if not 0 <= index < dim:
        raise IndexError(f"variable index {index} out of range for dim {dim}")
    return tuple(1 if i == index else 0 for i in range(dim))


def mi_divides(a: MultiIndex, b: MultiIndex) -> bool:
    """True iff x^a divides x^b componentwise."""
    return all(x <= y for x, y in zip(a, b))


def term_order_key(a: MultiIndex) -> tuple[int, MultiIndex]:
    """Sort key for the canonical term order (max = leading term)."""
    return (sum(a), a)


@lru_cache(maxsize=None)
def monomial_exponents(dim: int, degree: int) -> tuple[MultiIndex, ...]:
    """All exponent tuples of the given total degree, in canonical order.

    The order is lexicographically descending, e.g. for two variables and
    degree 2: (2,0), (1,1), (0,2).
    """
    if dim < 0:
        raise ValueError("dimension must be nonnegative")
    if degree < 0:
        return ()
    if dim == 0:
        return ((),) if degree == 0 else ()
    if dim == 1:
        return ((degree,),)
    out = []
    for first in range(degree, -1, -1):
        for rest in monomial_exponents(dim - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


def monomials_up_to(dim: int, bound: int) -> Iterator[MultiIndex]:
    """All exponent tuples of total degree <= bound, degree by degree."""
    for d in range(bound + 1):
        yield from monomial_exponents(dim, d)


# ---------------------------------------------------------------------------
# polynomials

class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int,
                 terms: Mapping[MultiIndex, Rational]
                 | Iterable[tuple[MultiIndex, Rational]] = ()):
        if dim < 0:
            raise ValueError("dimension must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[MultiIndex, Fraction] = {}
        for exponent, coeff in items:
            exponent = tuple(exponent)
            if len(exponent) != dim or any(e < 0 for e in exponent):
                raise ValueError(f"bad exponent {exponent} for dim {dim}")
            c = acc.get(exponent, Fraction(0)) + as_fraction(coeff)
            if c:
                acc[exponent] = c
            else:
                acc.pop(exponent, None)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_terms", acc)

    @classmethod
    def _raw(cls, dim: int, terms: dict[MultiIndex, Fraction]) -> "Poly":
        # internal fast path: terms already normalized (no zeros, right dim)
        self = object.__new__(cls)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_terms", terms)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls._raw(dim, {})

    @classmethod
    def one(cls, dim: int) -> "Poly":
        return cls.constant(dim, 1)

    @classmethod
    def constant(cls, dim: int, value: Rational) -> "Poly":
        c = as_fraction(value)
        return cls._raw(dim, {(0,) * dim: c} if c else {})

    @classmethod
    def variable(cls, dim: int, index: int) -> "Poly":
        return cls._raw(dim, {mi_unit(dim, index): Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, exponent: MultiIndex,
                 coeff: Rational = 1) -> "Poly":
        return cls(dim, [(tuple(exponent), coeff)])

    # -- inspection

    def terms(self) -> Iterator[tuple[MultiIndex, Fraction]]:
        """Yield (exponent, coefficient) pairs in canonical order."""
        for a in sorted(self._terms, key=term_order_key, reverse=True):
            yield a, self._terms[a]

    def coefficient(self, exponent: MultiIndex) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(a) for a in self._terms)

    def homogeneous_degree(self) -> int | None:
        """The common total degree of all terms, or None (zero or mixed)."""
        degrees = {sum(a) for a in self._terms}
        if len(degrees) != 1:
            return None
        return degrees.pop()

    def leading_term(self) -> tuple[MultiIndex, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        a = max(self._terms, key=term_order_key)
        return a, self._terms[a]

    def constant_value(self) -> Fraction | None:
        """The value of a constant polynomial, or None if non-constant."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1:
            ((a, c),) = self._terms.items()
            if sum(a) == 0:
                return c
        return None

    # -- ring operations

    def _check_dim(self, other: "Poly") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_dim(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            s = out.get(a, Fraction(0)) + c
            if s:
                out[a] = s
            else:
                out.pop(a, None)
        return Poly._raw(self.dim, out)

    def __sub__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly._raw(self.dim, {a: -c for a, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check_dim(other)
            out: dict[MultiIndex, Fraction] = {}
            for a, c in self._terms.items():
                for b, d in other._terms.items():
                    key = mi_add(a, b)
                    s = out.get(key, Fraction(0)) + c * d
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
            return Poly._raw(self.dim, out)
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            if not c:
                return Poly.zero(self.dim)
            return Poly._raw(self.dim, {a: v * c for a, v in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.dim)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._terms.items())))

    # -- calculus and substitution

    def partial_derivative(self, order: MultiIndex) -> "Poly":
        """Apply the iterated partial derivative given by a multi-index."""
        order = tuple(order)
        if len(order) != self.dim:
            raise ValueError("multi-index length must equal the dimension")
        out: dict[MultiIndex, Fraction] = {}
        for a, c in self._terms.items():
            if not mi_divides(order, a):
                continue
            factor = 1
            for e, k in zip(a, order):
                for step in range(k):
                    factor *= e - step
            key = tuple(e - k for e, k in zip(a, order))
            s = out.get(key, Fraction(0)) + c * factor
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Poly._raw(self.dim, out)

    def substitute_variable(self, index: int, replacement: "Poly") -> "Poly":
        """Replace one variable by a polynomial in the same variables."""
        self._check_dim(replacement)
        if not 0 <= index < self.dim:
            raise IndexError(f"variable index {index} out of range")
        buckets: dict[int, dict[MultiIndex, Fraction]] = {}
        for a, c in self._terms.items():
            stripped = tuple(0 if i == index else e for i, e in enumerate(a))
            bucket = buckets.setdefault(a[index], {})
            bucket[stripped] = bucket.get(stripped, Fraction(0)) + c
        out = Poly.zero(self.dim)
        power = Poly.one(self.dim)
        for k in range(max(buckets, default=0) + 1):
            if k:
                power = power * replacement
            if k in buckets:
                out = out + Poly(self.dim, buckets[k]) * power
        return out

    def substitute_affine(self, shift: Sequence[Rational]) -> "Poly":
        """Translate every variable: x_i -> x_i + shift_i, exactly."""
        if len(shift) != self.dim:
            raise ValueError("shift length must equal the dimension")
        out = self
        for i, w in enumerate(shift):
            w = as_fraction(w)
            if not w:
                continue
            replacement = Poly(self.dim, {mi_unit(self.dim, i): Fraction(1),
                                          (0,) * self.dim: w})
            out = out.substitute_variable(i, replacement)
        return out

    def substitute_linear(self, rows: Sequence[Sequence[Rational]]) -> "Poly":
        """Simultaneously replace x_i by the linear form given by rows[i]."""
        if len(rows) != self.dim or any(len(row) != self.dim for row in rows):
            raise ValueError("replacement matrix must be square of the dimension")
        forms = [Poly(self.dim, {mi_unit(self.dim, j): as_fraction(c)
                                 for j, c in enumerate(row) if as_fraction(c)})
                 for row in rows]
        powers: list[list[Poly]] = [[Poly.one(self.dim)] for _ in forms]
        out = Poly.zero(self.dim)
        for a, c in self._terms.items():
            term = Poly.constant(self.dim, c)
            for i, e in enumerate(a):
                while len(powers[i]) <= e:
                    powers[i].append(powers[i][-1] * forms[i])
                term = term * powers[i][e]
            out = out + term
        return out

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        """Evaluate at an exact rational point."""
        if len(point) != self.dim:
            raise ValueError("point length must equal the dimension")
        values = [as_fraction(v) for v in point]
        total = Fraction(0)
        for a, c in self._terms.items():
            term = c
            for e, v in zip(a, values):
                if e:
                    term *= v ** e
            total += term
        return total

    # -- presentation

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({self.dim}, {format_poly(self)!r})"

    def to_json(self) -> list:
        """Serialize as [[exponents, "p/q"], ...] in canonical term order."""
        return [[list(a), format_fraction(c)] for a, c in self.terms()]


def poly_from_json(data: Iterable, dim: int) -> Poly:
    """Parse the [[exponents, "p/q"], ...] serialization."""
    return Poly(dim, [(tuple(entry[0]), as_fraction(entry[1]))
                      for entry in data])


def variables(dim: int) -> tuple[Poly, ...]:
    """The coordinate polynomials x1..xn, handy for building examples."""
    return tuple(Poly.variable(dim, i) for i in range(dim))


def format_poly(p: Poly, names: Sequence[str] | None = None) -> str:
    """Human-readable rendering with variables named x1..xn by default."""
    if p.is_zero():
        return "0"
    if names is None:
        names = [f"x{i + 1}" for i in range(p.dim)]
    pieces = []
    for a, c in p.terms():
        factors = []
        for name, e in zip(names, a):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if not factors:
            body = format_fraction(abs(c))
        elif abs(c) == 1:
            body = "*".join(factors)
        else:
            body = "*".join([format_fraction(abs(c))] + factors)
        sign = "-" if c < 0 else "+"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def exact_divide(p: Poly, q: Poly) -> Poly | None:
    """Return r with p = q*r, or None when q does not divide p exactly.

    Single-divisor reduction by leading terms: any term whose monomial is
    not divisible by the divisor's leading monomial certifies failure.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    lq, cq = q.leading_term()
    quotient = Poly.zero(p.dim)
    remainder = p
    while not remainder.is_zero():
        lr, cr = remainder.leading_term()
        if not mi_divides(lq, lr):
            return None
        t = Poly.monomial(p.dim, tuple(x - y for x, y in zip(lr, lq)), cr / cq)
        quotient = quotient + t
        remainder = remainder - t * q
    return quotient


# ---------------------------------------------------------------------------
# linear forms

class LinearForm:
    """A nonzero rational covector, canonically scaled.

    The first nonzero coefficient is normalized to 1, so two forms define
    the same hyperplane exactly when they compare equal.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Sequence[Rational]):
        coeffs = tuple(as_fraction(c) for c in coefficients)
        pivot = next((i for i, c in enumerate(coeffs) if c), None)
        if pivot is None:
            raise ValueError("a linear form must be nonzero")
        lead = coeffs[pivot]
        object.__setattr__(self, "_coeffs",
                           tuple(c / lead for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("LinearForm is immutable")

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def dim(self) -> int:
        return len(self._coeffs)

    @property
    def pivot(self) -> int:
        """Index of the first nonzero (hence unit) coefficient."""
        return next(i for i, c in enumerate(self._coeffs) if c)

    def to_poly(self) -> Poly:
        return Poly(self.dim, {mi_unit(self.dim, i): c
                               for i, c in enumerate(self._coeffs) if c})

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        if len(point) != self.dim:
            raise ValueError("point length must equal the dimension")
        return sum((c * as_fraction(v) for c, v in zip(self._coeffs, point)),
                   Fraction(0))

    def reduce(self, p: Poly) -> Poly:
        """Image of p modulo this form, via pivot-variable substitution.

        Substitutes the pivot variable by the affine-linear expression that
        solves the form to zero; the result is zero exactly when the form
        divides p.
        """
        if p.dim != self.dim:
            raise ValueError(f"dimension mismatch: {p.dim} vs {self.dim}")
        pivot = self.pivot
        replacement = Poly(self.dim,
                           {mi_unit(self.dim, j): -c
                            for j, c in enumerate(self._coeffs)
                            if j != pivot and c})
        return p.substitute_variable(pivot, replacement)

    def divides(self, p: Poly) -> bool:
        """True iff p lies in the principal ideal generated by this form."""
        return self.reduce(p).is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __str__(self) -> str:
        return format_poly(self.to_poly())

    def __repr__(self) -> str:
        return f"LinearForm({self})"

    def to_json(self) -> list[str]:
        return [format_fraction(c) for c in self._coeffs]


_TERM_RE = re.compile(r"\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([A-Za-z]\w*)?")

_ALIASES = {"x": 0, "y": 1, "z": 2}


def parse_linear_form(text: str, dim: int) -> LinearForm:
    """Parse "x1 - x2", "2x+3y", ... into a linear form.

    Variables are x1..xn; the aliases x, y, z are accepted when dim <= 3.
    """
    coeffs = [Fraction(0)] * dim
    pos = 0
    seen_any = False
    while pos < len(text):
        match = _TERM_RE.match(text, pos)
        if not match or match.end() == pos:
            raise ValueError(f"cannot parse linear form {text!r} at {pos}")
        sign, number, name = match.groups()
        if number is None and name is None:
            if text[pos:].strip():
                raise ValueError(f"cannot parse linear form {text!r} at {pos}")
            break
        if name is None:
            raise ValueError(f"constant term {number!r} in linear form {text!r}")
        if name.startswith("x") and name[1:].isdigit():
            index = int(name[1:]) - 1
        elif name in _ALIASES and dim <= 3:
            index = _ALIASES[name]
        else:
            raise ValueError(f"unknown variable {name!r} for dim {dim}")
        if not 0 <= index < dim:
            raise ValueError(f"variable {name!r} out of range for dim {dim}")
        value = Fraction(number) if number else Fraction(1)
        coeffs[index] += -value if sign == "-" else value
        pos = match.end()
        seen_any = True
    if not seen_any:
        raise ValueError("empty linear form")
    return LinearForm(coeffs)
