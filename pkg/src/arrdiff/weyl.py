"""Homogeneous differential operators of a fixed order.

An order-m operator is a finite sum of polynomial coefficients times
order-m partial-derivative monomials.  Operators act on polynomials
exactly, form a module over the polynomial ring, and support the two
pieces of operator algebra the rest of the package needs: commutators
with linear forms (which drop the order by one) and products of
operators acting on disjoint variable blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .linalg import invert
from .qpoly import (LinearForm, MultiIndex, Poly, Rational, as_fraction,
                    format_poly, mi_add, mi_degree, mi_factorial,
                    monomial_exponents, poly_from_json, term_order_key)


class DiffOp:
    """Sum of terms coefficient * d^a with every |a| equal to the order."""

    __slots__ = ("dim", "order", "_coeffs")

    def __init__(self, dim: int, order: int,
                 coeffs: Mapping[MultiIndex, Poly]
                 | Iterable[tuple[MultiIndex, Poly]] = ()):
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        if order < 0:
            raise ValueError("order must be nonnegative")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[MultiIndex, Poly] = {}
        for exponent, poly in items:
            exponent = tuple(exponent)
            if len(exponent) != dim or mi_degree(exponent) != order:
                raise ValueError(
                    f"derivative exponent {exponent} is not of order {order}")
            if poly.dim != dim:
                raise ValueError("coefficient dimension mismatch")
            if exponent in acc:
                poly = acc[exponent] + poly
            if poly.is_zero():
                acc.pop(exponent, None)
            else:
                acc[exponent] = poly
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_coeffs", acc)

    def __setattr__(self, name, value):
        raise AttributeError("DiffOp is immutable")

    @classmethod
    def zero(cls, dim: int, order: int) -> "DiffOp":
        return cls(dim, order)

    @classmethod
    def identity(cls, dim: int) -> "DiffOp":
        """The order-0 operator multiplying by 1."""
        return cls(dim, 0, {(0,) * dim: Poly.one(dim)})

    @classmethod
    def single(cls, dim: int, exponent: MultiIndex,
               coeff: Poly | Rational = 1) -> "DiffOp":
        """One term coeff * d^exponent."""
        poly = coeff if isinstance(coeff, Poly) else Poly.constant(dim, coeff)
        return cls(dim, mi_degree(tuple(exponent)), {tuple(exponent): poly})

    # -- inspection

    def terms(self) -> Iterable[tuple[MultiIndex, Poly]]:
        """Yield (derivative exponent, coefficient) in canonical order."""
        for a in sorted(self._coeffs, key=term_order_key, reverse=True):
            yield a, self._coeffs[a]

    def coefficient(self, exponent: MultiIndex) -> Poly:
        return self._coeffs.get(tuple(exponent), Poly.zero(self.dim))

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def homogeneous_degree(self) -> int | None:
        """Common degree of all coefficients; None for zero or mixed."""
        degrees = {p.homogeneous_degree() for p in self._coeffs.values()}
        if len(degrees) != 1 or None in degrees:
            return None
        return degrees.pop()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self.dim == other.dim and self.order == other.order
                and self._coeffs == other._coeffs)

    def __hash__(self) -> int:
        return hash((self.dim, self.order, frozenset(self._coeffs.items())))

    # -- module structure

    def __add__(self, other: "DiffOp") -> "DiffOp":
        if not isinstance(other, DiffOp):
            return NotImplemented
        if (self.dim, self.order) != (other.dim, other.order):
            raise ValueError("operators must share dimension and order")
        out = dict(self._coeffs)
        for a, p in other._coeffs.items():
            s = out.get(a, Poly.zero(self.dim)) + p
            if s.is_zero():
                out.pop(a, None)
            else:
                out[a] = s
        return DiffOp(self.dim, self.order, out)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.dim, self.order,
                      {a: -p for a, p in self._coeffs.items()})

    def __rmul__(self, factor) -> "DiffOp":
        if isinstance(factor, Poly):
            if factor.dim != self.dim:
                raise ValueError("coefficient dimension mismatch")
            return DiffOp(self.dim, self.order,
                          {a: factor * p for a, p in self._coeffs.items()})
        if isinstance(factor, (int, Fraction)):
            return DiffOp(self.dim, self.order,
                          {a: p * factor for a, p in self._coeffs.items()})
        return NotImplemented

    # -- action and operator algebra

    def apply(self, f: Poly) -> Poly:
        """Evaluate the operator on a polynomial."""
        if f.dim != self.dim:
            raise ValueError(f"dimension mismatch: {f.dim} vs {self.dim}")
        out = Poly.zero(self.dim)
        for a, coeff in self._coeffs.items():
            derived = f.partial_derivative(a)
            if not derived.is_zero():
                out = out + coeff * derived
        return out

    def commutator_with_form(self, form: LinearForm) -> "DiffOp":
        """The commutator with multiplication by a linear form.

        Bracketing d^a against one variable replaces a factor of that
        derivative by its multiplicity, so the result has order m-1.
        """
        if self.order == 0:
            raise ValueError("order-0 operators commute with multiplication")
        if form.dim != self.dim:
            raise ValueError("form dimension mismatch")
        out: dict[MultiIndex, Poly] = {}
        for a, coeff in self._coeffs.items():
            for i, c in enumerate(form.coefficients):
                if not c or not a[i]:
                    continue
                key = tuple(e - 1 if j == i else e for j, e in enumerate(a))
                contribution = coeff * (c * a[i])
                s = out.get(key, Poly.zero(self.dim)) + contribution
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return DiffOp(self.dim, self.order - 1, out)

    # -- presentation

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        pieces = []
        for a, p in self.terms():
            ds = "*".join(f"d{i + 1}" + (f"^{e}" if e > 1 else "")
                          for i, e in enumerate(a) if e) or "1"
            pieces.append(f"({format_poly(p)})*{ds}" if a != (0,) * self.dim
                          else f"({format_poly(p)})")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"DiffOp(dim={self.dim}, order={self.order}, {self})"

    def to_json(self) -> dict:
        return {"dim": self.dim, "order": self.order,
                "terms": [{"a": list(a), "coef": p.to_json()}
                          for a, p in self.terms()]}


def diffop_from_json(data: dict) -> DiffOp:
    dim = int(data["dim"])
    order = int(data["order"])
    return DiffOp(dim, order,
                  [(tuple(term["a"]), poly_from_json(term["coef"], dim))
                   for term in data["terms"]])


def euler_operator(dim: int, order: int) -> DiffOp:
    """The order-m Euler operator: sum over |a| = m of (m!/a!) x^a d^a.

    It rescales every monomial of degree m by m!, hence preserves every
    ideal generated by homogeneous polynomials -- in particular it belongs
    to the operator module of every arrangement.
    """
    if order < 1:
        raise ValueError("the Euler operator needs order >= 1")
    coeffs = {a: Poly.monomial(dim, a, Fraction(factorial(order),
                                                mi_factorial(a)))
              for a in monomial_exponents(dim, order)}
    return DiffOp(dim, order, coeffs)


def directional_power(direction: Sequence[Rational], order: int) -> DiffOp:
    """The order-m power of the constant-coefficient derivation sum(c_i d_i).

    Expanded by the multinomial theorem; the coefficient of d^a is
    (m!/a!) * prod(c_i^{a_i}).
    """
    coeffs_in = [as_fraction(c) for c in direction]
    dim = len(coeffs_in)
    out: dict[MultiIndex, Poly] = {}
    for a in monomial_exponents(dim, order):
        scalar = Fraction(factorial(order), mi_factorial(a))
        for c, e in zip(coeffs_in, a):
            if e:
                scalar *= c ** e
        if scalar:
            out[a] = Poly.constant(dim, scalar)
    return DiffOp(dim, order, out)


# ---------------------------------------------------------------------------
# coefficient matrices

@dataclass(frozen=True)
class CoeffMatrix:
    """Square matrix with entry (a, i) equal to op_i applied to x^a / a!.

    Rows are indexed by the canonical ordering of the degree-m exponents,
    columns by the input operator order.
    """

    dim: int
    order: int
    row_exponents: tuple[MultiIndex, ...]
    entries: tuple[tuple[Poly, ...], ...]

    @property
    def size(self) -> int:
        return len(self.row_exponents)

    def rows(self) -> tuple[tuple[Poly, ...], ...]:
        return self.entries


def coefficient_matrix(ops: Sequence[DiffOp]) -> CoeffMatrix:
    """Assemble the coefficient matrix of a full tuple of operators."""
    if not ops:
        raise ValueError("need at least one operator")
    dim, order = ops[0].dim, ops[0].order
    for op in ops:
        if (op.dim, op.order) != (dim, order):
            raise ValueError("operators must share dimension and order")
    exponents = monomial_exponents(dim, order)
    if len(ops) != len(exponents):
        raise ValueError(
            f"need exactly {len(exponents)} operators, got {len(ops)}")
    entries = []
    for a in exponents:
        monomial = Poly.monomial(dim, a)
        inv_fact = Fraction(1, mi_factorial(a))
        entries.append(tuple(op.apply(monomial) * inv_fact for op in ops))
    return CoeffMatrix(dim, order, exponents, tuple(entries))


def split_by_bidegree(op: DiffOp, dim_first: int, dim_second: int) -> list[DiffOp]:
    """Split an operator by total derivative order in the leading block.

    Returns m+1 operators (some possibly zero) whose sum is the input;
    component i collects the terms with derivative order i in the first
    dim_first variables.
    """
    if dim_first + dim_second != op.dim or dim_first < 0 or dim_second < 0:
        raise ValueError("block sizes must partition the dimension")
    buckets: list[dict[MultiIndex, Poly]] = [{} for _ in range(op.order + 1)]
    for a, p in op.terms():
        buckets[mi_degree(a[:dim_first])][a] = p
    return [DiffOp(op.dim, op.order, bucket) for bucket in buckets]


def embed(op: DiffOp, total_dim: int, offset: int) -> DiffOp:
    """Reinterpret an operator inside a larger variable space.

    Variable i becomes variable offset+i; coefficients and derivative
    exponents are padded with zeros elsewhere.
    """
    if offset < 0 or offset + op.dim > total_dim:
        raise ValueError("embedding block out of range")
    left = (0,) * offset
    right = (0,) * (total_dim - offset - op.dim)

    def pad(a: MultiIndex) -> MultiIndex:
        return left + a + right

    coeffs = {}
    for a, p in op.terms():
        coeffs[pad(a)] = Poly(total_dim, [(pad(b), c) for b, c in p.terms()])
    return DiffOp(total_dim, op.order, coeffs)


def block_product(first: DiffOp, second: DiffOp) -> DiffOp:
    """Compose two operators that live on disjoint variable blocks.

    Because neither the coefficients nor the derivatives of one factor
    touch the variables of the other, the composition is commutative and
    its terms are simply the pairwise products.
    """
    if first.dim != second.dim:
        raise ValueError("operators must live in the same variable space")
    coeffs: dict[MultiIndex, Poly] = {}
    for a, p in first.terms():
        for b, q in second.terms():
            key = mi_add(a, b)
            value = p * q
            if key in coeffs:
                value = coeffs[key] + value
            if not value.is_zero():
                coeffs[key] = value
    return DiffOp(first.dim, first.order + second.order, coeffs)


def change_variables(op: DiffOp, rows: Sequence[Sequence[Rational]]) -> DiffOp:
    """Transport an operator through the linear substitution y = R x.

    ``op`` is understood in the y coordinates; the result is the same
    endomorphism written in the x coordinates.  Coefficients pick up the
    substitution y_i = sum_j R[i][j] x_j while each d/dy_i becomes the
    constant-coefficient derivation given by column i of R^-1.
    """
    matrix = [[as_fraction(c) for c in row] for row in rows]
    if len(matrix) != op.dim or any(len(r) != op.dim for r in matrix):
        raise ValueError("change of variables must be square of the dimension")
    inverse = invert(matrix)
    if inverse is None:
        raise ValueError("change of variables must be invertible")
    columns = [[inverse[j][i] for j in range(op.dim)] for i in range(op.dim)]

    out = DiffOp.zero(op.dim, op.order)
    for a, p in op.terms():
        symbol: dict[MultiIndex, Fraction] = {(0,) * op.dim: Fraction(1)}
        for i, e in enumerate(a):
            if not e:
                continue
            factor = directional_power(columns[i], e)
            merged: dict[MultiIndex, Fraction] = {}
            for b, scalar in symbol.items():
                for c, q in factor.terms():
                    coeff = q.constant_value()
                    key = mi_add(b, c)
                    merged[key] = merged.get(key, Fraction(0)) + scalar * coeff
            symbol = {k: v for k, v in merged.items() if v}
        coeff_poly = p.substitute_linear(matrix)
        out = out + DiffOp(op.dim, op.order,
                           {b: coeff_poly * scalar
                            for b, scalar in symbol.items()})
    return out
