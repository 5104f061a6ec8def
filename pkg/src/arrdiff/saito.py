"""Determinants of coefficient matrices and the basis criterion.

A tuple of operators (one per degree-m derivative monomial) is a basis of
the arrangement's operator module exactly when the determinant of its
coefficient matrix is a nonzero constant multiple of Q^t, where Q is the
defining polynomial and t counts the degree-(m-1) derivative monomials.
The determinant of any member tuple is always divisible by Q^t, so the
verdict reduces to exact division plus a constant check.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Sequence

from .arrangement import Arrangement
from .membership import MembershipWitness, is_member
from .qpoly import Poly, exact_divide
from .weyl import CoeffMatrix, DiffOp, coefficient_matrix


def saito_counts(dim: int, order: int) -> tuple[int, int]:
    """(rank, det exponent) for the given dimension and operator order.

    The rank is the number of degree-m derivative monomials; the exponent
    is the count of degree-(m-1) monomials, which is how many rows of any
    coefficient matrix each linear form divides.
    """
    if dim < 1 or order < 0:
        raise ValueError("need dim >= 1 and order >= 0")
    rank = comb(dim + order - 1, order)
    exponent = comb(dim + order - 2, order - 1) if order >= 1 else 0
    return rank, exponent


def det_poly(matrix: CoeffMatrix | Sequence[Sequence[Poly]]) -> Poly:
    """Exact determinant of a square polynomial matrix.

    Small matrices are expanded by cofactors; larger ones use fraction-free
    elimination, where every division by the previous pivot is exact over
    the polynomial ring.  Pivoting always takes the first row with a
    nonzero entry, so the result (including its sign) is reproducible.
    """
    rows = [list(r) for r in (matrix.rows() if isinstance(matrix, CoeffMatrix)
                              else matrix)]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("matrix must be square and nonempty")
    dim = rows[0][0].dim
    if n <= 4:
        return _det_cofactor(rows, dim)
    return _det_bareiss(rows, dim)


def _det_cofactor(rows: list[list[Poly]], dim: int) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Poly.zero(dim)
    for j, entry in enumerate(rows[0]):
        if entry.is_zero():
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in rows[1:]]
        term = entry * _det_cofactor(minor, dim)
        total = total + term if j % 2 == 0 else total - term
    return total


def _det_bareiss(rows: list[list[Poly]], dim: int) -> Poly:
    n = len(rows)
    sign = 1
    previous = Poly.one(dim)
    for k in range(n - 1):
        if rows[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not rows[i][k].is_zero()),
                        None)
            if swap is None:
                return Poly.zero(dim)
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                numerator = rows[k][k] * rows[i][j] - rows[i][k] * rows[k][j]
                quotient = exact_divide(numerator, previous)
                assert quotient is not None  # fraction-free invariant
                rows[i][j] = quotient
            rows[i][k] = Poly.zero(dim)
        previous = rows[k][k]
    result = rows[n - 1][n - 1]
    return result if sign == 1 else -result


class SaitoVerdict(Enum):
    BASIS = "basis"
    NOT_PROPORTIONAL = "not-proportional"
    NOT_MEMBERS = "not-members"


@dataclass(frozen=True)
class SaitoResult:
    """Outcome of the basis check, with enough data to audit it."""

    verdict: SaitoVerdict
    constant: Fraction | None = None
    determinant: Poly | None = None
    det_over_qt: Poly | None = None
    failing_operator: int | None = None
    witness: MembershipWitness | None = None

    def __bool__(self) -> bool:
        return self.verdict is SaitoVerdict.BASIS

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict.value}
        if self.constant is not None:
            out["constant"] = str(self.constant)
        if self.det_over_qt is not None:
            out["det_over_Qt"] = self.det_over_qt.to_json()
        if self.determinant is not None:
            out["determinant"] = self.determinant.to_json()
        if self.failing_operator is not None:
            out["failing_operator"] = self.failing_operator
            out["witness"] = {
                "hyperplane": self.witness.hyperplane.to_json(),
                "exponent": list(self.witness.exponent),
                "image": self.witness.image.to_json(),
            }
        return out


def saito_check(ops: Sequence[DiffOp], arr: Arrangement) -> SaitoResult:
    """Decide whether a full tuple of operators is a module basis.

    Verifies membership of every operator, then tests whether the
    determinant of the coefficient matrix is a nonzero constant times Q^t.
    """
    if not ops:
        raise ValueError("need at least one operator")
    order = ops[0].order
    rank, exponent = saito_counts(arr.dim, order)
    if len(ops) != rank:
        raise ValueError(f"need exactly {rank} operators, got {len(ops)}")
    for i, op in enumerate(ops):
        result = is_member(op, arr)
        if not result:
            return SaitoResult(SaitoVerdict.NOT_MEMBERS,
                               failing_operator=i, witness=result.witness)
    determinant = det_poly(coefficient_matrix(ops))
    qt = arr.defining_polynomial() ** exponent
    quotient = exact_divide(determinant, qt)
    if quotient is not None:
        constant = quotient.constant_value()
        if constant:
            return SaitoResult(SaitoVerdict.BASIS, constant=constant,
                               determinant=determinant, det_over_qt=quotient)
    return SaitoResult(SaitoVerdict.NOT_PROPORTIONAL,
                       determinant=determinant, det_over_qt=quotient)


def degree_sum_check(ops: Sequence[DiffOp], arr: Arrangement) -> bool:
    """Basis test for member tuples via degrees instead of divisibility.

    For homogeneous members, independence (nonzero determinant) plus
    degree sum equal to t * |A| is equivalent to being a basis.
    Membership is a precondition and is not re-verified here.
    """
    if not ops:
        raise ValueError("need at least one operator")
    order = ops[0].order
    rank, exponent = saito_counts(arr.dim, order)
    if len(ops) != rank:
        raise ValueError(f"need exactly {rank} operators, got {len(ops)}")
    degrees = []
    for op in ops:
        if op.is_zero():
            return False  # dependent tuple
        degree = op.homogeneous_degree()
        if degree is None:
            raise ValueError("operators must be homogeneous")
        degrees.append(degree)
    if det_poly(coefficient_matrix(ops)).is_zero():
        return False
    return sum(degrees) == exponent * len(arr)
