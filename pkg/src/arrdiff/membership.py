"""Deciding whether an operator preserves an arrangement's ideal.

An order-m operator preserves the principal ideal of the defining
polynomial exactly when, for every hyperplane H and every monomial x^b of
degree m-1, the image of alpha_H * x^b is again divisible by alpha_H.
That finite grid of divisibility checks is the workhorse here; a
truncated brute-force scan of the defining property is kept alongside as
an independent oracle for testing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arrangement import Arrangement
from .qpoly import (LinearForm, MultiIndex, Poly, exact_divide,
                    monomial_exponents, monomials_up_to, variables)
from .weyl import DiffOp, directional_power, euler_operator


@dataclass(frozen=True)
class MembershipWitness:
    """First failing cell of the check grid: hyperplane, exponent, image."""

    hyperplane_index: int
    hyperplane: LinearForm
    exponent: MultiIndex
    image: Poly


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    witness: MembershipWitness | None = None

    def __bool__(self) -> bool:
        return self.member


def is_member(op: DiffOp, arr: Arrangement) -> MembershipResult:
    """Check membership via the finite per-hyperplane criterion.

    Order-0 operators are multiplications by polynomials and always
    preserve the ideal.  On failure the witness is the lexicographically
    first violating (hyperplane, exponent) cell together with the
    non-divisible image polynomial.
    """
    if op.dim != arr.dim:
        raise ValueError(f"dimension mismatch: {op.dim} vs {arr.dim}")
    if op.order == 0:
        return MembershipResult(True)
    for index, form in enumerate(arr.forms):
        alpha = form.to_poly()
        for b in monomial_exponents(arr.dim, op.order - 1):
            image = op.apply(alpha * Poly.monomial(arr.dim, b))
            if not form.divides(image):
                return MembershipResult(False, MembershipWitness(
                    index, form, b, image))
    return MembershipResult(True)


def is_member_bruteforce(op: DiffOp, arr: Arrangement,
                         degree_bound: int) -> bool:
    """Truncated scan of the defining property, for use as a test oracle.

    Checks that the image of Q*x^c is divisible by Q for every monomial
    x^c of degree at most the bound.  This under-approximates the real
    membership condition and exists only to cross-check :func:`is_member`.
    """
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    q = arr.defining_polynomial()
    for c in monomials_up_to(arr.dim, degree_bound):
        image = op.apply(q * Poly.monomial(arr.dim, c))
        if image.is_zero():
            continue
        if exact_divide(image, q) is None:
            return False
    return True


def shi2_order2_members() -> list[DiffOp]:
    """Six explicit order-2 members for the 3-dimensional coned Shi
    arrangement: the Euler operator plus five degree-4 operators.

    Coordinates follow :func:`make_shi` with ell = 2: (x, y, z) where z is
    the coning variable.
    """
    dim = 3
    x, y, z = variables(dim)
    dxx, dxy, dxz = (2, 0, 0), (1, 1, 0), (1, 0, 1)
    dyy, dyz, dzz = (0, 2, 0), (0, 1, 1), (0, 0, 2)

    theta1 = DiffOp.single(dim, dxx, x * (x - z) * (x - y) * (x - y - z))
    theta2 = DiffOp.single(dim, dyy, y * (x - y) * (y - z) * (x - y - z))
    theta3 = DiffOp.single(dim, dzz, z * (x - z) * (y - z) * (x - y - z))
    theta4 = (x * y * (x - z) * (y - z)) * directional_power((1, 1, 0), 2)
    theta5 = DiffOp(dim, 2, {
        dyy: y * y * (x - y) * (y - z),
        dzz: -(z * z * (x - z) * (y - z)),
        dxy: x * y * (x - y) * (y - z),
        dxz: -(x * z * (x - z) * (y - z)),
        dyz: -(y * z * (y - z) * (y - z)),
    })
    return [euler_operator(dim, 2), theta1, theta2, theta3, theta4, theta5]
