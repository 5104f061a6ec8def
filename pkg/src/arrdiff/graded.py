"""Graded pieces of the operator module and the freeness decision.

Fixing an order m and a coefficient degree d, membership of an operator
is a rational linear condition on the coefficients of its polynomial
entries: for each hyperplane and each degree-(m-1) monomial the image
polynomial must vanish after reduction modulo the hyperplane's form.
Solving that system exactly gives the graded piece as a vector space;
stacking graded pieces degree by degree gives minimal generator counts,
and a degree-bounded sweep of those counts decides freeness outright:

* if the arrangement is free, every basis degree is bounded by t * |A|
  (degrees are nonnegative and sum to t * |A|), so all s = rank minimal
  generators appear by that bound and the determinant criterion certifies
  them as a basis;
* conversely an overflow past s generators, a failed determinant check at
  exactly s, or fewer than s generators by the bound each refute freeness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from .arrangement import (Arrangement, Decomposition, decompose, flat_closure,
                          is_generic, localize)
from .linalg import RowBasis, nullspace_basis
from .qpoly import (MultiIndex, Poly, mi_add, mi_factorial, mi_unit,
                    monomial_exponents, term_order_key)
from .saito import saito_check, saito_counts
from .weyl import DiffOp, change_variables

FREE = "FREE"
NOT_FREE = "NOT_FREE"
UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class GradedBasis:
    """A vector-space basis of one graded piece of the operator module."""

    degree: int
    operators: tuple[DiffOp, ...]

    @property
    def dimension(self) -> int:
        return len(self.operators)


def operator_vector(op: DiffOp, degree: int) -> list[Fraction]:
    """Flatten a degree-homogeneous operator to its coefficient vector.

    Coordinates run over (derivative exponent, coefficient monomial) pairs
    in canonical order; this is the coordinatization shared by all graded
    linear algebra at a fixed order and degree.
    """
    omega = monomial_exponents(op.dim, op.order)
    mons = monomial_exponents(op.dim, degree)
    index = {mu: i for i, mu in enumerate(mons)}
    vec = [Fraction(0)] * (len(omega) * len(mons))
    for ai, a in enumerate(omega):
        for mu, c in op.coefficient(a).terms():
            if mu not in index:
                raise ValueError(
                    f"operator is not homogeneous of degree {degree}")
            vec[ai * len(mons) + index[mu]] = c
    return vec


def _vector_to_operator(vec: Sequence[Fraction], dim: int, order: int,
                        degree: int) -> DiffOp:
    omega = monomial_exponents(dim, order)
    mons = monomial_exponents(dim, degree)
    coeffs = {}
    for ai, a in enumerate(omega):
        terms = {mu: vec[ai * len(mons) + mi]
                 for mi, mu in enumerate(mons) if vec[ai * len(mons) + mi]}
        if terms:
            coeffs[a] = Poly(dim, terms)
    return DiffOp(dim, order, coeffs)


def graded_dimension(arr: Arrangement, order: int, degree: int) -> GradedBasis:
    """Compute one graded piece by exact nullspace extraction.

    Unknowns are the coefficients of each polynomial entry (one degree-d
    monomial each); every (hyperplane, degree-(m-1) exponent) pair
    contributes the linear equations that make the image polynomial vanish
    modulo the hyperplane's form.
    """
    if order < 0 or degree < 0:
        raise ValueError("order and degree must be nonnegative")
    dim = arr.dim
    omega = monomial_exponents(dim, order)
    mons = monomial_exponents(dim, degree)
    ncols = len(omega) * len(mons)
    omega_index = {a: i for i, a in enumerate(omega)}

    rows: list[list[Fraction]] = []
    for form in arr.forms:
        reduced = {mu: list(form.reduce(Poly.monomial(dim, mu)).terms())
                   for mu in mons}
        for b in monomial_exponents(dim, order - 1):
            # image of form * x^b: only the entries at exponents b + e_j
            # act, each through the scalar coefficient * (b + e_j)!
            cells: dict[MultiIndex, dict[int, Fraction]] = {}
            for j, c in enumerate(form.coefficients):
                if not c:
                    continue
                a = mi_add(b, mi_unit(dim, j))
                scale = c * mi_factorial(a)
                base = omega_index[a] * len(mons)
                for mi, mu in enumerate(mons):
                    for nu, rc in reduced[mu]:
                        cell = cells.setdefault(nu, {})
                        cell[base + mi] = cell.get(base + mi,
                                                   Fraction(0)) + scale * rc
            for nu in sorted(cells, key=term_order_key, reverse=True):
                entries = cells[nu]
                if not any(entries.values()):
                    continue
                row = [Fraction(0)] * ncols
                for col, value in entries.items():
                    row[col] = value
                rows.append(row)

    basis = nullspace_basis(rows, ncols)
    ops = tuple(_vector_to_operator(vec, dim, order, degree) for vec in basis)
    return GradedBasis(degree, ops)


@dataclass(frozen=True)
class VanishingChecks:
    """Closed-form vanishing of the lowest graded pieces.

    Applicable only when the arrangement contains every coordinate
    hyperplane; ``None`` fields mean the rule did not apply.
    """

    deg0_applicable: bool
    deg0_zero: bool | None
    deg1_applicable: bool
    deg1_zero: bool | None


def vanishing_quick_checks(arr: Arrangement, order: int) -> VanishingChecks:
    """Degree-0 and degree-1 vanishing rules for coordinate-containing
    arrangements.

    With all coordinate hyperplanes present, the degree-0 piece is always
    zero (order >= 1).  For order >= 2 the degree-1 piece vanishes exactly
    when every variable appears with nonzero coefficient in some
    non-coordinate hyperplane; otherwise x_i d_i^m survives for a missing
    variable i.
    """
    if order < 1:
        raise ValueError("the vanishing rules need order >= 1")
    dim = arr.dim
    coordinate_indices = set()
    for i, form in enumerate(arr.forms):
        coeffs = form.coefficients
        nonzero = [j for j, c in enumerate(coeffs) if c]
        if len(nonzero) == 1:
            coordinate_indices.add(nonzero[0])
    applicable = coordinate_indices == set(range(dim))
    if not applicable:
        return VanishingChecks(False, None, False, None)
    deg1_applicable = order >= 2
    deg1_zero = None
    if deg1_applicable:
        deg1_zero = True
        for i in range(dim):
            covered = any(
                form.coefficients[i]
                and sum(1 for c in form.coefficients if c) > 1
                for form in arr.forms)
            if not covered:
                deg1_zero = False
                break
    return VanishingChecks(True, True, deg1_applicable, deg1_zero)


# ---------------------------------------------------------------------------
# minimal generators

@dataclass(frozen=True)
class GeneratorStep:
    """Per-degree record of the minimal-generator sweep."""

    degree: int
    module_dimension: int
    new_count: int
    representatives: tuple[DiffOp, ...]


def _generator_sweep(arr: Arrangement, order: int,
                     bound: int) -> Iterator[GeneratorStep]:
    """Yield minimal-generator counts degree by degree.

    At each degree the span of all multiples of previously found
    generators is subtracted from the graded piece; any complement basis
    vectors become new generator representatives.  The counts depend only
    on dimensions, so they are independent of representative choices.
    """
    dim = arr.dim
    found: list[tuple[int, DiffOp]] = []
    for degree in range(bound + 1):
        piece = graded_dimension(arr, order, degree)
        mons = monomial_exponents(dim, degree)
        ncols = len(monomial_exponents(dim, order)) * len(mons)
        span = RowBasis(ncols)
        for gen_degree, gen in found:
            for mu in monomial_exponents(dim, degree - gen_degree):
                span.add(operator_vector(Poly.monomial(dim, mu) * gen, degree))
        representatives = tuple(op for op in piece.operators
                                if span.add(operator_vector(op, degree)))
        # the old span is inside the graded piece, so ranks must line up
        assert span.rank == piece.dimension
        found.extend((degree, op) for op in representatives)
        yield GeneratorStep(degree, piece.dimension, len(representatives),
                            representatives)


def minimal_generators(arr: Arrangement, order: int,
                       degree_bound: int) -> list[GeneratorStep]:
    """Minimal homogeneous generators of the module up to a degree bound."""
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    return list(_generator_sweep(arr, order, degree_bound))


# ---------------------------------------------------------------------------
# the freeness decision

@dataclass(frozen=True)
class FreenessReport:
    """Decision outcome with certificate and audit trail.

    A FREE verdict always carries a basis that re-verifies under the
    determinant criterion; NOT_FREE carries one of the machine-checkable
    refutation certificates; UNDECIDED only occurs when a user-supplied
    degree bound is too small to be conclusive.
    """

    verdict: str
    order: int
    rank: int
    det_exponent: int
    degree_bound: int
    exponents: tuple[int, ...] | None
    basis: tuple[DiffOp, ...] | None
    certificate: dict
    degrees_examined: tuple[tuple[int, int, int], ...]
    audit: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.verdict == FREE

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "order": self.order,
            "rank": self.rank,
            "det_exponent": self.det_exponent,
            "degree_bound": self.degree_bound,
            "exponents": list(self.exponents) if self.exponents is not None else None,
            "basis": ([op.to_json() for op in self.basis]
                      if self.basis is not None else None),
            "certificate": self.certificate,
            "degrees_examined": [list(t) for t in self.degrees_examined],
            "audit": list(self.audit),
        }


def decide_free(arr: Arrangement, order: int, *, max_degree: int | None = None,
                fast_filters: bool = True,
                localization_seed_limit: int = 3) -> FreenessReport:
    """Decide whether the order-m operator module is free.

    Optional fast filters (closed-form formulas on products, generic
    arrangements, and localizations) may refute freeness early or supply a
    verified product basis; the generator sweep up to t * |A| is complete
    on its own.  ``max_degree`` overrides the sweep bound; any verdict the
    sweep reaches is sound for any bound, but an exhausted sweep below
    t * |A| reports UNDECIDED rather than claiming a generator deficit.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    rank, det_exponent = saito_counts(arr.dim, order)
    complete_bound = det_exponent * len(arr)
    bound = complete_bound if max_degree is None else max_degree
    if bound < 0:
        raise ValueError("degree bound must be nonnegative")
    audit: list[str] = []

    def report(verdict, certificate, exponents=None, basis=None, records=()):
        return FreenessReport(verdict, order, rank, det_exponent, bound,
                              exponents, basis, certificate,
                              tuple(records), tuple(audit))

    if fast_filters and order >= 1:
        filtered = _fast_filters(arr, order, localization_seed_limit, audit,
                                 report)
        if filtered is not None:
            return filtered

    records: list[tuple[int, int, int]] = []
    generators: list[DiffOp] = []
    degrees: list[int] = []
    for step in _generator_sweep(arr, order, bound):
        records.append((step.degree, step.module_dimension, step.new_count))
        generators.extend(step.representatives)
        degrees.extend([step.degree] * step.new_count)
        if len(generators) > rank:
            audit.append(f"sweep: generator count exceeded the rank at degree {step.degree}")
            return report(NOT_FREE, {
                "kind": "generator_overflow",
                "degree": step.degree,
                "cumulative_generators": len(generators),
                "rank": rank,
                "generator_degrees": degrees,
            }, records=records)
        if len(generators) == rank:
            result = saito_check(generators, arr)
            if result:
                audit.append(f"sweep: {rank} generators by degree {step.degree}; "
                             "determinant criterion confirms a basis")
                return report(FREE, {
                    "kind": "saito_basis",
                    "constant": str(result.constant),
                }, exponents=tuple(sorted(degrees)),
                    basis=tuple(generators), records=records)
            audit.append("sweep: full generator count found but the "
                         "determinant criterion fails")
            return report(NOT_FREE, {
                "kind": "saito_failure",
                "generator_degrees": degrees,
                "generators": [op.to_json() for op in generators],
                "saito": result.to_json(),
            }, records=records)
    if bound >= complete_bound:
        audit.append(f"sweep: only {len(generators)} generators up to the "
                     f"complete bound {bound}")
        return report(NOT_FREE, {
            "kind": "generator_deficit",
            "degree_bound": bound,
            "cumulative_generators": len(generators),
            "rank": rank,
            "generator_degrees": degrees,
        }, records=records)
    audit.append(f"sweep: degree bound {bound} is below the complete bound "
                 f"{complete_bound}; result inconclusive")
    return report(UNDECIDED, {
        "kind": "degree_bound_too_small",
        "degree_bound": bound,
        "complete_bound": complete_bound,
        "cumulative_generators": len(generators),
    }, records=records)


# ---------------------------------------------------------------------------
# fast filters

def _quick_factor_status(arr: Arrangement, order: int) -> bool | None:
    """Closed-form freeness for an essential factor, or None if unknown.

    Arrangements of rank at most 2 are free for every order; generic
    arrangements are free exactly from order |A| - dim + 1 on.
    """
    if arr.dim <= 2:
        return True
    if is_generic(arr):
        return order >= len(arr) - arr.dim + 1
    return None


def _quick_free_status(arr: Arrangement, order: int) -> tuple[bool | None, dict]:
    """Freeness by decomposition plus closed-form factor rules only.

    A product is free for order m exactly when every factor is free for
    every order 1..m, so one definitely-non-free factor refutes and
    all-free factors confirm; anything else is unknown.
    """
    dec = decompose(arr)
    essential = [f for f in dec.factors if len(f.arrangement) > 0]
    if dec.is_irreducible:
        status = _quick_factor_status(arr, order)
        return status, {"factors": 1, "rule": "irreducible"}
    confirmed = True
    for factor in essential:
        for i in range(1, order + 1):
            status = _quick_factor_status(factor.arrangement, i)
            if status is False:
                return False, {
                    "rule": "product-factor-not-free",
                    "factor_forms": [str(f) for f in factor.arrangement.forms],
                    "factor_dim": factor.arrangement.dim,
                    "factor_size": len(factor.arrangement),
                    "failing_order": i,
                }
            if status is None:
                confirmed = False
    if confirmed:
        return True, {"rule": "all-factors-free"}
    return None, {}


def _fast_filters(arr, order, seed_limit, audit, report):
    # closed-form formula for generic arrangements
    if is_generic(arr):
        threshold = len(arr) - arr.dim + 1
        if order < threshold:
            audit.append(f"filter: generic arrangement is free only from "
                         f"order {threshold}")
            return report(NOT_FREE, {
                "kind": "fast_filter",
                "reason": "generic-below-threshold",
                "size": len(arr),
                "dim": arr.dim,
                "free_from_order": threshold,
            })
        audit.append(f"filter: generic arrangement, free from order "
                     f"{threshold}; sweeping for a basis")

    # product decomposition: recurse into the factors
    dec = decompose(arr)
    if len(dec.factors) >= 2:
        audit.append(f"filter: decomposes into {len(dec.factors)} factors")
        factor_reports: list[list[FreenessReport]] = []
        conclusive = True
        for fi, factor in enumerate(dec.factors):
            per_order = []
            for i in range(1, order + 1):
                sub = decide_free(factor.arrangement, i,
                                  localization_seed_limit=seed_limit)
                if sub.verdict == NOT_FREE:
                    audit.append(f"filter: factor {fi} is not free at order {i}")
                    return report(NOT_FREE, {
                        "kind": "fast_filter",
                        "reason": "product-factor-not-free",
                        "factor_index": fi,
                        "factor_dim": factor.arrangement.dim,
                        "factor_size": len(factor.arrangement),
                        "failing_order": i,
                        "factor_certificate": sub.certificate,
                    })
                if sub.verdict != FREE:
                    conclusive = False
                per_order.append(sub)
            factor_reports.append(per_order)
        if conclusive and order >= 1:
            synthesized = _product_basis_synthesis(arr, dec, order,
                                                   factor_reports, audit)
            if synthesized is not None:
                basis, constant, exponents = synthesized
                return report(FREE, {
                    "kind": "saito_basis",
                    "constant": str(constant),
                    "via": "product-decomposition",
                }, exponents=exponents, basis=basis)

    # localization spot checks
    certificate = _localization_filter(arr, order, seed_limit)
    if certificate is not None:
        audit.append("filter: a localization is not free, so the "
                     "arrangement is not free")
        return report(NOT_FREE, certificate)
    return None


def _product_basis_synthesis(arr, dec: Decomposition, order,
                             factor_reports, audit):
    """Assemble a basis for a decomposable arrangement from factor bases."""
    from .construct import product_basis  # local import to avoid a cycle

    def per_order_bases(index: int) -> list[list[DiffOp]]:
        factor = dec.factors[index].arrangement
        bases = [[DiffOp.identity(factor.dim)]]
        for i in range(1, order + 1):
            basis = factor_reports[index][i - 1].basis
            assert basis is not None
            bases.append(list(basis))
        return bases

    acc_bases = per_order_bases(0)
    for fi in range(1, len(dec.factors)):
        fac_bases = per_order_bases(fi)
        acc_bases = [product_basis(acc_bases[:i + 1], fac_bases[:i + 1])
                     for i in range(order + 1)]
    adapted = acc_bases[order]
    transported = tuple(change_variables(op, dec.basis_change)
                        for op in adapted)
    result = saito_check(transported, arr)
    if not result:
        audit.append("filter: product basis synthesis failed verification; "
                     "falling back to the sweep")
        return None
    exponents = tuple(sorted(op.homogeneous_degree() for op in transported))
    audit.append("filter: product basis synthesized from factor bases and "
                 "verified")
    return transported, result.constant, exponents


def _localization_filter(arr: Arrangement, order: int,
                         seed_limit: int) -> dict | None:
    """Look for a proper localization that is provably not free."""
    n = len(arr)
    if n == 0:
        return None
    seen: set[frozenset[int]] = set()
    for size in range(1, min(seed_limit, n) + 1):
        for seed in combinations(range(n), size):
            flat = flat_closure(arr, seed)
            if flat.generators in seen or len(flat.generators) == n:
                continue
            seen.add(flat.generators)
            sub = localize(arr, flat)
            status, detail = _quick_free_status(sub, order)
            if status is False:
                return {
                    "kind": "fast_filter",
                    "reason": "localization-not-free",
                    "flat": sorted(flat.generators),
                    "flat_rank": flat.rank,
                    "localization_size": len(sub),
                    "detail": detail,
                }
    return None
