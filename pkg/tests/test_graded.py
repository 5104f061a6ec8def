"""Graded pieces, minimal generators, and the freeness decision.

Graded dimensions are cross-checked against an independent oracle that
spans monomial candidate operators and evaluates the membership
constraints through the operator action, without the solver's indexing.
"""

from __future__ import annotations

from arrdiff.arrangement import Arrangement, arrangement_from_json, make_named, make_shi
from arrdiff.graded import (FREE, NOT_FREE, UNDECIDED, decide_free,
                            graded_dimension, minimal_generators,
                            operator_vector, vanishing_quick_checks)
from arrdiff.linalg import RowBasis, nullspace_basis
from arrdiff.membership import is_member
from arrdiff.qpoly import Poly, monomial_exponents, variables
from arrdiff.saito import saito_check, saito_counts
from arrdiff.weyl import DiffOp, euler_operator


def arr_of(dim, *texts):
    return arrangement_from_json({"dim": dim, "forms": list(texts)})


RANK2 = arr_of(2, "x", "y", "x+y")
GENERIC3 = arr_of(3, "x", "y", "z", "x+y+z")


def oracle_graded_dimension(arr, order, degree):
    """Independent path: monomial candidates, constraints via apply()."""
    dim = arr.dim
    candidates = [DiffOp.single(dim, a, Poly.monomial(dim, mu))
                  for a in monomial_exponents(dim, order)
                  for mu in monomial_exponents(dim, degree)]
    rows = []
    for form in arr.forms:
        alpha = form.to_poly()
        for b in monomial_exponents(dim, order - 1):
            probe = alpha * Poly.monomial(dim, b)
            images = [form.reduce(c.apply(probe)) for c in candidates]
            monomials = sorted({mu for img in images for mu, _ in img.terms()})
            for nu in monomials:
                rows.append([img.coefficient(nu) for img in images])
    return len(nullspace_basis(rows, len(candidates)))


# ---------------------------------------------------------------------------
# graded dimensions

def test_shi2_graded_dimensions():
    shi = make_shi(2)
    dims = [graded_dimension(shi, 2, d).dimension for d in range(4)]
    assert dims == [0, 0, 1, 3]
    piece = graded_dimension(shi, 2, 2)
    span = RowBasis(len(operator_vector(piece.operators[0], 2)))
    for op in piece.operators:
        span.add(operator_vector(op, 2))
    assert span.contains(operator_vector(euler_operator(3, 2), 2))


def test_empty_arrangement_degree_zero():
    for dim, order in ((2, 2), (3, 1), (2, 3)):
        piece = graded_dimension(Arrangement(dim, ()), order, 0)
        assert piece.dimension == saito_counts(dim, order)[0]


def test_rank2_dimensions_match_free_resolution():
    # with basis degrees {2, 2, 2}: dim at degree d is 3 * dim S_{d-2}
    dims = [graded_dimension(RANK2, 2, d).dimension for d in (2, 3, 4)]
    assert dims == [3, 6, 9]


def test_graded_operators_are_members():
    for arr, order, degree in ((RANK2, 2, 3), (make_shi(2), 2, 3),
                               (GENERIC3, 1, 2)):
        piece = graded_dimension(arr, order, degree)
        for op in piece.operators:
            assert op.homogeneous_degree() == degree
            assert is_member(op, arr)
        if piece.dimension:
            span = RowBasis(len(operator_vector(piece.operators[0], degree)))
            for op in piece.operators:
                assert span.add(operator_vector(op, degree))


def test_graded_dimension_against_oracle():
    cases = [(RANK2, 2, d) for d in range(4)]
    cases += [(make_shi(2), 2, d) for d in range(4)]
    cases += [(GENERIC3, 1, d) for d in range(3)]
    cases += [(arr_of(2, "x", "y"), 1, d) for d in range(3)]
    for arr, order, degree in cases:
        assert graded_dimension(arr, order, degree).dimension \
            == oracle_graded_dimension(arr, order, degree)


def test_candidates_passing_membership_lie_in_span():
    arr = arr_of(2, "x", "y")
    order, degree = 1, 1
    piece = graded_dimension(arr, order, degree)
    ncols = len(operator_vector(piece.operators[0], degree))
    span = RowBasis(ncols)
    for op in piece.operators:
        span.add(operator_vector(op, degree))
    for a in monomial_exponents(2, order):
        for mu in monomial_exponents(2, degree):
            candidate = DiffOp.single(2, a, Poly.monomial(2, mu))
            if is_member(candidate, arr):
                assert span.contains(operator_vector(candidate, degree))


def test_euler_operator_in_its_graded_piece():
    for arr, order in ((RANK2, 2), (make_shi(2), 2), (GENERIC3, 2)):
        piece = graded_dimension(arr, order, order)
        euler = euler_operator(arr.dim, order)
        vec = operator_vector(euler, order)
        span = RowBasis(len(vec))
        for op in piece.operators:
            span.add(operator_vector(op, order))
        assert span.contains(vec)


# ---------------------------------------------------------------------------
# vanishing quick checks

def test_vanishing_checks_golden():
    full = arr_of(3, "x", "y", "z", "x-y", "x-z", "y-z", "x-y-z")
    checks = vanishing_quick_checks(full, 2)
    assert checks.deg0_applicable and checks.deg0_zero
    assert checks.deg1_applicable and checks.deg1_zero
    assert graded_dimension(full, 2, 0).dimension == 0
    assert graded_dimension(full, 2, 1).dimension == 0

    partial = arr_of(3, "x", "y", "z", "x-y")
    checks = vanishing_quick_checks(partial, 2)
    assert checks.deg1_applicable and checks.deg1_zero is False
    # the surviving degree-1 operator is z * d_z^m
    piece = graded_dimension(partial, 2, 1)
    assert piece.dimension >= 1
    z = variables(3)[2]
    survivor = DiffOp.single(3, (0, 0, 2), z)
    assert is_member(survivor, partial)

    missing = arr_of(3, "x", "y", "x-y")
    checks = vanishing_quick_checks(missing, 2)
    assert not checks.deg0_applicable and checks.deg0_zero is None


def test_vanishing_checks_irreducible_consequence():
    # irreducible + coordinate hyperplanes: degrees 0 and 1 both vanish
    shi = make_shi(2)
    from arrdiff.arrangement import decompose
    assert decompose(shi).is_irreducible
    for order in (2, 3):
        assert graded_dimension(shi, order, 0).dimension == 0
        assert graded_dimension(shi, order, 1).dimension == 0


# ---------------------------------------------------------------------------
# minimal generators

def test_minimal_generators_shi2():
    steps = minimal_generators(make_shi(2), 2, 4)
    counts = [(s.degree, s.new_count) for s in steps]
    assert counts == [(0, 0), (1, 0), (2, 1), (3, 0), (4, 6)]
    # five independent degree-4 members guarantee at least 5 new generators
    assert counts[4][1] >= 5


def test_minimal_generators_rank2():
    steps = minimal_generators(RANK2, 2, 4)
    assert [(s.degree, s.new_count) for s in steps] \
        == [(0, 0), (1, 0), (2, 3), (3, 0), (4, 0)]


def test_minimal_generators_empty():
    steps = minimal_generators(Arrangement(3, ()), 2, 0)
    assert steps[0].new_count == saito_counts(3, 2)[0]


def test_generator_counts_do_not_depend_on_representatives():
    arr = make_shi(2)
    steps = minimal_generators(arr, 2, 4)
    # recompute the degree-4 count from dimensions only
    dim4 = graded_dimension(arr, 2, 4).dimension
    span = RowBasis(len(operator_vector(steps[4].representatives[0], 4)))
    for degree, op in [(s.degree, op) for s in steps if s.degree < 4
                       for op in s.representatives]:
        for mu in monomial_exponents(arr.dim, 4 - degree):
            span.add(operator_vector(Poly.monomial(arr.dim, mu) * op, 4))
    assert steps[4].new_count == dim4 - span.rank


# ---------------------------------------------------------------------------
# the decision procedure

def test_decide_rank2_free():
    report = decide_free(RANK2, 2)
    assert report.verdict == FREE
    assert report.exponents == (2, 2, 2)
    assert saito_check(list(report.basis), RANK2)


def test_decide_shi2_not_free_with_checkable_certificate():
    report = decide_free(make_shi(2), 2)
    assert report.verdict == NOT_FREE
    cert = report.certificate
    assert cert["kind"] == "generator_overflow"
    assert cert["cumulative_generators"] > cert["rank"] == 6
    # recheck the certificate numbers from scratch
    steps = minimal_generators(make_shi(2), 2, cert["degree"])
    assert sum(s.new_count for s in steps) == cert["cumulative_generators"]


def test_decide_generic_formula_cases():
    assert decide_free(GENERIC3, 1).verdict == NOT_FREE
    second = decide_free(GENERIC3, 2)
    assert second.verdict == FREE
    assert sum(second.exponents) == saito_counts(3, 2)[1] * 4
    # the sweep agrees without filters
    assert decide_free(GENERIC3, 1, fast_filters=False).verdict == NOT_FREE
    assert decide_free(GENERIC3, 2, fast_filters=False).verdict == FREE


def test_decide_empty_always_free():
    for dim, order in ((1, 1), (2, 2), (3, 2)):
        report = decide_free(Arrangement(dim, ()), order)
        assert report.verdict == FREE
        assert set(report.exponents) == {0}


def test_decide_free_verdicts_self_certify():
    for arr, order in ((RANK2, 1), (RANK2, 2), (make_shi(2), 1),
                       (arr_of(2, "x", "y"), 3)):
        report = decide_free(arr, order)
        assert report.verdict == FREE
        result = saito_check(list(report.basis), arr)
        assert result
        assert tuple(sorted(op.homogeneous_degree() for op in report.basis)) \
            == report.exponents
        assert sum(report.exponents) == report.det_exponent * len(arr)


def test_decide_undecided_below_complete_bound():
    report = decide_free(make_shi(2), 2, max_degree=1, fast_filters=False)
    assert report.verdict == UNDECIDED
    assert report.certificate["kind"] == "degree_bound_too_small"


def test_decide_shi2_order1_free():
    report = decide_free(make_shi(2), 1)
    assert report.verdict == FREE
    assert sum(report.exponents) == 7
    assert report.exponents == (1, 3, 3)


def test_decide_order_zero():
    report = decide_free(RANK2, 0)
    assert report.verdict == FREE
    assert report.exponents == (0,)


def test_decide_product_filter_matches_sweep():
    arr = arr_of(3, "x", "y", "x+y", "z")
    filtered = decide_free(arr, 2)
    swept = decide_free(arr, 2, fast_filters=False)
    assert filtered.verdict == swept.verdict == FREE
    assert filtered.exponents == swept.exponents == (1, 2, 2, 2, 2, 3)
    assert filtered.certificate.get("via") == "product-decomposition"


def test_decide_localization_filter_holm_q1():
    arr = make_named("holm-q1-counterexample")
    for order in (1, 2):
        report = decide_free(arr, order)
        assert report.verdict == NOT_FREE
        assert report.certificate["reason"] == "localization-not-free"
