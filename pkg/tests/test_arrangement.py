"""Arrangement model, flats, products, and decomposition.

The decomposition tests use an independent brute-force oracle: among all
set partitions of the hyperplanes, the components are the finest partition
whose part ranks add up to the total rank.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from arrdiff.arrangement import (Arrangement, arrangement_from_json,
                                 decompose, flat_closure, is_generic,
                                 localize, make_named, make_shi, product)
from arrdiff.linalg import rank_of, row_times_matrix
from arrdiff.qpoly import LinearForm, Poly, variables


def arr_of(dim, *texts):
    return arrangement_from_json({"dim": dim, "forms": list(texts)})


# ---------------------------------------------------------------------------
# brute-force component oracle

def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[head] + partition[i]] + partition[i + 1:]
        yield [[head]] + partition


def oracle_components(arr):
    vectors = [list(f.coefficients) for f in arr.forms]
    total = rank_of(vectors, arr.dim)
    best = None
    for partition in set_partitions(range(len(arr))):
        if sum(rank_of([vectors[i] for i in part], arr.dim)
               for part in partition) != total:
            continue
        if best is None or len(partition) > len(best):
            best = partition
    return {frozenset(part) for part in best}


# ---------------------------------------------------------------------------
# model and defining polynomial

def test_defining_polynomial_golden():
    x, y = variables(2)
    assert arr_of(2, "x", "y", "x+y").defining_polynomial() == x * y * (x + y)
    assert Arrangement(3, ()).defining_polynomial() == Poly.one(3)


def test_shi_defining_polynomial_matches_display():
    arr = make_shi(2)
    x, y, z = variables(3)
    expected = (z * x * y * (x - z) * (y - z) * (x - y) * (x - y - z))
    assert arr.defining_polynomial() == expected
    assert len(arr) == 7
    assert len(make_shi(3)) == 13
    for ell in range(2, 6):
        assert len(make_shi(ell)) == 1 + 2 * ell + ell * (ell - 1)
    with pytest.raises(ValueError):
        make_shi(1)


def test_duplicate_and_proportional_forms_rejected():
    with pytest.raises(ValueError):
        Arrangement(2, [LinearForm([1, 0]), LinearForm([2, 0])])


def test_json_roundtrip():
    arr = make_named("holm-q1-counterexample")
    assert arrangement_from_json(arr.to_json()) == arr
    assert arr.dim == 4 and len(arr) == 6


def test_named_generators():
    assert len(make_named("empty", 2)) == 0
    assert make_named("boolean", 3).defining_polynomial() \
        == arr_of(3, "x", "y", "z").defining_polynomial()
    assert len(make_named("braid", 3)) == 3
    with pytest.raises(ValueError):
        make_named("mystery")


# ---------------------------------------------------------------------------
# flats and localization

def test_flat_closure_shi3_block():
    arr = make_shi(3)
    # indices of x1, x2 and the coning hyperplane
    names = [str(f) for f in arr.forms]
    seed = [names.index("x4"), names.index("x1"), names.index("x2")]
    flat = flat_closure(arr, seed)
    assert flat.rank == 3
    assert len(flat.generators) == 7
    sub = localize(arr, flat)
    x1, x2, _, z = variables(4)
    assert sub.defining_polynomial() == \
        z * x1 * x2 * (x1 - z) * (x2 - z) * (x1 - x2) * (x1 - x2 - z)


def test_flat_closure_trivial_cases():
    arr = arr_of(3, "x", "y", "z", "x+2y+4z")
    empty = flat_closure(arr, [])
    assert empty.rank == 0 and empty.generators == frozenset()
    single = flat_closure(arr, [0])
    assert single.generators == frozenset({0})


def test_flat_closure_idempotent_and_monotone():
    arr = make_shi(2)
    for seed in ([0], [1, 3], [0, 1], [1, 3, 5]):
        flat = flat_closure(arr, seed)
        again = flat_closure(arr, flat.generators)
        assert again == flat
        assert set(seed) <= flat.generators
    small = flat_closure(arr, [1])
    for extra in range(len(arr)):
        bigger = flat_closure(arr, [1, extra])
        assert small.generators <= bigger.generators


def test_localize_requires_closed_flat():
    from arrdiff.arrangement import FlatRef
    arr = arr_of(2, "x", "y", "x+y")
    with pytest.raises(ValueError):
        localize(arr, FlatRef(frozenset({0}), 2))


def test_localize_holm_q1_flat():
    arr = make_named("holm-q1-counterexample")
    flat = flat_closure(arr, [0, 1, 2])  # x, y, z
    assert sorted(flat.generators) == [0, 1, 2, 4]
    sub = localize(arr, flat)
    x, y, z, _ = variables(4)
    assert sub.defining_polynomial() == x * y * z * (x + y + z)
    assert all(form.evaluate([0, 0, 0, 1]) == 0 for form in sub.forms)


def test_localize_at_origin_is_identity():
    arr = make_shi(2)
    flat = flat_closure(arr, range(len(arr)))
    assert localize(arr, flat) == arr


# ---------------------------------------------------------------------------
# products

def test_product_multiplies_defining_polynomials():
    first = arr_of(2, "x", "y", "x+y")
    second = arr_of(1, "x1")
    combined = product(first, second)
    assert combined.dim == 3 and len(combined) == 4
    x, y, z = variables(3)
    assert combined.defining_polynomial() == x * y * (x + y) * z


def test_product_with_empty_preserves_forms():
    first = arr_of(2, "x", "y")
    combined = product(first, Arrangement(2, ()))
    assert combined.dim == 4 and len(combined) == 2
    assert product(Arrangement(1, ()), Arrangement(1, ())).dim == 2


# ---------------------------------------------------------------------------
# genericity and decomposition

def test_is_generic():
    assert is_generic(arr_of(3, "x", "y", "z", "x+y+z"))
    assert not is_generic(arr_of(2, "x", "y", "x+y"))  # dimension too small
    assert not is_generic(make_shi(2))  # {x1, x2, x1-x2} is dependent
    assert not is_generic(arr_of(3, "x", "y", "z"))  # too few hyperplanes


def test_decompose_splits_off_line():
    arr = arr_of(3, "x", "y", "z", "x+y")
    dec = decompose(arr)
    assert {frozenset(c) for c in dec.hyperplane_components} \
        == oracle_components(arr)
    sizes = sorted((len(f.arrangement), f.arrangement.dim)
                   for f in dec.factors)
    assert sizes == [(1, 1), (3, 2)]
    assert not dec.is_irreducible


def test_decompose_shi2_irreducible():
    arr = make_shi(2)
    dec = decompose(arr)
    assert dec.is_irreducible
    assert {frozenset(c) for c in dec.hyperplane_components} \
        == oracle_components(arr)


def test_decompose_rank_deficient_generic():
    arr = arr_of(4, "x1", "x2", "x3", "x1+x2+x3")
    dec = decompose(arr)
    assert dec.rank == 3 and not dec.is_irreducible
    assert len(dec.factors) == 2
    essential = dec.factors[0].arrangement
    assert essential.dim == 3 and len(essential) == 4
    assert is_generic(essential)
    empty = dec.factors[1].arrangement
    assert empty.dim == 1 and len(empty) == 0


def test_decompose_oracle_on_small_arrangements():
    cases = [
        arr_of(2, "x", "y"),
        arr_of(2, "x", "y", "x+y"),
        arr_of(3, "x", "y", "z", "x-y"),
        arr_of(3, "x", "x+y", "z"),
        arr_of(4, "x1", "x2", "x3", "x4", "x1+x2", "x3+x4"),
        make_named("holm-q1-counterexample"),
    ]
    for arr in cases:
        dec = decompose(arr)
        assert {frozenset(c) for c in dec.hyperplane_components} \
            == oracle_components(arr)


def test_decompose_factors_reassemble_via_basis_change():
    arr = arr_of(4, "x1", "x2", "x3", "x4", "x1+x2", "x3+x4")
    dec = decompose(arr)
    from arrdiff.linalg import invert
    inverse = invert([list(r) for r in dec.basis_change])
    transformed = {LinearForm(row_times_matrix(list(f.coefficients), inverse))
                   for f in arr.forms}
    reassembled = set()
    for factor in dec.factors:
        for form in factor.arrangement.forms:
            padded = [Fraction(0)] * arr.dim
            for coord, value in zip(factor.coordinates, form.coefficients):
                padded[coord] = value
            reassembled.add(LinearForm(padded))
    assert transformed == reassembled


def test_empty_arrangement_decomposition():
    dec = decompose(Arrangement(3, ()))
    assert len(dec.factors) == 1 and dec.rank == 0
    assert not dec.is_irreducible
    assert decompose(Arrangement(1, ())).is_irreducible
