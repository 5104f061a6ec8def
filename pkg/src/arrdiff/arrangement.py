"""Central hyperplane arrangements: model, lattice flats, products, factors.

An arrangement is an ordered, duplicate-free collection of linear forms in
a fixed ambient dimension.  Flats of the intersection lattice are stored
by their hyperplane-index closure, which keeps everything exact and
finite; geometric questions (containment, rank) reduce to rational rank
computations on the coefficient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .linalg import RowBasis, invert, row_times_matrix, solve_in_row_space
from .qpoly import LinearForm, Poly, as_fraction, parse_linear_form


class Arrangement:
    """A finite set of hyperplanes through the origin.

    The input order of the forms is preserved (it fixes serialization and
    all reported witnesses); set semantics rely on the canonical scaling
    of :class:`LinearForm`, so duplicates are plain equality.
    """

    def __init__(self, dim: int, forms: Iterable[LinearForm]):
        if dim < 1:
            raise ValueError("ambient dimension must be at least 1")
        forms = tuple(forms)
        for form in forms:
            if form.dim != dim:
                raise ValueError(f"form {form} does not live in dimension {dim}")
        if len(set(forms)) != len(forms):
            raise ValueError("arrangement forms must be pairwise distinct")
        self.dim = dim
        self.forms = forms

    def __len__(self) -> int:
        return len(self.forms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Arrangement):
            return NotImplemented
        return self.dim == other.dim and set(self.forms) == set(other.forms)

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.forms)))

    def __repr__(self) -> str:
        body = ", ".join(str(f) for f in self.forms) or "empty"
        return f"Arrangement(dim={self.dim}: {body})"

    @cached_property
    def _vectors(self) -> list[list[Fraction]]:
        return [list(f.coefficients) for f in self.forms]

    def defining_polynomial(self) -> Poly:
        """Product of all forms; the empty product is 1."""
        q = Poly.one(self.dim)
        for form in self.forms:
            q = q * form.to_poly()
        return q

    def to_json(self) -> dict:
        return {"dim": self.dim, "forms": [f.to_json() for f in self.forms]}


def arrangement_from_json(data: dict) -> Arrangement:
    """Parse {"dim": n, "forms": [...]}; each form is a coefficient list
    of "p/q" strings or a textual linear form like "x1-x2"."""
    dim = int(data["dim"])
    forms = []
    for entry in data["forms"]:
        if isinstance(entry, str):
            forms.append(parse_linear_form(entry, dim))
        else:
            forms.append(LinearForm([as_fraction(c) for c in entry]))
    return Arrangement(dim, forms)


@dataclass(frozen=True)
class FlatRef:
    """A lattice flat, stored as the set of all hyperplanes containing it.

    Instances should come from :func:`flat_closure`, which guarantees the
    closure property (the generator set is maximal for the flat).
    """

    generators: frozenset[int]
    rank: int


def flat_closure(arr: Arrangement, seed: Iterable[int]) -> FlatRef:
    """Close a set of hyperplane indices to the full flat they cut out.

    A hyperplane contains the intersection of the seed exactly when its
    form lies in the span of the seed forms, which is an exact rank test.
    """
    seed = sorted(set(seed))
    for i in seed:
        if not 0 <= i < len(arr):
            raise IndexError(f"hyperplane index {i} out of range")
    span = RowBasis(arr.dim)
    for i in seed:
        span.add(arr._vectors[i])
    rank = span.rank
    members = frozenset(i for i in range(len(arr))
                        if span.contains(arr._vectors[i]))
    return FlatRef(generators=members, rank=rank)


def localize(arr: Arrangement, flat: FlatRef) -> Arrangement:
    """Subarrangement of the hyperplanes containing a flat.

    The ambient dimension is unchanged.  The flat must be closed in this
    arrangement (i.e. produced by :func:`flat_closure` on it).
    """
    if flat_closure(arr, flat.generators) != flat:
        raise ValueError("flat is not closed in this arrangement")
    return Arrangement(arr.dim, [arr.forms[i] for i in sorted(flat.generators)])


def product(first: Arrangement, second: Arrangement) -> Arrangement:
    """Product arrangement in the direct sum of the two ambient spaces."""
    dim = first.dim + second.dim
    pad_left = (Fraction(0),) * first.dim
    pad_right = (Fraction(0),) * second.dim
    forms = [LinearForm(f.coefficients + pad_right) for f in first.forms]
    forms += [LinearForm(pad_left + f.coefficients) for f in second.forms]
    return Arrangement(dim, forms)


def is_generic(arr: Arrangement) -> bool:
    """More hyperplanes than the dimension (>= 3) and every ell-subset of
    forms has full rank, i.e. any ell hyperplanes meet only at the origin."""
    n, ell = len(arr), arr.dim
    if not (n > ell >= 3):
        return False
    for subset in combinations(range(n), ell):
        basis = RowBasis(ell)
        for i in subset:
            basis.add(arr._vectors[i])
        if basis.rank != ell:
            return False
    return True


# ---------------------------------------------------------------------------
# product decomposition

@dataclass(frozen=True)
class Factor:
    """One factor of a decomposition, in its own adapted coordinates."""

    arrangement: Arrangement
    coordinates: tuple[int, ...]  # indices of its block in the new coordinates


@dataclass(frozen=True)
class Decomposition:
    """Finest product decomposition, together with the coordinate change.

    ``basis_change`` holds the new coordinate covectors as rows in the old
    coordinates; a form with old coefficient row a has new coefficients
    a * basis_change^-1.  The essential factors come first, ordered by
    their smallest hyperplane index; a rank-deficient arrangement gets one
    trailing empty factor.
    """

    factors: tuple[Factor, ...]
    basis_change: tuple[tuple[Fraction, ...], ...]
    rank: int
    hyperplane_components: tuple[tuple[int, ...], ...]

    @property
    def is_irreducible(self) -> bool:
        """True when the arrangement admits no proper product splitting."""
        dim = len(self.basis_change)
        if dim == 1:
            return True
        return len(self.factors) == 1 and self.rank == dim


def decompose(arr: Arrangement) -> Decomposition:
    """Finest decomposition of an arrangement into product factors.

    The hyperplanes are partitioned into the connected components of the
    linear matroid on their normal vectors; components are detected by
    fusing the fundamental circuits of the non-basis normals with respect
    to a greedily chosen basis.  The normal span of each component gets a
    coordinate block (spanned by its own forms), and any rank deficiency
    becomes an empty factor on the remaining coordinates.
    """
    dim = arr.dim
    n = len(arr)
    vectors = arr._vectors

    identity = [[Fraction(1 if i == j else 0) for j in range(dim)]
                for i in range(dim)]
    if n == 0:
        empty = Factor(Arrangement(dim, ()), tuple(range(dim)))
        return Decomposition((empty,), tuple(tuple(r) for r in identity),
                             0, ())

    # greedy matroid basis of the normal vectors
    span = RowBasis(dim)
    basis_indices = [i for i in range(n) if span.add(vectors[i])]
    rank = len(basis_indices)

    # union-find over hyperplanes, fused along fundamental circuits
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    basis_vectors = [vectors[i] for i in basis_indices]
    basis_set = set(basis_indices)
    for i in range(n):
        if i in basis_set:
            continue
        coeffs = solve_in_row_space(basis_vectors, vectors[i])
        assert coeffs is not None  # the basis spans every normal
        for j, c in zip(basis_indices, coeffs):
            if c:
                union(i, j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    components = tuple(tuple(groups[root]) for root in sorted(groups))

    # adapted coordinates: per-component blocks, then a complement
    new_rows: list[list[Fraction]] = []
    blocks: list[tuple[int, int]] = []
    for component in components:
        block_basis = RowBasis(dim)
        start = len(new_rows)
        for i in component:
            if block_basis.add(vectors[i]):
                new_rows.append(list(vectors[i]))
        blocks.append((start, len(new_rows) - start))
    assert len(new_rows) == rank  # component ranks are additive

    extension = RowBasis(dim)
    for row in new_rows:
        extension.add(row)
    for k in range(dim):
        unit = [Fraction(1 if j == k else 0) for j in range(dim)]
        if extension.add(unit):
            new_rows.append(unit)
    change = new_rows
    inverse = invert(change)
    assert inverse is not None

    factors = []
    for component, (start, size) in zip(components, blocks):
        local_forms = []
        for i in component:
            coords = row_times_matrix(vectors[i], inverse)
            assert not any(coords[:start]) and not any(coords[start + size:])
            local_forms.append(LinearForm(coords[start:start + size]))
        factors.append(Factor(Arrangement(size, local_forms),
                              tuple(range(start, start + size))))
    if rank < dim:
        factors.append(Factor(Arrangement(dim - rank, ()),
                              tuple(range(rank, dim))))
    return Decomposition(tuple(factors),
                         tuple(tuple(r) for r in change),
                         rank, components)


# ---------------------------------------------------------------------------
# named arrangements

def make_shi(ell: int) -> Arrangement:
    """The (ell+1)-dimensional coned Shi arrangement of type A.

    Coordinates are x1..x_ell plus the coning variable as the last one;
    the hyperplane count is 1 + 2*ell + ell*(ell-1).
    """
    if ell < 2:
        raise ValueError("the coned Shi arrangement needs ell >= 2")
    dim = ell + 1
    z = dim - 1

    def cov(entries: dict[int, int]) -> LinearForm:
        return LinearForm([Fraction(entries.get(i, 0)) for i in range(dim)])

    forms = [cov({z: 1})]
    for i in range(ell):
        forms.append(cov({i: 1}))
        forms.append(cov({i: 1, z: -1}))
    for i in range(ell):
        for j in range(i + 1, ell):
            forms.append(cov({i: 1, j: -1}))
            forms.append(cov({i: 1, j: -1, z: -1}))
    return Arrangement(dim, forms)


def make_named(name: str, dim: int | None = None) -> Arrangement:
    """Build a named arrangement: empty, boolean, braid, shi, or the
    irreducible 4-dimensional example x*y*z*w*(x+y+z)*(x+y+z+w)."""
    key = name.lower()
    if key == "empty":
        if dim is None or dim < 1:
            raise ValueError("empty arrangement needs a dimension >= 1")
        return Arrangement(dim, ())
    if key == "boolean":
        if dim is None or dim < 1:
            raise ValueError("boolean arrangement needs a dimension >= 1")
        return Arrangement(dim, [LinearForm([Fraction(1 if j == i else 0)
                                             for j in range(dim)])
                                 for i in range(dim)])
    if key == "braid":
        if dim is None or dim < 2:
            raise ValueError("braid arrangement needs a dimension >= 2")
        forms = []
        for i in range(dim):
            for j in range(i + 1, dim):
                forms.append(LinearForm([Fraction(1 if k == i else -1 if k == j else 0)
                                         for k in range(dim)]))
        return Arrangement(dim, forms)
    if key == "shi":
        if dim is None:
            raise ValueError("shi arrangement needs the parameter ell")
        return make_shi(dim)
    if key in ("holm-q1-counterexample", "holm-q1"):
        return arrangement_from_json({
            "dim": 4,
            "forms": [["1", "0", "0", "0"], ["0", "1", "0", "0"],
                      ["0", "0", "1", "0"], ["0", "0", "0", "1"],
                      ["1", "1", "1", "0"], ["1", "1", "1", "1"]],
        })
    raise ValueError(f"unknown arrangement name {name!r}")
