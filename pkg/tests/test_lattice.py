from itertools import product

import pytest
from hypothesis import assume, given, strategies as st

from torcalc.errors import BoxTooSmall, MixedDimensions, NotASubgroup
from torcalc.harness.oracles import oracle_quotient
from torcalc.lattice import (SubLattice, canonical_basis, contains, omega, quotient, rank_of_monomials,
                             smith_diagonal)


def vec(n, lo=-6, hi=6):
    return st.tuples(*[st.integers(lo, hi)] * n)


@st.composite
def finite_pair(draw, lo=-6, hi=6):
    """(H, A) with A a full-rank sublattice of H, entries in [lo, hi]."""
    n = draw(st.integers(1, 3))
    H = draw(st.lists(vec(n, lo, hi), min_size=1, max_size=n + 1))
    r = SubLattice(H).rank
    assume(r > 0)
    A = []
    for _ in range(draw(st.integers(r, r + 1))):
        c = draw(st.lists(st.integers(-2, 2), min_size=len(H), max_size=len(H)))
        A.append(tuple(sum(ci * h[i] for ci, h in zip(c, H)) for i in range(n)))
    assume(SubLattice(A).rank == r)
    return H, A


class TestBasis:
    def test_multiple_collapses(self):
        assert canonical_basis([(2, 4), (1, 2)]) == [(1, 2)]

    def test_zero_subgroup(self):
        assert canonical_basis([]) == []
        assert SubLattice([]).rank == 0

    def test_full_rank_plane(self):
        assert SubLattice([(2, 1), (1, 2), (1, 1)]) == SubLattice([(1, 0), (0, 1)])

    def test_mixed_dimensions(self):
        with pytest.raises(MixedDimensions):
            SubLattice([(1, 0), (1, 0, 0)])

    @given(st.lists(vec(3), max_size=4))
    def test_basis_spans_the_same_group(self, gens):
        basis = canonical_basis(gens)
        L = SubLattice(gens)
        assert all(L.contains(b) for b in basis)
        assert all(SubLattice(basis).contains(g) for g in gens)
        assert SubLattice(basis) == L

    @given(st.lists(vec(2), max_size=3), st.permutations(range(3)))
    def test_basis_ignores_generator_order(self, gens, perm):
        gens = gens + [(0, 0)] * (3 - len(gens))
        assert canonical_basis(gens) == canonical_basis([gens[i] for i in perm])


class TestContains:
    def test_examples(self):
        L = SubLattice([(2, 1), (1, 2)])
        assert not contains(L, (1, 1))
        assert contains(L, (3, 3))
        assert contains(SubLattice([], dimension=2), (0, 0))

    @given(st.lists(vec(2, -3, 3), min_size=1, max_size=2), vec(2, -3, 3))
    def test_against_exhaustive_search(self, gens, v):
        # entries of size <= 3 keep every existing representation (Cramer or
        # Bezout coefficients) inside [-18, 18], so the search is exhaustive
        found = any(tuple(sum(c * g[i] for c, g in zip(cs, gens)) for i in range(2)) == v
                    for cs in product(range(-20, 21), repeat=len(gens)))
        assert contains(SubLattice(gens, dimension=2), v) == found


class TestQuotient:
    def test_order_three(self):
        rep = quotient(SubLattice([(2, 1), (1, 2), (1, 1)]), SubLattice([(2, 1), (1, 2)]))
        assert rep.finite and rep.elementary_divisors == (3,) and rep.order == 3 and rep.length == 1

    def test_trivial(self):
        Z2 = SubLattice([(1, 0), (0, 1)])
        rep = quotient(Z2, Z2)
        assert rep.elementary_divisors == () and rep.order == 1 and rep.length == 0

    def test_order_two(self):
        rep = quotient(SubLattice([(2, 0), (0, 1)]), SubLattice([(4, 0), (0, 1)]))
        assert rep.elementary_divisors == (2,) and rep.order == 2 and rep.length == 1

    def test_infinite(self):
        assert not quotient(SubLattice([(1, 0), (0, 1)]), SubLattice([(1, 0)])).finite

    def test_not_a_subgroup(self):
        with pytest.raises(NotASubgroup):
            quotient(SubLattice([(2, 0)]), SubLattice([(1, 0)]))

    def test_length_counts_prime_factors(self):
        rep = quotient(SubLattice([(1,)]), SubLattice([(12,)]))
        assert rep.order == 12 and rep.length == 3
        assert omega(1) == 0 and omega(8) == 3

    @given(finite_pair())
    def test_matches_coset_enumeration(self, pair):
        H, A = pair
        try:
            order = oracle_quotient(H, A)
        except BoxTooSmall:
            assume(False)
        assert quotient(SubLattice(H), SubLattice(A)).order == order

    @given(st.lists(vec(3), min_size=1, max_size=4))
    def test_self_quotient(self, H):
        assert quotient(SubLattice(H), SubLattice(H)).order == 1

    @given(finite_pair(), st.lists(st.integers(-2, 2), min_size=4, max_size=4))
    def test_larger_A_gives_smaller_quotient(self, pair, c):
        H, A = pair
        extra = tuple(sum(ci * h[i] for ci, h in zip(c, H)) for i in range(len(H[0])))
        small = quotient(SubLattice(H), SubLattice(A + [extra]))
        big = quotient(SubLattice(H), SubLattice(A))
        assert small.order <= big.order and small.length <= big.length
        assert big.order % small.order == 0


class TestRank:
    def test_examples(self):
        assert rank_of_monomials([(1, 0, 0)]) == 1
        assert rank_of_monomials([(2, 1, 0), (1, 2, 0), (1, 1, 0)]) == 2
        assert rank_of_monomials([(1, 1, 1), (2, 2, 2)]) == 1


class TestOracle:
    def test_examples(self):
        assert oracle_quotient([(1, 0), (0, 1)], [(2, 1), (1, 2)]) == 3
        assert oracle_quotient([(2, 1), (1, 2)], [(2, 1), (1, 2)]) == 1
        assert oracle_quotient([(2, 0), (0, 1)], [(4, 0), (0, 1)]) == 2

    def test_box_too_small(self):
        with pytest.raises(BoxTooSmall):
            oracle_quotient([(1, 0), (0, 1)], [(50, 0), (0, 50)], box=10)


def test_smith_diagonal_product_is_determinant():
    assert sorted(smith_diagonal([[2, 1], [1, 2]])) == [1, 3]
