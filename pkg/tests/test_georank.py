import random
from itertools import permutations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tgr import catalog as cat
from tgr import linalg
from tgr.errors import InternalConsistencyError, ResourceLimitError, limits
from tgr.georank import (
    classify_gr3,
    decide_slice_rank_leq,
    find_decomposition,
    geometric_rank,
    gr_alternative,
    gr_at_most,
    gr_direct,
    gr_npart,
    partition_rank_one,
    strata_profile,
    verify_gr4_bounds,
    verify_slice_witness,
)
from tgr.polyring import FP
from tgr.tensor_core import Tensor, direct_sum

seeds = st.integers(0, 2**32 - 1)


def unit(dims, field=FP):
    return Tensor.outer([[1] + [0] * (d - 1) for d in dims], field)


def sparse_random(dims, rnd, field=FP):
    data = np.empty(dims, dtype=object)
    for idx in product(*map(range, dims)):
        data[idx] = field(rnd.choice([-1, 0, 0, 1]))
    return Tensor(data, field)


def diagonal_sigma_codim(n, dim):
    """Oracle for the diagonal n-part tensor: Sigma is cut out by the dim monomials
    prod_j x_j[i] = 0, a union of coordinate subspaces where one factor of each
    monomial vanishes. Each monomial needs its own variable, so codim is dim."""
    best = None
    for choice in product(range(n - 1), repeat=dim):
        killed = {(j, i) for i, j in enumerate(choice)}
        c = len(killed)
        best = c if best is None else min(best, c)
    return best


class TestDirect:
    def test_rank_one(self):
        assert gr_direct(unit((2, 2, 2))) == 1

    def test_mm2(self):
        assert gr_direct(cat.mm(2, 2, 2, FP)) == 3

    def test_diagonal_four_part(self):
        d = cat.diagonal_npart(4, fld=FP)
        assert gr_direct(d) == 2 == diagonal_sigma_codim(4, 2)

    def test_matrix_rank_for_order_two(self):
        M = Tensor.from_entries((3, 3), {(0, 0): 1, (1, 1): 1}, FP)
        assert gr_direct(M) == 2

    def test_zero(self):
        assert gr_alternative(Tensor.zeros((2, 2, 2), FP)).value == 0
        assert geometric_rank(Tensor.zeros((2, 3, 2), FP)) == 0


class TestAlternative:
    def test_skew3(self):
        rep = gr_alternative(cat.skew3(FP))
        assert rep.value == 2 and rep.direct_codim == 2
        # 2 x 2 minors of the alternating pencil only vanish at the origin (codim 3),
        # so the minimum sits at i = 2 where the whole space counts
        assert rep.per_axis_minima[0] == ((0, 3), (1, 4), (2, 2), (3, 3))
        assert rep.achieving_i == (2, 2, 2)

    def test_skew4_full(self):
        rep = gr_alternative(cat.skew4(6, FP))
        assert rep.value == 3
        assert rep.achieving_i[0] == 2  # Pfaffian hypersurface: 1 + 2

    def test_report_dict(self):
        d = gr_alternative(cat.mm(1, 2, 2, FP)).to_dict()
        assert d["gr"] == 2 and len(d["per_axis"]) == 3

    def test_mismatch_is_reported(self, monkeypatch):
        import tgr.georank as gm

        monkeypatch.setattr(gm, "gr_direct", lambda T, last_axis=None: 99)
        with pytest.raises(InternalConsistencyError):
            gm.gr_alternative(cat.skew3(FP))

    def test_pruned_profile_agrees(self):
        E = cat.gr4_counterexample(6, FP).pencil(0)
        full = min(v for _, v in strata_profile(E))
        assert min(v for _, v in strata_profile(E, prune=True)) == full

    @pytest.mark.parametrize("name", ["mm(1,2,3)", "mm(2,2,2)", "skew4(4)", "skew4(5)", "compression-w(3)", "ex-5x5x6"])
    def test_catalog_values(self, name):
        entry = cat.catalog(name, FP)
        assert geometric_rank(entry.obj) == entry.expected["gr"]

    @settings(max_examples=15)
    @given(seeds, st.sampled_from([(2, 2, 2), (3, 3, 3), (2, 3, 4)]))
    def test_three_way_agreement(self, seed, dims):
        rnd = random.Random(seed)
        T = sparse_random(dims, rnd) if seed % 2 else Tensor.random(dims, FP, rnd)
        rep = gr_alternative(T)
        minima = {min(v for _, v in prof) for prof in rep.per_axis_minima}
        assert minima == {rep.value} and rep.direct_codim == rep.value
        assert geometric_rank(T) == rep.value

    @settings(max_examples=20)
    @given(seeds)
    def test_core_preserves_gr(self, seed):
        rnd = random.Random(seed)
        small = sparse_random((2, 3, 2), rnd)
        embeds = [linalg.as_matrix([[rnd.randint(-2, 2) for _ in range(d)] for _ in range(d + 1)], FP) for d in small.dims]
        T = small.change_basis(embeds)
        core, _ = T.concise_core()
        assert gr_direct(core) == gr_direct(T)

    def test_subadditivity_on_catalog_sums(self):
        parts = [cat.skew3(FP), cat.mm(1, 2, 2, FP), unit((2, 2, 2)), cat.compression_w(3, FP)]
        for s, t in [(0, 1), (0, 2), (1, 3), (0, 0)]:
            S, T = parts[s], parts[t]
            assert gr_direct(direct_sum(S, T)) <= gr_direct(S) + gr_direct(T)

    def test_gr_at_most(self):
        T = cat.gr4_counterexample(7, FP)
        assert gr_at_most(T, 4) and not gr_at_most(T, 3)


class TestNPart:
    def test_rank_one(self):
        assert gr_npart(unit((2, 2, 2, 2))) == 1
        assert gr_npart(unit((2, 2, 2, 2)), "recursive") == 1

    def test_diagonal(self):
        d = cat.diagonal_npart(4, fld=FP)
        assert gr_npart(d) == gr_npart(d, "recursive") == 2

    def test_matrix_product(self):
        M = Tensor.from_entries((2, 2), {(0, 0): 1, (1, 1): 1}, FP)
        N = Tensor.from_entries((2, 2), {(0, 1): 1}, FP)
        T = Tensor(np.multiply.outer(M.data, N.data) % FP.modulus, FP)
        assert gr_npart(T, "recursive") == 1

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            gr_npart(unit((2, 2, 2)), "magic")

    @settings(max_examples=8)
    @given(seeds)
    def test_permutation_invariance(self, seed):
        rnd = random.Random(seed)
        T = sparse_random((2, 2, 2, 2), rnd)
        values = {gr_npart(T.permute(p)) for p in permutations(range(4))}
        assert len(values) == 1

    @settings(max_examples=25)
    @given(seeds, st.booleans())
    def test_partition_rank_one_iff_gr_one(self, seed, product_form):
        rnd = random.Random(seed)
        if product_form:
            perm = rnd.choice(list(permutations(range(4))))
            left = Tensor.random((2, 2), FP, rnd, bound=2)
            right = Tensor.random((2, 2), FP, rnd, bound=2)
            T = Tensor(np.vectorize(FP.norm, otypes=[object])(np.multiply.outer(left.data, right.data)), FP).permute(perm)
        else:
            T = sparse_random((2, 2, 2, 2), rnd)
        if T.is_zero():
            return
        has_witness = partition_rank_one(T) is not None
        assert has_witness == (gr_npart(T, "recursive") == 1)


class TestPartitionRankOne:
    def test_rank_one(self):
        (side, other), _ = partition_rank_one(unit((2, 2, 2, 2)))
        assert side == (0,) and other == (1, 2, 3)

    def test_diagonal(self):
        assert partition_rank_one(cat.diagonal_npart(4, fld=FP)) is None

    def test_explicit_product(self):
        M = Tensor.from_entries((2, 2), {(0, 0): 1, (1, 1): 1}, FP)
        N = Tensor.from_entries((2, 2), {(0, 0): 1}, FP)
        T = Tensor(np.multiply.outer(M.data, N.data), FP)
        (side, other), (left, right) = partition_rank_one(T)
        assert (side, other) == ((0, 1), (2, 3))
        assert linalg.rank(np.array(left).reshape(2, 2), FP) == 2
        assert linalg.rank(np.array(right).reshape(2, 2), FP) == 1


class TestSliceRank:
    def test_rank_one(self):
        assert decide_slice_rank_leq(unit((2, 2, 2)), 1).answer

    def test_mm2(self):
        T = cat.mm(2, 2, 2, FP)
        assert not decide_slice_rank_leq(T, 3).answer
        dec = decide_slice_rank_leq(T, 4)
        assert dec.answer and verify_slice_witness(T, dec.witness[1])

    def test_gr4_counterexample(self):
        T = cat.gr4_counterexample(7, FP)
        assert not decide_slice_rank_leq(T, 4).answer
        dec = decide_slice_rank_leq(T, 5)
        assert dec.answer and verify_slice_witness(T, dec.witness[1])

    def test_chart_budget_is_an_error(self):
        with limits(chart_budget=1):
            with pytest.raises(ResourceLimitError):
                decide_slice_rank_leq(cat.mm(2, 2, 2, FP), 3)

    def test_witness_check_rejects_bad_spaces(self):
        T = cat.skew3(FP)
        e0 = linalg.as_matrix([[1], [0], [0]], FP)
        empty = np.empty((3, 0), dtype=object)
        assert not verify_slice_witness(T, (e0, empty, empty))

    @settings(max_examples=15)
    @given(seeds, st.integers(1, 2))
    def test_gr_bounded_by_slice_rank(self, seed, r):
        T = sparse_random((2, 3, 3), random.Random(seed))
        dec = decide_slice_rank_leq(T, r)
        if dec.answer:
            assert gr_at_most(T, r)
            assert verify_slice_witness(T, dec.witness[1])


class TestClassify:
    def test_mm2(self):
        assert classify_gr3(cat.mm(2, 2, 2, FP)).label == "mm2-class"

    def test_compression_w4(self):
        assert classify_gr3(cat.compression_w(4, FP)).label == "slice-rank-le-3"

    def test_bounded_rank_fixture(self):
        # first five columns of the 5 x 5 x 6 example: a primitive space of bounded rank 3
        T = cat.ex_5x5x6(FP).restrict(2, range(5))
        assert classify_gr3(T).label == "bounded-rank-3"

    def test_skew4_labels(self):
        # the full 6-dim space is bounded rank 3 through its 6 x 4 pencils
        assert classify_gr3(cat.skew4(6, FP)).label == "bounded-rank-3"

    def test_exceeds(self):
        assert classify_gr3(cat.mm(2, 2, 3, FP)).label == "gr-exceeds-3"


class TestDecomposition:
    def test_c_side(self):
        T = cat.ex_5x5x6(FP)
        cert = find_decomposition(T, [(2, [0, 0, 0, 0, 0, 1])])
        assert cert.gr_split == (3, 1)
        X, _ = cert.parts[0]
        assert X == T.change_basis([None, None, np.diag([1, 1, 1, 1, 1, 0]).astype(object)])

    def test_b_side(self):
        cert = find_decomposition(cat.ex_5x5x6(FP), [(1, [0, 0, 0, 0, 1])])
        assert cert.gr_split == (3, 1)

    def test_gr4_counterexample(self):
        cert = find_decomposition(cat.gr4_counterexample(7, FP))
        assert cert.gr_split == (2, 2)

    @pytest.mark.parametrize("T", [cat.mm(2, 2, 2, FP), cat.skew3(FP)], ids=["mm2", "skew3"])
    def test_none_found(self, T):
        cert = find_decomposition(T)
        assert cert.kind == "none-found" and cert.parts[0][0] == T

    def test_compression_side_is_exhausted(self):
        cert = find_decomposition(cat.mm(1, 2, 2, FP))
        assert cert.gr_split == (0, 2)

    @pytest.mark.parametrize("name", ["ex-5x5x6", "gr4-counterexample(6)", "mm(1,2,2)", "compression-w(4)"])
    def test_parts_sum_and_gr_adds(self, name):
        T = cat.catalog(name, FP).obj
        cert = find_decomposition(T, seed=7)
        if not cert.found:
            return
        (X, gx), (Y, gy) = cert.parts
        assert X + Y == T
        assert gx + gy == geometric_rank(T)

    def test_seed_recorded_and_deterministic(self):
        T = cat.gr4_counterexample(6, FP)
        a, b = find_decomposition(T, seed=11), find_decomposition(T, seed=11)
        assert a.seed == 11 and a.pieces == b.pieces

    def test_needs_gr_two(self):
        with pytest.raises(ValueError):
            find_decomposition(unit((2, 2, 2)))


class TestGr4Bounds:
    def test_decomposable_fails_precondition(self):
        with pytest.raises(ValueError):
            verify_gr4_bounds(cat.gr4_counterexample(9, FP))

    def test_wrong_gr(self):
        with pytest.raises(ValueError):
            verify_gr4_bounds(cat.mm(2, 2, 2, FP))

    def test_double_skew(self):
        T = direct_sum(cat.skew3(FP), cat.skew3(FP))
        assert geometric_rank(T) == 4
        assert verify_gr4_bounds(T)
