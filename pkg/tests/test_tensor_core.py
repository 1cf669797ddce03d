import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tgr import catalog as cat
from tgr import linalg
from tgr.polyring import FP, QQ
from tgr.tensor_core import LinearMatrix, Tensor, direct_sum, load_json_object

MM_NAMES = [f"mm({e},{h},{l})" for e in range(1, 5) for h in range(e, 5) for l in range(h, 5)]


def unit_tensor(dims, field=QQ):
    return Tensor.outer([[1] + [0] * (d - 1) for d in dims], field)


class TestFlatten:
    def test_rank_one(self):
        t = unit_tensor((2, 2, 2))
        for axis in range(3):
            assert linalg.rank(t.flatten(axis), QQ) == 1

    def test_mm2_flattening(self):
        flat = cat.mm(2, 2, 2).flatten(0)
        assert flat.shape == (4, 16)
        assert linalg.rank(flat, QQ) == 4

    def test_zero(self):
        assert not Tensor.zeros((2, 3, 2)).flatten(1).any()
        assert Tensor.zeros((2, 3, 2)).multilinear_ranks() == (0, 0, 0)

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            unit_tensor((2, 2, 2)).flatten(3)

    @pytest.mark.parametrize(
        "tensor, expected",
        [(cat.mm(2, 2, 2), (4, 4, 4)), (cat.skew3(), (3, 3, 3)), (unit_tensor((2, 2, 2)), (1, 1, 1))],
        ids=["mm2", "skew3", "rank-one"],
    )
    def test_multilinear_ranks(self, tensor, expected):
        assert tensor.multilinear_ranks() == expected

    @pytest.mark.parametrize("name", MM_NAMES)
    def test_mm_registry_ranks(self, name):
        entry = cat.catalog(name, FP)
        assert entry.obj.multilinear_ranks() == entry.expected["ml"]

    @given(st.integers(0, 10_000))
    def test_ranks_invariant_under_basis_change(self, seed):
        rnd = random.Random(seed)
        t = Tensor.from_entries((3, 3, 2), {(0, 0, 0): 1, (1, 1, 0): 2, (0, 2, 1): 1}, FP)
        mats = [linalg.random_invertible(d, FP, rnd) for d in t.dims]
        assert t.change_basis(mats).multilinear_ranks() == t.multilinear_ranks()


class TestPencil:
    def test_mm2_block_form(self):
        E = cat.mm(2, 2, 2).pencil(0)
        x = E.ring.gens
        D = [[x[0], x[1]], [x[2], x[3]]]
        zero = E.ring.zero()
        expected = [D[0] + [zero, zero], D[1] + [zero, zero], [zero, zero] + D[0], [zero, zero] + D[1]]
        assert E.polynomial_matrix() == expected

    def test_example_display(self):
        E = cat.ex_5x5x6().pencil(0)
        display = [
            ["x2", "x3", "x4", 0, 0, 0],
            ["x1", 0, 0, "x3", "x4", 0],
            [0, "x1", 0, "-x2", 0, "x4"],
            [0, 0, "x1", 0, "-x2", "-x3"],
            [0, 0, 0, 0, 0, "x5"],
        ]
        assert E == LinearMatrix.from_polynomials(display, 5, QQ)

    def test_rank_one(self):
        E = unit_tensor((2, 2, 2)).pencil(0)
        assert E.entry(0, 0) == E.ring.var(0)
        assert sum(1 for i in range(2) for j in range(2) if not E.entry(i, j).is_zero()) == 1

    def test_needs_order_three(self):
        with pytest.raises(ValueError):
            Tensor.zeros((2, 2, 2, 2)).pencil(0)

    @given(st.integers(0, 10_000), st.integers(0, 2))
    def test_pencil_matches_contraction(self, seed, axis):
        rnd = random.Random(seed)
        t = Tensor.random((2, 3, 4), FP, rnd)
        alpha = linalg.random_vector(t.dims[axis], FP, rnd)
        assert (t.pencil(axis).evaluate(alpha) == t.contract(axis, alpha).data).all()


class TestConcise:
    def test_core_dimensions(self):
        rnd = random.Random(3)
        core_src = Tensor.random((2, 3, 3), FP, rnd)
        padded = Tensor.random((4, 2), FP, rnd)  # 4 x 2 embedding of axis 0
        t = core_src.mode_product(0, padded.data)
        assert t.dims == (4, 3, 3) and t.multilinear_ranks()[0] == 2
        core, record = t.concise_core()
        assert core.dims == (2, 3, 3)
        assert core.multilinear_ranks() == core.dims
        assert not record.is_identity()

    def test_concise_input_unchanged(self):
        t = cat.skew3()
        core, record = t.concise_core()
        assert core == t and record.is_identity()

    def test_gr4_example_is_concise(self):
        assert cat.gr4_counterexample(7).is_concise()

    def test_zero_core(self):
        core, _ = Tensor.zeros((2, 2, 2)).concise_core()
        assert core.dims == (0, 0, 0)

    @given(st.integers(0, 10_000))
    def test_core_has_full_flattenings(self, seed):
        rnd = random.Random(seed)
        small = Tensor.random((2, 3, 2), FP, rnd)
        embeds = [np.array([[rnd.randint(-2, 2) for _ in range(d)] for _ in range(d + 1)], dtype=object) for d in small.dims]
        t = small.change_basis(embeds)
        core, _ = t.concise_core()
        assert core.multilinear_ranks() == core.dims
        assert core.dims == t.multilinear_ranks()


class TestDirectSum:
    def test_rank_one_sum(self):
        s = direct_sum(unit_tensor((1, 1, 1)), unit_tensor((1, 1, 1)))
        assert s.multilinear_ranks() == (2, 2, 2)

    def test_with_empty(self):
        t = cat.skew3()
        assert direct_sum(t, Tensor.zeros((0, 0, 0))) == t

    def test_gr4_construction(self):
        skew = np.zeros((3, 3, 3), dtype=object)
        for var, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
            skew[i, j, var], skew[j, i, var] = 1, -1
        block = np.zeros((4, 4, 4), dtype=object)
        for t in range(4):
            block[0, t, t] = 1
            block[t, t, 0] = 1
        parts = [LinearMatrix(p, QQ).to_tensor() for p in (skew, block)]
        assert direct_sum(*parts) == cat.gr4_counterexample(7)

    def test_order_mismatch(self):
        with pytest.raises(ValueError):
            direct_sum(Tensor.zeros((1, 1, 1)), Tensor.zeros((1, 1)))


class TestJson:
    @pytest.mark.parametrize("name", ["mm(2,2,2)", "skew3", "ex-5x5x6", "gr4-counterexample(6)"])
    def test_tensor_round_trip(self, name):
        t = cat.catalog(name).obj
        assert Tensor.from_json(t.to_json()) == t

    def test_linear_matrix_round_trip(self):
        E = cat.beauville_counterexample()
        assert LinearMatrix.from_json(E.to_json()) == E
        assert load_json_object(E.to_json()) == E

    def test_field_conversion(self):
        t = Tensor.from_json('{"dims": [1, 1, 2], "entries": [{"idx": [0, 0, 1], "val": "1/2"}]}', FP)
        assert t.field == FP and t.data[0, 0, 1] == FP("1/2")

    @pytest.mark.parametrize(
        "text",
        [
            "[]",
            '{"dims": [2, 0, 2]}',
            '{"dims": [2]}',
            '{"dims": [2, 2], "entries": [{"idx": [2, 0], "val": 1}]}',
            '{"rows": 2, "cols": 2}',
        ],
    )
    def test_rejects_bad_json(self, text):
        with pytest.raises((ValueError, KeyError)):
            load_json_object(text)


class TestLinearMatrix:
    def test_from_polynomials(self):
        E = LinearMatrix.from_polynomials([["x1", "x2"], ["x3", "x4"]], 4, QQ)
        assert E.rank_at([1, 0, 0, 1]) == 2 and E.rank_at([1, 1, 1, 1]) == 1

    def test_rejects_nonlinear_entries(self):
        with pytest.raises(ValueError):
            LinearMatrix.from_polynomials([["x1^2"]], 1, QQ)
        with pytest.raises(ValueError):
            LinearMatrix.from_polynomials([["x1 + 1"]], 1, QQ)

    def test_tensor_round_trip(self):
        E = cat.x2_pencil()
        assert E.to_tensor().pencil(0) == E
