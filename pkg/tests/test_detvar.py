import random
from itertools import combinations, product

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from tgr import catalog as cat
from tgr.detvar import (
    bounded_rank,
    chart_count,
    common_factor_report,
    constant_rank_probe,
    grassmann_charts,
    is_compression_space,
    is_e1_generic,
    kappa,
    minors,
    polynomial_minors,
    stratum_codim,
)
from tgr.errors import ResourceLimitError, limits
from tgr.polyring import FP, QQ
from tgr.tensor_core import LinearMatrix

X1 = cat.x1_pencil()
X2 = cat.x2_pencil()
DX2 = cat.diag_pencil(X2)
SKEW4 = cat.skew4(6).pencil(0)
CORNER = LinearMatrix.from_polynomials([[0, "x1"], ["x2", "x3"]], 3, QQ)


def generic(a, b, field=QQ):
    names = [[f"x{i * b + j + 1}" for j in range(b)] for i in range(a)]
    return LinearMatrix.from_polynomials(names, a * b, field)


def sympy_minors(E, k):
    """Independent oracle: sympy determinants of every k x k submatrix."""
    syms = sympy.symbols(E.ring.names)
    M = sympy.Matrix(E.rows, E.cols, lambda i, j: sum(int(c) * s for c, s in zip(E.coeffs[i, j], syms)))
    out = set()
    for rs in combinations(range(E.rows), k):
        for cs in combinations(range(E.cols), k):
            d = sympy.expand(M.extract(list(rs), list(cs)).det())
            if d != 0:
                out.add(d)
    return out, syms


def kappa_bruteforce(E, p=7):
    """Exhaustive kappa over F_p: the most zero columns (rows) reachable by one row (column) combination."""
    coeffs = np.array(E.coeffs, dtype=np.int64) % p

    def side(C):
        n, m, c = C.shape
        best = 0
        for alpha in product(range(p), repeat=n):
            if not any(alpha):
                continue
            M = np.einsum("i,ijk->kj", np.array(alpha), C) % p  # c x m
            best = max(best, m - rank_mod(M, p))
        return best

    return max(side(coeffs), side(np.transpose(coeffs, (1, 0, 2))))


def kappa_sympy(E):
    """Exact kappa via sympy: least j with a nonzero alpha making every (j+1)-minor of M(alpha) vanish."""
    coeffs = np.array(E.coeffs, dtype=object)

    def side(C):
        n, m, c = C.shape
        alpha = sympy.symbols(f"a0:{n}")
        M = sympy.Matrix(c, m, lambda k, j: sum(alpha[i] * int(C[i, j, k]) for i in range(n)))
        for j in range(min(c, m)):
            eqs = [M.extract(list(rs), list(cs)).det() for rs in combinations(range(c), j + 1) for cs in combinations(range(m), j + 1)]
            eqs = [sympy.expand(e) for e in eqs if sympy.expand(e) != 0]
            if not eqs:
                return m - j
            for i in range(n):
                G = sympy.groebner(eqs + [alpha[i] - 1], *alpha, order="grevlex")
                if list(G.exprs) != [1]:
                    return m - j
        return m - min(c, m)

    return max(side(coeffs), side(np.transpose(coeffs, (1, 0, 2))))


def rank_mod(M, p):
    M = M.copy() % p
    r = 0
    rows, cols = M.shape
    for col in range(cols):
        piv = next((i for i in range(r, rows) if M[i, col]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * pow(int(M[r, col]), -1, p) % p
        for i in range(rows):
            if i != r and M[i, col]:
                M[i] = (M[i] - M[i, col] * M[r]) % p
        r += 1
    return r


class TestMinors:
    def test_x2_determinant(self):
        assert minors(X2, 2).generators == (X2.ring.parse("x1*x4 - x2*x3"),)

    def test_block_determinant(self):
        (det,) = minors(DX2, 4).generators
        assert det == X2.ring.parse("(x1*x4 - x2*x3)^2")

    def test_zero_matrix(self):
        assert minors(LinearMatrix(np.zeros((2, 2, 1), dtype=object)), 1).generators == ()

    def test_bad_size(self):
        with pytest.raises(ValueError):
            minors(X2, 3)
        with pytest.raises(ValueError):
            minors(X2, 0)

    @pytest.mark.parametrize(
        "E, k", [(DX2, 3), (SKEW4, 3), (SKEW4, 2), (cat.beauville_counterexample(), 3), (generic(3, 4), 3)]
    )
    def test_against_sympy(self, E, k):
        expected, syms = sympy_minors(E, k)
        ours = {sympy.sympify(str(m).replace("^", "**"), locals=dict(zip(E.ring.names, syms))) for m in minors(E, k).generators}
        assert {sympy.expand(m) for m in ours} == expected

    def test_laplace_keys(self):
        vals = polynomial_minors(X2.polynomial_matrix(), 1, X2.ring)
        assert len(vals) == 4


class TestStrata:
    def test_generic_3x3(self):
        assert stratum_codim(generic(3, 3), 1).codim == 4

    def test_skew3_pencil(self):
        # a 3 x 3 skew matrix of rank <= 1 is zero, so E_1 is the origin of a 3-dim space
        assert stratum_codim(cat.skew3().pencil(0), 1).codim == 3

    def test_singular_top_stratum(self):
        assert stratum_codim(cat.skew3().pencil(0), 2).codim == 0
        assert stratum_codim(cat.skew4(6).pencil(1), 3).codim == 0

    def test_pfaffian_hypersurface(self):
        # det = Pf^2, so E_3 = E_2 = {Pf = 0}
        assert stratum_codim(SKEW4, 2).codim == 1
        assert stratum_codim(SKEW4, 3).codim == 1

    def test_rank_zero(self):
        assert stratum_codim(X2, 0).codim == 4

    def test_unused_variables_count_in_ambient(self):
        E = LinearMatrix.from_polynomials([["x1", "x2"], ["x2", "x1"]], 3, QQ)
        rep = stratum_codim(E, 1).dim_report
        assert rep.ambient_dim == 3 and rep.codim == 1

    @pytest.mark.parametrize(
        "name", ["X1", "X2", "beauville-counterexample", "mm(2,2,2)", "skew3", "skew4(5)", "ex-5x5x6", "compression-w(4)"]
    )
    def test_catalog_bounds_and_monotonicity(self, name):
        entry = cat.catalog(name, FP)
        E = entry.obj if entry.is_pencil else entry.obj.pencil(0)
        a, b = E.shape
        codims = [stratum_codim(E, r).codim for r in range(min(a, b))]
        for r, c in enumerate(codims):
            assert 0 <= c <= (a - r) * (b - r)
            assert (c == 0) == bounded_rank(E, r)
        assert codims == sorted(codims, reverse=True)

    @given(st.integers(0, 10_000))
    def test_eisenbud_bound_thin(self, seed):
        rnd = random.Random(seed)
        coeffs = np.array([[[FP.random(rnd, 3) for _ in range(6)] for _ in range(3)] for _ in range(3)], dtype=object)
        E = LinearMatrix(coeffs, FP)
        if not is_e1_generic(E):
            return
        for k in range(1, 3):
            assert stratum_codim(E, k).codim >= 3 + 3 - 2 * k - 1


class TestBoundedRank:
    def test_skew4(self):
        assert not bounded_rank(SKEW4, 3)  # det is the squared Pfaffian
        B = cat.skew4(6).pencil(1)
        assert bounded_rank(B, 3)
        assert not bounded_rank(B, 2)

    def test_odd_skew(self):
        E = cat.skew3().pencil(0)
        assert bounded_rank(E, 2) and not bounded_rank(E, 1)

    def test_mm2_is_full_rank(self):
        assert not bounded_rank(DX2, 3)

    def test_zero(self):
        assert bounded_rank(LinearMatrix(np.zeros((2, 3, 1), dtype=object)), 0)


class TestKappa:
    def test_corner(self):
        assert kappa(CORNER).kappa == 1 == kappa_bruteforce(CORNER)
        assert not is_e1_generic(CORNER)

    def test_symmetric_pencil(self):
        assert kappa(X1).kappa == 0 == kappa_bruteforce(X1)
        assert is_e1_generic(X1)

    def test_zero_row(self):
        E = LinearMatrix.from_polynomials([["x1", "x2", "x3"], [0, 0, 0]], 3, QQ)
        rep = kappa(E)
        assert rep.kappa == 3 and rep.row_kappa == 3

    def test_zero_matrix(self):
        assert not is_e1_generic(LinearMatrix(np.zeros((2, 2, 1), dtype=object)))

    @given(st.integers(0, 10_000))
    def test_agrees_with_bruteforce(self, seed):
        rnd = random.Random(seed)
        coeffs = np.array(
            [[[rnd.choice([0, 0, 1, -1, 2]) for _ in range(2)] for _ in range(3)] for _ in range(2)], dtype=object
        )
        E = LinearMatrix(coeffs, QQ)
        rep = kappa(E)
        assert rep.kappa <= max(E.shape)
        assert rep.kappa == kappa_sympy(E)


class TestCompression:
    def test_corner_space(self):
        E = LinearMatrix.from_polynomials([["x1", "x2"], ["x3", 0]], 3, QQ)
        assert is_compression_space(E, 1, 1)

    def test_zero(self):
        assert is_compression_space(LinearMatrix(np.zeros((2, 2, 1), dtype=object)), 0, 0)

    @pytest.mark.parametrize("p", range(4))
    def test_skew4_is_not_a_compression_space(self, p):
        assert not is_compression_space(SKEW4.with_field(FP), p, 3 - p)

    def test_hidden_compression(self):
        # compression after a change of basis: the first row of g . E is zero
        E = LinearMatrix.from_polynomials([["x1", "x2"], ["x1", "x2"]], 2, FP)
        assert is_compression_space(E, 1, 0)
        assert not is_compression_space(X2.with_field(FP), 1, 0)

    def test_chart_budget(self):
        with limits(chart_budget=2):
            with pytest.raises(ResourceLimitError):
                is_compression_space(SKEW4, 2, 1)

    def test_chart_enumeration(self):
        charts = list(grassmann_charts(4, 2))
        assert len(charts) == chart_count(4, 2) == 6
        assert all(len(free) == 4 for _, free in charts)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            is_compression_space(X2, 3, 0)


class TestCommonFactor:
    def test_block_x2(self):
        rep = common_factor_report(DX2, 3)
        assert rep.factor == X2.ring.parse("x1*x4 - x2*x3").monic()
        assert rep.quadratic_rank == 4

    def test_pfaffian(self):
        rep = common_factor_report(SKEW4, 3)
        assert rep.factor == SKEW4.ring.parse("x1*x6 - x2*x5 + x3*x4").monic()
        assert rep.quadratic_rank == 6

    def test_beauville_determinant(self):
        E = cat.beauville_counterexample()
        rep = common_factor_report(E, 4)
        assert rep.factor == E.ring.parse("(x1*x4 - x2*x3)^2").monic()
        assert rep.quadratic_rank is None

    def test_all_minors_vanish(self):
        with pytest.raises(ValueError):
            common_factor_report(cat.skew3().pencil(0), 3)

    def test_constant_rank_probe(self):
        E = cat.beauville_counterexample()
        S = E.ring.parse("x1*x4 - x2*x3")
        assert constant_rank_probe(E, S, [(1, 0, 0, 0), (0, 0, 0, 1)]) == [3, 2]
        with pytest.raises(ValueError):
            constant_rank_probe(E, S, [(1, 0, 0, 1)])
