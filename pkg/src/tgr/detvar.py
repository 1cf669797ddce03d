"""Linear determinantal varieties: minors, strata codimensions, kappa, compression tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Iterator, Sequence

import numpy as np

from . import linalg
from .errors import ResourceLimitError, current_limits
from .groebner import DimReport, Ideal, affine_dimension, has_nonzero_solution, is_solvable
from .polyring import Polynomial, Ring, gcd, quadratic_rank
from .tensor_core import LinearMatrix


@dataclass(frozen=True)
class MinorsIdeal:
    source: LinearMatrix
    k: int
    generators: tuple[Polynomial, ...]

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.source.ring, self.generators)


@dataclass(frozen=True)
class StratumReport:
    r: int
    dim_report: DimReport

    @property
    def codim(self) -> int:
        return self.dim_report.codim


@dataclass(frozen=True)
class KappaReport:
    kappa: int
    side: str  # "row", "column" or "both"
    witness: tuple | None = None
    row_kappa: int = 0
    column_kappa: int = 0


@dataclass(frozen=True)
class CommonFactorReport:
    k: int
    factor: Polynomial
    quadratic_rank: int | None


# ---------------------------------------------------------------------------
# minors
# ---------------------------------------------------------------------------


def polynomial_minors(mat: Sequence[Sequence[Polynomial]], k: int, ring: Ring) -> dict:
    """All k x k minors of a polynomial matrix, keyed by (rows, cols).

    Laplace expansion along the first row of each minor, memoized on
    (row subset, column subset) so smaller minors are shared.
    """
    a = len(mat)
    b = len(mat[0]) if a else 0
    if not 1 <= k <= min(a, b):
        raise ValueError(f"minor size {k} outside [1, {min(a, b)}]")
    memo: dict[tuple, Polynomial] = {}
    zero = ring.zero()

    def det(rows: tuple, cols: tuple) -> Polynomial:
        if len(rows) == 1:
            return mat[rows[0]][cols[0]]
        key = (rows, cols)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total = zero
        r0, rest = rows[0], rows[1:]
        for t, c in enumerate(cols):
            entry = mat[r0][c]
            if entry.is_zero():
                continue
            sub = det(rest, cols[:t] + cols[t + 1 :])
            if sub.is_zero():
                continue
            term = entry * sub
            total = total - term if t % 2 else total + term
        memo[key] = total
        return total

    return {(rs, cs): det(rs, cs) for rs in combinations(range(a), k) for cs in combinations(range(b), k)}


def minors(E: LinearMatrix, k: int) -> MinorsIdeal:
    """The nonzero k x k minors of E as generators of an ideal in the pencil variables."""
    cache = E.__dict__.setdefault("_minor_cache", {})
    if k not in cache:
        if not 1 <= k <= min(E.rows, E.cols):
            raise ValueError(f"minor size {k} outside [1, {min(E.rows, E.cols)}]")
        vals = polynomial_minors(E.polynomial_matrix(), k, E.ring)
        cache[k] = MinorsIdeal(E, k, tuple(m for m in vals.values() if m))
    return cache[k]


def compress_variables(E: LinearMatrix) -> LinearMatrix:
    """Rewrite E so that a maximal set of independent entries become the variables.

    The new variables are the linear forms found at the pivot entries, so the
    result is as sparse as E allows; unused directions of the c-space drop out.
    The codimension of every stratum is unchanged.
    """
    flat = E.coeffs.reshape(-1, E.nvars)
    red, pivots = linalg.rref(flat.T, E.field)
    s = len(pivots)
    coeffs = np.ascontiguousarray(red[:s].T).reshape(E.rows, E.cols, s)
    return LinearMatrix(coeffs, E.field)


def compress_rows(E: LinearMatrix) -> LinearMatrix:
    """Keep a basis of the rows (constant row operations preserve every rank)."""
    flat = E.coeffs.reshape(E.rows, -1)
    basis = linalg.row_basis(flat, E.field)
    if basis.shape[0] == E.rows:
        return E
    return LinearMatrix(basis.reshape(basis.shape[0], E.cols, E.nvars), E.field)


def generic_rank(E: LinearMatrix, rng: random.Random | None = None, trials: int = 2) -> int:
    """Rank at random points (a lower bound that is exact with high probability)."""
    rng = rng or random.Random(0)
    best = 0
    for _ in range(trials):
        pt = [E.field.random(rng, 1000) for _ in range(E.nvars)]
        best = max(best, E.rank_at(pt)) if E.nvars else 0
    return best


def stratum_codim(E: LinearMatrix, r: int) -> StratumReport:
    """Codimension of E_r = {x : rank E(x) <= r} inside the c-dimensional space."""
    if r < 0:
        raise ValueError("negative rank bound")
    c = E.nvars
    if r >= min(E.rows, E.cols):
        return StratumReport(r, DimReport(c, c))
    small = compress_variables(E)
    s = small.nvars
    gens = minors(small, r + 1).generators
    if not gens:
        return StratumReport(r, DimReport(c, c))
    rep = affine_dimension(Ideal(small.ring, gens))
    return StratumReport(r, DimReport(c, rep.variety_dim + (c - s)))


def bounded_rank(E: LinearMatrix, r: int) -> bool:
    """True iff every (r+1)-minor of E vanishes identically."""
    if r < 0:
        raise ValueError("negative rank bound")
    if r >= min(E.rows, E.cols):
        return True
    if E.nvars and generic_rank(E, trials=1) > r:
        return False
    return not minors(E, r + 1).generators


# ---------------------------------------------------------------------------
# index of degeneracy
# ---------------------------------------------------------------------------


def contraction_matrix(E: LinearMatrix, side: str) -> LinearMatrix:
    """M(alpha): row side gives the c x b matrix of alpha^T E, column side the c x a of E beta."""
    if side == "row":
        return LinearMatrix(np.transpose(E.coeffs, (2, 1, 0)), E.field)
    if side == "column":
        return LinearMatrix(np.transpose(E.coeffs, (2, 0, 1)), E.field)
    raise ValueError("side is 'row' or 'column'")


def min_rank(M: LinearMatrix) -> int:
    """Least rank of M(alpha) over nonzero alpha (over the algebraic closure)."""
    M = compress_rows(compress_rows(M).transpose()).transpose()
    top = min(M.rows, M.cols)
    for j in range(top):
        gens = minors(M, j + 1).generators
        ideal = Ideal(M.ring, gens)
        if not gens or has_nonzero_solution(ideal):
            return j
    return top


def kappa(E: LinearMatrix) -> KappaReport:
    a, b = E.rows, E.cols
    if a == 0 or b == 0 or E.nvars == 0 or E.is_zero():
        return KappaReport(max(a, b), "both", None, b, a)
    row_k = b - min_rank(contraction_matrix(E, "row"))
    col_k = a - min_rank(contraction_matrix(E, "column"))
    k = max(row_k, col_k)
    side = "both" if row_k == col_k else ("row" if row_k > col_k else "column")
    witness = _kappa_witness(E, row_k, col_k)
    return KappaReport(k, side, witness, row_k, col_k)


def _kappa_witness(E: LinearMatrix, row_k: int, col_k: int):
    """Coordinate covector achieving kappa, when one exists (best effort)."""
    for side, target, n, other in (("row", row_k, E.rows, E.cols), ("column", col_k, E.cols, E.rows)):
        if target == 0:
            continue
        M = contraction_matrix(E, side)
        for i in range(n):
            alpha = [0] * n
            alpha[i] = 1
            if other - M.rank_at(alpha) == target:
                return (side, tuple(alpha))
    return None


def is_e1_generic(E: LinearMatrix) -> bool:
    return kappa(E).kappa == 0


# ---------------------------------------------------------------------------
# subspace existence through Grassmannian charts
# ---------------------------------------------------------------------------


def grassmann_charts(n: int, k: int) -> Iterator[tuple[tuple[int, ...], list[tuple[int, int]]]]:
    """Standard affine charts of k-dim subspaces of an n-dim space.

    A chart is a pivot set P (|P| = k): the k x n basis matrix has the
    identity on columns P and free unknowns at every other position.
    The charts cover the Grassmannian.
    """
    for piv in combinations(range(n), k):
        rest = [j for j in range(n) if j not in piv]
        yield piv, [(row, col) for row in range(k) for col in rest]


def chart_count(n: int, k: int) -> int:
    return comb(n, k)


def _chart_matrix(n: int, piv, free, ring: Ring, offset: int) -> list[list[Polynomial]]:
    k = len(piv)
    zero, one = ring.zero(), ring.one()
    mat = [[zero] * n for _ in range(k)]
    for row, col in enumerate(piv):
        mat[row][col] = one
    for t, (row, col) in enumerate(free):
        mat[row][col] = ring.var(offset + t)
    return mat


def is_compression_space(E: LinearMatrix, p: int, q: int) -> bool:
    """Is there U in A^* of dim a-p and V in B^* of dim b-q with u^T E(x) v = 0 identically?"""
    a, b = E.rows, E.cols
    if not (0 <= p <= a and 0 <= q <= b):
        raise ValueError("compression sizes out of range")
    ku, kv = a - p, b - q
    if ku == 0 or kv == 0 or E.is_zero():
        return True
    charts_u = list(grassmann_charts(a, ku))
    charts_v = list(grassmann_charts(b, kv))
    nz = {(i, j) for i in range(a) for j in range(b) if any(E.coeffs[i, j])}
    # pass 1: coordinate subspaces (all chart unknowns zero)
    for (pu, _), (pv, _) in product(charts_u, charts_v):
        if not any((i, j) in nz for i in pu for j in pv):
            return True
    total = len(charts_u) * len(charts_v)
    budget = current_limits().chart_budget
    if total > budget:
        raise ResourceLimitError(f"{total} charts exceed the chart budget of {budget}")
    for (pu, fu), (pv, fv) in product(charts_u, charts_v):
        ring = Ring(len(fu) + len(fv), E.field)
        U = _chart_matrix(a, pu, fu, ring, 0)
        V = _chart_matrix(b, pv, fv, ring, len(fu))
        eqs = []
        for x in range(E.nvars):
            for s in range(ku):
                for t in range(kv):
                    expr = ring.zero()
                    for i in range(a):
                        if U[s][i].is_zero():
                            continue
                        for j in range(b):
                            c = E.coeffs[i, j, x]
                            if c and not V[t][j].is_zero():
                                expr = expr + U[s][i] * V[t][j] * ring.const(c)
                    if expr:
                        eqs.append(expr)
        if is_solvable(Ideal(ring, eqs)):
            return True
    return False


# ---------------------------------------------------------------------------
# common factors and rank probes
# ---------------------------------------------------------------------------


def common_factor_report(E: LinearMatrix, k: int) -> CommonFactorReport:
    gens = minors(E, k).generators
    if not gens:
        raise ValueError(f"all {k}-minors vanish; use bounded_rank instead")
    g = gens[0].monic()
    for m in gens[1:]:
        if g.is_constant():
            break
        g = gcd(g, m)
    qr = quadratic_rank(g) if g.degree() == 2 and g.is_homogeneous() else None
    return CommonFactorReport(k, g, qr)


def constant_rank_probe(E: LinearMatrix, quadric: Polynomial, points: Sequence[Sequence]) -> list[int]:
    """Exact rank of E at each point; every point must lie on the quadric."""
    out = []
    for pt in points:
        if quadric.evaluate(pt) != 0:
            raise ValueError(f"point {tuple(pt)} is not on {quadric} = 0")
        out.append(E.rank_at(pt))
    return out
