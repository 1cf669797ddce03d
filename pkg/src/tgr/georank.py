"""Geometric rank, slice-rank decisions, partition rank one, and splitting searches."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

import numpy as np

from . import linalg
from .detvar import (
    bounded_rank,
    generic_rank,
    grassmann_charts,
    polynomial_minors,
    stratum_codim,
)
from .errors import InternalConsistencyError, ResourceLimitError, StrategyError, current_limits
from .groebner import Ideal, affine_dimension, is_solvable
from .polyring import Polynomial, Ring
from .tensor_core import LinearMatrix, Tensor


@dataclass(frozen=True)
class GRReport:
    value: int
    per_axis_minima: tuple  # per axis: tuple of (i, codim(A*_i) + i)
    direct_codim: int
    achieving_i: tuple  # per axis: the smallest minimizing i

    def to_dict(self) -> dict:
        return {
            "gr": self.value,
            "per_axis": [
                {"axis": ax, "strata": [list(p) for p in pairs], "achieving_i": self.achieving_i[ax]}
                for ax, pairs in enumerate(self.per_axis_minima)
            ],
            "direct_codim": self.direct_codim,
        }


@dataclass(frozen=True)
class SRDecision:
    r: int
    answer: bool
    witness: tuple | None = None  # (split, (A' basis, B' basis, C' basis)) in original coordinates
    charts_solved: int = 0

    @property
    def label(self) -> str:
        return "yes" if self.answer else "no"


@dataclass(frozen=True)
class DecompositionCertificate:
    kind: str  # "primitive-part+compression-part" or "none-found"
    parts: tuple  # ((Tensor, gr), ...): primitive part first, then the compression part
    pieces: tuple = ()  # ((axis, phi, v, gr_after), ...) accepted steps
    seed: int = 0

    @property
    def found(self) -> bool:
        return self.kind != "none-found"

    @property
    def gr_split(self) -> tuple[int, ...]:
        return tuple(g for _, g in self.parts)


@dataclass(frozen=True)
class GR3Label:
    label: str  # bounded-rank-3, slice-rank-le-3, mm2-class, gr-exceeds-3
    evidence: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# geometric rank
# ---------------------------------------------------------------------------


def _multilinear_forms(T: Tensor, axes: Sequence[int], last: int, ring: Ring) -> list[Polynomial]:
    """T(x_1, ..., x_{n-1}, e_k) for every k, with the x blocks laid out consecutively."""
    offsets = {}
    pos = 0
    for ax in axes:
        offsets[ax] = pos
        pos += T.dims[ax]
    order = list(axes) + [last]
    data = np.transpose(T.data, order)
    forms: dict[int, dict] = {}
    for idx, v in np.ndenumerate(data):
        if v == 0:
            continue
        exps = [0] * ring.nvars
        for ax, i in zip(axes, idx[:-1]):
            exps[offsets[ax] + i] = 1
        forms.setdefault(idx[-1], {})[tuple(exps)] = v
    return [ring.poly(t) for _, t in sorted(forms.items())]


def gr_direct(T: Tensor, last_axis: int | None = None) -> int:
    """Codimension of the tuples (x_1..x_{n-1}) with T(x_1, ..., x_{n-1}, .) = 0."""
    if T.order == 2:
        return linalg.rank(T.data, T.field)
    last = T.order - 1 if last_axis is None else last_axis
    axes = [i for i in range(T.order) if i != last]
    ring = Ring(sum(T.dims[i] for i in axes), T.field)
    forms = _multilinear_forms(T, axes, last, ring)
    if not forms:
        return 0
    return affine_dimension(Ideal(ring, forms)).codim


def strata_profile(E: LinearMatrix, prune: bool = False) -> list[tuple[int, int]]:
    """Pairs (i, codim(E_i) + i) for i = 0 .. min(a, b).

    With ``prune`` the scan stops once i can no longer beat the running
    minimum, and the last entry is the generic rank g (where E_g = E) read
    off random points; skipped strata are omitted.
    """
    top = min(E.rows, E.cols)
    if E.nvars == 0 or E.is_zero():
        return [(0, 0)]
    out = []
    if prune:
        g = generic_rank(E)
        best = g
        for i in range(g):
            if i >= best:
                break
            c = stratum_codim(E, i).codim
            out.append((i, c + i))
            best = min(best, c + i)
        out.append((g, g))
        return out
    for i in range(top + 1):
        c = stratum_codim(E, i).codim
        out.append((i, c + i))
        if c == 0:
            # strata only grow with i: every later value is i' > i
            out.extend((j, j) for j in range(i + 1, top + 1))
            break
    return out


def gr_alternative(T: Tensor, check_direct: bool = True) -> GRReport:
    """Minimum of codim(A*_i) + i on every axis, with three-way agreement enforced."""
    if T.order != 3:
        raise ValueError("the alternative definition is for order-3 tensors")
    per_axis = []
    mins = []
    achieving = []
    for ax in range(3):
        prof = tuple(strata_profile(T.pencil(ax)))
        per_axis.append(prof)
        m = min(v for _, v in prof)
        mins.append(m)
        achieving.append(min(i for i, v in prof if v == m))
    direct = gr_direct(T) if check_direct else mins[0]
    if len(set(mins)) != 1 or direct != mins[0]:
        raise InternalConsistencyError(f"axis minima {mins} and direct codimension {direct} disagree")
    return GRReport(mins[0], tuple(per_axis), direct, tuple(achieving))


def _best_axis(T: Tensor) -> int:
    return min(range(T.order), key=lambda ax: (T.dims[ax], -ax))


def geometric_rank(T: Tensor) -> int:
    """GR through the strata of the smallest factor of the concise core."""
    if T.is_zero():
        return 0
    if T.order == 2:
        return linalg.rank(T.data, T.field)
    if T.order > 3:
        return gr_direct(T)
    core, _ = T.concise_core()
    ax = _best_axis(core)
    return min(v for _, v in strata_profile(core.pencil(ax), prune=True))


def gr_at_most(T: Tensor, bound: int) -> bool:
    """Decide GR(T) <= bound, stopping as soon as a stratum certifies it."""
    if bound < 0:
        return False
    if T.is_zero():
        return True
    if T.order != 3:
        return geometric_rank(T) <= bound
    core, _ = T.concise_core()
    if min(core.dims) <= bound:
        return True
    E = core.pencil(_best_axis(core))
    if generic_rank(E) <= bound:
        return True
    for i in range(bound + 1):
        if stratum_codim(E, i).codim + i <= bound:
            return True
    return False


# ---------------------------------------------------------------------------
# n-part tensors
# ---------------------------------------------------------------------------


def _inner_polynomial_tensor(T: Tensor, ring: Ring) -> np.ndarray:
    """T(x) for symbolic x on axis 0: an object array of linear forms."""
    inner = np.empty(T.dims[1:], dtype=object)
    for idx in np.ndindex(*T.dims[1:]):
        inner[idx] = ring.linear_form([T.data[(i,) + idx] for i in range(T.dims[0])])
    return inner


def _locus_codim(ring: Ring, polys: list[Polynomial]) -> int:
    polys = [p for p in polys if p]
    if not polys:
        return 0
    return affine_dimension(Ideal(ring, polys)).codim


def _coefficients_in_block(poly: Polynomial, xring: Ring, nx: int) -> list[Polynomial]:
    """Split a polynomial in (x, y) into its y-monomial coefficients, as polynomials in x."""
    groups: dict[tuple, dict] = {}
    for exps, c in poly.terms.items():
        groups.setdefault(exps[nx:], {})[exps[:nx]] = c
    return [xring.poly(t) for t in groups.values()]


def _bounded_rank_locus_codim(inner: np.ndarray, T: Tensor, j: int, xring: Ring) -> int:
    """codim of {x : some pencil of the order-3 tensor T(x) has bounded rank j}."""
    nx = T.dims[0]
    best = nx
    idims = inner.shape
    for q in range(3):
        others = [a for a in range(3) if a != q]
        ny = idims[q]
        big = Ring(nx + ny, T.field)
        lift = [big.var(i) for i in range(nx)]
        a, b = idims[others[0]], idims[others[1]]
        if j >= min(a, b):
            return 0
        mat = [[big.zero() for _ in range(b)] for _ in range(a)]
        for idx in np.ndindex(*idims):
            form = inner[idx]
            if form.is_zero():
                continue
            term = form.substitute(lift) * big.var(nx + idx[q])
            r, s = idx[others[0]], idx[others[1]]
            mat[r][s] = mat[r][s] + term
        polys = []
        for m in polynomial_minors(mat, j + 1, big).values():
            if m:
                polys.extend(_coefficients_in_block(m, xring, nx))
        best = min(best, _locus_codim(xring, polys))
    return best


def _pr1_locus_codim(inner: np.ndarray, T: Tensor, xring: Ring) -> int:
    """codim of {x : T(x) has partition rank <= 1}, via 2-minors of grouped flattenings."""
    k = inner.ndim
    best = T.dims[0]
    for rows in _bipartitions(k):
        cols = [i for i in range(k) if i not in rows]
        flat = np.transpose(inner, list(rows) + cols).reshape(int(np.prod([inner.shape[i] for i in rows])), -1)
        mat = [list(r) for r in flat]
        if min(len(mat), len(mat[0])) < 2:
            return 0
        polys = [m for m in polynomial_minors(mat, 2, xring).values() if m]
        best = min(best, _locus_codim(xring, polys))
    return best


def gr_npart(T: Tensor, strategy: str = "direct", rng: random.Random | None = None) -> int:
    """Geometric rank of an n-part tensor.

    ``recursive`` takes the minimum over j of codim{x : GR(T(x)) <= j} + j on
    the first factor.  The j = 0 term is a flattening rank, the largest j is
    read off a random point, and the intermediate strata are computed exactly
    where a characterization is available (bounded rank 1 and 2 of the inner
    pencils for order 4, partition rank one for higher orders).  The result is
    cross-checked against the direct computation.
    """
    if T.order < 3:
        raise ValueError("gr_npart needs order >= 3")
    if strategy == "direct":
        return gr_direct(T)
    if strategy != "recursive":
        raise ValueError(f"unknown strategy {strategy!r}")
    if T.order == 3:
        value = gr_alternative(T, check_direct=False).value
    else:
        value = _gr_recursive(T, rng or random.Random(0))
    direct = gr_direct(T)
    if direct != value:
        raise InternalConsistencyError(f"recursive strategy gave {value}, direct gave {direct}")
    return value


def _gr_recursive(T: Tensor, rng: random.Random) -> int:
    if T.is_zero():
        return 0
    nx = T.dims[0]
    xring = Ring(nx, T.field)
    s0 = linalg.rank(T.flatten(0), T.field)  # codim of {x : T(x) = 0}
    best = s0
    point = linalg.random_vector(nx, T.field, rng, bound=1000)
    j_gen = geometric_rank(T.contract(0, point))
    best = min(best, j_gen)
    inner = _inner_polynomial_tensor(T, xring)
    for j in range(1, j_gen):
        if j >= best:
            break
        if T.order == 4 and j in (1, 2):
            c = _bounded_rank_locus_codim(inner, T, j, xring)
        elif T.order > 4 and j == 1:
            c = _pr1_locus_codim(inner, T, xring)
        else:
            raise StrategyError(f"no exact stratum characterization for GR <= {j} at order {T.order - 1}")
        best = min(best, c + j)
    return best


def _bipartitions(n: int):
    """Proper bipartitions as the side containing axis 0, by size then lexicographically."""
    for size in range(1, n):
        for rest in combinations(range(1, n), size - 1):
            yield (0,) + rest


def partition_rank_one(T: Tensor):
    """First bipartition whose grouped flattening has rank 1, with the two factors."""
    if T.order < 3:
        raise ValueError("partition rank is for order >= 3")
    for side in _bipartitions(T.order):
        other = tuple(i for i in range(T.order) if i not in side)
        flat = T.flatten_group(side)
        if linalg.rank(flat, T.field) != 1:
            continue
        f = T.field
        col = next(j for j in range(flat.shape[1]) if any(flat[:, j]))
        u = flat[:, col]
        i0 = next(i for i in range(len(u)) if u[i] != 0)
        inv = f.inv(u[i0])
        v = np.array([f.norm(x * inv) for x in flat[i0]], dtype=object)
        left = u.reshape([T.dims[i] for i in side])
        right = v.reshape([T.dims[i] for i in other])
        return (side, other), (left, right)
    return None


# ---------------------------------------------------------------------------
# slice rank
# ---------------------------------------------------------------------------


def _compositions(r: int, caps: Sequence[int]):
    for r1 in range(min(r, caps[0]) + 1):
        for r2 in range(min(r - r1, caps[1]) + 1):
            r3 = r - r1 - r2
            if r3 <= caps[2]:
                yield (r1, r2, r3)


def _annihilated_complement(dim: int, pivots: Sequence[int], f) -> np.ndarray:
    """Basis (columns) of the coordinate subspace killed by the pivot covectors."""
    cols = [j for j in range(dim) if j not in pivots]
    out = np.empty((dim, len(cols)), dtype=object)
    out[...] = f.zero
    for t, j in enumerate(cols):
        out[j, t] = f.one
    return out


def verify_slice_witness(T: Tensor, spaces: Sequence[np.ndarray]) -> bool:
    """Check T lies in A'(x)B(x)C + A(x)B'(x)C + A(x)B(x)C' for the given column bases."""
    f = T.field
    anns = []
    for ax, sp in enumerate(spaces):
        sp = linalg.as_matrix(sp, f) if np.size(sp) else np.empty((T.dims[ax], 0), dtype=object)
        if sp.shape[1] == 0:
            anns.append(linalg.identity(T.dims[ax], f))
        else:
            ns = linalg.nullspace(sp.T, f)
            anns.append(linalg.as_matrix(ns, f) if ns else np.empty((0, T.dims[ax]), dtype=object))
    if any(a.shape[0] == 0 for a in anns):
        return True
    return T.change_basis(anns).is_zero()


def decide_slice_rank_leq(T: Tensor, r: int, witness: bool = True) -> SRDecision:
    """Decide SR(T) <= r by Grassmannian charts and Groebner solvability."""
    if T.order != 3:
        raise ValueError("slice rank decisions are for order-3 tensors")
    if r < 0:
        raise ValueError("negative slice rank bound")
    f = T.field
    if T.is_zero():
        return SRDecision(r, True, ((0, 0, 0), tuple(np.empty((d, 0), dtype=object) for d in T.dims)))
    core, record = T.concise_core()
    dims = core.dims
    if r >= min(dims):
        ax = min(range(3), key=lambda a: dims[a])
        split = tuple(dims[a] if a == ax else 0 for a in range(3))
        spaces = tuple(
            record.bases[a] if a == ax else np.empty((T.dims[a], 0), dtype=object) for a in range(3)
        )
        return SRDecision(r, True, (split, spaces))
    pencils = [core.pencil(a) for a in range(3)]

    def feasible(split):
        for a in range(3):
            E = pencils[a]
            bound = r - split[a]
            if bound < min(E.rows, E.cols) and stratum_codim(E, bound).codim > split[a]:
                return False
        return True

    splits = [s for s in _compositions(r, dims) if feasible(s)]
    nz = [idx for idx, v in np.ndenumerate(core.data) if v != 0]
    # pass 1: coordinate subspaces
    for split in splits:
        for pa in combinations(range(dims[0]), dims[0] - split[0]):
            sa = set(pa)
            left = [e for e in nz if e[0] in sa]
            for pb in combinations(range(dims[1]), dims[1] - split[1]):
                sb = set(pb)
                left2 = [e for e in left if e[1] in sb]
                for pc in combinations(range(dims[2]), dims[2] - split[2]):
                    sc = set(pc)
                    if not any(e[2] in sc for e in left2):
                        spaces = tuple(
                            linalg.matmul(record.bases[a], _annihilated_complement(dims[a], p, f), f)
                            for a, p in enumerate((pa, pb, pc))
                        )
                        return SRDecision(r, True, (split, spaces))
    total = 0
    for split in splits:
        n = 1
        for a in range(3):
            n *= _ncharts(dims[a], dims[a] - split[a])
        total += n
    budget = current_limits().chart_budget
    if total > budget:
        raise ResourceLimitError(f"{total} charts exceed the chart budget of {budget}")
    solved = 0
    for split in splits:
        ks = [dims[a] - split[a] for a in range(3)]
        for charts in product(*(list(grassmann_charts(dims[a], ks[a])) for a in range(3))):
            solved += 1
            if _chart_solvable(core, ks, charts):
                return SRDecision(r, True, None, solved)
    return SRDecision(r, False, None, solved)


def _ncharts(n, k):
    from math import comb

    return comb(n, k)


def _chart_solvable(core: Tensor, ks, charts) -> bool:
    nfree = [len(fr) for _, fr in charts]
    ring = Ring(sum(nfree), core.field)
    offs = [0, nfree[0], nfree[0] + nfree[1]]
    mats = []
    for a in range(3):
        piv, free = charts[a]
        rows = [[ring.zero()] * core.dims[a] for _ in range(ks[a])]
        for row, col in enumerate(piv):
            rows[row][col] = ring.one()
        for t, (row, col) in enumerate(free):
            rows[row][col] = ring.var(offs[a] + t)
        mats.append(rows)
    nz = [(idx, v) for idx, v in np.ndenumerate(core.data) if v != 0]
    eqs = []
    for s in range(ks[0]):
        for t in range(ks[1]):
            for q in range(ks[2]):
                expr = ring.zero()
                for (i, j, k), v in nz:
                    u, w, z = mats[0][s][i], mats[1][t][j], mats[2][q][k]
                    if u and w and z:
                        expr = expr + u * w * z * ring.const(v)
                if expr:
                    if expr.is_constant():
                        return False
                    eqs.append(expr)
    return is_solvable(Ideal(ring, eqs))


# ---------------------------------------------------------------------------
# classification and splitting
# ---------------------------------------------------------------------------


def classify_gr3(T: Tensor) -> GR3Label:
    """Label a 3-tensor by the first satisfied condition of the GR <= 3 trichotomy."""
    rep = gr_alternative(T)
    if rep.value > 3:
        return GR3Label("gr-exceeds-3", {"gr": rep.value})
    for ax in range(3):
        if bounded_rank(T.pencil(ax), 3):
            return GR3Label("bounded-rank-3", {"gr": rep.value, "axis": ax})
    sr = decide_slice_rank_leq(T, 3)
    if sr.answer:
        return GR3Label("slice-rank-le-3", {"gr": rep.value, "witness": sr.witness})
    # neither condition holds, so the trichotomy leaves only the M<2> class
    return GR3Label("mm2-class", {"gr": rep.value, "charts_solved": sr.charts_solved})


def _split_off(T: Tensor, axis: int, phi: Sequence, v: Sequence) -> tuple[Tensor, Tensor]:
    """T = X + Y with Y = v (x) T(phi) and X the projection along v onto ker(phi)."""
    f = T.field
    phi = [f(c) for c in phi]
    v = [f(c) for c in v]
    s = f.norm(sum(a * b for a, b in zip(phi, v)))
    if s != 1:
        if s == 0:
            raise ValueError("v must not lie in the hyperplane")
        inv = f.inv(s)
        v = [f.norm(c * inv) for c in v]
    n = T.dims[axis]
    proj = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            proj[i, j] = f.norm((1 if i == j else 0) - v[i] * phi[j])
    X = T.mode_product(axis, proj)
    return X, T - X


def _candidate_stream(T: Tensor, candidates, rng: random.Random, k: int):
    for cand in candidates or ():
        axis, phi = cand[0], list(cand[1])
        v = list(cand[2]) if len(cand) > 2 else None
        if v is None:
            j = next(i for i, c in enumerate(phi) if c != 0)
            v = [1 if i == j else 0 for i in range(len(phi))]
        yield axis, phi, v
    for axis in range(T.order):
        n = T.dims[axis]
        for i in range(n):
            e = [1 if t == i else 0 for t in range(n)]
            yield axis, e, e
    for t in range(k):
        axis = t % T.order
        n = T.dims[axis]
        phi = linalg.random_vector(n, T.field, rng, bound=5)
        j = next(i for i, c in enumerate(phi) if c != 0)
        yield axis, phi, [1 if i == j else 0 for i in range(n)]


def find_decomposition(T: Tensor, candidates=None, seed: int = 0, k: int = 64, gr: int | None = None):
    """Search for T = X + Y with GR(X) = GR(T) - 1 and ml(Y) = 1 on one factor, iterated.

    This is a semi-decision: "none-found" is not a proof that T is primitive.
    """
    if T.order != 3:
        raise ValueError("decomposition search is for order-3 tensors")
    g = geometric_rank(T) if gr is None else gr
    if g < 2:
        raise ValueError("decomposition search needs GR >= 2")
    rng = random.Random(seed)
    X = T
    pieces = []
    total_y = Tensor.zeros(T.dims, T.field)
    while g >= 2:
        step = None
        for axis, phi, v in _candidate_stream(X, candidates, rng, k):
            slice_ = X.contract(axis, phi)
            if isinstance(slice_, Tensor) and slice_.is_zero():
                continue
            Xn, Y = _split_off(X, axis, phi, v)
            if gr_at_most(Xn, g - 1):
                step = (axis, tuple(phi), tuple(v), Xn, Y)
                break
        if step is None:
            break
        axis, phi, v, X, Y = step
        g -= 1
        total_y = total_y + Y
        pieces.append((axis, phi, v, g))
        candidates = None  # supplied candidates apply to the first step only
    if not pieces:
        return DecompositionCertificate("none-found", ((T, g),), (), seed)
    if g == 1:
        # exhausted into GR-1 pieces: T is compression and the primitive part is zero
        total_y = total_y + X
        X = Tensor.zeros(T.dims, T.field)
        g = 0
    gx = geometric_rank(X)
    gy = geometric_rank(total_y)
    if gx != g:
        raise InternalConsistencyError(f"remaining part has GR {gx}, expected {g}")
    return DecompositionCertificate(
        "primitive-part+compression-part", ((X, gx), (total_y, gy)), tuple(pieces), seed
    )


def verify_gr4_bounds(T: Tensor, seed: int = 0) -> bool:
    """Multilinear-rank constraint for primitive candidates of geometric rank 4."""
    g = gr_alternative(T).value
    if g != 4:
        raise ValueError(f"precondition: GR must be 4, got {g}")
    cert = find_decomposition(T, seed=seed, gr=g)
    if cert.found:
        raise ValueError("precondition: tensor decomposes, so it is not a primitive candidate")
    ml = T.multilinear_ranks()
    return sum(m <= 6 for m in ml) >= 2 or all(m <= 8 for m in ml)
