"""Registry of named tensors and matrix spaces with their expected invariants."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable


from .polyring import QQ, FieldSpec
from .tensor_core import LinearMatrix, Tensor, _object_zeros


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    obj: Tensor | LinearMatrix
    expected: dict = field(default_factory=dict)
    note: str = ""

    @property
    def tensor(self) -> Tensor:
        if isinstance(self.obj, Tensor):
            return self.obj
        return self.obj.to_tensor()

    @property
    def is_pencil(self) -> bool:
        return isinstance(self.obj, LinearMatrix)


def mm_gr_formula(e: int, h: int, l: int) -> int:
    """Closed form for the geometric rank of the matrix multiplication tensor."""
    e, h, l = sorted((e, h, l))
    if e + h >= l:
        return e * h - (e + h - l) ** 2 // 4
    return e * h


def mm(e: int, h: int, l: int, fld: FieldSpec = QQ) -> Tensor:
    """Trace tensor sum_{i,j,k} a_(i,j) (x) b_(j,k) (x) c_(k,i).

    Basis orderings: a_(i,j) -> j*e + i, b_(j,k) -> k*h + j, c_(k,i) -> k*e + i.
    With these choices the axis-0 pencil is block diagonal with l copies of an
    h x e block of independent variables.
    """
    dims = (e * h, h * l, l * e)
    data = _object_zeros(dims, fld)
    for i in range(e):
        for j in range(h):
            for k in range(l):
                data[j * e + i, k * h + j, k * e + i] = fld.one
    return Tensor(data, fld)


def skew3(fld: FieldSpec = QQ) -> Tensor:
    """The alternating tensor sum sign(ijk) a_i (x) b_j (x) c_k on C^3."""
    data = _object_zeros((3, 3, 3), fld)
    for (i, j, k), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}.items():
        data[i, j, k] = fld(s)
    return Tensor(data, fld)


SKEW4_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def skew4(d: int, fld: FieldSpec = QQ) -> Tensor:
    """Span of the first ``d`` elementary skew matrices e_ij - e_ji (i<j, lex order)."""
    if not 1 <= d <= 6:
        raise ValueError("skew4 dimension must be between 1 and 6")
    data = _object_zeros((d, 4, 4), fld)
    for s, (i, j) in enumerate(SKEW4_PAIRS[:d]):
        data[s, i, j] = fld.one
        data[s, j, i] = fld(-1)
    return Tensor(data, fld)


def ex_5x5x6(fld: FieldSpec = QQ) -> Tensor:
    terms = [
        (1, 2, 1), (1, 3, 2), (1, 4, 3),
        (2, 1, 1), (2, 3, 4, -1), (2, 4, 5, -1),
        (3, 1, 2), (3, 2, 4), (3, 4, 6, -1),
        (4, 1, 3), (4, 2, 5), (4, 3, 6),
        (5, 5, 6),
    ]  # fmt: skip
    data = _object_zeros((5, 5, 6), fld)
    for t in terms:
        a, b, c = t[:3]
        data[a - 1, b - 1, c - 1] = fld(t[3] if len(t) > 3 else 1)
    return Tensor(data, fld)


def gr4_counterexample(m: int, fld: FieldSpec = QQ) -> Tensor:
    """Skew 3x3 block in x1..x3 plus an (m-3) x (m-3) block with first row x4..xm
    and x4 along the diagonal; the tensor lives in C^m (x) C^m (x) C^m."""
    if m < 5:
        raise ValueError("gr4-counterexample needs m >= 5")
    pen = _object_zeros((m, m, m), fld)
    for var, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
        pen[i, j, var] = fld.one
        pen[j, i, var] = fld(-1)
    for t in range(m - 3):
        pen[3, 3 + t, 3 + t] = fld.one
        pen[3 + t, 3 + t, 3] = fld.one
    return LinearMatrix(pen, fld).to_tensor()


def compression_w(m: int, fld: FieldSpec = QQ) -> Tensor:
    """sum_i (a1 b_i c_i + a_i b1 c_i + a_i b_i c1); the a1 b1 c1 coefficient is 3."""
    if m < 1:
        raise ValueError("compression-w needs m >= 1")
    data = _object_zeros((m, m, m), fld)
    for i in range(m):
        for idx in ((0, i, i), (i, 0, i), (i, i, 0)):
            data[idx] = fld.norm(data[idx] + 1)
    return Tensor(data, fld)


def beauville_counterexample(fld: FieldSpec = QQ) -> LinearMatrix:
    rows = [
        ["x1", "x2", 0, 0],
        ["x3", "x4", 0, "x1"],
        [0, 0, "x1", "x2"],
        [0, 0, "x3", "x4"],
    ]
    return LinearMatrix.from_polynomials(rows, 4, fld)


def x1_pencil(fld: FieldSpec = QQ) -> LinearMatrix:
    return LinearMatrix.from_polynomials([["x1", "x2"], ["x2", "x3"]], 3, fld)


def x2_pencil(fld: FieldSpec = QQ) -> LinearMatrix:
    return LinearMatrix.from_polynomials([["x1", "x2"], ["x3", "x4"]], 4, fld)


def diag_pencil(x: LinearMatrix) -> LinearMatrix:
    return x.block_diag(x)


def diagonal_npart(n: int, dim: int = 2, fld: FieldSpec = QQ) -> Tensor:
    """sum_i e_i^{(x) n} in (C^dim)^{(x) n}."""
    data = _object_zeros((dim,) * n, fld)
    for i in range(dim):
        data[(i,) * n] = fld.one
    return Tensor(data, fld)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_PATTERNS: list[tuple[re.Pattern, Callable]] = []


def _register(pattern: str):
    def deco(fn):
        _PATTERNS.append((re.compile(pattern + r"$"), fn))
        return fn

    return deco


@_register(r"mm\((\d+),(\d+),(\d+)\)")
def _mm_entry(fld, e, h, l):
    e, h, l = int(e), int(h), int(l)
    if not 1 <= e <= h <= l <= 4:
        raise KeyError("mm(e,h,l) is registered for 1 <= e <= h <= l <= 4")
    return CatalogEntry(
        f"mm({e},{h},{l})",
        mm(e, h, l, fld),
        {"gr": mm_gr_formula(e, h, l), "ml": (e * h, h * l, l * e)},
        "matrix multiplication tensor; GR by the closed formula",
    )


@_register(r"skew3")
def _skew3_entry(fld):
    return CatalogEntry("skew3", skew3(fld), {"gr": 2, "sr": 3, "ml": (3, 3, 3)}, "the primitive GR-2 tensor")


@_register(r"skew4\((\d)\)")
def _skew4_entry(fld, d):
    d = int(d)
    if d not in (4, 5, 6):
        raise KeyError("skew4(d) is registered for d in {4, 5, 6}")
    return CatalogEntry(f"skew4({d})", skew4(d, fld), {"gr": 3}, "space of 4x4 skew matrices")


@_register(r"ex-5x5x6")
def _ex_entry(fld):
    return CatalogEntry("ex-5x5x6", ex_5x5x6(fld), {"gr": 4}, "two distinct GR 3 + 1 splittings")


@_register(r"gr4-counterexample\((\d+)\)")
def _gr4_entry(fld, m):
    m = int(m)
    return CatalogEntry(
        f"gr4-counterexample({m})",
        gr4_counterexample(m, fld),
        {"gr": 4, "sr": 5, "concise": True},
        "skew3 plus a GR-2 compression block",
    )


@_register(r"compression-w\((\d+)\)")
def _w_entry(fld, m):
    m = int(m)
    return CatalogEntry(f"compression-w({m})", compression_w(m, fld), {"gr": 3, "sr": 3}, "compression tensor")


@_register(r"beauville-counterexample")
def _beauville_entry(fld):
    return CatalogEntry(
        "beauville-counterexample",
        beauville_counterexample(fld),
        {"det": "(x1*x4 - x2*x3)^2", "rank_at": {(1, 0, 0, 0): 3, (0, 0, 0, 1): 2}},
        "determinant is a squared quadric but rank is not constant on it",
    )


@_register(r"X1")
def _x1_entry(fld):
    return CatalogEntry("X1", x1_pencil(fld), {"kappa": 0}, "symmetric 2x2 pencil")


@_register(r"X2")
def _x2_entry(fld):
    return CatalogEntry("X2", x2_pencil(fld), {"det": "x1*x4 - x2*x3"}, "generic 2x2 pencil")


def registry_names() -> list[str]:
    names = [f"mm({e},{h},{l})" for e in range(1, 5) for h in range(e, 5) for l in range(h, 5)]
    names += ["skew3", "skew4(4)", "skew4(5)", "skew4(6)", "ex-5x5x6"]
    names += ["gr4-counterexample(m)", "compression-w(m)", "beauville-counterexample", "X1", "X2"]
    return names


def catalog(name: str, fld: FieldSpec = QQ) -> CatalogEntry:
    key = name.replace(" ", "")
    for pattern, fn in _PATTERNS:
        mt = pattern.match(key)
        if mt:
            return fn(fld, *mt.groups())
    raise KeyError(f"unknown catalog entry {name!r}")
