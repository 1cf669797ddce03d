"""Exact dense linear algebra over a FieldSpec (numpy object arrays)."""

from __future__ import annotations

import random
from typing import Sequence

import numpy as np

from .polyring import FieldSpec


def as_matrix(rows, field: FieldSpec) -> np.ndarray:
    a = np.array(rows, dtype=object)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = field(v)
    return out


def rref(rows, field: FieldSpec) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    a = as_matrix(rows, field)
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for col in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i, col] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = field.inv(a[r, col])
        a[r] = [field.norm(v * inv) for v in a[r]]
        for i in range(m):
            if i != r and a[i, col] != 0:
                c = a[i, col]
                a[i] = [field.norm(x - c * y) for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a, pivots


def rank(rows, field: FieldSpec) -> int:
    a = as_matrix(rows, field)
    if a.size == 0:
        return 0
    m, n = a.shape
    a = [list(r) for r in a]
    rk = 0
    for col in range(n):
        piv = next((i for i in range(rk, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        inv = field.inv(a[rk][col])
        prow = a[rk]
        for i in range(rk + 1, m):
            c = a[i][col]
            if c:
                c = c * inv
                a[i] = [field.norm(x - c * y) for x, y in zip(a[i], prow)]
        rk += 1
        if rk == m:
            break
    return rk


def nullspace(rows, field: FieldSpec) -> list[list]:
    """Basis of the right kernel ``{v : A v = 0}``."""
    a, pivots = rref(rows, field)
    n = a.shape[1]
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for fj in free:
        v = [field.zero] * n
        v[fj] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = field.norm(-a[r, fj])
        basis.append(v)
    return basis


def column_basis(rows, field: FieldSpec) -> np.ndarray:
    """Columns of ``A`` at the pivot positions (a basis of its column space)."""
    a = as_matrix(rows, field)
    _, pivots = rref(a, field)
    return a[:, pivots]


def row_basis(rows, field: FieldSpec) -> np.ndarray:
    a, pivots = rref(rows, field)
    return a[: len(pivots)]


def inverse(rows, field: FieldSpec) -> np.ndarray:
    a = as_matrix(rows, field)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    eye = identity(n, field)
    aug, pivots = rref(np.hstack([a, eye]), field)
    if pivots[:n] != list(range(n)) or len(pivots) < n or pivots[n - 1] >= n:
        raise ZeroDivisionError("singular matrix")
    return aug[:, n:]


def left_inverse(rows, field: FieldSpec) -> np.ndarray:
    """Some ``L`` with ``L A = I`` for ``A`` of full column rank."""
    a = as_matrix(rows, field)
    m, n = a.shape
    if rank(a, field) != n:
        raise ValueError("matrix does not have full column rank")
    _, pivots = rref(a.T, field)
    # rows of A at pivot positions of the transposed echelon form are independent
    sub = a[pivots, :]
    inv = inverse(sub, field)
    out = np.empty((n, m), dtype=object)
    out[:] = field.zero
    out[:, pivots] = inv
    return out


def identity(n: int, field: FieldSpec) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    out[:] = field.zero
    for i in range(n):
        out[i, i] = field.one
    return out


def matmul(a, b, field: FieldSpec) -> np.ndarray:
    out = np.dot(as_matrix(a, field), as_matrix(b, field))
    if field.is_prime:
        out = np.vectorize(lambda v: v % field.modulus, otypes=[object])(out)
    return out


def random_invertible(n: int, field: FieldSpec, rng: random.Random, bound: int = 3) -> np.ndarray:
    while True:
        m = as_matrix([[field.random(rng, bound) for _ in range(n)] for _ in range(n)], field)
        if rank(m, field) == n:
            return m


def random_vector(n: int, field: FieldSpec, rng: random.Random, nonzero=True, bound: int = 10) -> list:
    while True:
        v = [field.random(rng, bound) for _ in range(n)]
        if not nonzero or any(v):
            return v


def solve(rows, rhs: Sequence, field: FieldSpec) -> list | None:
    """One solution of ``A x = rhs`` or None."""
    a = as_matrix(rows, field)
    m, n = a.shape
    b = as_matrix([[v] for v in rhs], field) if m else np.empty((0, 1), dtype=object)
    aug, pivots = rref(np.hstack([a, b]), field)
    if n in pivots:
        return None
    x = [field.zero] * n
    for r, pc in enumerate(pivots):
        x[pc] = aug[r, n]
    return x
