"""Dense tensors, linear matrices (pencils) and their basic invariants."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from . import linalg
from .polyring import QQ, FieldSpec, Polynomial, Ring


def _object_zeros(shape, field: FieldSpec) -> np.ndarray:
    a = np.empty(shape, dtype=object)
    a[...] = field.zero
    return a


class Tensor:
    """An order-n tensor stored densely; axis ``i`` has dimension ``dims[i]``."""

    def __init__(self, data, field: FieldSpec = QQ):
        arr = np.array(data, dtype=object)
        if arr.ndim < 2:
            raise ValueError("tensors have order at least 2")
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = field(v)
        self.data = out
        self.field = field

    # construction ---------------------------------------------------

    @classmethod
    def zeros(cls, dims: Sequence[int], field: FieldSpec = QQ) -> "Tensor":
        return cls(_object_zeros(tuple(dims), field), field)

    @classmethod
    def from_entries(cls, dims: Sequence[int], entries: dict, field: FieldSpec = QQ) -> "Tensor":
        data = _object_zeros(tuple(dims), field)
        for idx, v in entries.items():
            data[tuple(idx)] = field.norm(data[tuple(idx)] + field(v))
        return cls(data, field)

    @classmethod
    def random(cls, dims: Sequence[int], field: FieldSpec, rng, bound: int = 5) -> "Tensor":
        data = _object_zeros(tuple(dims), field)
        for idx in np.ndindex(*dims):
            data[idx] = field.random(rng, bound)
        return cls(data, field)

    @classmethod
    def outer(cls, vectors: Sequence[Sequence], field: FieldSpec = QQ) -> "Tensor":
        arr = np.array(vectors[0], dtype=object)
        for v in vectors[1:]:
            arr = np.multiply.outer(arr, np.array(v, dtype=object))
        return cls(arr, field)

    # basic properties ---------------------------------------------

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def order(self) -> int:
        return self.data.ndim

    def is_zero(self) -> bool:
        return not any(v != 0 for v in self.data.flat)

    def nonzero_entries(self) -> dict[tuple[int, ...], object]:
        return {idx: v for idx, v in np.ndenumerate(self.data) if v != 0}

    def __eq__(self, other):
        return (
            isinstance(other, Tensor)
            and self.field == other.field
            and self.dims == other.dims
            and all(a == b for a, b in zip(self.data.flat, other.data.flat))
        )

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check(other)
        return Tensor(self._norm(self.data + other.data), self.field)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check(other)
        return Tensor(self._norm(self.data - other.data), self.field)

    def scale(self, c) -> "Tensor":
        return Tensor(self._norm(self.data * self.field(c)), self.field)

    def _check(self, other):
        if self.dims != other.dims or self.field != other.field:
            raise ValueError("tensor shape or field mismatch")

    def _norm(self, arr):
        if self.field.is_prime:
            p = self.field.modulus
            return np.vectorize(lambda v: v % p, otypes=[object])(arr)
        return arr

    def __repr__(self):
        return f"Tensor(dims={self.dims}, field={self.field}, nnz={len(self.nonzero_entries())})"

    def with_field(self, field: FieldSpec) -> "Tensor":
        conv = np.vectorize(lambda v: self.field.to_field(v, field), otypes=[object])
        return Tensor(conv(self.data), field)

    # flattenings --------------------------------------------------

    def flatten(self, axis: int) -> np.ndarray:
        self._check_axis(axis)
        return np.moveaxis(self.data, axis, 0).reshape(self.dims[axis], -1)

    def flatten_group(self, axes: Sequence[int]) -> np.ndarray:
        """Grouped flattening: rows indexed by ``axes``, columns by the rest."""
        axes = list(axes)
        rest = [i for i in range(self.order) if i not in axes]
        rows = int(np.prod([self.dims[i] for i in axes]))
        return np.transpose(self.data, axes + rest).reshape(rows, -1)

    def multilinear_ranks(self) -> tuple[int, ...]:
        return tuple(linalg.rank(self.flatten(i), self.field) for i in range(self.order))

    def _check_axis(self, axis):
        if not 0 <= axis < self.order:
            raise ValueError(f"axis {axis} out of range for order {self.order}")

    # multilinear maps ---------------------------------------------

    def permute(self, perm: Sequence[int]) -> "Tensor":
        return Tensor(np.transpose(self.data, list(perm)), self.field)

    def contract(self, axis: int, vector: Sequence) -> "Tensor | np.ndarray":
        """Contract one axis with a covector; order drops by one."""
        self._check_axis(axis)
        v = np.array([self.field(x) for x in vector], dtype=object)
        out = self._norm(np.tensordot(v, np.moveaxis(self.data, axis, 0), axes=(0, 0)))
        return Tensor(out, self.field) if out.ndim >= 2 else out

    def mode_product(self, axis: int, matrix) -> "Tensor":
        """Apply ``matrix`` (new_dim x dims[axis]) to the given factor."""
        self._check_axis(axis)
        m = linalg.as_matrix(matrix, self.field)
        if m.shape[1] != self.dims[axis]:
            raise ValueError("matrix width differs from axis dimension")
        moved = np.moveaxis(self.data, axis, 0)
        if m.shape[0] == 0:
            shape = list(self.dims)
            shape[axis] = 0
            return Tensor(np.empty(shape, dtype=object), self.field)
        out = np.tensordot(m, moved, axes=(1, 0))
        return Tensor(self._norm(np.moveaxis(out, 0, axis)), self.field)

    def change_basis(self, matrices: Sequence) -> "Tensor":
        t = self
        for axis, g in enumerate(matrices):
            if g is not None:
                t = t.mode_product(axis, g)
        return t

    def restrict(self, axis: int, indices: Sequence[int]) -> "Tensor":
        """Restrict one factor to the span of the listed basis vectors (kept in place)."""
        data = self.data.copy()
        mask = np.ones(self.dims[axis], dtype=bool)
        mask[list(indices)] = False
        idx = [slice(None)] * self.order
        idx[axis] = mask
        data[tuple(idx)] = self.field.zero
        return Tensor(data, self.field)

    def pencil(self, axis: int = 0) -> "LinearMatrix":
        """The space T(A_axis^*) as a matrix of linear forms in dims[axis] variables."""
        if self.order != 3:
            raise ValueError("pencils are defined for order-3 tensors")
        self._check_axis(axis)
        coeffs = np.moveaxis(self.data, axis, -1)
        return LinearMatrix(coeffs, self.field)

    def concise_core(self) -> tuple["Tensor", "ConciseRecord"]:
        """Restrict every factor to the image of its flattening."""
        bases = []
        lefts = []
        core = self
        for axis in range(self.order):
            flat = self.flatten(axis)
            basis = linalg.column_basis(flat, self.field)
            if basis.shape[1] == self.dims[axis]:
                # already full rank: keep the given basis of this factor
                ident = linalg.identity(self.dims[axis], self.field)
                bases.append(ident)
                lefts.append(ident)
                continue
            bases.append(basis)
            if basis.shape[1] == 0:
                lefts.append(np.empty((0, self.dims[axis]), dtype=object))
            else:
                lefts.append(linalg.left_inverse(basis, self.field))
        for axis, left in enumerate(lefts):
            core = core.mode_product(axis, left)
        return core, ConciseRecord(tuple(bases), tuple(lefts))

    def is_concise(self) -> bool:
        return self.multilinear_ranks() == self.dims

    # serialization ------------------------------------------------

    def to_json(self) -> str:
        entries = [
            {"idx": list(map(int, idx)), "val": self.field.format(v)}
            for idx, v in np.ndenumerate(self.data)
            if v != 0
        ]
        return json.dumps({"dims": list(self.dims), "field": str(self.field), "entries": entries})

    @classmethod
    def from_json(cls, text: str, field: FieldSpec | None = None) -> "Tensor":
        obj = json.loads(text)
        if not isinstance(obj, dict) or "dims" not in obj:
            raise ValueError("tensor JSON needs a 'dims' array")
        dims = [int(d) for d in obj["dims"]]
        if len(dims) < 2 or any(d <= 0 for d in dims):
            raise ValueError(f"bad tensor dims {dims}")
        src = FieldSpec.parse(obj.get("field", "qq"))
        data = _object_zeros(tuple(dims), src)
        for e in obj.get("entries", []):
            idx = tuple(int(i) for i in e["idx"])
            if len(idx) != len(dims) or any(not 0 <= i < d for i, d in zip(idx, dims)):
                raise ValueError(f"entry index {idx} outside dims {dims}")
            data[idx] = src(Fraction(str(e["val"])))
        t = cls(data, src)
        return t if field is None or field == src else t.with_field(field)


@dataclass(frozen=True)
class ConciseRecord:
    """Column bases of each flattening image and the left inverses used to project."""

    bases: tuple
    projections: tuple

    def is_identity(self) -> bool:
        return all(
            b.shape[0] == b.shape[1] and all(b[i, j] == (i == j) for i in range(b.shape[0]) for j in range(b.shape[1]))
            for b in self.bases
        )


def direct_sum(s: Tensor, t: Tensor) -> Tensor:
    if s.order != t.order:
        raise ValueError("direct sum needs tensors of equal order")
    if s.field != t.field:
        raise ValueError("field mismatch")
    dims = tuple(a + b for a, b in zip(s.dims, t.dims))
    data = _object_zeros(dims, s.field)
    data[tuple(slice(0, d) for d in s.dims)] = s.data
    data[tuple(slice(d, None) for d in s.dims)] = t.data
    return Tensor(data, s.field)


# ---------------------------------------------------------------------------
# linear matrices
# ---------------------------------------------------------------------------


class LinearMatrix:
    """An a x b matrix of linear forms in c variables, stored as an a x b x c array."""

    def __init__(self, coeffs, field: FieldSpec = QQ):
        arr = np.array(coeffs, dtype=object)
        if arr.ndim != 3:
            raise ValueError("coefficient array must have shape (rows, cols, vars)")
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = field(v)
        self.coeffs = out
        self.field = field
        self._ring = None

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    @property
    def nvars(self) -> int:
        return self.coeffs.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def ring(self) -> Ring:
        if self._ring is None:
            self._ring = Ring(self.nvars, self.field)
        return self._ring

    @classmethod
    def from_polynomials(cls, rows: Sequence[Sequence], nvars: int, field: FieldSpec = QQ) -> "LinearMatrix":
        """Build from entries given as strings (``"x1 - 2*x3"``), Polynomials or 0."""
        ring = Ring(nvars, field)
        a, b = len(rows), len(rows[0]) if rows else 0
        coeffs = _object_zeros((a, b, nvars), field)
        for i, row in enumerate(rows):
            if len(row) != b:
                raise ValueError("ragged rows")
            for j, entry in enumerate(row):
                if isinstance(entry, str):
                    entry = ring.parse(entry)
                elif not isinstance(entry, Polynomial):
                    if entry != 0:
                        raise ValueError("constant entries must be zero")
                    continue
                if entry.is_zero():
                    continue
                if entry.degree() != 1 or not entry.is_homogeneous():
                    raise ValueError(f"entry {entry} is not a linear form")
                for exps, c in entry.terms.items():
                    coeffs[i, j, exps.index(1)] = c
        return cls(coeffs, field)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.ring.linear_form(self.coeffs[i, j])

    def polynomial_matrix(self) -> list[list[Polynomial]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def evaluate(self, point: Sequence) -> np.ndarray:
        f = self.field
        pt = np.array([f(v) for v in point], dtype=object)
        if len(pt) != self.nvars:
            raise ValueError("point has wrong length")
        out = np.empty((self.rows, self.cols), dtype=object)
        out[...] = f.zero
        if self.nvars:
            out = np.tensordot(self.coeffs, pt, axes=(2, 0))
        if f.is_prime:
            out = np.vectorize(lambda v: v % f.modulus, otypes=[object])(out)
        return out

    def rank_at(self, point: Sequence) -> int:
        return linalg.rank(self.evaluate(point), self.field)

    def transpose(self) -> "LinearMatrix":
        return LinearMatrix(np.transpose(self.coeffs, (1, 0, 2)), self.field)

    def to_tensor(self) -> Tensor:
        """Tensor in C^c (x) C^a (x) C^b whose axis-0 pencil is this matrix."""
        return Tensor(np.transpose(self.coeffs, (2, 0, 1)), self.field)

    def block_diag(self, other: "LinearMatrix") -> "LinearMatrix":
        """Block diagonal matrix sharing the same variables."""
        if self.nvars != other.nvars or self.field != other.field:
            raise ValueError("block_diag needs the same variables and field")
        coeffs = _object_zeros((self.rows + other.rows, self.cols + other.cols, self.nvars), self.field)
        coeffs[: self.rows, : self.cols] = self.coeffs
        coeffs[self.rows :, self.cols :] = other.coeffs
        return LinearMatrix(coeffs, self.field)

    def change_basis(self, left=None, right=None, variables=None) -> "LinearMatrix":
        """Return ``P E(Q x) R`` style changes: rows by ``left``, columns by ``right``,
        variables substituted ``x -> variables @ x``."""
        f = self.field
        c = self.coeffs
        if left is not None:
            c = np.tensordot(linalg.as_matrix(left, f), c, axes=(1, 0))
        if right is not None:
            c = np.moveaxis(np.tensordot(c, linalg.as_matrix(right, f), axes=(1, 0)), 2, 1)
        if variables is not None:
            c = np.tensordot(c, linalg.as_matrix(variables, f), axes=(2, 0))
        if f.is_prime:
            c = np.vectorize(lambda v: v % f.modulus, otypes=[object])(c)
        return LinearMatrix(c, f)

    def with_field(self, field: FieldSpec) -> "LinearMatrix":
        conv = np.vectorize(lambda v: self.field.to_field(v, field), otypes=[object])
        return LinearMatrix(conv(self.coeffs), field)

    def is_zero(self) -> bool:
        return not any(v != 0 for v in self.coeffs.flat)

    def __eq__(self, other):
        return (
            isinstance(other, LinearMatrix)
            and self.field == other.field
            and self.coeffs.shape == other.coeffs.shape
            and all(a == b for a, b in zip(self.coeffs.flat, other.coeffs.flat))
        )

    def __str__(self):
        cells = [[str(self.entry(i, j)) for j in range(self.cols)] for i in range(self.rows)]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join("[" + "  ".join(c.rjust(width) for c in row) + "]" for row in cells)

    def __repr__(self):
        return f"LinearMatrix({self.rows}x{self.cols}, vars={self.nvars}, field={self.field})"

    def to_json(self) -> str:
        entries = []
        for i in range(self.rows):
            for j in range(self.cols):
                form = self.coeffs[i, j]
                if any(v != 0 for v in form):
                    entries.append({"i": i, "j": j, "form": [self.field.format(v) for v in form]})
        return json.dumps(
            {"rows": self.rows, "cols": self.cols, "vars": self.nvars, "field": str(self.field), "entries": entries}
        )

    @classmethod
    def from_json(cls, text: str, field: FieldSpec | None = None) -> "LinearMatrix":
        obj = json.loads(text)
        try:
            a, b, c = int(obj["rows"]), int(obj["cols"]), int(obj["vars"])
        except (KeyError, TypeError) as exc:
            raise ValueError("linear matrix JSON needs rows, cols and vars") from exc
        src = FieldSpec.parse(obj.get("field", "qq"))
        coeffs = _object_zeros((a, b, c), src)
        for e in obj.get("entries", []):
            i, j = int(e["i"]), int(e["j"])
            form = e["form"]
            if not (0 <= i < a and 0 <= j < b) or len(form) != c:
                raise ValueError(f"bad entry at ({i}, {j})")
            coeffs[i, j] = [src(Fraction(str(v))) for v in form]
        m = cls(coeffs, src)
        return m if field is None or field == src else m.with_field(field)


def load_json_object(text: str, field: FieldSpec | None = None) -> Tensor | LinearMatrix:
    """Dispatch on the JSON keys: tensors have ``dims``, linear matrices ``rows``."""
    obj = json.loads(text)
    if isinstance(obj, dict) and "dims" in obj:
        return Tensor.from_json(text, field)
    if isinstance(obj, dict) and "rows" in obj:
        return LinearMatrix.from_json(text, field)
    raise ValueError("JSON is neither a tensor nor a linear matrix")


def all_indices(dims: Sequence[int]):
    return product(*(range(d) for d in dims))
