"""Exact sparse multivariate polynomials over Q and prime fields.

Monomials are packed into Python integers: 8 bits per exponent with the
top bit of every field kept clear as a guard, exponent of ``x1`` in the
lowest field and the total degree in a field above the last variable.
With that layout, monomial multiplication is integer addition, the
divisibility test is a single subtraction, and the grevlex key is a XOR.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

DEFAULT_PRIME = 2147483629

_W = 8
_FIELD_MASK = (1 << _W) - 1
_MAX_EXP = (1 << (_W - 1)) - 1


class RingMismatchError(ValueError):
    pass


class FieldExtensionRequired(ValueError):
    """The requested factorization exists only over a field extension."""


# ---------------------------------------------------------------------------
# ground fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # "qq" or "fp"
    modulus: int = 0

    def __post_init__(self):
        if self.kind == "fp":
            from sympy import isprime

            if self.modulus <= 2**30 or not isprime(self.modulus):
                raise ValueError(f"modulus must be a prime > 2^30, got {self.modulus}")
        elif self.kind == "qq":
            if self.modulus:
                raise ValueError("rationals take no modulus")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("qq")

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "FieldSpec":
        return cls("fp", p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        text = text.strip().lower()
        if text in ("qq", "q"):
            return cls.rationals()
        if text in ("fp", "gf"):
            return cls.prime()
        if text.startswith("fp:"):
            return cls.prime(int(text[3:]))
        raise ValueError(f"cannot parse field {text!r}")

    @property
    def is_prime(self) -> bool:
        return self.kind == "fp"

    def __str__(self):
        return "qq" if self.kind == "qq" else f"fp:{self.modulus}"

    # element operations -------------------------------------------------

    def __call__(self, value) -> int | Fraction:
        """Coerce an int, Fraction or ``"num/den"`` string into the field."""
        if isinstance(value, str):
            value = Fraction(value.strip())
        if self.kind == "qq":
            return Fraction(value)
        p = self.modulus
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ZeroDivisionError(f"denominator divisible by {p}")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def norm(self, value):
        return value % self.modulus if self.kind == "fp" else value

    def inv(self, value):
        if value == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "fp":
            return pow(value, -1, self.modulus)
        return 1 / Fraction(value)

    @property
    def zero(self):
        return 0 if self.kind == "fp" else Fraction(0)

    @property
    def one(self):
        return 1 if self.kind == "fp" else Fraction(1)

    def random(self, rng, bound: int = 10):
        """Random element; bounded integers for Q, uniform residues for F_p."""
        if self.kind == "fp":
            return rng.randrange(self.modulus)
        return Fraction(rng.randint(-bound, bound))

    def format(self, value) -> str:
        value = Fraction(value)
        return f"{value.numerator}/{value.denominator}"

    def sqrt(self, value):
        """A square root in the field, or None when ``value`` is not a square."""
        if value == 0:
            return self.zero
        if self.kind == "fp":
            from sympy.ntheory import sqrt_mod

            r = sqrt_mod(int(value), self.modulus)
            return None if r is None else r % self.modulus
        from math import isqrt

        value = Fraction(value)
        if value < 0:
            return None
        n, d = isqrt(value.numerator), isqrt(value.denominator)
        if n * n == value.numerator and d * d == value.denominator:
            return Fraction(n, d)
        return None

    def to_field(self, value, other: "FieldSpec"):
        """Map an element of this field into ``other`` (residues lift to [0, p))."""
        return other(value if self.kind == "fp" else Fraction(value))


QQ = FieldSpec.rationals()
FP = FieldSpec.prime()


# ---------------------------------------------------------------------------
# rings and polynomials
# ---------------------------------------------------------------------------


class Ring:
    """Polynomial ring ``field[x1..xn]`` with a fixed variable sequence."""

    def __init__(self, nvars: int, field: FieldSpec = QQ, names: Sequence[str] | None = None):
        if nvars < 0:
            raise ValueError("negative variable count")
        self.nvars = nvars
        self.field = field
        self.names = tuple(names) if names is not None else tuple(f"x{i + 1}" for i in range(nvars))
        if len(self.names) != nvars or len(set(self.names)) != nvars:
            raise ValueError("variable names must be distinct, one per variable")
        self._deg_shift = _W * nvars
        self.guard = sum(1 << (_W * i + _W - 1) for i in range(nvars + 1))
        self.xmask = sum(_MAX_EXP << (_W * i) for i in range(nvars))
        self._unpack_cache: dict[int, tuple[int, ...]] = {}

    def __eq__(self, other):
        return (
            isinstance(other, Ring) and self.names == other.names and self.field == other.field
        )

    def __hash__(self):
        return hash((self.names, self.field))

    def __repr__(self):
        return f"Ring({self.field}, {', '.join(self.names)})"

    # monomial packing ------------------------------------------------

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError("exponent vector length differs from variable count")
        m = 0
        deg = 0
        for i, e in enumerate(exps):
            if e < 0:
                raise ValueError("negative exponent")
            m |= e << (_W * i)
            deg += e
        if deg > _MAX_EXP:
            raise OverflowError(f"total degree {deg} exceeds {_MAX_EXP}")
        return m | (deg << self._deg_shift)

    def unpack(self, m: int) -> tuple[int, ...]:
        cached = self._unpack_cache.get(m)
        if cached is None:
            cached = tuple((m >> (_W * i)) & _FIELD_MASK for i in range(self.nvars))
            self._unpack_cache[m] = cached
        return cached

    def mdeg(self, m: int) -> int:
        return m >> self._deg_shift

    def mdivides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def mlcm(self, a: int, b: int) -> int:
        return self.pack([max(x, y) for x, y in zip(self.unpack(a), self.unpack(b))])

    def mmul(self, a: int, b: int) -> int:
        m = a + b
        if m >> self._deg_shift > _MAX_EXP:
            raise OverflowError("monomial degree overflow")
        return m

    def support(self, m: int) -> frozenset[int]:
        return frozenset(i for i, e in enumerate(self.unpack(m)) if e)

    # constructors ----------------------------------------------------

    def poly(self, terms: Mapping[Sequence[int], object] | None = None) -> "Polynomial":
        f = self.field
        out: dict[int, object] = {}
        for exps, c in (terms or {}).items():
            m = self.pack(tuple(exps))
            v = f.norm(out.get(m, f.zero) + f(c))
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(self, out)

    def const(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {0: c} if c else {})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def var(self, i: int) -> "Polynomial":
        exps = [0] * self.nvars
        exps[i] = 1
        return Polynomial(self, {self.pack(exps): self.field.one})

    @property
    def gens(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.nvars)]

    def linear_form(self, coeffs: Sequence) -> "Polynomial":
        f = self.field
        out = {}
        for i, c in enumerate(coeffs):
            c = f(c)
            if c:
                exps = [0] * self.nvars
                exps[i] = 1
                out[self.pack(exps)] = c
        return Polynomial(self, out)

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def with_field(self, field: FieldSpec) -> "Ring":
        return Ring(self.nvars, field, self.names)


class Polynomial:
    """Immutable polynomial; ``_terms`` maps packed monomials to nonzero coefficients."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: dict[int, object]):
        self.ring = ring
        self._terms = terms
        self._hash = None

    # inspection ------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], object]:
        unpack = self.ring.unpack
        return {unpack(m): c for m, c in self._terms.items()}

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(self.ring.mdeg(m) for m in self._terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.mdeg(m) for m in self._terms}) <= 1

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return -1
        return max(self.ring.unpack(m)[i] for m in self._terms)

    def variables(self) -> frozenset[int]:
        out: set[int] = set()
        for m in self._terms:
            out |= self.ring.support(m)
        return frozenset(out)

    def coefficient(self, exps: Sequence[int]):
        return self._terms.get(self.ring.pack(exps), self.ring.field.zero)

    def leading_term(self, order=None) -> tuple[tuple[int, ...], object]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        if order is None:
            xm = self.ring.xmask
            m = max(self._terms, key=lambda t: t ^ xm)
        else:
            key = order.key_function(self.ring)
            m = max(self._terms, key=key)
        return self.ring.unpack(m), self._terms[m]

    def monic(self, order=None) -> "Polynomial":
        if not self._terms:
            return self
        _, lc = self.leading_term(order)
        return self.scale(self.ring.field.inv(lc))

    # arithmetic ------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.ring.field
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = f.norm(out.get(m, 0) + c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.ring.field
        return Polynomial(self.ring, {m: f.norm(-c) for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.ring.field
        mmul = self.ring.mmul
        out: dict[int, object] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = mmul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        out = {m: v for m, v in ((m, f.norm(v)) for m, v in out.items()) if v}
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        f = self.ring.field
        c = f(c) if not isinstance(c, (int, Fraction)) or f.is_prime else Fraction(c)
        if f.is_prime:
            c %= f.modulus
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {m: f.norm(v * c) for m, v in self._terms.items()})

    def mul_monomial(self, exps: Sequence[int], c=1) -> "Polynomial":
        m0 = self.ring.pack(exps)
        f = self.ring.field
        c = f(c)
        return Polynomial(
            self.ring, {self.ring.mmul(m, m0): f.norm(v * c) for m, v in self._terms.items()}
        )

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # evaluation and substitution -------------------------------------

    def evaluate(self, point: Sequence):
        f = self.ring.field
        pt = [f(v) for v in point]
        if len(pt) != self.ring.nvars:
            raise ValueError("point has wrong length")
        total = f.zero
        for m, c in self._terms.items():
            t = c
            for i, e in enumerate(self.ring.unpack(m)):
                if e:
                    t = t * pt[i] ** e
            total = f.norm(total + t)
        return total

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace ``x_i`` by ``images[i]``; images may live in another ring."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        target = images[0].ring if images else self.ring
        result = target.zero()
        powers: dict[tuple[int, int], Polynomial] = {}
        for m, c in self._terms.items():
            term = target.const(self.ring.field.to_field(c, target.field))
            for i, e in enumerate(self.ring.unpack(m)):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = images[i] ** e
                    term = term * powers[key]
            result = result + term
        return result

    def linear_substitution(self, matrix: Sequence[Sequence]) -> "Polynomial":
        """Substitute ``x_i -> sum_j matrix[i][j] x_j``."""
        return self.substitute([self.ring.linear_form(row) for row in matrix])

    # division --------------------------------------------------------

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Division by a single polynomial under grevlex."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ring, f = self.ring, self.ring.field
        xm = ring.xmask
        lm = max(divisor._terms, key=lambda t: t ^ xm)
        lc_inv = f.inv(divisor._terms[lm])
        rest = dict(self._terms)
        quot: dict[int, object] = {}
        rem: dict[int, object] = {}
        while rest:
            m = max(rest, key=lambda t: t ^ xm)
            c = rest[m]
            if ring.mdivides(lm, m):
                q = m - lm
                qc = f.norm(c * lc_inv)
                quot[q] = qc
                for dm, dc in divisor._terms.items():
                    mm = dm + q
                    v = f.norm(rest.get(mm, 0) - qc * dc)
                    if v:
                        rest[mm] = v
                    else:
                        rest.pop(mm, None)
            else:
                rem[m] = c
                del rest[m]
        return Polynomial(ring, quot), Polynomial(ring, rem)

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        q, r = self.divmod(divisor)
        if r:
            raise ArithmeticError("division is not exact")
        return q

    def divides(self, other: "Polynomial") -> bool:
        return not other.divmod(self)[1]

    # univariate views ------------------------------------------------

    def coefficients_in(self, i: int) -> dict[int, "Polynomial"]:
        """Coefficients with respect to variable ``i`` (polynomials free of it)."""
        ring = self.ring
        step = 1 << (_W * i)
        dstep = 1 << ring._deg_shift
        out: dict[int, dict[int, object]] = {}
        for m, c in self._terms.items():
            e = (m >> (_W * i)) & _FIELD_MASK
            out.setdefault(e, {})[m - e * step - e * dstep] = c
        return {e: Polynomial(ring, t) for e, t in out.items()}

    # printing --------------------------------------------------------

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        ring = self.ring
        xm = ring.xmask
        parts = []
        for m in sorted(self._terms, key=lambda t: t ^ xm, reverse=True):
            c = Fraction(self._terms[m])
            exps = ring.unpack(m)
            mono = "*".join(
                ring.names[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^|\*\*)|(\*)|([+-])|(\()|(\)))")


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    """Parse expressions like ``3/2*x1^2*x4 - x2*x3`` (parentheses allowed)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        pos = mt.end()
        num, name, caret, star, sign, lp, rp = mt.groups()
        if num:
            tokens.append(("num", num))
        elif name:
            tokens.append(("var", name))
        elif caret:
            tokens.append(("^", None))
        elif star:
            tokens.append(("*", None))
        elif sign:
            tokens.append((sign, None))
        elif lp:
            tokens.append(("(", None))
        elif rp:
            tokens.append((")", None))
    index = {n: i for i, n in enumerate(ring.names)}
    i = 0

    def peek():
        return tokens[i][0] if i < len(tokens) else None

    def expr():
        nonlocal i
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if tokens[i][0] == "-" else 1
            i += 1
        acc = term().scale(sign)
        while peek() in ("+", "-"):
            s = tokens[i][0]
            i += 1
            t = term()
            acc = acc + t if s == "+" else acc - t
        return acc

    def term():
        nonlocal i
        acc = factor()
        while peek() == "*":
            i += 1
            acc = acc * factor()
        return acc

    def factor():
        nonlocal i
        kind = peek()
        if kind == "num":
            base = ring.const(Fraction(tokens[i][1]))
            i += 1
        elif kind == "var":
            name = tokens[i][1]
            if name not in index:
                raise ValueError(f"unknown variable {name!r}")
            base = ring.var(index[name])
            i += 1
        elif kind == "(":
            i += 1
            base = expr()
            if peek() != ")":
                raise ValueError("unbalanced parentheses")
            i += 1
        elif kind == "-":
            i += 1
            return -factor()
        else:
            raise ValueError(f"unexpected token in {text!r}")
        if peek() == "^":
            i += 1
            if peek() != "num" or "/" in tokens[i][1]:
                raise ValueError("exponent must be a non-negative integer")
            base = base ** int(tokens[i][1])
            i += 1
        return base

    if not tokens:
        raise ValueError("empty polynomial text")
    result = expr()
    if i != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return result


# ---------------------------------------------------------------------------
# gcd
# ---------------------------------------------------------------------------


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic (grevlex) gcd via recursive primitive pseudo-remainder sequences."""
    p._check(q)
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    return _gcd(p, q).monic()


def gcd_many(polys: Iterable[Polynomial]) -> Polynomial:
    polys = list(polys)
    if not polys:
        raise ValueError("gcd of an empty list")
    return reduce(gcd, polys[1:], polys[0].monic())


def _content(p: Polynomial, v: int) -> Polynomial:
    coeffs = list(p.coefficients_in(v).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        if g.is_constant():
            break
        g = _gcd(g, c)
    return g.monic() if not g.is_constant() else p.ring.one()


def _gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    if p.is_constant() or q.is_constant():
        return p.ring.one()
    vp, vq = p.variables(), q.variables()
    common = vp & vq
    if not common:
        # a nonconstant common factor would involve a shared variable
        return p.ring.one()
    v = max(common)
    if v not in vp or v not in vq:
        raise AssertionError("unreachable")
    # eliminate variables that appear in only one argument through contents
    only_p = vp - vq
    if only_p:
        w = max(only_p)
        return _gcd(_content_wrt(p, w), q)
    only_q = vq - vp
    if only_q:
        w = max(only_q)
        return _gcd(p, _content_wrt(q, w))
    cp, cq = _content(p, v), _content(q, v)
    a, b = p.exact_div(cp), q.exact_div(cq)
    g_cont = _gcd(cp, cq)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while True:
        r = _prem(a, b, v)
        if r.is_zero():
            g = b
            break
        if r.degree_in(v) == 0:
            g = p.ring.one()
            break
        a, b = b, r.exact_div(_content(r, v))
    if not g.is_constant():
        g = g.exact_div(_content(g, v))
    return (g_cont * g).monic()


def _content_wrt(p: Polynomial, w: int) -> Polynomial:
    coeffs = list(p.coefficients_in(w).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        if g.is_constant():
            return p.ring.one()
        g = _gcd(g, c)
    return g


def _prem(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    """Pseudo-remainder of ``a`` by ``b`` in variable ``v``, up to a unit."""
    ring = a.ring
    db = b.degree_in(v)
    cb = b.coefficients_in(v)
    lcb = cb[db]
    r = a
    while not r.is_zero() and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lcr = r.coefficients_in(v)[dr]
        shift = [0] * ring.nvars
        shift[v] = dr - db
        r = lcb * r - (lcr * b).mul_monomial(shift)
    return r


# ---------------------------------------------------------------------------
# quadrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric Gram matrix of a homogeneous quadric over ``ring``."""

    ring: Ring
    matrix: tuple[tuple, ...]

    @classmethod
    def from_polynomial(cls, q: Polynomial) -> "QuadraticForm":
        ring, f = q.ring, q.ring.field
        n = ring.nvars
        if not q.is_zero() and (q.degree() != 2 or not q.is_homogeneous()):
            raise ValueError(f"not a homogeneous quadric: {q}")
        half = f.inv(f(2))
        g = [[f.zero] * n for _ in range(n)]
        for exps, c in q.terms.items():
            idx = [i for i, e in enumerate(exps) for _ in range(e)]
            i, j = idx
            if i == j:
                g[i][i] = c
            else:
                g[i][j] = f.norm(c * half)
                g[j][i] = g[i][j]
        return cls(ring, tuple(tuple(r) for r in g))

    def to_polynomial(self) -> Polynomial:
        ring, f = self.ring, self.ring.field
        out = ring.zero()
        for i in range(ring.nvars):
            for j in range(i, ring.nvars):
                c = self.matrix[i][j] if i == j else f.norm(2 * self.matrix[i][j])
                if c:
                    out = out + ring.var(i) * ring.var(j) * ring.const(c)
        return out

    def rank(self) -> int:
        from .linalg import rank

        return rank(self.matrix, self.ring.field)


def quadratic_rank(q: Polynomial | QuadraticForm) -> int:
    """Rank of the Gram matrix; <= 2 iff the quadric splits into linear forms."""
    if isinstance(q, Polynomial):
        q = QuadraticForm.from_polynomial(q)
    return q.rank()


def factor_linear(q: Polynomial) -> tuple[Polynomial, Polynomial] | None:
    """Split a quadric into two linear forms; None when its rank exceeds 2.

    Raises FieldExtensionRequired when the rank is 2 but the factors need a
    square root that the ground field does not contain.
    """
    if q.degree() > 2:
        raise ValueError("only quadrics are factored")
    if q.is_zero():
        return None
    if q.degree() < 2 or not q.is_homogeneous():
        raise ValueError(f"not a homogeneous quadric: {q}")
    if quadratic_rank(q) > 2:
        return None
    ring, f = q.ring, q.ring.field
    qf = QuadraticForm.from_polynomial(q)
    diag = [i for i in range(ring.nvars) if qf.matrix[i][i]]
    if not diag:
        i, j = next(
            (i, j) for i in range(ring.nvars) for j in range(i + 1, ring.nvars) if qf.matrix[i][j]
        )
        fwd = [ring.var(k) for k in range(ring.nvars)]
        fwd[j] = ring.var(j) + ring.var(i)
        back = [ring.var(k) for k in range(ring.nvars)]
        back[j] = ring.var(j) - ring.var(i)
        l1, l2 = factor_linear(q.substitute(fwd))
        return l1.substitute(back), l2.substitute(back)
    i = diag[0]
    # q = a x_i^2 + b x_i + c with b linear and c quadratic in the other variables
    co = q.coefficients_in(i)
    a = co[2].terms[(0,) * ring.nvars]
    b = co.get(1, ring.zero())
    c = co.get(0, ring.zero())
    disc = b * b - c.scale(4 * a)
    if disc.is_zero():
        root = ring.zero()
    else:
        dq = QuadraticForm.from_polynomial(disc)
        j = next(k for k in range(ring.nvars) if dq.matrix[k][k])
        ell = ring.linear_form(dq.matrix[j])
        s = f.sqrt(f.inv(dq.matrix[j][j]))
        if s is None:
            raise FieldExtensionRequired(f"{q} splits only over an extension of {f}")
        root = ell.scale(s)
    inv2a = f.inv(f.norm(2 * a))
    xi = ring.var(i)
    # x_i - r_{1,2} with r = (-b +- root) / 2a
    l1 = xi + (b - root).scale(inv2a)
    l2 = xi + (b + root).scale(inv2a)
    return l1.scale(a), l2
