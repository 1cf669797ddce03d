"""Reproduction suite: each criterion returns a pass flag and a one-line detail."""

from __future__ import annotations

import fnmatch
import random
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import catalog as cat
from .detvar import (
    common_factor_report,
    constant_rank_probe,
    is_e1_generic,
    minors,
    stratum_codim,
)
from .georank import (
    classify_gr3,
    decide_slice_rank_leq,
    find_decomposition,
    geometric_rank,
    gr_alternative,
    gr_npart,
    partition_rank_one,
)
from .polyring import FP, QQ, FieldSpec
from .tensor_core import LinearMatrix, Tensor


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


class _Checks:
    """Collects sub-checks of one criterion, each with its own time limit."""

    def __init__(self):
        self.failures: list[str] = []
        self.notes: list[str] = []

    def timed(self, label: str, limit: float, fn: Callable, expect=None, check=None):
        t0 = time.perf_counter()
        try:
            value = fn()
        except Exception as exc:  # a crash is a failure of this check, reported by name
            self.failures.append(f"{label}: {type(exc).__name__}: {exc}")
            return None
        dt = time.perf_counter() - t0
        ok = check(value) if check is not None else value == expect
        if not ok:
            want = "" if check is not None else f" (expected {expect!r})"
            self.failures.append(f"{label} gave {value!r}{want}")
        elif dt > limit:
            self.failures.append(f"{label} took {dt:.1f}s > {limit}s")
        return value

    def total_limit(self, label: str, limit: float, seconds: float):
        if seconds > limit:
            self.failures.append(f"{label} took {seconds:.1f}s > {limit}s")

    def result(self, number: int, name: str, seconds: float, ok_detail: str) -> CriterionResult:
        if self.failures:
            return CriterionResult(number, name, False, "; ".join(self.failures), seconds)
        return CriterionResult(number, name, True, ok_detail, seconds)


MM_CASES = {(1, 1, 1): 1, (1, 2, 2): 2, (1, 2, 3): 2, (2, 2, 2): 3, (2, 2, 3): 4, (2, 2, 4): 4, (2, 3, 3): 5}


def crit_gr_formula(field: FieldSpec):
    ch = _Checks()
    for (e, h, l), want in MM_CASES.items():
        if cat.mm_gr_formula(e, h, l) != want:
            ch.failures.append(f"closed form for {(e, h, l)} is not {want}")
        ch.timed(f"GR(mm{(e, h, l)})", 120, lambda: geometric_rank(cat.mm(e, h, l, field)), want)
    t0 = time.perf_counter()
    for shape in ((1, 1, 1), (1, 2, 2), (2, 2, 2)):
        ch.timed(f"GR(mm{shape}) over qq", 600, lambda: geometric_rank(cat.mm(*shape, QQ)), MM_CASES[shape])
    ch.total_limit("rational spot checks", 600, time.perf_counter() - t0)
    return ch, f"all {len(MM_CASES)} cases match eh - floor((e+h-l)^2/4)"


def crit_gr_skew(field: FieldSpec):
    ch = _Checks()
    ch.timed("GR(skew3)", 60, lambda: gr_alternative(cat.skew3(field)).value, 2)
    ch.timed("GR(skew4(6))", 60, lambda: gr_alternative(cat.skew4(6, field)).value, 3)
    return ch, "skew3 -> 2, skew4(6) -> 3, all axes and the direct codimension agree"


def bounded_rank3_fixture(field: FieldSpec) -> Tensor:
    """The 5x5x5 tensor given by the first five columns of the ex-5x5x6 pencil."""
    t = cat.ex_5x5x6(field)
    return Tensor(t.data[:, :, :5], field)


def crit_classify(field: FieldSpec, seed: int = 0):
    ch = _Checks()
    t0 = time.perf_counter()
    ch.timed("classify(compression-w(3))", 300, lambda: classify_gr3(cat.compression_w(3, field)).label, "slice-rank-le-3")
    ch.timed("classify(mm(2,2,2))", 300, lambda: classify_gr3(cat.mm(2, 2, 2, field)).label, "mm2-class")
    ch.timed("classify(bounded-rank-3 fixture)", 300, lambda: classify_gr3(bounded_rank3_fixture(field)).label, "bounded-rank-3")
    rnd = Tensor.random((3, 3, 3), field, random.Random(seed))
    g = ch.timed("GR(random 3x3x3)", 300, lambda: gr_alternative(rnd).value, check=lambda v: isinstance(v, int))
    ch.notes.append(f"GR(random 3x3x3) = {g}")
    ch.timed("classify(random 3x3x3)", 300, lambda: classify_gr3(rnd).label, "gr-exceeds-3")
    ch.total_limit("criterion", 300, time.perf_counter() - t0)
    return ch, "all four labels as expected"


def crit_gr4_counterexample(field: FieldSpec):
    ch = _Checks()
    t0 = time.perf_counter()
    T = cat.gr4_counterexample(7, field)
    ch.timed("concise", 600, lambda: T.is_concise(), True)
    ch.timed("GR", 600, lambda: gr_alternative(T, check_direct=False).value, 4)
    ch.timed("SR <= 4", 600, lambda: decide_slice_rank_leq(T, 4).answer, False)
    ch.timed("SR <= 5", 600, lambda: decide_slice_rank_leq(T, 5).answer, True)
    ch.total_limit("criterion", 600, time.perf_counter() - t0)
    return ch, "GR = 4, SR <= 4 is no, SR <= 5 is yes"


def generic_matrix(a: int, b: int, field: FieldSpec) -> LinearMatrix:
    coeffs = np.zeros((a, b, a * b), dtype=object)
    for i in range(a):
        for j in range(b):
            coeffs[i, j, i * b + j] = 1
    return LinearMatrix(coeffs, field)


def crit_generic_codim(field: FieldSpec):
    ch = _Checks()
    t0 = time.perf_counter()
    for a, b, r in ((2, 2, 1), (3, 3, 1), (3, 3, 2), (3, 4, 2), (4, 4, 3)):
        ch.timed(f"codim H_{r} in {a}x{b}", 120, lambda: stratum_codim(generic_matrix(a, b, field), r).codim, (a - r) * (b - r))
    ch.total_limit("criterion", 120, time.perf_counter() - t0)
    return ch, "codim(H_r) = (a-r)(b-r) on all five shapes"


def random_pencil(a: int, b: int, c: int, field: FieldSpec, rng: random.Random, bound: int = 3) -> LinearMatrix:
    coeffs = np.empty((a, b, c), dtype=object)
    for idx in np.ndindex(a, b, c):
        coeffs[idx] = field.random(rng, bound)
    return LinearMatrix(coeffs, field)


def crit_eisenbud(field: FieldSpec, seed: int = 0):
    ch = _Checks()
    rng = random.Random(seed)
    t0 = time.perf_counter()
    checked = 0
    for a, b in ((3, 3), (3, 4), (4, 4)):
        for c in (a * b, a + b):
            found = 0
            attempts = 0
            while found < 20:
                attempts += 1
                if attempts > 200:
                    ch.failures.append(f"could not draw 20 E1-generic pencils for {(a, b, c)}")
                    break
                E = random_pencil(a, b, c, field, rng)
                if not is_e1_generic(E):
                    continue
                found += 1
                for k in range(1, min(a, b)):
                    codim = stratum_codim(E, k).codim
                    checked += 1
                    if codim < a + b - 2 * k - 1:
                        ch.failures.append(f"{(a, b, c)} k={k}: codim {codim} < {a + b - 2 * k - 1}")
    ch.total_limit("criterion", 600, time.perf_counter() - t0)
    return ch, f"bound holds on {checked} strata of 120 E1-generic pencils"


def crit_beauville(field: FieldSpec):
    ch = _Checks()
    t0 = time.perf_counter()
    E = cat.beauville_counterexample(field)
    ring = E.ring
    S = ring.parse("x1*x4 - x2*x3")
    ch.timed("det", 1, lambda: minors(E, 4).generators, (S * S,))
    ch.timed("ranks on the quadric", 1, lambda: constant_rank_probe(E, S, [(1, 0, 0, 0), (0, 0, 0, 1)]), [3, 2])
    ch.total_limit("criterion", 1, time.perf_counter() - t0)
    return ch, "det = (x1*x4 - x2*x3)^2, ranks 3 and 2 on the quadric"


def _same_up_to_unit(p, q) -> bool:
    return p.monic() == q.monic()


def crit_common_factor(field: FieldSpec):
    ch = _Checks()
    t0 = time.perf_counter()
    D = cat.diag_pencil(cat.x2_pencil(field))
    S = D.ring.parse("x1*x4 - x2*x3")
    rep = ch.timed("diag(X2,X2) 3-minors", 30, lambda: common_factor_report(D, 3), check=lambda r: _same_up_to_unit(r.factor, S))
    if rep is not None and rep.quadratic_rank != 4:
        ch.failures.append(f"quadratic rank {rep.quadratic_rank} != 4")
    K = cat.skew4(6, field).pencil(0)
    pf = K.ring.parse("x1*x6 - x2*x5 + x3*x4")
    rep = ch.timed("skew4 3-minors", 30, lambda: common_factor_report(K, 3), check=lambda r: _same_up_to_unit(r.factor, pf))
    if rep is not None and rep.quadratic_rank != 6:
        ch.failures.append(f"Pfaffian quadratic rank {rep.quadratic_rank} != 6")
    ch.total_limit("criterion", 30, time.perf_counter() - t0)
    return ch, "gcds are x1*x4 - x2*x3 (rank 4) and the Pfaffian (rank 6)"


def random_tensor_mix(dims, field: FieldSpec, rng: random.Random, n: int) -> list[Tensor]:
    """Half uniform tensors, half sparse tensors with entries in {-1, 0, 1}."""
    out = [Tensor.random(dims, field, rng) for _ in range(n - n // 2)]
    for _ in range(n // 2):
        data = np.empty(dims, dtype=object)
        for idx in np.ndindex(*dims):
            data[idx] = rng.choice((-1, 0, 0, 1))
        out.append(Tensor(data, field))
    return out


def crit_altdef(field: FieldSpec, seed: int = 0):
    ch = _Checks()
    rng = random.Random(seed)
    t0 = time.perf_counter()
    counts: dict = {}
    for dims in ((2, 2, 2), (3, 3, 3), (2, 3, 4)):
        for T in random_tensor_mix(dims, field, rng, 50):
            v = ch.timed(f"gr_alternative{dims}", 1200, lambda: gr_alternative(T).value, check=lambda v: v is not None)
            counts[v] = counts.get(v, 0) + 1
    ch.total_limit("criterion", 1200, time.perf_counter() - t0)
    return ch, f"150 tensors agree on all axes and directly (GR histogram {dict(sorted(counts.items(), key=str))})"


def random_pr1(field: FieldSpec, rng: random.Random) -> Tensor:
    """Product of two random tensors across a random proper bipartition of 4 axes."""
    side = rng.choice([(0,), (0, 1), (0, 2), (0, 3), (0, 1, 2), (0, 1, 3), (0, 2, 3)])
    other = tuple(i for i in range(4) if i not in side)
    left = np.array([field.random(rng, 5) for _ in range(2 ** len(side))], dtype=object).reshape((2,) * len(side))
    right = np.array([field.random(rng, 5) for _ in range(2 ** len(other))], dtype=object).reshape((2,) * len(other))
    full = np.multiply.outer(left, right)
    return Tensor(np.transpose(full, np.argsort(side + other)), field)


def crit_pr1(field: FieldSpec, seed: int = 0):
    ch = _Checks()
    rng = random.Random(seed)
    t0 = time.perf_counter()
    samples = [Tensor.random((2, 2, 2, 2), field, rng) for _ in range(50)]
    samples += [random_pr1(field, rng) for _ in range(50)]
    agree = 0
    for T in samples:
        if T.is_zero():
            continue
        g = gr_npart(T, "recursive", rng)
        pr = partition_rank_one(T)
        if (g == 1) != (pr is not None):
            ch.failures.append(f"GR {g} but partition-rank-one witness {pr is not None}")
        else:
            agree += 1
    D = cat.diagonal_npart(4, 2, field)
    ch.timed("GR(diagonal)", 600, lambda: gr_npart(D, "recursive"), 2)
    ch.timed("PR1(diagonal)", 600, lambda: partition_rank_one(D), None)
    ch.total_limit("criterion", 600, time.perf_counter() - t0)
    return ch, f"equivalence holds on {agree} samples and the diagonal tensor (GR 2, no witness)"


def crit_decompositions(field: FieldSpec, seed: int = 0):
    ch = _Checks()
    t0 = time.perf_counter()
    ex = cat.ex_5x5x6(field)
    x1 = Tensor(np.concatenate([ex.data[:, :, :5], np.zeros((5, 5, 1), dtype=object)], axis=2), field)
    x2 = Tensor(np.concatenate([ex.data[:, :4, :], np.zeros((5, 1, 6), dtype=object)], axis=1), field)

    def side(axis, n, idx, want_x):
        phi = [1 if i == idx else 0 for i in range(n)]
        cert = find_decomposition(ex, [(axis, phi)], seed=seed)
        return cert.gr_split == (3, 1) and cert.pieces[0][0] == axis and cert.parts[0][0] == want_x

    ch.timed("ex-5x5x6 C-side", 600, lambda: side(2, 6, 5, x1), True)
    ch.timed("ex-5x5x6 B-side", 600, lambda: side(1, 5, 4, x2), True)
    ch.timed("gr4-counterexample(7)", 600, lambda: find_decomposition(cat.gr4_counterexample(7, field), seed=seed).gr_split, (2, 2))
    ch.timed("mm(2,2,2)", 600, lambda: find_decomposition(cat.mm(2, 2, 2, field), seed=seed).kind, "none-found")
    ch.timed("skew3", 600, lambda: find_decomposition(cat.skew3(field), seed=seed).kind, "none-found")
    ch.total_limit("criterion", 600, time.perf_counter() - t0)
    return ch, "ex-5x5x6 splits 3+1 both ways, gr4-counterexample 2+2, mm(2,2,2) and skew3 none-found"


def crit_mm_primitivity(field: FieldSpec, seed: int = 0):
    ch = _Checks()
    t0 = time.perf_counter()
    ch.timed("mm(2,2,2)", 600, lambda: find_decomposition(cat.mm(2, 2, 2, field), seed=seed).kind, "none-found")
    ch.timed("mm(2,2,3)", 600, lambda: find_decomposition(cat.mm(2, 2, 3, field), seed=seed).kind, "none-found")
    ch.timed("mm(1,2,2)", 600, lambda: find_decomposition(cat.mm(1, 2, 2, field), seed=seed).gr_split, (0, 2))
    ch.total_limit("criterion", 600, time.perf_counter() - t0)
    return ch, "mm(2,2,2), mm(2,2,3) none-found; mm(1,2,2) splits completely"


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "gr-formula", crit_gr_formula),
    (2, "gr-skew", crit_gr_skew),
    (3, "classify-gr3", crit_classify),
    (4, "gr4-counterexample", crit_gr4_counterexample),
    (5, "generic-codim", crit_generic_codim),
    (6, "eisenbud-bound", crit_eisenbud),
    (7, "beauville", crit_beauville),
    (8, "common-factor", crit_common_factor),
    (9, "altdef-consistency", crit_altdef),
    (10, "partition-rank-one", crit_pr1),
    (11, "decompositions", crit_decompositions),
    (12, "mm-primitivity", crit_mm_primitivity),
]


def select(only: str | None = None) -> list[tuple[int, str, Callable]]:
    if not only:
        return list(CRITERIA)
    pats = [p.strip() for p in only.split(",") if p.strip()]
    return [c for c in CRITERIA if any(fnmatch.fnmatch(c[1], p) or p == str(c[0]) for p in pats)]


def run_criterion(number: int, name: str, fn: Callable, field: FieldSpec = FP, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    kwargs = {"seed": seed} if "seed" in fn.__code__.co_varnames else {}
    try:
        ch, ok_detail = fn(field, **kwargs)
    except Exception as exc:
        return CriterionResult(number, name, False, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)
    res = ch.result(number, name, time.perf_counter() - t0, ok_detail)
    if ch.notes:
        res.detail += " [" + "; ".join(ch.notes) + "]"
    return res


def run_all(only: str | None = None, field: FieldSpec = FP, seed: int = 0, echo=None) -> list[CriterionResult]:
    out = []
    for number, name, fn in select(only):
        res = run_criterion(number, name, fn, field, seed)
        if echo:
            echo(res.line())
        out.append(res)
    return out
