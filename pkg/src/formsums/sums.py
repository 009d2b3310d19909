"""Brute-force divisor-type sums and the quantities they are compared with.

``t_sum`` and ``s_sum`` add ``h(|f(n)|)`` and ``h(|F(n1, n2)|)`` over boxes,
skipping zeros of the polynomial and counting them.  The summation box is cut
into fixed chunks that can run on a thread pool; every chunk returns an exact
integer or rational and chunks are combined in order, so the result does not
depend on the number of workers.
"""

from __future__ import annotations

import csv
import io
import sys
from contextlib import contextmanager
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .arith import MultiplicativeFunction, factorize, lcm_range, primes_up_to
from .fpd import fixed_prime_divisors
from .polys import BinaryForm, ShapeDecomposition, UniPoly, delta_F, disc_uni, shape_decompose, specialize
from .roots import rho_prime_power, rho_star_prime

ROW_CHUNK = 64
T_CHUNK = 8192
DECIMAL_DIGITS = 50
REPORT_DIGITS = 10

# ---------------------------------------------------------------------------
# evaluation of h over arrays of values


def _kernel_table(h: MultiplicativeFunction, chunk_len: int) -> Optional[np.ndarray]:
    """Exponent table when the kernels can sum ``chunk_len`` values without overflow."""
    table = h.exponent_table()
    if table is None:
        return None
    # h(n) <= r^Omega(n) with r = max table[e]^(1/e) and Omega(n) <= 42
    r = max(float(table[e]) ** (1.0 / e) for e in range(1, len(table)))
    if r**42 * max(chunk_len, 1) >= 2.0**62:
        return None
    return table


def _h_sum_python(h: MultiplicativeFunction, values: Iterable[int]) -> tuple[Fraction, int]:
    total = Fraction(0)
    zeros = 0
    cache: dict[tuple[int, int], Fraction] = {}
    for v in values:
        v = abs(int(v))
        if v == 0:
            zeros += 1
            continue
        term = Fraction(1)
        for p, e in factorize(v).factors:
            key = (p, e)
            if key not in cache:
                cache[key] = h.at_prime_power(p, e)
            term *= cache[key]
        total += term
    return total, zeros


def _h_sum_array(h: MultiplicativeFunction, values: np.ndarray, table) -> tuple[Fraction, int]:
    values = np.abs(values.ravel())
    nz = values[values != 0]
    zeros = int(values.size - nz.size)
    if table is None:
        total, _ = _h_sum_python(h, nz.tolist())
        return total, zeros
    if nz.size == 0:
        return Fraction(0), zeros
    return Fraction(int(kernels.mult_values(nz, table).sum())), zeros


def _monomial_bound(coeffs: Sequence[int], X1: int, X2: int) -> int:
    d = len(coeffs) - 1
    return sum(abs(a) * X1 ** (d - j) * X2**j for j, a in enumerate(coeffs))


def _form_block(coeffs: Sequence[int], n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
    """``F(n1_i, n2_j)`` as an int64 matrix; the caller guarantees no overflow."""
    d = len(coeffs) - 1
    a = n1.astype(np.int64)[:, None]
    b = n2.astype(np.int64)[None, :]
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for j, c in enumerate(coeffs):
        if c:
            out += np.int64(c) * (a ** (d - j)) * (b**j)
    return out


def _poly_block(coeffs: Sequence[int], n: np.ndarray) -> np.ndarray:
    n = n.astype(np.int64)
    out = np.zeros(n.shape, dtype=np.int64)
    for c in reversed(coeffs):
        out = out * n + np.int64(c)
    return out


def _run_chunks(fn, chunks: list, jobs: int) -> list:
    if jobs <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, chunks))


def _combine(parts: list[tuple[Fraction, int]]) -> tuple[Fraction, int]:
    total, zeros = Fraction(0), 0
    for s, z in parts:
        total += s
        zeros += z
    return total, zeros


# ---------------------------------------------------------------------------
# report types


@contextmanager
def _unbounded_int_str():
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def fmt_exact(x) -> str:
    """Integers as digits, rationals in slash form, however long."""
    if x is None:
        return ""
    with _unbounded_int_str():
        if isinstance(x, Fraction):
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(x)


@dataclass
class SumRow:
    X1: int
    X2: Optional[int]
    value: Fraction
    zeros: int
    E: Optional[Fraction] = None
    delta: Optional[Fraction] = None
    bound: Optional[Fraction] = None
    ratio: Optional[Fraction] = None
    ratio_decimal: Optional[str] = None
    precision: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "X1": self.X1, "X2": self.X2, "sum": fmt_exact(self.value), "zeros_skipped": self.zeros,
            "E": fmt_exact(self.E), "Delta_F": fmt_exact(self.delta), "bound": fmt_exact(self.bound),
            "ratio": fmt_exact(self.ratio), "ratio_decimal": self.ratio_decimal or "",
            "precision": self.precision or "",
        }


CSV_COLUMNS = ("X1", "X2", "sum", "zeros_skipped", "E", "Delta_F", "bound", "ratio", "ratio_decimal", "precision")


@dataclass
class SumReport:
    kind: str
    params: dict
    rows: list[SumRow] = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.get("passed", True) for c in self.checks.values())

    def ratios(self) -> list[Fraction]:
        return [r.ratio for r in self.rows if r.ratio is not None]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            d = r.as_dict()
            w.writerow({k: "" if d[k] is None else d[k] for k in CSV_COLUMNS})
        return buf.getvalue()

    def summary(self) -> dict:
        return {"kind": self.kind, "params": self.params, "checks": self.checks, "passed": self.passed,
                "rows": [r.as_dict() for r in self.rows]}


# ---------------------------------------------------------------------------
# T and S


def t_sum(X: int, h: MultiplicativeFunction, f: UniPoly, jobs: int = 1) -> SumRow:
    """``T(X; h, f)``: sum of ``h(|f(n)|)`` over ``1 <= n <= X`` with ``f(n) != 0``."""
    if f.is_zero():
        raise ValueError("f must be nonzero")
    if X < 0:
        raise ValueError(f"X must be >= 0, got {X}")
    coeffs = list(f.coeffs)
    bound = sum(abs(c) * X**i for i, c in enumerate(coeffs))
    starts = list(range(1, X + 1, T_CHUNK))
    if bound < kernels.VALUE_LIMIT:
        table = _kernel_table(h, T_CHUNK)

        def work(s):
            n = np.arange(s, min(s + T_CHUNK, X + 1), dtype=np.int64)
            return _h_sum_array(h, _poly_block(coeffs, n), table)
    else:
        def work(s):
            return _h_sum_python(h, (f(n) for n in range(s, min(s + T_CHUNK, X + 1))))
    value, zeros = _combine(_run_chunks(work, starts, jobs))
    return SumRow(X, None, value, zeros)


def _s_sum_ranges(F: BinaryForm, r1: Sequence[int], r2: Sequence[int], h, jobs: int) -> tuple[Fraction, int]:
    coeffs = list(F.coeffs)
    if not len(r1) or not len(r2):
        return Fraction(0), 0
    m1 = max(abs(r1[0]), abs(r1[-1]))
    m2 = max(abs(r2[0]), abs(r2[-1]))
    n2 = np.asarray(r2, dtype=np.int64)
    chunks = [r1[i:i + ROW_CHUNK] for i in range(0, len(r1), ROW_CHUNK)]
    if _monomial_bound(coeffs, m1, m2) < kernels.VALUE_LIMIT:
        table = _kernel_table(h, ROW_CHUNK * len(r2))

        def work(rows):
            return _h_sum_array(h, _form_block(coeffs, np.asarray(rows, dtype=np.int64), n2), table)
    else:
        def work(rows):
            return _h_sum_python(h, (F(a, b) for a in rows for b in r2))
    return _combine(_run_chunks(work, chunks, jobs))


def s_sum(X1: int, X2: int, h: MultiplicativeFunction, F: BinaryForm,
          symmetric: bool = False, jobs: int = 1) -> SumRow:
    """``S(X1, X2; h, F)`` over ``1 <= n_i <= X_i``, or ``|n_i| <= X_i`` when symmetric."""
    if F.is_zero():
        raise ValueError("F must be nonzero")
    if X1 < 0 or X2 < 0:
        raise ValueError("X1, X2 must be >= 0")
    if symmetric:
        r1, r2 = range(-X1, X1 + 1), range(-X2, X2 + 1)
    else:
        r1, r2 = range(1, X1 + 1), range(1, X2 + 1)
    value, zeros = _s_sum_ranges(F, r1, r2, h, jobs)
    return SumRow(X1, X2, value, zeros)


# ---------------------------------------------------------------------------
# Euler product


@dataclass(frozen=True)
class EulerProductSpec:
    shape: ShapeDecomposition
    h: MultiplicativeFunction
    X1: int
    X2: int


def euler_E(spec: EulerProductSpec) -> Fraction:
    """The product over ``d < p <= min(X1, X2)`` with ``rho*_G(p)``, times the ``d_i`` products."""
    S, h = spec.shape, spec.h
    d = S.d
    E = Fraction(1)
    for p in primes_up_to(min(spec.X1, spec.X2)):
        if p <= d:
            continue
        E *= 1 + Fraction(rho_star_prime(S.G, p)) * (h.at_prime_power(p, 1) - 1) / p
    for di, Xi in ((S.d1, spec.X1), (S.d2, spec.X2)):
        if di == 0:
            continue
        for p in primes_up_to(Xi):
            E *= 1 + di * (h.at_prime_power(p, 1) - 1) / Fraction(p)
    return E


# ---------------------------------------------------------------------------
# Nair-type right-hand sides


class FixedPrimeDivisorError(ValueError):
    def __init__(self, f: UniPoly, primes: list[int]):
        self.f = f
        self.primes = primes
        super().__init__(
            f"{f} has fixed prime divisors {primes}; split it into fpd-free pieces with "
            "formsums.fpd.remove_all_fpd first"
        )


def _require_fpd_free(f: UniPoly) -> None:
    if f.degree < 1:
        raise ValueError("f must have degree >= 1")
    if disc_uni(f) == 0:
        raise ValueError(f"disc({f}) = 0")
    if f.content() != 1:
        raise ValueError(f"{f} is not primitive")
    fpds = fixed_prime_divisors(f)
    if fpds:
        raise FixedPrimeDivisorError(f, fpds)


class _RhoTable:
    def __init__(self, f: UniPoly):
        self.f = f
        self.cache: dict[tuple[int, int], int] = {}

    def at(self, p: int, e: int) -> int:
        key = (p, e)
        if key not in self.cache:
            self.cache[key] = rho_prime_power(self.f, p, e)
        return self.cache[key]

    def __call__(self, m: int) -> int:
        r = 1
        for p, e in factorize(m).factors:
            r *= self.at(p, e)
            if not r:
                return 0
        return r


def _rho_product(rt: _RhoTable, X: int) -> Fraction:
    num, den = 1, 1
    for p in primes_up_to(X):
        num *= p - rt.at(p, 1)
        den *= p
    return Fraction(num, den)


def _rho_h_sum(rt: _RhoTable, h: MultiplicativeFunction, X: int) -> Fraction:
    if X < 1:
        return Fraction(0)
    hp: dict[tuple[int, int], Fraction] = {}

    def hval(m):
        v = Fraction(1)
        for p, e in factorize(m).factors:
            if (p, e) not in hp:
                hp[(p, e)] = h.at_prime_power(p, e)
            v *= hp[(p, e)]
        return v

    terms = [(m, rt(m)) for m in range(1, X + 1)]
    vals = [(m, r, hval(m)) for m, r in terms if r]
    if all(v.denominator == 1 for _, _, v in vals):
        L = lcm_range(X)
        return Fraction(sum(r * v.numerator * (L // m) for m, r, v in vals), L)
    return sum((Fraction(r) * v / m for m, r, v in vals), Fraction(0))


def nair_rhs(X: int, h: MultiplicativeFunction, f: UniPoly) -> Fraction:
    """``X prod_{p<=X}(1 - rho_f(p)/p) sum_{m<=X} rho_f(m) h(m) / m`` exactly."""
    _require_fpd_free(f)
    rt = _RhoTable(f)
    return X * _rho_product(rt, X) * _rho_h_sum(rt, h, X)


@dataclass(frozen=True)
class ExpRHS:
    """``X * product * exp(exponent_sum)``; only ``value`` is approximate."""

    X: int
    product: Fraction
    exponent_sum: Fraction
    value: Decimal
    digits: int = DECIMAL_DIGITS


def nair_exp_rhs(X: int, h: MultiplicativeFunction, f: UniPoly) -> ExpRHS:
    _require_fpd_free(f)
    rt = _RhoTable(f)
    prod = _rho_product(rt, X)
    expo = Fraction(0)
    for p in primes_up_to(X):
        expo += h.at_prime_power(p, 1) * rt.at(p, 1) / p
    with localcontext() as ctx:
        ctx.prec = DECIMAL_DIGITS
        val = (Decimal(X) * Decimal(prod.numerator) / Decimal(prod.denominator)
               * (Decimal(expo.numerator) / Decimal(expo.denominator)).exp())
    return ExpRHS(X, prod, expo, +val)


# ---------------------------------------------------------------------------
# harnesses


def spread(values: Sequence) -> Fraction | Decimal:
    """``max / min`` of a positive sequence; 1 for fewer than two points."""
    if len(values) < 2:
        return Fraction(1) if not values or isinstance(values[0], Fraction) else Decimal(1)
    lo = min(values)
    if lo <= 0:
        raise ValueError("spread needs positive values")
    return max(values) / lo


def decimal_str(x, digits: int = REPORT_DIGITS) -> str:
    with localcontext() as ctx:
        ctx.prec = DECIMAL_DIGITS
        if isinstance(x, Fraction):
            x = Decimal(x.numerator) / Decimal(x.denominator)
        return f"{x:.{digits}g}"


def _spread_check(values, threshold) -> dict:
    s = spread(values)
    exact = isinstance(s, Fraction)
    return {"spread": decimal_str(s), "compared": "exactly" if exact else f"at {DECIMAL_DIGITS} digits",
            "threshold": str(threshold),
            "passed": bool(s < Fraction(str(threshold)) if exact else s < Decimal(str(threshold)))}


def _check_grid(grid: Sequence[int]) -> list[int]:
    grid = [int(x) for x in grid]
    if not grid:
        raise ValueError("grid must contain at least one X")
    if any(x < 1 for x in grid):
        raise ValueError(f"grid values must be >= 1, got {grid}")
    return grid


def theorem1_harness(F: BinaryForm, h: MultiplicativeFunction, grid: Sequence[int],
                     threshold=2.0, jobs: int = 1) -> SumReport:
    """``S(X, X; h, F) / (X^2 E)`` over a square grid, with its max/min spread."""
    grid = _check_grid(grid)
    if not F.is_primitive():
        raise ValueError(f"{F} is not primitive")
    shape = shape_decompose(F)
    dF = delta_F(F)
    rep = SumReport("theorem1", {"form": F.literal(), "h": h.name, "grid": grid, "threshold": str(threshold)})
    for X in grid:
        row = s_sum(X, X, h, F, jobs=jobs)
        E = euler_E(EulerProductSpec(shape, h, X, X))
        row.E, row.delta = E, dF
        row.bound = X * X * E
        row.ratio = row.value / row.bound
        row.ratio_decimal = decimal_str(row.ratio)
        row.precision = f"{REPORT_DIGITS} significant digits"
        rep.rows.append(row)
    rep.checks["spread"] = _spread_check(rep.ratios(), threshold)
    return rep


def corollary2_harness(F: BinaryForm, grid: Sequence[int], threshold=2.0, jobs: int = 1,
                       h: Optional[MultiplicativeFunction] = None) -> SumReport:
    """``S(X, X; tau, F) / (X^2 ln X)``; the logarithm is a 50-digit decimal."""
    from .arith import tau

    h = h or tau
    grid = _check_grid(grid)
    if grid != sorted(grid):
        raise ValueError(f"grid must be increasing, got {grid}")
    if any(x < 2 for x in grid):
        raise ValueError("ln X vanishes at X = 1; use X >= 2")
    rep = SumReport("corollary2", {"form": F.literal(), "h": h.name, "grid": grid, "threshold": str(threshold)})
    approx = []
    for X in grid:
        row = s_sum(X, X, h, F, jobs=jobs)
        with localcontext() as ctx:
            ctx.prec = DECIMAL_DIGITS
            denom = Decimal(X * X) * Decimal(X).ln()
            r = Decimal(row.value.numerator) / Decimal(row.value.denominator) / denom
        approx.append(r)
        row.ratio_decimal = decimal_str(r)
        row.precision = f"{REPORT_DIGITS} significant digits (ln at {DECIMAL_DIGITS} digits)"
        rep.rows.append(row)
    rep.checks["spread"] = _spread_check(approx, threshold)
    return rep


def theorem3_harness(f: UniPoly, h: MultiplicativeFunction, grid: Sequence[int],
                     threshold=2.0, jobs: int = 1) -> SumReport:
    """``T(X; h, f) / nair_rhs(X; h, f)`` over a grid, with its max/min spread."""
    grid = _check_grid(grid)
    _require_fpd_free(f)
    rep = SumReport("theorem3", {"poly": f.to_list(), "h": h.name, "grid": grid, "threshold": str(threshold)})
    for X in grid:
        row = t_sum(X, h, f, jobs=jobs)
        row.bound = nair_rhs(X, h, f)
        row.ratio = row.value / row.bound
        row.ratio_decimal = decimal_str(row.ratio)
        row.precision = f"{REPORT_DIGITS} significant digits"
        rep.rows.append(row)
    rep.checks["spread"] = _spread_check(rep.ratios(), threshold)
    return rep


@dataclass
class InequalityRecord:
    form: str
    h: str
    X1: int
    X2: int
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def as_dict(self) -> dict:
        return {"form": self.form, "h": self.h, "X1": self.X1, "X2": self.X2,
                "lhs": fmt_exact(self.lhs), "rhs": fmt_exact(self.rhs), "holds": self.holds}


def check_fixed_variable_bound(F: BinaryForm, h: MultiplicativeFunction, X1: int, X2: int) -> InequalityRecord:
    """Compare ``S(X1, X2; h, F)`` with ``sum_{n2} h(n2^d2 q_n2) T(X1; h, f_n2)``.

    The bound holds for sub-multiplicative ``h`` since
    ``F(n1, n2) = n2^d2 q_n2 f_n2(n1)``.
    """
    shape = shape_decompose(F)
    lhs = s_sum(X1, X2, h, F).value
    rhs = Fraction(0)
    for n2 in range(1, X2 + 1):
        f, q = specialize(shape, n2)
        rhs += h(n2**shape.d2 * q) * t_sum(X1, h, f).value
    return InequalityRecord(F.literal(), h.name, X1, X2, lhs, rhs)


def row_count_bound(F: BinaryForm, X1: int, X2: int) -> int:
    """Upper bound ``d max(X1, X2)`` for the zeros skipped in an S-sum."""
    return F.degree * max(X1, X2)


__all__ = [
    "SumRow", "SumReport", "EulerProductSpec", "ExpRHS", "FixedPrimeDivisorError", "InequalityRecord",
    "t_sum", "s_sum", "euler_E", "nair_rhs", "nair_exp_rhs", "theorem1_harness", "corollary2_harness",
    "theorem3_harness", "check_fixed_variable_bound", "spread", "fmt_exact", "decimal_str", "CSV_COLUMNS",
]
