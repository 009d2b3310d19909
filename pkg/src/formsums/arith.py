"""Exact integer arithmetic: primes, factorization and multiplicative functions.

Everything here works with Python ints and :class:`fractions.Fraction`, so
values of multiplicative functions, Euler products and bound ratios are exact.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

import numpy as np

DEFAULT_SIEVE_LIMIT = 10**6

# Deterministic Miller-Rabin witnesses for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981


class _Sieve:
    """Smallest-prime-factor table, built once and then read-only."""

    def __init__(self, limit: int):
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.int32)
        for i in range(2, math.isqrt(limit) + 1):
            if spf[i] == 0:
                block = spf[i * i :: i]
                block[block == 0] = i
        idx = np.nonzero(spf == 0)[0]
        spf[idx] = idx
        spf[:2] = 0
        self.spf = spf
        self.primes = (np.nonzero(spf[2:] == np.arange(2, limit + 1))[0] + 2).astype(np.int64)
        self._prime_list = [int(p) for p in self.primes]

    def primes_up_to(self, n: int) -> list[int]:
        k = int(np.searchsorted(self.primes, n, side="right"))
        return self._prime_list[:k]


_sieve: Optional[_Sieve] = None


def set_sieve_limit(limit: int) -> None:
    """Rebuild the shared sieve with a new limit (default ``10**6``)."""
    global _sieve
    if limit < 2:
        raise ValueError("sieve limit must be at least 2")
    _sieve = _Sieve(limit)
    _factor_cached.cache_clear()


def _get_sieve() -> _Sieve:
    global _sieve
    if _sieve is None:
        _sieve = _Sieve(DEFAULT_SIEVE_LIMIT)
    return _sieve


def primes_up_to(n: int) -> list[int]:
    """All primes ``p <= n`` in increasing order."""
    if n < 2:
        return []
    sieve = _get_sieve()
    if n <= sieve.limit:
        return sieve.primes_up_to(n)
    return [p for p in range(2, n + 1) if is_prime(p)]


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24 and overwhelmingly likely above."""
    if n < 2:
        return False
    sieve = _get_sieve()
    if n <= sieve.limit:
        return int(sieve.spf[n]) == n
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES if n < _MR_DETERMINISTIC_BOUND else _MR_BASES + (43, 47, 53, 59, 61, 67, 71)
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard-Brent failed to split {n}")


def _split_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split_large(r, out)
        _split_large(r, out)
        return
    f = _pollard_brent(n)
    _split_large(f, out)
    _split_large(n // f, out)


@lru_cache(maxsize=1 << 16)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    sieve = _get_sieve()
    out: dict[int, int] = {}
    if n <= sieve.limit:
        spf = sieve.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return tuple(sorted(out.items()))
    m = n
    for i, p in enumerate(sieve._prime_list):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
        # cheap early exit once the cofactor is likely a single large prime
        if i == 256 and m > 1 and is_prime(m):
            break
    else:
        # ran out of sieve primes with a large cofactor left
        _split_large(m, out)
        return tuple(sorted(out.items()))
    if m > 1:
        # either every prime up to sqrt(m) was removed or m passed Miller-Rabin
        out[m] = out.get(m, 0) + 1
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class FactoredInteger:
    """A natural number with its prime factorization (primes increasing)."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.factors}")
            if not is_prime(p):
                raise ValueError(f"{p} in {self.factors} is not prime")
            last = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors {self.factors} do not multiply to {self.value}")

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __int__(self) -> int:
        return self.value

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)


def _check_natural(n: int, what: str = "n") -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"{what} must be an integer, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"{what} must be >= 1, got {n}")


def factorize(n: int) -> FactoredInteger:
    """Factor ``n >= 1``.

    >>> factorize(12).factors
    ((2, 2), (3, 1))
    """
    _check_natural(n)
    n = int(n)
    if n == 1:
        return FactoredInteger(1, ())
    return FactoredInteger(n, _factor_cached(n))


def as_factored(m) -> FactoredInteger:
    return m if isinstance(m, FactoredInteger) else factorize(m)


def euler_phi(m: int) -> int:
    _check_natural(m, "m")
    result = int(m)
    for p, _ in factorize(m).factors:
        result -= result // p
    return result


def omega(n: int) -> int:
    """Number of distinct prime divisors."""
    return len(factorize(n).factors)


def psi(n: int) -> Fraction:
    """Product of (1 + 1/p) over the distinct primes dividing ``n``."""
    _check_natural(n)
    num = den = 1
    for p, _ in factorize(n).factors:
        num *= p + 1
        den *= p
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# multiplicative functions


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


_RULE_MAX_BITS = 1 << 16


def _eval_rule(node: ast.AST, env: dict[str, Fraction]) -> Fraction:
    if isinstance(node, ast.Expression):
        return _eval_rule(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_rule(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval_rule(node.left, env)
        right = _eval_rule(node.right, env)
        if isinstance(node.op, ast.Pow):
            if right.denominator != 1:
                raise ValueError("exponents in a prime-power rule must be integers")
            size = abs(int(right)) * max(left.numerator.bit_length(), left.denominator.bit_length())
            if size > _RULE_MAX_BITS:
                raise ValueError(f"power {left}**{right} is too large for a prime-power rule")
            return left ** int(right)
        return _BINOPS[type(node.op)](left, right)
    raise ValueError(f"unsupported syntax in prime-power rule: {ast.dump(node)}")


_RULE_NAMES = {"p", "l", "ell"}


def parse_rule(expr: str) -> tuple[Callable[[int, int], Fraction], bool]:
    """Compile a closed-form prime-power rule over ``p`` and ``l`` (alias ``ell``).

    Only integer literals, ``+ - * / **`` and unary signs are accepted.
    Returns the rule and whether it depends on ``p``.
    """
    tree = ast.parse(expr, mode="eval")
    names = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Name):
            if node.id not in _RULE_NAMES:
                raise ValueError(f"unknown name {node.id!r} in rule {expr!r}; use p and l")
            names.add(node.id)
        elif not isinstance(
            node,
            (ast.Expression, ast.Constant, ast.Name, ast.UnaryOp, ast.BinOp, ast.USub, ast.UAdd,
             ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Load),
        ):
            raise ValueError(f"unsupported syntax in rule {expr!r}")
    _eval_rule(tree, {"p": Fraction(2), "l": Fraction(1), "ell": Fraction(1)})

    def rule(p: int, ell: int) -> Fraction:
        return _eval_rule(tree, {"p": Fraction(p), "l": Fraction(ell), "ell": Fraction(ell)})

    return rule, "p" in names


@dataclass(frozen=True)
class MultiplicativeFunction:
    """A non-negative multiplicative ``h`` given by its values on prime powers.

    ``A`` is the class constant in ``h(p^l) <= A^l``.  ``B(eps)`` is a function in
    general, so at most one ``(epsilon, B)`` witness pair is stored.
    ``exponent_only`` marks rules that ignore ``p``; such functions with integer
    values can be evaluated by the compiled kernels.
    """

    name: str
    rule: Callable[[int, int], Fraction] = field(compare=False)
    A: Optional[Fraction] = None
    epsilon_witness: Optional[Fraction] = None
    B_witness: Optional[Fraction] = None
    exponent_only: bool = False
    source: str = ""

    def at_prime_power(self, p: int, ell: int) -> Fraction:
        if ell == 0:
            return Fraction(1)
        v = Fraction(self.rule(p, ell))
        if v < 0:
            raise ValueError(f"{self.name}({p}^{ell}) = {v} is negative")
        return v

    def __call__(self, n) -> Fraction:
        return eval_mult(self, n)

    def exponent_table(self, max_exp: int = 64) -> Optional[np.ndarray]:
        """``table[e] = h(p^e)`` as int64, or None when not representable."""
        if not self.exponent_only:
            return None
        vals = [self.at_prime_power(2, e) for e in range(max_exp)]
        if any(v.denominator != 1 or v > 2**40 for v in vals):
            return None
        return np.array([int(v) for v in vals], dtype=np.int64)

    def to_config(self) -> dict:
        out = {"name": self.name}
        if self.source.startswith("builtin:"):
            out["builtin"] = self.source.split(":", 1)[1]
        else:
            out["rule"] = self.source
        if self.A is not None:
            out["A"] = str(self.A)
        return out


def eval_mult(h: MultiplicativeFunction, n) -> Fraction:
    """Evaluate ``h(n)`` as the product of its prime-power values."""
    fac = as_factored(n)
    result = Fraction(1)
    for p, e in fac.factors:
        result *= h.at_prime_power(p, e)
    return result


def _builtin(name: str) -> MultiplicativeFunction:
    if name == "tau":
        return MultiplicativeFunction("tau", lambda p, l: Fraction(l + 1), A=Fraction(2),
                                      exponent_only=True, source="builtin:tau")
    if name == "one":
        return MultiplicativeFunction("one", lambda p, l: Fraction(1), A=Fraction(1),
                                      exponent_only=True, source="builtin:one")
    if name == "two_pow_omega":
        return MultiplicativeFunction("two_pow_omega", lambda p, l: Fraction(2), A=Fraction(2),
                                      exponent_only=True, source="builtin:two_pow_omega")
    raise ValueError(f"unknown built-in multiplicative function {name!r}")


BUILTINS = ("tau", "one", "two_pow_omega")
tau = _builtin("tau")
one = _builtin("one")
two_pow_omega = _builtin("two_pow_omega")


def from_rule(name: str, expr: str, A=None) -> MultiplicativeFunction:
    rule, uses_p = parse_rule(expr)
    return MultiplicativeFunction(name, rule, A=Fraction(A) if A is not None else None,
                                  exponent_only=not uses_p, source=expr)


def load_function(entry) -> MultiplicativeFunction:
    """Build a function from a config entry (a built-in name or a mapping)."""
    if isinstance(entry, str):
        return _builtin(entry)
    if "builtin" in entry:
        h = _builtin(entry["builtin"])
        if "A" in entry:
            h = MultiplicativeFunction(entry.get("name", h.name), h.rule, Fraction(entry["A"]),
                                       exponent_only=h.exponent_only, source=h.source)
        return h
    if "rule" in entry:
        return from_rule(entry.get("name", "h"), entry["rule"], entry.get("A"))
    raise ValueError("multiplicative function entry needs 'builtin' or 'rule'")


@dataclass
class MembershipReport:
    function: str
    A: Fraction
    bound: int
    prime_powers_tested: int
    violations: list[tuple[int, int, Fraction]]
    note: str = "finite check of h(p^l) <= A^l only; the B(eps) condition is not certifiable"

    @property
    def holds(self) -> bool:
        return not self.violations


def check_class_membership(h: MultiplicativeFunction, A, bound: int) -> MembershipReport:
    """List every prime power ``p^l <= bound`` with ``h(p^l) > A^l``."""
    if bound < 2:
        raise ValueError("bound must be >= 2")
    A = Fraction(A)
    violations = []
    tested = 0
    for p in primes_up_to(bound):
        q, ell = p, 1
        while q <= bound:
            tested += 1
            v = h.at_prime_power(p, ell)
            if v > A**ell:
                violations.append((p, ell, v))
            q *= p
            ell += 1
    violations.sort(key=lambda t: (t[0] ** t[1], t[0]))
    return MembershipReport(h.name, A, bound, tested, violations)


def lcm_range(n: int) -> int:
    """lcm(1, ..., n)."""
    out = 1
    for p in primes_up_to(n):
        q = p
        while q * p <= n:
            q *= p
        out *= q
    return out

