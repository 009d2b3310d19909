"""Roots of polynomial congruences.

``rho(f, m)`` counts residues ``n mod m`` with ``f(n) = 0 mod m``.  The lifted
path counts roots modulo ``p`` with a gcd against ``x^p - x`` over ``F_p`` and
then lifts through ``p^l``; ``rho_brute`` enumerates residues and serves as the
oracle.  ``rho_star`` counts solutions of a binary form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from . import kernels
from ._fp import fp_eval, fp_gcd, fp_root_gcd
from .arith import FactoredInteger, as_factored, euler_phi, is_prime
from .polys import BinaryForm, UniPoly

Method = Literal["brute", "lifted", "crt-combined"]


@dataclass(frozen=True)
class RootCountResult:
    modulus: int
    count: int
    method: Method


@dataclass(frozen=True)
class RhoStarResult:
    modulus: int
    pairs: int
    value: Fraction


class DegenerateModulusError(ValueError):
    """``p`` divides every coefficient, so the congruence is trivial at ``p``."""


def roots_mod_p_count(f: UniPoly, p: int) -> int:
    """Number of distinct roots of ``f`` modulo the prime ``p``."""
    fp = list(f.mod(p))
    if not fp:
        raise DegenerateModulusError(f"{p} divides every coefficient of {f}")
    if len(fp) == 1:
        return 0
    return len(fp_root_gcd(fp, p)) - 1


def _lift_count(f: UniPoly, p: int, ell: int) -> int:
    fp = list(f.mod(p))
    if not fp:
        raise DegenerateModulusError(f"{p} divides every coefficient of {f}")
    if len(fp) == 1:
        return 0
    g = fp_root_gcd(fp, p)
    distinct = len(g) - 1
    if ell == 1 or distinct == 0:
        return distinct
    dfp = list(f.derivative().mod(p))
    h = fp_gcd(g, dfp, p) if dfp else g
    multiple = len(h) - 1
    total = distinct - multiple  # simple roots lift uniquely
    if multiple == 0:
        return total
    for a in range(p):
        if fp_eval(h, a, p):
            continue
        shifted = f.compose_affine(p, a)
        c = shifted.content()
        v = 0
        while c % p == 0:
            c //= p
            v += 1
        if v >= ell:
            total += p ** (ell - 1)
        else:
            total += p ** (v - 1) * _lift_count(shifted.divexact(p**v), p, ell - v)
    return total


def rho_prime_power(f: UniPoly, p: int, ell: int) -> int:
    """``rho_f(p^l)`` by counting roots modulo ``p`` and lifting."""
    if ell < 1:
        return 1
    if f.is_zero():
        raise DegenerateModulusError("the zero polynomial vanishes modulo every integer")
    return _lift_count(f, p, ell)


def rho(f: UniPoly, m) -> int:
    """``rho_f(m)`` as a product of prime-power counts.

    ``m`` may be an int or a :class:`FactoredInteger`.  A prime dividing ``m``
    and every coefficient of ``f`` raises :class:`DegenerateModulusError`.
    """
    result = 1
    for p, e in as_factored(m).factors:
        result *= rho_prime_power(f, p, e)
        if result == 0:
            break
    return result


def rho_brute(f: UniPoly, m: int) -> int:
    """``rho_f(m)`` by enumerating ``0 <= n < m``."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    if m <= kernels.MODULUS_LIMIT:
        return kernels.count_roots_mod(f.coeffs or (0,), m)
    return sum(1 for n in range(m) if f.eval_mod(n, m) == 0)


def root_count(f: UniPoly, m, method: str = "auto") -> RootCountResult:
    fac = as_factored(m)
    if method == "brute":
        return RootCountResult(fac.value, rho_brute(f, fac.value), "brute")
    if method not in ("auto", "lifted"):
        raise ValueError(f"unknown method {method!r}")
    label: Method = "crt-combined" if len(fac.factors) > 1 else "lifted"
    return RootCountResult(fac.value, rho(f, fac), label)


# ---------------------------------------------------------------------------
# binary forms


def rho_star_brute(F: BinaryForm, m: int) -> RhoStarResult:
    """Pairs in ``(0, m]^2`` with ``gcd(n1, n2, m) = 1`` and ``F = 0 mod m``, over ``phi(m)``."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    pairs = kernels.count_form_pairs_mod(F.coeffs, m)
    return RhoStarResult(m, pairs, Fraction(pairs, euler_phi(m)))


def rho_star_prime(G: BinaryForm, p: int) -> int:
    """``rho*_G(p)`` from the root count of ``G(x, 1)`` plus the root at infinity."""
    if G.coeffs[0] == 0:
        raise ValueError(f"G(1,0) = 0 for {G}; swap the variables first")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    g = G.dehomogenize()
    if not g.mod(p):
        roots = p
    else:
        roots = roots_mod_p_count(g, p)
    return roots + (1 if G.coeffs[0] % p == 0 else 0)


@dataclass
class DanReport:
    """Outcome of checking ``rho_f(p^l) <= min(d p^(l-1), 2 d^3 p^((1-1/d) l))``."""

    f: UniPoly
    p: int
    ell: int
    rho: int
    trivial_bound: int
    passes_trivial: bool
    passes_power: bool

    @property
    def passed(self) -> bool:
        return self.passes_trivial and self.passes_power

    def as_record(self) -> dict:
        d = self.f.degree
        return {
            "poly": self.f.to_list(), "p": self.p, "ell": self.ell, "rho": self.rho,
            "trivial_bound": self.trivial_bound,
            "power_bound": f"2*{d}^3*{self.p}^({d - 1}*{self.ell}/{d})",
            "passes_trivial": self.passes_trivial, "passes_power": self.passes_power,
            "passed": self.passed,
        }


def check_dan_bound(f: UniPoly, p: int, ell: int) -> DanReport:
    """Compare ``rho_f(p^l)`` with both branches of the bound, exactly.

    The fractional power is compared as ``rho^d <= (2 d^3)^d p^((d-1) l)``.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if not f.mod(p):
        raise DegenerateModulusError(f"{p} divides every coefficient of {f}")
    d = f.degree
    if d < 1:
        raise ValueError("the bound concerns polynomials of degree >= 1")
    r = rho(f, FactoredInteger(p**ell, ((p, ell),)))
    trivial = d * p ** (ell - 1)
    power_ok = r**d <= (2 * d**3) ** d * p ** ((d - 1) * ell)
    return DanReport(f, p, ell, r, trivial, r <= trivial, power_ok)
