"""Fixed prime divisors and their removal by affine changes of variable.

A prime ``p`` is a fixed prime divisor (fpd) of ``f`` when ``p | f(n)`` for
every integer ``n``.  Substituting ``x -> p x + k`` for each digit ``k`` and
dividing out the powers of ``p`` eventually produces polynomials without ``p``
as an fpd.  The substitutions are recorded as a certificate: a prefix-free tree
of digit strings with exponent bookkeeping, which :func:`verify_certificate`
re-checks from scratch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ._fp import fp_divmod
from .arith import primes_up_to
from .polys import UniPoly, disc_uni

CERT_FORMAT = "formsums-certificate/1"


class ReductionError(ValueError):
    pass


def has_fpd(f: UniPoly, p: int) -> bool:
    """True when ``f(n) = 0 mod p`` for every residue ``n``."""
    return all(f.eval_mod(n, p) == 0 for n in range(p))


def _require_primitive(f: UniPoly) -> None:
    if f.is_zero() or f.content() != 1:
        raise ReductionError(f"{f} is not primitive")


def fixed_prime_divisors(f: UniPoly) -> list[int]:
    """Fixed prime divisors of a primitive ``f``; all of them are ``<= deg f``."""
    _require_primitive(f)
    if f.degree < 1:
        return []
    return [p for p in primes_up_to(f.degree) if has_fpd(f, p)]


@dataclass(frozen=True)
class PQRDecomposition:
    """``f = (x^p - x) q + p r`` with the coefficients of ``q`` in ``[0, p)``."""

    p: int
    q: UniPoly
    r: UniPoly

    @property
    def e(self) -> int:
        return self.q.degree


def pqr_decompose(f: UniPoly, p: int) -> PQRDecomposition:
    _require_primitive(f)
    fp = list(f.mod(p))
    modulus = [0, p - 1] + [0] * (p - 2) + [1]  # x^p - x over F_p
    quot, rem = fp_divmod(fp, modulus, p) if len(fp) >= len(modulus) else ([], fp)
    if rem or not quot:
        raise ReductionError(f"{p} is not a fixed prime divisor of {f}")
    q = UniPoly(quot)
    xp_minus_x = UniPoly([0, -1] + [0] * (p - 2) + [1])
    r = (f - xp_minus_x * q).divexact(p)
    return PQRDecomposition(p, q, r)


def _valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def reduce_once(f: UniPoly, p: int, k: int) -> tuple[int, UniPoly]:
    """Return ``(nu, f_k)`` with ``f_k(x) = f(p x + k) / p^(nu + 1)`` primitive."""
    if not 0 <= k < p:
        raise ReductionError(f"digit {k} outside [0, {p})")
    e = pqr_decompose(f, p).e
    g = f.compose_affine(p, k).divexact(p)
    nu = _valuation(g.content(), p)
    if nu > e:
        raise ReductionError(f"nu = {nu} exceeds e = {e} for {f} at p={p}, k={k}")
    return nu, g.divexact(p**nu)


@dataclass(frozen=True)
class ReductionBranch:
    """``p^(sum mus) * result(x) = f(p^(delta+1) x + sum_i p^i k_i)``."""

    digits: tuple[int, ...]
    mus: tuple[int, ...]
    result: UniPoly

    @property
    def delta(self) -> int:
        return len(self.digits) - 1

    def offset(self, p: int) -> int:
        return sum(k * p**i for i, k in enumerate(self.digits))


@dataclass(frozen=True)
class ReductionCertificate:
    f: UniPoly
    p: int
    e: int
    branches: tuple[ReductionBranch, ...]

    def as_multi(self) -> "MultiPrimeCertificate":
        leaves = []
        for b in self.branches:
            leaves.append(Leaf(
                alpha=self.p ** (b.delta + 1), beta=b.offset(self.p), gamma=self.p ** sum(b.mus),
                g=b.result, stages=(Stage(self.p, b.digits, b.mus),),
            ))
        return MultiPrimeCertificate(self.f, (self.p,), tuple(leaves))


def _reduce_tree(f: UniPoly, p: int, depth: int, cap: int) -> list[ReductionBranch]:
    if depth > cap:
        raise ReductionError(f"reduction depth exceeded {cap} at p={p}")
    out = []
    for k in range(p):
        nu, fk = reduce_once(f, p, k)
        if has_fpd(fk, p):
            for b in _reduce_tree(fk, p, depth + 1, cap):
                out.append(ReductionBranch((k,) + b.digits, (nu + 1,) + b.mus, b.result))
        else:
            out.append(ReductionBranch((k,), (nu + 1,), fk))
    return out


def reduce_full(f: UniPoly, p: int) -> ReductionCertificate:
    """Remove the fpd ``p`` from ``f`` (primitive, nonzero discriminant)."""
    _require_primitive(f)
    if disc_uni(f) == 0:
        raise ReductionError(f"disc({f}) = 0; the reduction need not terminate")
    e = pqr_decompose(f, p).e
    branches = _reduce_tree(f, p, 0, f.degree**2)
    return ReductionCertificate(f, p, e, tuple(branches))


@dataclass(frozen=True)
class Stage:
    """Digits and exponents applied for one prime; empty digits mean pass-through."""

    p: int
    digits: tuple[int, ...]
    mus: tuple[int, ...]


@dataclass(frozen=True)
class Leaf:
    """``gamma * g(x) = f(alpha x + beta)``."""

    alpha: int
    beta: int
    gamma: int
    g: UniPoly
    stages: tuple[Stage, ...] = ()


@dataclass(frozen=True)
class MultiPrimeCertificate:
    f: UniPoly
    primes: tuple[int, ...]
    leaves: tuple[Leaf, ...]

    def to_dict(self) -> dict:
        return {
            "format": CERT_FORMAT,
            "f": self.f.to_list(),
            "primes": list(self.primes),
            "leaves": [
                {
                    "alpha": lf.alpha, "beta": lf.beta, "gamma": lf.gamma, "g": lf.g.to_list(),
                    "stages": [{"p": s.p, "digits": list(s.digits), "mus": list(s.mus)} for s in lf.stages],
                }
                for lf in self.leaves
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "MultiPrimeCertificate":
        if data.get("format") != CERT_FORMAT:
            raise ValueError(f"not a certificate document (format {data.get('format')!r})")
        leaves = tuple(
            Leaf(
                int(lf["alpha"]), int(lf["beta"]), int(lf["gamma"]), UniPoly(lf["g"]),
                tuple(Stage(int(s["p"]), tuple(s["digits"]), tuple(s["mus"])) for s in lf["stages"]),
            )
            for lf in data["leaves"]
        )
        return cls(UniPoly(data["f"]), tuple(data["primes"]), leaves)

    @classmethod
    def from_json(cls, text: str) -> "MultiPrimeCertificate":
        return cls.from_dict(json.loads(text))


def remove_all_fpd(f: UniPoly) -> MultiPrimeCertificate:
    """Compose single-prime reductions over every fpd of ``f`` in increasing order."""
    _require_primitive(f)
    if disc_uni(f) == 0:
        raise ReductionError(f"disc({f}) = 0; the reduction need not terminate")
    primes = fixed_prime_divisors(f)
    leaves = [Leaf(1, 0, 1, f)]
    for p in primes:
        nxt = []
        for lf in leaves:
            if not has_fpd(lf.g, p):
                nxt.append(Leaf(lf.alpha, lf.beta, lf.gamma, lf.g, lf.stages + (Stage(p, (), ()),)))
                continue
            for b in reduce_full(lf.g, p).branches:
                nxt.append(Leaf(
                    alpha=lf.alpha * p ** (b.delta + 1),
                    beta=lf.beta + lf.alpha * b.offset(p),
                    gamma=lf.gamma * p ** sum(b.mus),
                    g=b.result,
                    stages=lf.stages + (Stage(p, b.digits, b.mus),),
                ))
        leaves = nxt
    return MultiPrimeCertificate(f, tuple(primes), tuple(leaves))


# ---------------------------------------------------------------------------
# verification


CHECKS = ("identity", "partition", "fpd_free", "budget", "discriminant")


@dataclass
class VerificationReport:
    failures: dict[str, list[str]] = field(default_factory=lambda: {c: [] for c in CHECKS})
    leaves: int = 0
    fully_fpd_free: bool = True
    max_alpha: int = 1
    max_gamma: int = 1
    coarse_size_ok: bool = True

    def fail(self, check: str, msg: str) -> None:
        self.failures[check].append(msg)

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def check_passed(self, check: str) -> bool:
        return not self.failures[check]

    def as_record(self) -> dict:
        return {
            "passed": self.passed,
            "checks": {c: {"passed": not v, "failures": v} for c, v in self.failures.items()},
            "leaves": self.leaves,
            "fully_fpd_free": self.fully_fpd_free,
            "max_alpha": self.max_alpha,
            "max_gamma": self.max_gamma,
            "coarse_size_bounds_ok": self.coarse_size_ok,
        }


def _divides_all_values(g: UniPoly, q: int) -> bool:
    return all(g.eval_mod(n, q) == 0 for n in range(q))


def _pqr_degree(h: UniPoly, p: int) -> int:
    # h = (x^p - x) q mod p, so deg q = deg(h mod p) - p
    return len(h.mod(p)) - 1 - p


def _replay_stage(cur: UniPoly, stage: Stage, label: str, rep: VerificationReport, d: int) -> UniPoly | None:
    p, digits, mus = stage.p, stage.digits, stage.mus
    if len(digits) != len(mus):
        rep.fail("budget", f"{label}: {len(digits)} digits but {len(mus)} exponents at p={p}")
        return None
    if not digits:
        if _divides_all_values(cur, p):
            rep.fail("fpd_free", f"{label}: passed through p={p} although {p} is still an fpd")
        return cur
    if not _divides_all_values(cur, p):
        rep.fail("budget", f"{label}: reduction at p={p} applied to a polynomial without that fpd")
    delta = len(digits) - 1
    if delta + 1 > max(d - 1, 1):
        rep.fail("budget", f"{label}: delta+1 = {delta + 1} exceeds d-1 = {d - 1} at p={p}")
    if sum(mus) > d * d:
        rep.fail("budget", f"{label}: mu-sum {sum(mus)} exceeds d^2 = {d * d} at p={p}")
    h = cur
    prev_e = None
    for i, (k, mu) in enumerate(zip(digits, mus)):
        if not 0 <= k < p:
            rep.fail("budget", f"{label}: digit {k} outside [0, {p})")
        if mu < 1:
            rep.fail("budget", f"{label}: non-positive exponent {mu}")
        if _divides_all_values(h, p):
            e = _pqr_degree(h, p)
            rest = sum(mus[i:])
            if rest > (e + 1) ** 2:
                rep.fail("budget", f"{label}: level {i} mu-sum {rest} > (e+1)^2 = {(e + 1) ** 2} at p={p}")
            if delta - i > e:
                rep.fail("budget", f"{label}: level {i} depth {delta - i} > e = {e} at p={p}")
            if prev_e is not None and e > prev_e - p + 1:
                rep.fail("budget", f"{label}: e dropped from {prev_e} only to {e} at p={p}")
            prev_e = e
        else:
            rep.fail("budget", f"{label}: level {i} at p={p} has no fpd left to remove")
        shifted = h.compose_affine(p, k)
        c = shifted.content()
        if c % p**mu:
            rep.fail("identity", f"{label}: p^{mu} does not divide f({p}x+{k}) at level {i}")
            return None
        h = shifted.divexact(p**mu)
    if h.content() != 1:
        rep.fail("identity", f"{label}: result after p={p} is not primitive (content {h.content()})")
    if _divides_all_values(h, p):
        rep.fail("fpd_free", f"{label}: p={p} is still an fpd after its stage")
    return h


def verify_certificate(cert: MultiPrimeCertificate) -> VerificationReport:
    """Re-check a certificate using only polynomial arithmetic and enumeration.

    Checks: identity ``gamma g(x) = f(alpha x + beta)``; the progressions
    partition Z; each ``g`` is primitive with no fpd at primes up to the largest
    listed prime; per-level exponent budgets; the discriminant relation
    ``gamma^(2(d-1)) disc(g) = alpha^(d(d-1)) disc(f)``.
    """
    rep = VerificationReport()
    f = cert.f
    d = f.degree
    rep.leaves = len(cert.leaves)
    pmax = max(cert.primes, default=1)
    disc_f = disc_uni(f) if not f.is_zero() else 0

    if list(cert.primes) != sorted(set(cert.primes)):
        rep.fail("partition", f"primes {list(cert.primes)} are not strictly increasing")
    for q in primes_up_to(max(pmax, 1)):
        if q not in cert.primes and f.content() == 1 and _divides_all_values(f, q):
            rep.fail("fpd_free", f"fpd {q} of f is missing from the prime list")

    density = Fraction(0)
    progressions = []
    for idx, lf in enumerate(cert.leaves):
        label = f"leaf {idx}"
        alpha, beta, gamma = 1, 0, 1
        cur = f
        for stage in lf.stages:
            if stage.p not in cert.primes:
                rep.fail("partition", f"{label}: stage prime {stage.p} not in the prime list")
            nxt = _replay_stage(cur, stage, label, rep, d)
            if nxt is None:
                cur = None
                break
            if stage.digits:
                offset = sum(k * stage.p**i for i, k in enumerate(stage.digits))
                beta += alpha * offset
                alpha *= stage.p ** len(stage.digits)
                gamma *= stage.p ** sum(stage.mus)
            cur = nxt
        if [s.p for s in lf.stages] != list(cert.primes):
            rep.fail("partition", f"{label}: stages {[s.p for s in lf.stages]} do not follow the prime list")
        if (alpha, beta, gamma) != (lf.alpha, lf.beta, lf.gamma):
            rep.fail("identity", f"{label}: recorded (alpha, beta, gamma) = {(lf.alpha, lf.beta, lf.gamma)} "
                                 f"but the stages give {(alpha, beta, gamma)}")
        # (i) the defining identity, with the data implied by the stages
        if f.compose_affine(alpha, beta) != lf.g * gamma:
            rep.fail("identity", f"{label}: {gamma}*g(x) != f({alpha}x + {beta})")
        if cur is not None and cur != lf.g:
            rep.fail("identity", f"{label}: replayed polynomial {cur} differs from recorded g = {lf.g}")
        # (ii) progression bookkeeping
        if not 0 <= lf.beta < lf.alpha:
            rep.fail("partition", f"{label}: beta = {lf.beta} outside [0, {lf.alpha})")
        density += Fraction(1, lf.alpha)
        progressions.append((lf.alpha, lf.beta))
        # (iii) primitive, degree kept, no fpd up to the largest listed prime
        g = lf.g
        if g.is_zero() or g.content() != 1:
            rep.fail("fpd_free", f"{label}: g = {g} is not primitive")
        if g.degree != d:
            rep.fail("fpd_free", f"{label}: degree changed from {d} to {g.degree}")
        for q in primes_up_to(pmax):
            if _divides_all_values(g, q):
                rep.fail("fpd_free", f"{label}: g still has fpd {q}")
        if any(_divides_all_values(g, q) for q in primes_up_to(max(g.degree, 1))):
            rep.fully_fpd_free = False
        # (v) discriminant relation
        if not g.is_zero() and g.degree == d:
            lhs = lf.gamma ** (2 * (d - 1)) * disc_uni(g)
            rhs = lf.alpha ** (d * (d - 1)) * disc_f
            if lhs != rhs:
                rep.fail("discriminant", f"{label}: gamma^(2(d-1)) disc(g) = {lhs} != {rhs}")
        rep.max_alpha = max(rep.max_alpha, lf.alpha)
        rep.max_gamma = max(rep.max_gamma, lf.gamma)

    if density != 1:
        rep.fail("partition", f"sum of 1/alpha is {density}, not 1")
    for i in range(len(progressions)):
        a1, b1 = progressions[i]
        for j in range(i + 1, len(progressions)):
            a2, b2 = progressions[j]
            if (b1 - b2) % math.gcd(a1, a2) == 0:
                rep.fail("partition", f"leaves {i} and {j} overlap: {a1}Z+{b1} and {a2}Z+{b2}")
    if d >= 2:
        rep.coarse_size_ok = rep.max_alpha <= d ** (d * d) and rep.max_gamma <= d ** (d**3)
    return rep


def trivial_certificate(f: UniPoly) -> MultiPrimeCertificate:
    return MultiPrimeCertificate(f, (), (Leaf(1, 0, 1, f),))


def branch_sets(cert: MultiPrimeCertificate, p: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """``(digits, mus)`` of every stage at ``p``, in leaf order."""
    out = []
    for lf in cert.leaves:
        for s in lf.stages:
            if s.p == p:
                out.append((s.digits, s.mus))
    return out


def leaves_of(branches: Sequence[ReductionBranch]) -> list[tuple[int, ...]]:
    return [b.digits for b in branches]
