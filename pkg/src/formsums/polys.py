"""Integer polynomials, binary forms and their discriminants.

A :class:`UniPoly` stores coefficients in ascending powers; a :class:`BinaryForm`
of degree ``d`` stores ``a_j``, the coefficient of ``x1^(d-j) * x2^j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .arith import psi


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = [int(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _conv(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


@dataclass(frozen=True)
class UniPoly:
    """Univariate integer polynomial, ``coeffs[i]`` multiplies ``x**i``."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def parse(cls, text: str) -> "UniPoly":
        """Parse ``"c_0 c_1 ... c_e"`` (ascending; commas allowed)."""
        parts = text.replace(",", " ").split()
        if not parts:
            raise ValueError("empty polynomial literal")
        return cls(int(p) for p in parts)

    @classmethod
    def x(cls) -> "UniPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mod(self, x: int, m: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % m
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return UniPoly(c * other for c in self.coeffs)
        return UniPoly(_conv(self.coeffs, _as_poly(other).coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UniPoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def divexact(self, c: int) -> "UniPoly":
        """Divide every coefficient by ``c``; raises unless exact."""
        if c == 0:
            raise ZeroDivisionError("division of a polynomial by 0")
        if any(x % c for x in self.coeffs):
            raise ValueError(f"{self} is not divisible by {c}")
        return UniPoly(x // c for x in self.coeffs)

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def shift_x(self, k: int) -> "UniPoly":
        """Multiply by ``x**k``."""
        if self.is_zero():
            return self
        return UniPoly((0,) * k + self.coeffs)

    def compose_affine(self, a: int, b: int) -> "UniPoly":
        """Return ``f(a*x + b)``."""
        out = [0]
        lin = [b, a]
        for c in reversed(self.coeffs):
            out = _conv(out, lin)
            out[0] += c
        return UniPoly(out)

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def is_primitive(self) -> bool:
        return self.content() == 1

    def mod(self, m: int) -> tuple[int, ...]:
        """Coefficients reduced into ``[0, m)``, trailing zeros dropped."""
        return _trim(c % m for c in self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}{'*' if mono else ''}{mono}"
            terms.append(("-" if c < 0 else "+", s))
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {sg} {t}" for sg, t in terms[1:])

    def to_list(self) -> list[int]:
        return list(self.coeffs)


def _as_poly(v) -> UniPoly:
    if isinstance(v, UniPoly):
        return v
    if isinstance(v, int):
        return UniPoly((v,))
    raise TypeError(f"cannot treat {type(v).__name__} as a polynomial")


def content_and_primitive(f: UniPoly) -> tuple[int, UniPoly]:
    """Split ``f`` as ``content * primitive`` with positive content."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no content")
    c = f.content()
    return c, f.divexact(c)


# ---------------------------------------------------------------------------
# resultants and discriminants


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * piv - aik * row_k[j]) // prev
        prev = piv
    return sign * a[n - 1][n - 1]


def sylvester_matrix(f: Sequence[int], g: Sequence[int]) -> list[list[int]]:
    """Sylvester matrix of two ascending coefficient lists (formal degrees len-1)."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    fd, gd = list(reversed(f)), list(reversed(g))
    rows = []
    for i in range(n):
        rows.append([0] * i + fd + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gd + [0] * (size - n - 1 - i))
    return rows


def resultant(f: UniPoly, g: UniPoly) -> int:
    if f.is_zero() or g.is_zero():
        return 0
    if f.degree == 0 and g.degree == 0:
        return 1
    return bareiss_det(sylvester_matrix(f.coeffs, g.coeffs))


def disc_uni(f: UniPoly, as_degree: int | None = None) -> int:
    """Discriminant of ``f`` regarded as a polynomial of formal degree ``as_degree``.

    For ``as_degree == deg f`` this is ``(-1)^(d(d-1)/2) Res(f, f') / lc(f)``.
    A formal degree one above the true degree adds a root at infinity and
    multiplies by ``lc(f)^2``; two or more above gives a repeated root, so 0.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has no discriminant")
    d = f.degree
    n = d if as_degree is None else as_degree
    if n < d:
        raise ValueError(f"formal degree {n} is below the degree {d} of {f}")
    if n == 0:
        return 1
    if n > d:
        if n > d + 1:
            return 0
        if n == 1:
            return 1
        return f.lc**2 * disc_uni(f)
    if d == 1:
        return 1
    res = resultant(f, f.derivative())
    q, r = divmod(res, f.lc)
    assert r == 0
    return -q if (d * (d - 1) // 2) % 2 else q


def poly_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    """Primitive gcd over Q (positive leading coefficient)."""
    a, b = f, g
    if a.is_zero():
        a, b = b, a
    if a.is_zero():
        return a
    a = content_and_primitive(a)[1]
    while not b.is_zero():
        b = content_and_primitive(b)[1]
        a, b = b, _pseudo_rem(a, b)
    a = content_and_primitive(a)[1]
    return -a if a.lc < 0 else a


def poly_quotient(a: UniPoly, b: UniPoly) -> UniPoly:
    """Primitive part of ``a / b`` over Q; ``b`` must divide ``a``."""
    r = [Fraction(c) for c in a.coeffs]
    q = [Fraction(0)] * max(len(r) - len(b.coeffs) + 1, 1)
    for shift in range(len(r) - len(b.coeffs), -1, -1):
        t = r[shift + b.degree] / b.lc
        q[shift] = t
        for i, c in enumerate(b.coeffs):
            r[i + shift] -= t * c
    if any(r):
        raise ValueError(f"{b} does not divide {a}")
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in q), 1)
    return content_and_primitive(UniPoly(int(c * den) for c in q))[1]


def _pseudo_rem(a: UniPoly, b: UniPoly) -> UniPoly:
    r = list(a.coeffs)
    db, lb = b.degree, b.lc
    while len(r) - 1 >= db and any(r):
        shift = len(r) - 1 - db
        lead = r[-1]
        r = [c * lb for c in r]
        for i, c in enumerate(b.coeffs):
            r[i + shift] -= lead * c
        r = list(_trim(r))
    return UniPoly(r)


# ---------------------------------------------------------------------------
# binary forms


@dataclass(frozen=True)
class BinaryForm:
    """``F(x1, x2) = sum_j a_j x1^(d-j) x2^j`` with ``coeffs = (a_0, ..., a_d)``."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        c = tuple(int(x) for x in coeffs)
        if not c:
            raise ValueError("a binary form needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def parse(cls, text: str) -> "BinaryForm":
        """Parse ``"d; a_0 a_1 ... a_d"``."""
        if ";" not in text:
            raise ValueError(f"form literal {text!r} must look like 'd; a_0 ... a_d'")
        head, tail = text.split(";", 1)
        d = int(head)
        coeffs = [int(x) for x in tail.replace(",", " ").split()]
        if len(coeffs) != d + 1:
            raise ValueError(f"degree {d} form needs {d + 1} coefficients, got {len(coeffs)}")
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, x1, x2):
        d = self.degree
        return sum(a * x1 ** (d - j) * x2**j for j, a in enumerate(self.coeffs))

    @property
    def norm(self) -> int:
        """Maximum absolute coefficient."""
        return max(abs(a) for a in self.coeffs)

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def is_primitive(self) -> bool:
        return self.content() == 1

    def dehomogenize(self) -> UniPoly:
        """``F(x, 1)`` as a univariate polynomial."""
        return UniPoly(reversed(self.coeffs))

    def specialize_first(self, x1: int) -> UniPoly:
        """``F(x1, y)`` as a polynomial in ``y``."""
        d = self.degree
        return UniPoly(a * x1 ** (d - j) for j, a in enumerate(self.coeffs))

    def swap(self) -> "BinaryForm":
        """``F(x2, x1)``."""
        return BinaryForm(reversed(self.coeffs))

    def __str__(self) -> str:
        d = self.degree
        terms = []
        for j, a in enumerate(self.coeffs):
            if a == 0:
                continue
            parts = []
            for var, e in (("x1", d - j), ("x2", j)):
                if e == 1:
                    parts.append(var)
                elif e > 1:
                    parts.append(f"{var}^{e}")
            mono = "*".join(parts)
            if mono and abs(a) == 1:
                s = mono
            else:
                s = f"{abs(a)}{'*' if mono else ''}{mono}"
            terms.append(("-" if a < 0 else "+", s))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {sg} {t}" for sg, t in terms[1:])

    def literal(self) -> str:
        return f"{self.degree}; " + " ".join(str(a) for a in self.coeffs)


def gl2_act(F: BinaryForm, M: Sequence[Sequence[int]]) -> BinaryForm:
    """Coefficients of ``F(M x)``, i.e. ``x1 -> m11 x1 + m12 x2``, ``x2 -> m21 x1 + m22 x2``."""
    (m11, m12), (m21, m22) = M
    if m11 * m22 - m12 * m21 == 0:
        raise ValueError(f"singular matrix {M}")
    d = F.degree
    # degree-k forms as lists indexed by the power of x2
    l1, l2 = [m11, m12], [m21, m22]
    pow1 = [[1]]
    pow2 = [[1]]
    for _ in range(d):
        pow1.append(_conv(pow1[-1], l1))
        pow2.append(_conv(pow2[-1], l2))
    out = [0] * (d + 1)
    for j, a in enumerate(F.coeffs):
        if a:
            for i, c in enumerate(_conv(pow1[d - j], pow2[j])):
                out[i] += a * c
    return BinaryForm(out)


def _shift_for_disc(F: BinaryForm) -> int:
    t = 0
    while F(1, t) == 0:
        t += 1
    return t


def disc_form(F: BinaryForm, shift: int | None = None) -> int:
    """Discriminant of a binary form.

    Substitutes ``x2 -> x2 + t*x1`` with the least ``t >= 0`` making ``F(1, t)``
    nonzero (or the given ``shift``, which must also satisfy that), then takes
    the discriminant of the degree-``d`` dehomogenization.
    """
    if F.is_zero():
        raise ValueError("the zero form has no discriminant")
    t = _shift_for_disc(F) if shift is None else shift
    if F(1, t) == 0:
        raise ValueError(f"shift {t} leaves a root at infinity")
    G = gl2_act(F, ((1, 0), (t, 1))) if t else F
    return disc_uni(G.dehomogenize(), F.degree)


@dataclass(frozen=True)
class ShapeDecomposition:
    """``F = x1^d1 * x2^d2 * G`` with ``G(1,0) G(0,1) != 0``."""

    form: BinaryForm
    d1: int
    d2: int
    G: BinaryForm

    @property
    def d(self) -> int:
        return self.form.degree

    @property
    def d_prime(self) -> int:
        return self.d - self.d2

    @property
    def d_doubleprime(self) -> int:
        return self.d - self.d1 - self.d2


class RepeatedFactorError(ValueError):
    """Raised for a form with vanishing discriminant."""

    def __init__(self, form: BinaryForm, witness: str):
        self.form = form
        self.witness = witness
        super().__init__(f"disc({form}) = 0: repeated factor {witness}")


def _homogenize_str(g: UniPoly) -> str:
    k = g.degree
    return str(BinaryForm(reversed(g.coeffs))) if k >= 0 else "0"


def repeated_factor_witness(F: BinaryForm) -> str:
    a = F.coeffs
    if len(a) >= 2 and a[0] == 0 and a[1] == 0:
        return "x2^2"
    f = F.dehomogenize()
    g = poly_gcd(f, f.derivative())
    if g.degree <= 0:
        return "none"
    radical = poly_quotient(g, poly_gcd(g, g.derivative())) if g.degree > 1 else g
    return f"({_homogenize_str(radical)})^2"


def shape_decompose(F: BinaryForm) -> ShapeDecomposition:
    """Split off the factors ``x1`` and ``x2``; requires ``disc(F) != 0``."""
    if F.is_zero():
        raise ValueError("the zero form has no shape decomposition")
    if disc_form(F) == 0:
        raise RepeatedFactorError(F, repeated_factor_witness(F))
    c = list(F.coeffs)
    d2 = 1 if c[0] == 0 else 0
    d1 = 1 if c[-1] == 0 else 0
    if d2:
        c = c[1:]
    if d1:
        c = c[:-1]
    G = BinaryForm(c)
    assert G.coeffs[0] != 0 and G.coeffs[-1] != 0
    return ShapeDecomposition(F, d1, d2, G)


def delta_F(F: BinaryForm) -> Fraction:
    """``psi(|disc F|)``."""
    D = disc_form(F)
    if D == 0:
        raise RepeatedFactorError(F, repeated_factor_witness(F))
    return psi(abs(D))


def q_value(G: BinaryForm, m: int) -> int:
    """``gcd(a_0, a_1 m, ..., a_k m^k)`` for ``G = sum a_j x1^(k-j) x2^j``."""
    return reduce(math.gcd, (a * m**j for j, a in enumerate(G.coeffs)), 0)


def specialize(S: ShapeDecomposition, n2: int) -> tuple[UniPoly, int]:
    """Return ``(f, q)`` with ``q * f(x) = x^d1 * G(x, n2)`` and ``f`` primitive."""
    if n2 < 1:
        raise ValueError(f"n2 must be >= 1, got {n2}")
    if not S.G.is_primitive():
        raise ValueError(f"G = {S.G} is not primitive")
    k = S.G.degree
    g = UniPoly(a * n2**j for j, a in reversed(list(enumerate(S.G.coeffs)))).shift_x(S.d1)
    # ascending coefficient of x^(k-j) is a_j n2^j
    assert g.degree == S.d_prime and len(S.G.coeffs) == k + 1
    q = q_value(S.G, n2)
    return g.divexact(q), q
