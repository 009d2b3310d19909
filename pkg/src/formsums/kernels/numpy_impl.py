"""Vectorized numpy kernels, used when numba is disabled or unavailable."""

import numpy as np

from ._common import MR_BASES, SMALL_PRIMES

_LO_MASK = (1 << 21) - 1
_CHUNK = 1 << 18


def _mulmod(a, b, m):
    t = (a * (b >> 21)) % m
    t = (t << 21) % m
    return (t + (a * (b & _LO_MASK)) % m) % m


def _powmod(base, e, m):
    r = np.ones_like(m) % m
    b = base % m
    e = e.copy()
    while np.any(e):
        odd = (e & 1).astype(bool)
        r = np.where(odd, _mulmod(r, b, m), r)
        b = _mulmod(b, b, m)
        e >>= 1
    return r


def _is_prime(n):
    n = np.asarray(n, dtype=np.int64)
    out = n >= 2
    undecided = out.copy()
    for a in MR_BASES:
        eq = undecided & (n == a)
        out[eq] = True
        undecided &= ~eq
        div = undecided & (n % a == 0)
        out[div] = False
        undecided &= ~div
    idx = np.nonzero(undecided)[0]
    if idx.size == 0:
        return out
    m = n[idx]
    d = m - 1
    s = np.zeros_like(m)
    while True:
        even = d % 2 == 0
        if not even.any():
            break
        d[even] //= 2
        s[even] += 1
    alive = np.ones(idx.size, dtype=bool)
    for a in MR_BASES:
        x = _powmod(np.full_like(m, a), d, m)
        ok = (x == 1) | (x == m - 1)
        for r in range(1, int(s.max(initial=0))):
            x = _mulmod(x, x, m)
            ok |= (r < s) & (x == m - 1)
        alive &= ok
    out[idx] = alive
    return out


def _is_square(n):
    r = np.sqrt(n.astype(np.float64)).astype(np.int64)
    r -= r * r > n
    r += (r + 1) * (r + 1) <= n
    return r * r == n


def mult_values(values, table):
    """``h(n)`` for each positive ``n < 2**42``; ``table[e] = h(p^e)``."""
    m = np.array(values, dtype=np.int64, copy=True)
    h = np.ones_like(m)
    active = np.arange(m.size)
    for p in SMALL_PRIMES:
        active = active[m[active] >= p * p * p]
        if active.size == 0:
            break
        sub = m[active]
        hit = sub % p == 0
        if not hit.any():
            continue
        idx = active[hit]
        mm = m[idx]
        e = np.zeros_like(mm)
        while True:
            d = mm % p == 0
            if not d.any():
                break
            mm[d] //= p
            e[d] += 1
        m[idx] = mm
        h[idx] *= table[e]
    rest = np.nonzero(m > 1)[0]
    if rest.size:
        c = m[rest]
        prime = _is_prime(c)
        square = ~prime & _is_square(c)
        factor = np.where(prime, table[1], np.where(square, table[2], table[1] * table[1]))
        h[rest] *= factor
    return h


def count_roots_mod(coeffs, m):
    """Number of ``x`` in ``[0, m)`` with ``f(x) = 0 mod m`` (coefficients ascending)."""
    c = [int(a) % m for a in coeffs]
    count = 0
    for start in range(0, m, _CHUNK):
        x = np.arange(start, min(start + _CHUNK, m), dtype=np.int64)
        acc = np.zeros_like(x)
        for a in reversed(c):
            acc = (acc * x + a) % m
        count += int(np.count_nonzero(acc == 0))
    return count


def count_form_pairs_mod(coeffs, m):
    """Pairs ``(n1, n2)`` in ``(0, m]^2`` with ``gcd(n1, n2, m) = 1`` and ``F = 0 mod m``."""
    c = [int(a) % m for a in coeffs]
    d = len(c) - 1
    n = np.arange(1, m + 1, dtype=np.int64)
    n1 = n[:, None]
    n2 = n[None, :]
    pw1 = [np.ones_like(n1) % m]
    pw2 = [np.ones_like(n2) % m]
    for _ in range(d):
        pw1.append(pw1[-1] * n1 % m)
        pw2.append(pw2[-1] * n2 % m)
    acc = np.zeros((m, m), dtype=np.int64)
    for j, a in enumerate(c):
        if a:
            acc = (acc + a * (pw1[d - j] * pw2[j] % m)) % m
    coprime = np.gcd(np.gcd(n1, n2), m) == 1
    return int(np.count_nonzero((acc == 0) & coprime))
