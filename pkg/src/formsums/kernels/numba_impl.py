"""Compiled kernels (numba).  Same contracts as :mod:`.numpy_impl`."""

import math

import numpy as np
from numba import njit

from ._common import MR_BASES, SMALL_PRIMES

_LO_MASK = (1 << 21) - 1


@njit(cache=True, nogil=True)
def _mulmod(a, b, m):
    t = (a * (b >> 21)) % m
    t = (t << 21) % m
    return (t + (a * (b & _LO_MASK)) % m) % m


@njit(cache=True, nogil=True)
def _powmod(b, e, m):
    r = 1 % m
    b = b % m
    while e > 0:
        if e & 1:
            r = _mulmod(r, b, m)
        b = _mulmod(b, b, m)
        e >>= 1
    return r


@njit(cache=True, nogil=True)
def _is_prime(n, bases):
    if n < 2:
        return False
    for a in bases:
        if n == a:
            return True
        if n % a == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        x = _powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        composite = True
        for _ in range(s - 1):
            x = _mulmod(x, x, n)
            if x == n - 1:
                composite = False
                break
        if composite:
            return False
    return True


@njit(cache=True, nogil=True)
def _is_square(n):
    r = np.int64(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r * r == n


@njit(cache=True, nogil=True)
def _mult_value(n, table, primes, bases):
    h = np.int64(1)
    m = n
    for p in primes:
        if p * p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            h *= table[e]
    # every prime factor left exceeds the cube root: m is 1, q, q^2 or q*r
    if m == 1:
        return h
    if _is_prime(m, bases):
        return h * table[1]
    if _is_square(m):
        return h * table[2]
    return h * table[1] * table[1]


@njit(cache=True, nogil=True)
def _mult_values(values, table, primes, bases):
    out = np.empty(values.shape[0], dtype=np.int64)
    for i in range(values.shape[0]):
        out[i] = _mult_value(values[i], table, primes, bases)
    return out


def mult_values(values, table):
    """``h(n)`` for each positive ``n < 2**42``; ``table[e] = h(p^e)``."""
    return _mult_values(np.ascontiguousarray(values, dtype=np.int64), table, SMALL_PRIMES, MR_BASES)


@njit(cache=True, nogil=True)
def _count_roots_mod(coeffs, m):
    count = 0
    top = coeffs.shape[0] - 1
    for x in range(m):
        acc = 0
        for k in range(top, -1, -1):
            acc = (acc * x + coeffs[k]) % m
        if acc == 0:
            count += 1
    return count


def count_roots_mod(coeffs, m):
    """Number of ``x`` in ``[0, m)`` with ``f(x) = 0 mod m`` (coefficients ascending)."""
    c = np.asarray([int(a) % m for a in coeffs] or [0], dtype=np.int64)
    return int(_count_roots_mod(c, np.int64(m)))


@njit(cache=True, nogil=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, nogil=True)
def _count_form_pairs(coeffs, m):
    d = coeffs.shape[0] - 1
    p1 = np.empty(d + 1, dtype=np.int64)
    p2 = np.empty(d + 1, dtype=np.int64)
    count = 0
    for n1 in range(1, m + 1):
        p1[0] = 1 % m
        for k in range(1, d + 1):
            p1[k] = (p1[k - 1] * n1) % m
        g1 = _gcd(n1, m)
        for n2 in range(1, m + 1):
            if _gcd(g1, n2) != 1:
                continue
            p2[0] = 1 % m
            for k in range(1, d + 1):
                p2[k] = (p2[k - 1] * n2) % m
            acc = 0
            for j in range(d + 1):
                acc = (acc + coeffs[j] * ((p1[d - j] * p2[j]) % m)) % m
            if acc == 0:
                count += 1
    return count


def count_form_pairs_mod(coeffs, m):
    """Pairs ``(n1, n2)`` in ``(0, m]^2`` with ``gcd(n1, n2, m) = 1`` and ``F = 0 mod m``."""
    c = np.asarray([int(a) % m for a in coeffs], dtype=np.int64)
    return int(_count_form_pairs(c, np.int64(m)))
