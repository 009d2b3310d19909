"""Polynomials over F_p as ascending coefficient lists without trailing zeros."""


def fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def fp_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 1)
    for shift in range(len(a) - 1 - db, -1, -1):
        t = a[shift + db] * inv % p
        q[shift] = t
        if t:
            for i, c in enumerate(b):
                a[i + shift] = (a[i + shift] - t * c) % p
    return fp_trim(q), fp_trim(a[:db] if db else [])


def fp_mulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    out = fp_trim([c % p for c in out])
    if len(out) >= len(f):
        out = fp_divmod(out, f, p)[1]
    return out


def fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def fp_x_pow_mod(e: int, f: list[int], p: int) -> list[int]:
    result = [1] if len(f) > 1 else []
    base = fp_divmod([0, 1], f, p)[1] if len(f) <= 2 else [0, 1]
    while e:
        if e & 1:
            result = fp_mulmod(result, base, f, p)
        base = fp_mulmod(base, base, f, p)
        e >>= 1
    return result


def fp_eval(a: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def fp_root_gcd(f: list[int], p: int) -> list[int]:
    """Monic ``gcd(f, x^p - x)``: the product of ``x - a`` over the roots ``a`` of ``f``."""
    xp = fp_x_pow_mod(p, f, p)
    # x^p - x mod f
    diff = list(xp) + [0] * max(0, 2 - len(xp))
    diff[1] = (diff[1] - 1) % p
    return fp_gcd(list(f), fp_trim(diff), p)
