import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from formsums import kernels
from formsums.arith import eval_mult, from_rule, primes_up_to, tau, two_pow_omega

BACKENDS = sorted(kernels.BACKENDS)


def hard_values():
    """Values that stress the cofactor classification below 2^42."""
    big = [2097143, 2097133, 2097131, 1048573, 16411, 16417, 16421]
    vals = [1, 2, 3, 4, 16411 * 16411, 16417 * 16417, 16417**2 * 3, 2**41, 3**26, 2097143 * 2097133,
            16417 * 16421 * 16433, 4398046511093, 4398046511104 - 1, 1048573 * 4194301, 2 * 16417 * 16421 * 3]
    vals += [p * q for p in big for q in big if p * q < 2**42]
    return np.array([v for v in vals if 0 < v < 2**42], dtype=np.int64)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("h", [tau, two_pow_omega, from_rule("cube", "l**3 + 1")])
def test_mult_values_match_eval_mult(backend, h):
    rng = np.random.default_rng(5)
    values = np.concatenate([rng.integers(1, 2**42, size=400, dtype=np.int64), hard_values(),
                             np.arange(1, 300, dtype=np.int64)])
    with kernels.use_backend(backend):
        got = kernels.mult_values(values, h.exponent_table())
    assert [int(x) for x in got] == [int(eval_mult(h, int(v))) for v in values]


@given(st.lists(st.integers(1, 2**42 - 1), min_size=1, max_size=30))
def test_backends_agree(values):
    arr = np.array(values, dtype=np.int64)
    outs = []
    for b in BACKENDS:
        with kernels.use_backend(b):
            outs.append(kernels.mult_values(arr, tau.exponent_table()).tolist())
    assert all(o == outs[0] for o in outs)


@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=6), st.integers(1, 3000))
def test_count_roots_agree(coeffs, m):
    ref = sum(1 for x in range(m) if sum(c * x**i for i, c in enumerate(coeffs)) % m == 0)
    for b in BACKENDS:
        with kernels.use_backend(b):
            assert kernels.count_roots_mod(coeffs, m) == ref


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5), st.integers(1, 60))
def test_count_form_pairs_agree(coeffs, m):
    import math

    d = len(coeffs) - 1
    ref = sum(1 for a in range(1, m + 1) for b in range(1, m + 1)
              if math.gcd(math.gcd(a, b), m) == 1
              and sum(c * a ** (d - j) * b**j for j, c in enumerate(coeffs)) % m == 0)
    for b in BACKENDS:
        with kernels.use_backend(b):
            assert kernels.count_form_pairs_mod(coeffs, m) == ref


def test_large_modulus_roots():
    # x^2 + 1 splits modulo a prime 1 mod 4 and is irreducible modulo a prime 3 mod 4
    for b in BACKENDS:
        with kernels.use_backend(b):
            assert kernels.count_roots_mod([1, 0, 1], 1000033) == 2
            assert kernels.count_roots_mod([1, 0, 1], 1000003) == 0


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_use_backend_restores():
    before = kernels.backend_name()
    with kernels.use_backend("numpy"):
        assert kernels.backend_name() == "numpy"
    assert kernels.backend_name() == before


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", "numba"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, FORMSUMS_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from formsums import kernels; print(kernels.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected


def test_small_primes_table_covers_cube_root():
    from formsums.kernels._common import SMALL_PRIMES, VALUE_LIMIT

    assert SMALL_PRIMES[-1] ** 3 >= VALUE_LIMIT
    assert list(SMALL_PRIMES) == primes_up_to(int(SMALL_PRIMES[-1]))
