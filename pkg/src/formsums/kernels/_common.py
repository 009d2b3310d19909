import numpy as np

# Values handed to the multiplicative-function kernels must stay below this
# bound: modular products are split into 21-bit halves that fit in int64.
VALUE_LIMIT = 1 << 42

# Trial division runs while p^3 <= cofactor; 16411^3 > 2^42, so these suffice.
_TRIAL_LIMIT = 16411


def _small_primes(n):
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if mark[i]:
            mark[i * i :: i] = False
    return np.nonzero(mark)[0].astype(np.int64)


SMALL_PRIMES = _small_primes(_TRIAL_LIMIT)
MR_BASES = np.array([2, 3, 5, 7, 11, 13, 17], dtype=np.int64)

# Largest modulus whose residue products fit in int64.
MODULUS_LIMIT = 3_000_000_000
