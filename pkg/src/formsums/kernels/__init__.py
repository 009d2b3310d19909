"""Hot loops with two interchangeable backends.

The numba backend is used by default.  Setting ``FORMSUMS_DISABLE_NUMBA=1``
(or running without numba installed) selects the pure-numpy backend.
Both implement ``mult_values``, ``count_roots_mod`` and ``count_form_pairs_mod``.
"""

import os
from contextlib import contextmanager

from . import numpy_impl
from ._common import MODULUS_LIMIT, VALUE_LIMIT

try:
    from . import numba_impl
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_impl = None

BACKENDS = {"numpy": numpy_impl}
if numba_impl is not None:
    BACKENDS["numba"] = numba_impl


def _default_backend() -> str:
    flag = os.environ.get("FORMSUMS_DISABLE_NUMBA", "").strip().lower()
    if flag not in ("", "0", "false", "no") or numba_impl is None:
        return "numpy"
    return "numba"


_active = _default_backend()


def backend_name() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; available: {sorted(BACKENDS)}")
    _active = name


@contextmanager
def use_backend(name: str):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def mult_values(values, table):
    return BACKENDS[_active].mult_values(values, table)


def count_roots_mod(coeffs, m):
    return BACKENDS[_active].count_roots_mod(coeffs, m)


def count_form_pairs_mod(coeffs, m):
    return BACKENDS[_active].count_form_pairs_mod(coeffs, m)


__all__ = [
    "BACKENDS", "MODULUS_LIMIT", "VALUE_LIMIT", "backend_name", "set_backend", "use_backend",
    "mult_values", "count_roots_mod", "count_form_pairs_mod",
]
