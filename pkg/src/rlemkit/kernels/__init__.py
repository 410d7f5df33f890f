"""Kernel selection: compiled Cython core when available, pure Python otherwise.

``backend_name()`` reports which one is active.  RLEMKIT_PURE=1 in the
environment forces the fallback (used by the benchmark for comparison).
The compiled ranking kernels work on permutations of up to 20 items (int64
limit); larger tables transparently drop to the pure path.
"""

import os

from . import pure as _pure

if os.environ.get("RLEMKIT_PURE"):
    _impl = _pure
else:
    try:
        from . import _speed as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

_COMPILED_MAX = 20


def backend_name():
    return "compiled" if _impl is not _pure else "pure"


def rank_permutation(entries):
    if len(entries) > _COMPILED_MAX:
        return _pure.rank_permutation(entries)
    return _impl.rank_permutation(entries)


def unrank_permutation(n, serial):
    if n > _COMPILED_MAX:
        return _pure.unrank_permutation(n, serial)
    return _impl.unrank_permutation(n, serial)


def apply_renaming(entries, k, swap, in_perm, out_perm):
    return _impl.apply_renaming(entries, k, swap, in_perm, out_perm)


def orbit_serials(entries, k):
    if 2 * k > _COMPILED_MAX:
        return _pure.orbit_serials(entries, k)
    return _impl.orbit_serials(entries, k)


def run_token(packed, states, u, max_steps):
    return _impl.run_token(packed, states, u, max_steps)


def run_token_back(packed, states, v, max_steps):
    return _impl.run_token_back(packed, states, v, max_steps)


def solve_search(target_k, target_entries, parts, cap, max_steps):
    pmax = max(pk for pk, _ in parts)
    # the compiled solver uses fixed-size buffers; outlandish calls go pure
    if (_impl is _pure or cap > 12 or max_steps > 50000
            or target_k > 8 or pmax > 8 or len(parts) > 8):
        return _pure.solve_search(target_k, target_entries, parts, cap,
                                  max_steps)
    return _impl.solve_search(target_k, target_entries, parts, cap, max_steps)
