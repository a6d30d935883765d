"""Finite binary strings over {0,1}, including the empty string.

Strings are plain ``str`` values of '0'/'1' characters; '' is the root.
The two orders used throughout:

* lexicographic: ordinary string comparison ('0' < '1', prefix first);
* length-lexicographic: shorter strings first, lexicographic within a
  length.  All deterministic searches scan in length-lex order.
"""

from __future__ import annotations

from typing import Iterator

# Resolution cap for the whole package.  Operations reject deeper input
# instead of silently truncating.
MAX_DEPTH = 24

_BITS = frozenset("01")


def is_bits(s: str) -> bool:
    return isinstance(s, str) and set(s) <= _BITS


def check_bits(s: str) -> str:
    if not is_bits(s):
        raise ValueError(f"not a binary string: {s!r}")
    return s


def lenlex_key(s: str) -> tuple[int, str]:
    return (len(s), s)


def is_prefix(p: str, s: str) -> bool:
    return s.startswith(p)


def comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def lcp(a: str, b: str) -> str:
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return a[:i]
    return a[:n]


def index_of(s: str) -> int:
    """MSB-first integer encoding; 0 for the empty string."""
    return int(s, 2) if s else 0


def string_of(index: int, length: int) -> str:
    if length == 0:
        return ""
    return format(index, f"0{length}b")


def strings_of_length(n: int) -> Iterator[str]:
    """All length-n strings in lexicographic (= index) order."""
    for i in range(1 << n):
        yield string_of(i, n)


def iter_lenlex(max_length: int) -> Iterator[str]:
    """All strings of length <= max_length in length-lex order."""
    for n in range(max_length + 1):
        yield from strings_of_length(n)


def lenlex_range(start: str, max_length: int) -> Iterator[str]:
    """Extensions of ``start`` (including itself) in length-lex order."""
    for extra in range(max_length - len(start) + 1):
        for i in range(1 << extra):
            yield start + string_of(i, extra)
