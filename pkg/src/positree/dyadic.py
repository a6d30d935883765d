"""Exact dyadic rationals: integers divided by powers of two.

Every measure, threshold and margin in this package is a dyadic rational,
so all arithmetic here is exact integer arithmetic; nothing is ever
rounded.  The canonical form keeps the numerator odd (or zero) whenever
the exponent is positive, making equality structural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

_FORMAT = re.compile(r"^(-?\d+)(?:/2\^(\d+))?$")


@total_ordering
@dataclass(frozen=True)
class Dyadic:
    """Value ``num / 2**exp`` with ``exp >= 0``, normalized on construction."""

    num: int
    exp: int = 0

    def __post_init__(self) -> None:
        if self.exp < 0:
            raise ValueError("exponent must be non-negative")
        num, exp = self.num, self.exp
        if num == 0:
            exp = 0
        elif exp > 0:
            trailing = (num & -num).bit_length() - 1
            shift = min(trailing, exp)
            num >>= shift
            exp -= shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @staticmethod
    def _coerce(value: "Dyadic | int") -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return Dyadic(value)
        return NotImplemented

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``p`` or ``p/2^q``."""
        m = _FORMAT.match(text.strip())
        if not m:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(m.group(1)), int(m.group(2) or 0))

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/2^{self.exp}"

    def __repr__(self) -> str:
        return f"Dyadic({self.num}, {self.exp})"

    def __bool__(self) -> bool:
        return self.num != 0

    def __add__(self, other: "Dyadic | int") -> "Dyadic":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = max(self.exp, other.exp)
        return Dyadic((self.num << (e - self.exp)) + (other.num << (e - other.exp)), e)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.num, self.exp)

    def __sub__(self, other: "Dyadic | int") -> "Dyadic":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: "Dyadic | int") -> "Dyadic":
        return (-self) + other

    def __mul__(self, other: "Dyadic | int") -> "Dyadic":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __lt__(self, other: "Dyadic | int") -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = max(self.exp, other.exp)
        return (self.num << (e - self.exp)) < (other.num << (e - other.exp))

    def __hash__(self) -> int:
        return hash((self.num, self.exp))

    def shift_down(self, k: int) -> "Dyadic":
        """Exact multiplication by ``2**-k`` (``k >= 0``)."""
        if k < 0:
            raise ValueError("shift must be non-negative")
        return Dyadic(self.num, self.exp + k)

    @property
    def is_positive(self) -> bool:
        return self.num > 0


ZERO = Dyadic(0)
ONE = Dyadic(1)


def half_power(k: int) -> Dyadic:
    """The cylinder measure ``2**-k``."""
    return Dyadic(1, k)
