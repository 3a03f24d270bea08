"""Exact arithmetic in the ring Z[sqrt 2]."""

from __future__ import annotations

import math

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1


def _checked(x: int) -> int:
    if not _INT64_MIN <= x <= _INT64_MAX:
        raise OverflowError(f"Z[sqrt2] coefficient {x} exceeds 64-bit range")
    return x


class ZSqrt2:
    """The number ``a + b*sqrt(2)`` with integer ``a`` and ``b``.

    Values are immutable and hashable. Coefficients are kept inside the
    signed 64-bit range; anything larger raises ``OverflowError``.
    """

    __slots__ = ("_a", "_b")

    def __init__(self, a: int = 0, b: int = 0) -> None:
        if not isinstance(a, int) or not isinstance(b, int):
            raise TypeError("ZSqrt2 coefficients must be integers")
        object.__setattr__(self, "_a", _checked(int(a)))
        object.__setattr__(self, "_b", _checked(int(b)))

    def __setattr__(self, name, value):
        raise AttributeError("ZSqrt2 is immutable")

    @property
    def a(self) -> int:
        return self._a

    @property
    def b(self) -> int:
        return self._b

    @classmethod
    def coerce(cls, x: int | ZSqrt2) -> ZSqrt2:
        if isinstance(x, ZSqrt2):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot interpret {x!r} as an element of Z[sqrt2]")

    def __repr__(self) -> str:
        return f"ZSqrt2({self._a}, {self._b})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        if self._a == 0:
            return f"{self._b}√2"
        return f"{self._a}{self._b:+}√2"

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self._b == 0 and self._a == other
        if isinstance(other, ZSqrt2):
            return self._a == other._a and self._b == other._b
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._a, self._b))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __neg__(self) -> ZSqrt2:
        return ZSqrt2(-self._a, -self._b)

    def __add__(self, other) -> ZSqrt2:
        if not isinstance(other, (int, ZSqrt2)):
            return NotImplemented
        other = ZSqrt2.coerce(other)
        return ZSqrt2(self._a + other._a, self._b + other._b)

    __radd__ = __add__

    def __sub__(self, other) -> ZSqrt2:
        if not isinstance(other, (int, ZSqrt2)):
            return NotImplemented
        return self + (-ZSqrt2.coerce(other))

    def __rsub__(self, other) -> ZSqrt2:
        return (-self) + other

    def __mul__(self, other) -> ZSqrt2:
        if not isinstance(other, (int, ZSqrt2)):
            return NotImplemented
        other = ZSqrt2.coerce(other)
        a = _checked(self._a * other._a) + _checked(2 * self._b * other._b)
        b = _checked(self._a * other._b) + _checked(self._b * other._a)
        return ZSqrt2(a, b)

    __rmul__ = __mul__

    def conjugate(self) -> ZSqrt2:
        """Galois conjugate ``a - b*sqrt(2)``."""
        return ZSqrt2(self._a, -self._b)

    def norm(self) -> int:
        """Field norm ``a**2 - 2*b**2``."""
        return self._a * self._a - 2 * self._b * self._b

    def sign(self) -> int:
        """Sign of the real number, decided exactly."""
        a, b = self._a, self._b
        if a >= 0 and b >= 0:
            return 0 if a == 0 and b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a**2 with 2*b**2
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def __float__(self) -> float:
        return self._a + self._b * math.sqrt(2.0)

    def to_pair(self) -> list[int]:
        return [self._a, self._b]

    @classmethod
    def from_pair(cls, pair) -> ZSqrt2:
        if len(pair) != 2:
            raise ValueError(f"expected [a, b], got {pair!r}")
        a, b = pair
        if isinstance(a, bool) or isinstance(b, bool) or not isinstance(a, int) or not isinstance(b, int):
            raise ValueError(f"coefficients must be integers, got {pair!r}")
        return cls(a, b)


ZERO = ZSqrt2(0, 0)
ONE = ZSqrt2(1, 0)
SQRT2 = ZSqrt2(0, 1)
