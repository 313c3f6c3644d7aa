"""Exact scalars in Z[sqrt 2] / 2^k and the helpers built on them.

Three exact types live here:

``DyadicRoot2``
    ``(a + b*sqrt2) / 2**k`` with Python integers ``a``, ``b`` and ``k >= 0``.
    Every operator entry used by the walks (0, 1/2, +-1, 1/sqrt2) is one of
    these, so amplitudes and populations stay inside the ring for any number
    of steps.

``DyadicVector``
    A flat vector of dyadic values sharing one exponent. This is the form the
    step kernels work on; element access hands back ``DyadicRoot2``.

``QSqrt2`` and ``Scale``
    ``p + q*sqrt2`` with rational ``p``, ``q`` (probabilities after an
    arbitrary rational normalisation) and ``sqrt(r)`` for rational ``r > 0``
    (normalisation factors such as ``1/sqrt(46)`` that do not fit the ring).

Converting to ``float`` is the only lossy operation in exact mode.
"""

from __future__ import annotations

import enum
import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ScalarMode",
    "DyadicRoot2",
    "DyadicVector",
    "QSqrt2",
    "Scale",
    "ZERO",
    "ONE",
    "HALF",
    "INV_SQRT2",
    "SQRT2",
    "dy_add",
    "dy_mul",
    "dy_scale_half",
    "dy_scale_inv_sqrt2",
    "dy_scale_sqrt2",
    "dy_to_float",
    "parse_dyadic",
]


class ScalarMode(enum.Enum):
    EXACT = "exact"
    FLOAT64 = "float"

    @classmethod
    def parse(cls, text: str | "ScalarMode") -> "ScalarMode":
        if isinstance(text, ScalarMode):
            return text
        for mode in cls:
            if mode.value == text:
                return mode
        raise ValueError(f"unknown scalar mode {text!r} (expected 'exact' or 'float')")


def _trailing_zeros(x: int) -> int:
    return (x & -x).bit_length() - 1


# Extra bits carried when rounding b*sqrt2 to a float; far beyond double precision.
_FLOAT_GUARD_BITS = 128


def _sqrt2_times(b: int, bits: int) -> int:
    """Return round-toward-zero of ``b * sqrt2 * 2**bits``."""
    r = math.isqrt(2 * b * b << (2 * bits))
    return r if b >= 0 else -r


class DyadicRoot2:
    """Exact value ``(a + b*sqrt2) / 2**k``, always stored canonically.

    Canonical means ``k == 0`` or at least one of ``a``, ``b`` is odd, so two
    values are equal exactly when their ``(a, b, k)`` triples are equal.
    """

    __slots__ = ("a", "b", "k")

    def __init__(self, a: int = 0, b: int = 0, k: int = 0) -> None:
        a = int(a)
        b = int(b)
        k = int(k)
        if k < 0:
            a <<= -k
            b <<= -k
            k = 0
        if a == 0 and b == 0:
            k = 0
        elif k:
            shift = min(_trailing_zeros(a | b), k)
            if shift:
                a >>= shift
                b >>= shift
                k -= shift
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "k", k)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRoot2 is immutable")

    # construction -------------------------------------------------------
    @classmethod
    def coerce(cls, x: "DyadicRoot2 | int") -> "DyadicRoot2":
        if isinstance(x, DyadicRoot2):
            return x
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return cls(int(x), 0, 0)
        raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            other = DyadicRoot2.coerce(other)
        except TypeError:
            return NotImplemented
        k = max(self.k, other.k)
        s1 = k - self.k
        s2 = k - other.k
        return DyadicRoot2(
            (self.a << s1) + (other.a << s2), (self.b << s1) + (other.b << s2), k
        )

    __radd__ = __add__

    def __neg__(self) -> "DyadicRoot2":
        return DyadicRoot2(-self.a, -self.b, self.k)

    def __sub__(self, other):
        try:
            other = DyadicRoot2.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = DyadicRoot2.coerce(other)
        except TypeError:
            return NotImplemented
        return DyadicRoot2(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.k + other.k,
        )

    __rmul__ = __mul__

    def __abs__(self) -> "DyadicRoot2":
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt2`` (-1, 0 or 1)."""
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 1 if (a or b) else 0
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with 2 b^2
        if a * a > 2 * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def conjugate(self) -> "DyadicRoot2":
        return DyadicRoot2(self.a, -self.b, self.k)

    # comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, DyadicRoot2):
            return self.a == other.a and self.b == other.b and self.k == other.k
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self.b == 0 and self.k == 0 and self.a == int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.k))

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    # conversion ---------------------------------------------------------
    def __float__(self) -> float:
        return dy_to_float(self)

    def to_qsqrt2(self) -> "QSqrt2":
        den = 1 << self.k
        return QSqrt2(Fraction(self.a, den), Fraction(self.b, den))

    def __str__(self) -> str:
        return f"{self.a}+{self.b}*sqrt2/2^{self.k}"

    def __repr__(self) -> str:
        return f"DyadicRoot2({self.a}, {self.b}, {self.k})"

    def __reduce__(self):
        return (DyadicRoot2, (self.a, self.b, self.k))


ZERO = DyadicRoot2(0, 0, 0)
ONE = DyadicRoot2(1, 0, 0)
HALF = DyadicRoot2(1, 0, 1)
INV_SQRT2 = DyadicRoot2(0, 1, 1)
SQRT2 = DyadicRoot2(0, 1, 0)


def dy_add(x: DyadicRoot2, y: DyadicRoot2) -> DyadicRoot2:
    return x + y


def dy_mul(x: DyadicRoot2, y: DyadicRoot2) -> DyadicRoot2:
    return x * y


def dy_scale_half(x: DyadicRoot2) -> DyadicRoot2:
    return DyadicRoot2(x.a, x.b, x.k + 1)


def dy_scale_inv_sqrt2(x: DyadicRoot2) -> DyadicRoot2:
    # (a + b*sqrt2)/sqrt2 = (2b + a*sqrt2)/2
    return DyadicRoot2(2 * x.b, x.a, x.k + 1)


def dy_scale_sqrt2(x: DyadicRoot2) -> DyadicRoot2:
    # (a + b*sqrt2)*sqrt2 = 2b + a*sqrt2
    return DyadicRoot2(2 * x.b, x.a, x.k)


def dy_to_float(x: DyadicRoot2) -> float:
    """Nearest double to ``x``; raises ``OverflowError`` past the float range.

    This is the only lossy operation on exact values.
    """
    if x.b == 0:
        return float(Fraction(x.a, 1 << x.k))
    num = (x.a << _FLOAT_GUARD_BITS) + _sqrt2_times(x.b, _FLOAT_GUARD_BITS)
    return float(Fraction(num, 1 << (x.k + _FLOAT_GUARD_BITS)))


_DYADIC_RE = re.compile(
    r"^\s*([+-]?\d+)\s*\+\s*([+-]?\d+)\s*\*\s*sqrt2\s*/\s*2\^(\d+)\s*$"
)


def parse_dyadic(text: str) -> DyadicRoot2:
    """Parse ``"a+b*sqrt2/2^k"`` (the serialised form) or a plain integer."""
    m = _DYADIC_RE.match(text)
    if m:
        return DyadicRoot2(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    try:
        return DyadicRoot2(int(text.strip()))
    except ValueError:
        raise ValueError(f"not an exact scalar: {text!r}") from None


class QSqrt2:
    """Exact ``p + q*sqrt2`` with rational coefficients.

    Used for probabilities and moments, where rational normalisation factors
    (e.g. 1/46) and divisions leave the dyadic ring.
    """

    __slots__ = ("p", "q")

    def __init__(self, p=0, q=0) -> None:
        object.__setattr__(self, "p", Fraction(p))
        object.__setattr__(self, "q", Fraction(q))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    @classmethod
    def coerce(cls, x) -> "QSqrt2":
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, DyadicRoot2):
            return x.to_qsqrt2()
        if isinstance(x, (int, Fraction, np.integer)) and not isinstance(x, bool):
            return cls(x, 0)
        raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")

    def __add__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.p, -self.q)

    def __sub__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.p * o.p + 2 * self.q * o.q, self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        norm = o.p * o.p - 2 * o.q * o.q
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        return self * QSqrt2(o.p / norm, -o.q / norm)

    def __rtruediv__(self, other):
        return QSqrt2.coerce(other) / self

    def sign(self) -> int:
        p, q = self.p, self.q
        if p >= 0 and q >= 0:
            return 1 if (p or q) else 0
        if p <= 0 and q <= 0:
            return -1
        if p * p > 2 * q * q:
            return 1 if p > 0 else -1
        return 1 if q > 0 else -1

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other) -> bool:
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self) -> bool:
        return bool(self.p or self.q)

    def __float__(self) -> float:
        if self.q == 0:
            return float(self.p)
        bits = _FLOAT_GUARD_BITS
        # p + q*sqrt2 over the common denominator of p and q
        den = self.p.denominator * self.q.denominator // math.gcd(
            self.p.denominator, self.q.denominator
        )
        a = self.p.numerator * (den // self.p.denominator)
        b = self.q.numerator * (den // self.q.denominator)
        num = (a << bits) + _sqrt2_times(b, bits)
        return float(Fraction(num, den << bits))

    def is_rational(self) -> bool:
        return self.q == 0

    def __str__(self) -> str:
        return f"{self.p}+{self.q}*sqrt2"

    def __repr__(self) -> str:
        return f"QSqrt2({self.p!s}, {self.q!s})"


def format_exact(x) -> str:
    """Serialise an exact value; dyadic values use ``"a+b*sqrt2/2^k"``."""
    if isinstance(x, DyadicRoot2):
        return str(x)
    if isinstance(x, QSqrt2):
        dp, dq = x.p.denominator, x.q.denominator
        den = max(dp, dq)
        if den & (den - 1) == 0 and den % dp == 0 and den % dq == 0:
            k = den.bit_length() - 1
            return str(
                DyadicRoot2(x.p.numerator * (den // dp), x.q.numerator * (den // dq), k)
            )
        return str(x)
    if isinstance(x, Fraction):
        return format_exact(QSqrt2(x))
    return repr(float(x))


_QSQRT2_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)\s*\+\s*([+-]?\d+(?:/\d+)?)\s*\*\s*sqrt2\s*$")


def parse_exact(text: str):
    """Inverse of :func:`format_exact`; returns ``DyadicRoot2`` when possible."""
    m = _QSQRT2_RE.match(text)
    if m:
        return QSqrt2(Fraction(m.group(1)), Fraction(m.group(2)))
    return parse_dyadic(text)


class Scale:
    """Exact positive factor ``sqrt(sq)`` with rational ``sq``."""

    __slots__ = ("sq",)

    def __init__(self, sq=1) -> None:
        sq = Fraction(sq)
        if sq <= 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "sq", sq)

    def __setattr__(self, name, value):
        raise AttributeError("Scale is immutable")

    @classmethod
    def of(cls, x) -> "Scale":
        """Scale equal to a positive value that is a square root of a rational."""
        if isinstance(x, DyadicRoot2):
            x = x.to_qsqrt2()
        if isinstance(x, QSqrt2):
            if x.sign() <= 0 or (x.p != 0 and x.q != 0):
                raise ValueError(f"{x} is not a positive square root of a rational")
            return cls(x.p * x.p + 2 * x.q * x.q)
        x = Fraction(x)
        return cls(x * x)

    def __mul__(self, other: "Scale") -> "Scale":
        return Scale(self.sq * other.sq)

    def __truediv__(self, other: "Scale") -> "Scale":
        return Scale(self.sq / other.sq)

    def __eq__(self, other) -> bool:
        return isinstance(other, Scale) and self.sq == other.sq

    def __hash__(self) -> int:
        return hash(self.sq)

    def __float__(self) -> float:
        return math.sqrt(self.sq)

    def rational(self) -> Fraction | None:
        """``sqrt(sq)`` as a Fraction when it is rational, else ``None``."""
        n, d = self.sq.numerator, self.sq.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return None

    def __repr__(self) -> str:
        return f"Scale(sqrt({self.sq}))"


class DyadicVector:
    """Flat vector of ``(a_i + b_i*sqrt2) / 2**k`` sharing one exponent ``k``.

    Kept canonical: ``k == 0`` or some numerator is odd. The lists are owned
    by the vector and must not be mutated after construction.
    """

    __slots__ = ("a", "b", "k")

    def __init__(self, a: list[int], b: list[int], k: int = 0) -> None:
        if len(a) != len(b):
            raise ValueError("numerator lists differ in length")
        self.a = a
        self.b = b
        self.k = k
        self._canonicalize()

    def _canonicalize(self) -> None:
        g = 0
        for x in self.a:
            g |= x
        for x in self.b:
            g |= x
        if g == 0:
            self.k = 0
            return
        if self.k < 0:
            s = -self.k
            self.a = [x << s for x in self.a]
            self.b = [x << s for x in self.b]
            self.k = 0
            return
        shift = min(_trailing_zeros(g), self.k)
        if shift:
            self.a = [x >> shift for x in self.a]
            self.b = [x >> shift for x in self.b]
            self.k -= shift

    @classmethod
    def zeros(cls, n: int) -> "DyadicVector":
        return cls([0] * n, [0] * n, 0)

    @classmethod
    def from_scalars(cls, values: Iterable[DyadicRoot2 | int]) -> "DyadicVector":
        vals = [DyadicRoot2.coerce(v) for v in values]
        k = max((v.k for v in vals), default=0)
        return cls([v.a << (k - v.k) for v in vals], [v.b << (k - v.k) for v in vals], k)

    def __len__(self) -> int:
        return len(self.a)

    def __getitem__(self, i: int) -> DyadicRoot2:
        return DyadicRoot2(self.a[i], self.b[i], self.k)

    def __iter__(self):
        k = self.k
        for x, y in zip(self.a, self.b):
            yield DyadicRoot2(x, y, k)

    def to_list(self) -> list[DyadicRoot2]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicVector):
            return NotImplemented
        return self.k == other.k and self.a == other.a and self.b == other.b

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.a) and not any(self.b)

    def nonzero(self) -> list[int]:
        return [i for i, (x, y) in enumerate(zip(self.a, self.b)) if x or y]

    def __neg__(self) -> "DyadicVector":
        return DyadicVector([-x for x in self.a], [-y for y in self.b], self.k)

    def __add__(self, other: "DyadicVector") -> "DyadicVector":
        if len(other) != len(self):
            raise ValueError("length mismatch")
        k = max(self.k, other.k)
        s1, s2 = k - self.k, k - other.k
        return DyadicVector(
            [(x << s1) + (y << s2) for x, y in zip(self.a, other.a)],
            [(x << s1) + (y << s2) for x, y in zip(self.b, other.b)],
            k,
        )

    def __sub__(self, other: "DyadicVector") -> "DyadicVector":
        return self + (-other)

    def scale(self, c: DyadicRoot2) -> "DyadicVector":
        ca, cb = c.a, c.b
        return DyadicVector(
            [ca * x + 2 * cb * y for x, y in zip(self.a, self.b)],
            [ca * y + cb * x for x, y in zip(self.a, self.b)],
            self.k + c.k,
        )

    def scale_sqrt2_pow(self, n: int) -> "DyadicVector":
        """Multiply every entry by ``sqrt2**n`` exactly (``n >= 0``)."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        a, b = self.a, self.b
        if n % 2:
            a, b = [2 * y for y in b], a
        return DyadicVector(list(a), list(b), self.k - n // 2)

    def take(self, idx: Sequence[int]) -> "DyadicVector":
        return DyadicVector([self.a[i] for i in idx], [self.b[i] for i in idx], self.k)

    def total(self) -> DyadicRoot2:
        return DyadicRoot2(sum(self.a), sum(self.b), self.k)

    def to_float(self) -> np.ndarray:
        """Elementwise doubles (lossy)."""
        k = self.k
        out = np.empty(len(self.a))
        for i, (x, y) in enumerate(zip(self.a, self.b)):
            if y == 0 and abs(x) < (1 << 53):
                out[i] = math.ldexp(x, -k)
            else:
                out[i] = dy_to_float(DyadicRoot2(x, y, k))
        return out

    def __repr__(self) -> str:
        return f"DyadicVector(len={len(self)}, k={self.k})"
