"""Exact scalars in Q(i) and univariate polynomials over them.

Polynomials stand for elements of the ring of polynomials in the
Schrodinger operator, so the variable is written ``lam`` throughout.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

__all__ = [
    "GaussRational",
    "PolyLambda",
    "poly_eval",
    "vanishing_order",
    "conj_poly",
    "parse_rational",
    "format_rational",
]

Scalar = Union["GaussRational", int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a Fraction; floats are refused."""
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class GaussRational:
    """An element ``re + im*i`` of Q(i) with exact Fraction parts.

    Instances are immutable and hashable. Arithmetic with ``int`` and
    ``Fraction`` operands is supported.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        return cls(_frac(x), 0)

    @classmethod
    def parse(cls, text: str) -> "GaussRational":
        """Inverse of ``str``: accepts ``"p/q"``, ``"r/si"``, ``"p/q+r/si"``, ``"i"``."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty Gaussian rational")
        if not s.endswith("i"):
            return cls(parse_rational(s), 0)
        body = s[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0:
            re_txt, im_txt = body[:cut], body[cut:]
        else:
            re_txt, im_txt = "0", body
        if im_txt in ("", "+"):
            im_txt = "1"
        elif im_txt == "-":
            im_txt = "-1"
        try:
            return cls(parse_rational(re_txt), parse_rational(im_txt))
        except ValueError:
            raise ValueError(f"not a Gaussian rational: {text!r}") from None

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GaussRational division by zero")
        return GaussRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRational({self})"

    def __str__(self):
        if self.im == 0:
            return format_rational(self.re)
        im = format_rational(self.im)
        if self.re == 0:
            return f"{im}i"
        sign = "" if self.im < 0 else "+"
        return f"{format_rational(self.re)}{sign}{im}i"


ZERO = GaussRational(0)
ONE = GaussRational(1)
I = GaussRational(0, 1)


class PolyLambda:
    """Polynomial in ``lam`` with GaussRational coefficients, lowest degree first.

    The zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [GaussRational.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("PolyLambda is immutable")

    @classmethod
    def const(cls, c) -> "PolyLambda":
        return cls([c])

    @classmethod
    def lam(cls) -> "PolyLambda":
        return cls([0, 1])

    @classmethod
    def coerce(cls, x) -> "PolyLambda":
        if isinstance(x, PolyLambda):
            return x
        return cls([x])

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        try:
            o = PolyLambda.coerce(other)
        except TypeError:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (ZERO,) * (n - len(self.coeffs))
        b = o.coeffs + (ZERO,) * (n - len(o.coeffs))
        return PolyLambda(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return PolyLambda(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-PolyLambda.coerce(other))

    def __rsub__(self, other):
        return PolyLambda.coerce(other) - self

    def __mul__(self, other):
        try:
            o = PolyLambda.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return PolyLambda()
        out = [ZERO] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return PolyLambda(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = PolyLambda.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            o = PolyLambda.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        return poly_eval(self, x)

    def divide_linear(self, root) -> tuple["PolyLambda", GaussRational]:
        """Synthetic division by ``(lam - root)``; returns (quotient, remainder)."""
        root = GaussRational.coerce(root)
        if not self.coeffs:
            return PolyLambda(), ZERO
        acc = ZERO
        quot = []
        for c in reversed(self.coeffs):
            acc = acc * root + c
            quot.append(acc)
        rem = quot.pop()
        return PolyLambda(reversed(quot)), rem

    def __repr__(self):
        return f"PolyLambda({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("lam" if k == 1 else f"lam^{k}")
            cs = str(c)
            if c.im != 0 and c.re != 0:
                cs = f"({cs})"
            if mono and c == ONE:
                parts.append(mono)
            elif mono and c == -ONE:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts).replace("+ -", "- ")


def poly_eval(p: PolyLambda, lam0) -> GaussRational:
    """Horner evaluation, exact."""
    lam0 = GaussRational.coerce(lam0)
    acc = ZERO
    for c in reversed(p.coeffs):
        acc = acc * lam0 + c
    return acc


def vanishing_order(p: PolyLambda, lam0) -> int:
    """Multiplicity of ``lam0`` as a root of ``p``.

    Raises
    ------
    ValueError
        If ``p`` is the zero polynomial (``"undefined order"``).
    """
    if p.is_zero():
        raise ValueError("undefined order: zero polynomial")
    m = 0
    q = p
    while True:
        quot, rem = q.divide_linear(lam0)
        if rem:
            return m
        m += 1
        q = quot


def conj_poly(p: PolyLambda) -> PolyLambda:
    return PolyLambda(c.conjugate() for c in p.coeffs)


def linear_product(factors: Sequence[tuple]) -> PolyLambda:
    """Product of ``a*lam + b`` over ``(a, b)`` pairs."""
    out = PolyLambda.const(1)
    for a, b in factors:
        out = out * PolyLambda([b, a])
    return out
