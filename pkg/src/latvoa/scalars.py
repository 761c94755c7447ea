"""Exact arithmetic in the number field Q(i, sqrt2, sqrt3).

Elements are stored as 8 rational coordinates on the fixed basis

    1, sqrt2, sqrt3, sqrt6, i, sqrt2*i, sqrt3*i, sqrt6*i

Basis index bits: bit 0 marks a sqrt2 factor, bit 1 a sqrt3 factor and
bit 2 a factor of i, so the product of two basis elements has index
``j ^ k`` and a rational factor read off the shared bits.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

import flint
from gmpy2 import mpq

BASIS_NAMES = ("", "√2", "√3", "√6")
ZERO_Q = mpq(0)
ONE_Q = mpq(1)


def basis_product(j: int, k: int) -> tuple[int, int]:
    """Return ``(index, factor)`` with ``e_j * e_k = factor * e_index``."""
    common = j & k
    factor = 1
    if common & 1:
        factor *= 2
    if common & 2:
        factor *= 3
    if common & 4:
        factor = -factor
    return j ^ k, factor


# 8x8 table used by Scalar.__mul__
MUL_TABLE = tuple(tuple(basis_product(j, k) for k in range(8)) for j in range(8))


def to_mpq(x) -> mpq:
    if isinstance(x, type(ZERO_Q)):
        return x
    if isinstance(x, (int, Fraction, Rational)):
        return mpq(x.numerator, x.denominator) if not isinstance(x, int) else mpq(x)
    if isinstance(x, str):
        return mpq(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class Scalar:
    """Immutable element of Q(i, sqrt2, sqrt3)."""

    __slots__ = ("coords", "_hash")

    def __init__(self, coords=None):
        if coords is None:
            coords = (ZERO_Q,) * 8
        elif isinstance(coords, Scalar):
            coords = coords.coords
        else:
            coords = tuple(to_mpq(c) for c in coords)
            if len(coords) != 8:
                raise ValueError("a Scalar needs exactly 8 rational coordinates")
        self.coords = coords
        self._hash = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def rational(cls, q) -> Scalar:
        c = [ZERO_Q] * 8
        c[0] = to_mpq(q)
        return cls(c)

    @classmethod
    def basis(cls, index: int, q=1) -> Scalar:
        c = [ZERO_Q] * 8
        c[index] = to_mpq(q)
        return cls(c)

    @classmethod
    def coerce(cls, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        return cls.rational(x)

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def support(self) -> list[int]:
        return [j for j, c in enumerate(self.coords) if c]

    def to_rational(self) -> mpq:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    # -- ring operations ------------------------------------------------
    def __add__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(tuple(-a for a in self.coords))

    def __sub__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Scalar):
            out = [ZERO_Q] * 8
            for j, a in enumerate(self.coords):
                if not a:
                    continue
                row = MUL_TABLE[j]
                for k, b in enumerate(other.coords):
                    if b:
                        idx, f = row[k]
                        out[idx] += f * a * b
            return Scalar(out)
        try:
            q = to_mpq(other)
        except TypeError:
            return NotImplemented
        return Scalar(tuple(a * q for a in self.coords))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = Scalar.rational(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mult_matrix(self) -> list[list[mpq]]:
        """Matrix of x -> self*x on the coordinate basis (columns = images of e_k)."""
        m = [[ZERO_Q] * 8 for _ in range(8)]
        for j, a in enumerate(self.coords):
            if a:
                for k in range(8):
                    idx, f = MUL_TABLE[j][k]
                    m[idx][k] += f * a
        return m

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Scalar")
        if self.is_rational():
            return Scalar.rational(1 / self.coords[0])
        m = self.mult_matrix()
        mat = flint.fmpq_mat(8, 8, [flint.fmpq(int(x.numerator), int(x.denominator)) for row in m for x in row])
        rhs = flint.fmpq_mat(8, 1, [1] + [0] * 7)
        sol = mat.solve(rhs)
        return Scalar([mpq(int(sol[r, 0].p), int(sol[r, 0].q)) for r in range(8)])

    def __truediv__(self, other):
        other = Scalar.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def conjugate_i(self) -> Scalar:
        """Galois automorphism i -> -i."""
        c = self.coords
        return Scalar(c[:4] + tuple(-x for x in c[4:]))

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.coords == other.coords
        try:
            return self.coords == Scalar.rational(other).coords
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coords)
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- text -----------------------------------------------------------
    def to_text(self) -> str:
        """Canonical form ``a + b√2 + c√3 + d√6 + (e + f√2 + g√3 + h√6)i``."""
        c = [_qstr(x) for x in self.coords]
        return (f"{c[0]} + {c[1]}√2 + {c[2]}√3 + {c[3]}√6 + "
                f"({c[4]} + {c[5]}√2 + {c[6]}√3 + {c[7]}√6)i")

    def __str__(self):
        parts = []
        for j, x in enumerate(self.coords):
            if not x:
                continue
            name = BASIS_NAMES[j & 3] + ("i" if j & 4 else "")
            if not name:
                parts.append(_qstr(x))
            elif x == 1:
                parts.append(name)
            elif x == -1:
                parts.append("-" + name)
            else:
                parts.append(f"{_qstr(x)}{name}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Scalar({self})"

    @classmethod
    def parse(cls, text: str) -> Scalar:
        """Parse the canonical text form or a bare rational such as ``-3/4``."""
        text = text.strip()
        m = _CANON.fullmatch(text)
        if m:
            return cls([Fraction(g) for g in m.groups()])
        return cls.rational(Fraction(text))


_Q = r"(-?\d+(?:/\d+)?)"
_CANON = re.compile(
    rf"{_Q} \+ {_Q}√2 \+ {_Q}√3 \+ {_Q}√6 \+ \({_Q} \+ {_Q}√2 \+ {_Q}√3 \+ {_Q}√6\)i"
)


def _qstr(x) -> str:
    x = to_mpq(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


# Frequently used constants.
ZERO = Scalar()
ONE = Scalar.rational(1)
I = Scalar.basis(4)
SQRT2 = Scalar.basis(1)
SQRT3 = Scalar.basis(2)
SQRT6 = Scalar.basis(3)
# primitive cube root of unity (-1 + sqrt3 i)/2
OMEGA = Scalar.rational(Fraction(-1, 2)) + Scalar.basis(6, Fraction(1, 2))
