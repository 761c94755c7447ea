"""Truncated q-series with a rational exponent offset.

A series stands for ``q^offset * sum_{n=0}^{N} c_n q^n``; coefficients past
the truncation N are unknown, so arithmetic narrows to the smaller N.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


class SeriesError(ValueError):
    pass


class QSeries:
    __slots__ = ("offset", "coeffs")

    def __init__(self, coeffs, offset=Fraction(0), truncation: int | None = None):
        coeffs = [Fraction(c) for c in coeffs]
        if truncation is not None:
            coeffs = (coeffs + [Fraction(0)] * (truncation + 1))[: truncation + 1]
        self.coeffs = coeffs
        self.offset = Fraction(offset)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        if n > self.truncation:
            raise SeriesError(f"coefficient {n} lies past truncation {self.truncation}")
        return self.coeffs[n] if n >= 0 else Fraction(0)

    def integer_coeffs(self) -> list[int]:
        out = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise SeriesError(f"non-integral coefficient {c}")
            out.append(int(c))
        return out

    def _align(self, other: QSeries):
        if self.offset != other.offset:
            raise SeriesError("cannot add series with different offsets")
        n = min(self.truncation, other.truncation)
        return self.coeffs[: n + 1], other.coeffs[: n + 1]

    def __add__(self, other: QSeries) -> QSeries:
        a, b = self._align(other)
        return QSeries([x + y for x, y in zip(a, b)], self.offset)

    def __sub__(self, other: QSeries) -> QSeries:
        a, b = self._align(other)
        return QSeries([x - y for x, y in zip(a, b)], self.offset)

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.offset)

    def scale(self, c) -> QSeries:
        return QSeries([Fraction(c) * x for x in self.coeffs], self.offset)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        n = min(self.truncation, other.truncation)
        out = [Fraction(0)] * (n + 1)
        for i, x in enumerate(self.coeffs[: n + 1]):
            if x:
                for j, y in enumerate(other.coeffs[: n + 1 - i]):
                    out[i + j] += x * y
        return QSeries(out, self.offset + other.offset)

    __rmul__ = __mul__

    def __truediv__(self, other: QSeries) -> QSeries:
        if not other.coeffs or other.coeffs[0] == 0:
            raise SeriesError("division needs an invertible lowest coefficient")
        n = min(self.truncation, other.truncation)
        b0 = other.coeffs[0]
        out: list[Fraction] = []
        for i in range(n + 1):
            acc = self.coeffs[i] - sum(out[j] * other.coeffs[i - j] for j in range(max(0, i - other.truncation), i))
            out.append(acc / b0)
        return QSeries(out, self.offset - other.offset)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.offset == other.offset and self.coeffs == other.coeffs

    def __repr__(self):
        return f"QSeries(offset={self.offset}, coeffs={[str(c) for c in self.coeffs]})"

    def to_text(self) -> str:
        """e.g. ``q^(-1/24)·(1 + q^2 + q^3 + 2q^4 + O(q^5))``."""
        terms = []
        for n, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if n == 0 else ("q" if n == 1 else f"q^{n}")
            if not mono:
                coef = str(c)
            elif c == 1:
                coef = ""
            elif c == -1:
                coef = "-"
            else:
                coef = str(c)
            terms.append(f"{coef}{mono}")
        body = " + ".join(terms).replace("+ -", "- ") or "0"
        body += f" + O(q^{self.truncation + 1})"
        if self.offset:
            return f"q^({self.offset})·({body})"
        return body

    def to_json(self) -> dict:
        return {"offset": str(self.offset), "truncation": self.truncation,
                "coeffs": [str(c) if c.denominator != 1 else int(c) for c in self.coeffs]}


def series_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def series_div(a: QSeries, b: QSeries) -> QSeries:
    return a / b


def euler_product(N: int) -> QSeries:
    """prod_{m=1}^{N} (1 - q^m) truncated at N."""
    out = QSeries([1], truncation=N)
    for m in range(1, N + 1):
        factor = [0] * (N + 1)
        factor[0] = 1
        factor[m] = -1
        out = out * QSeries(factor)
    return out


def partition_series(N: int) -> QSeries:
    return QSeries([1], truncation=N) / euler_product(N)


def is_square(h: int) -> bool:
    return h >= 0 and isqrt(h) ** 2 == h


def virasoro_character(h: int, N: int, central_charge=1) -> QSeries:
    """c = 1 character of L(1, h), coefficients indexed by weight 0..N.

    For h = n^2 the numerator is q^{n^2} - q^{(n+1)^2}; otherwise q^h.
    """
    if h < 0:
        raise SeriesError("highest weight must be non-negative")
    num = [0] * (N + 1)
    if h <= N:
        num[h] = 1
    if is_square(h):
        nxt = (isqrt(h) + 1) ** 2
        if nxt <= N:
            num[nxt] = -1
    ch = QSeries(num) / euler_product(N)
    ch.offset = -Fraction(central_charge) / 24
    return ch


def subspace_character(dims, central_charge=1) -> QSeries:
    """q^{-c/24} sum_n dim_n q^n from dimensions at weights 0..N."""
    return QSeries(list(dims), -Fraction(central_charge) / 24)


def extract_multiplicities(char: QSeries, N: int | None = None) -> list[tuple[int, int]]:
    """Greedy split of a c = 1 character into L(1, n^2) characters.

    Returns [(n, a_n)] for all n with n^2 <= N.  A coefficient that cannot be
    absorbed at a non-square weight, or a negative remainder, raises.
    """
    if N is None:
        N = char.truncation
    rem = QSeries(char.coeffs[: N + 1], char.offset)
    out = []
    for w in range(N + 1):
        c = rem[w]
        if c < 0 or c.denominator != 1:
            raise SeriesError(f"character is not decomposable: remainder {c} at weight {w}")
        if not is_square(w):
            if c:
                raise SeriesError(f"unexpected primary content at non-square weight {w}")
            continue
        if c:
            rem = rem - virasoro_character(w, N).scale(c)
        out.append((isqrt(w), int(c)))
    return out


def group_trace(ctx, element, n: int):
    """tr(g | weight n) as a Scalar."""
    import flint

    from latvoa.fock import State, enumerate_basis
    from latvoa.scalars import ZERO, Scalar
    from latvoa.symmetry import QiBlock, UnsupportedPhaseError, apply_word_block

    basis = enumerate_basis(ctx, n)
    word = element.word.word
    try:
        img = apply_word_block(ctx, word, n, QiBlock(flint.fmpq_mat(len(basis), len(basis),
                                                                  [int(i == j) for i in range(len(basis))
                                                                   for j in range(len(basis))])))
        re = sum((img.re[i, i] for i in range(len(basis))), flint.fmpq(0))
        im = sum((img.im[i, i] for i in range(len(basis))), flint.fmpq(0))
        return Scalar.rational(Fraction(int(re.p), int(re.q))) + Scalar.basis(4, Fraction(int(im.p), int(im.q)))
    except UnsupportedPhaseError:
        total = ZERO
        for mono in basis:
            total = total + element.word(ctx, State.monomial(mono.partition, mono.exponent)).coeff(mono)
        return total


def burnside_character(ctx, group, N: int) -> QSeries:
    """Orbifold character from trace averages: dim V^G_n = (1/|G|) sum_g tr(g | V_n)."""
    coeffs = []
    for n in range(N + 1):
        acc = None
        for g in group:
            t = group_trace(ctx, g, n)
            acc = t if acc is None else acc + t
        avg = acc * Fraction(1, len(group))
        if not avg.is_rational():
            raise SeriesError(f"trace average at weight {n} is not rational: {avg}")
        q = Fraction(int(avg.coords[0].numerator), int(avg.coords[0].denominator))
        if q.denominator != 1 or q < 0:
            raise SeriesError(f"trace average at weight {n} is not a non-negative integer: {q}")
        coeffs.append(q)
    return subspace_character(coeffs)
