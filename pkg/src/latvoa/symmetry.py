"""Automorphisms of the lattice algebra and their fixed-point subspaces.

Three primitive maps generate everything here:

* ``Theta``: alpha(-n1)...alpha(-ns) e^{m} -> (-1)^s alpha(-n1)...alpha(-ns) e^{-m}
* ``TorusPhase(r)``: e^{m gamma} -> exp(2 pi i r m) e^{m gamma}
* ``QuarterTurn(axis, sign)``: exp(sign * i pi/2 * A) with A = x^{axis}_0 / sqrt2,
  evaluated by spectral projectors since A has integer spectrum on each
  graded piece.

A word ``[p0, p1, ...]`` acts as ``p0(p1(...(v)))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Sequence, Union

import flint
from gmpy2 import mpq

from latvoa.fock import LatticeContext, Monomial, State, enumerate_basis
from latvoa.linalg import column_matrix, expand_field, independent_subset, matrix_columns, to_fmpq
from latvoa.scalars import I, MUL_TABLE, ZERO, ZERO_Q, Scalar
from latvoa.vertex import rational_mode


class UnsupportedPhaseError(ValueError):
    """exp(2 pi i r m) does not lie in the scalar field."""


class ClosureError(RuntimeError):
    """Group closure exceeded its bound."""


# -- primitives ----------------------------------------------------------------

@dataclass(frozen=True)
class Theta:
    def __str__(self):
        return "theta"


@dataclass(frozen=True)
class TorusPhase:
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        if 12 % self.r.denominator:
            raise UnsupportedPhaseError(f"phase {self.r} needs denominator dividing 12")

    def __str__(self):
        return f"torus({self.r})"


@dataclass(frozen=True)
class QuarterTurn:
    axis: int
    sign: int = 1

    def __post_init__(self):
        if self.axis not in (2, 3) or self.sign not in (1, -1):
            raise ValueError("quarter turns need axis 2 or 3 and sign +1 or -1")

    def __str__(self):
        return f"quarter({self.axis},{'+' if self.sign > 0 else '-'})"


Primitive = Union[Theta, TorusPhase, QuarterTurn]

_H = Fraction(1, 2)
# exp(2 pi i j/12) as (cos, sin) with cos, sin in Q(sqrt3): (rational part, sqrt3 part)
_COS_SIN = {
    0: ((1, 0), (0, 0)), 1: ((0, _H), (_H, 0)), 2: ((_H, 0), (0, _H)),
    3: ((0, 0), (1, 0)), 4: ((-_H, 0), (0, _H)), 5: ((0, -_H), (_H, 0)),
    6: ((-1, 0), (0, 0)), 7: ((0, -_H), (-_H, 0)), 8: ((-_H, 0), (0, -_H)),
    9: ((0, 0), (-1, 0)), 10: ((_H, 0), (0, -_H)), 11: ((0, _H), (-_H, 0)),
}


@lru_cache(maxsize=None)
def root_of_unity(t: Fraction) -> Scalar:
    """exp(2 pi i t) for 12t an integer."""
    t = Fraction(t) % 1
    j = t * 12
    if j.denominator != 1:
        raise UnsupportedPhaseError(f"exp(2 pi i {t}) is not in the scalar field")
    (c0, c3), (s0, s3) = _COS_SIN[int(j)]
    c = [ZERO_Q] * 8
    c[0], c[2], c[4], c[6] = mpq(c0), mpq(c3), mpq(s0), mpq(s3)
    return Scalar(c)


def torus_phase(r, m: int) -> Scalar:
    return root_of_unity(Fraction(r) * m)


# -- sparse application ----------------------------------------------------------

def apply_theta(ctx: LatticeContext, v: State) -> State:
    return v.map_rational(
        lambda vec: {Monomial(p, -m): (-x if len(p) % 2 else x) for (p, m), x in vec.items()})


def apply_torus(ctx: LatticeContext, r, v: State) -> State:
    parts: dict[int, dict] = {}
    for j, vec in v.parts.items():
        for mono, x in vec.items():
            ph = torus_phase(r, mono[1])
            for k, c in enumerate(ph.coords):
                if c:
                    idx, f = MUL_TABLE[k][j]
                    bucket = parts.setdefault(idx, {})
                    new = bucket.get(mono, ZERO_Q) + f * c * x
                    if new:
                        bucket[mono] = new
                    else:
                        bucket.pop(mono)
    return State(parts)


def _lagrange(M: int) -> dict[int, list[Fraction]]:
    """Coefficient lists (constant term first) of the projectors onto eigenvalue j in [-M, M]."""
    out = {}
    for j in range(-M, M + 1):
        poly = [Fraction(1)]
        for l in range(-M, M + 1):
            if l == j:
                continue
            d = Fraction(1, j - l)
            # poly *= (x - l) / (j - l)
            new = [Fraction(0)] * (len(poly) + 1)
            for e, c in enumerate(poly):
                new[e + 1] += c * d
                new[e] -= c * l * d
            poly = new
        out[j] = poly
    return out


@lru_cache(maxsize=None)
def quarter_turn_coefficients(M: int, axis: int, sign: int) -> tuple[Scalar, ...]:
    """q_k with exp(sign i pi/2 A) = sum_k q_k B^k, where A = B (axis 2) or A = iB (axis 3)."""
    w = I if sign > 0 else -I
    coeffs = [ZERO] * (2 * M + 1)
    for j, poly in _lagrange(M).items():
        wj = w ** (j % 4)
        for e, c in enumerate(poly):
            if c:
                coeffs[e] = coeffs[e] + wj * mpq(c.numerator, c.denominator)
    if axis == 3:
        coeffs = [c * I ** e for e, c in enumerate(coeffs)]
    return tuple(coeffs)


def spectral_bound(ctx: LatticeContext, n: int) -> int:
    """The zero-mode A has integer spectrum in [-M, M] on weight n."""
    return isqrt(n // ctx.k) if n >= 0 else 0


def zero_mode_vector(axis: int) -> dict:
    """B = (e^a_0 + e^{-a}_0)/2 for axis 2 and (e^a_0 - e^{-a}_0)/2 for axis 3, as a vertex state."""
    s = 1 if axis == 2 else -1
    return {((), 1): mpq(1, 2), ((), -1): mpq(s, 2)}


def _apply_b(ctx: LatticeContext, axis: int, vec: dict) -> dict:
    return rational_mode(ctx.norm, zero_mode_vector(axis), 0, vec)


def apply_quarter_turn(ctx: LatticeContext, axis: int, sign: int, v: State) -> State:
    if ctx.norm != 2:
        raise ValueError("quarter turns are defined on the norm-2 lattice algebra")
    for n in v.weights(ctx):
        ctx.check_weight(n)
    out = State()
    for n in sorted(v.weights(ctx)):
        piece = v.project_weight(ctx, n)
        coeffs = quarter_turn_coefficients(spectral_bound(ctx, n), axis, sign)
        power = piece
        acc = State()
        for e, c in enumerate(coeffs):
            if e:
                power = power.map_rational(lambda vec: _apply_b(ctx, axis, vec))
            if c:
                acc = acc + power.scale(c)
        out = out + acc
    return out


def apply_primitive(ctx: LatticeContext, prim: Primitive, v: State) -> State:
    if isinstance(prim, Theta):
        return apply_theta(ctx, v)
    if isinstance(prim, TorusPhase):
        return apply_torus(ctx, prim.r, v)
    return apply_quarter_turn(ctx, prim.axis, prim.sign, v)


# -- automorphisms -----------------------------------------------------------------

@dataclass(frozen=True)
class Automorphism:
    word: tuple = ()
    label: str | None = None

    def __call__(self, ctx: LatticeContext, v: State) -> State:
        for prim in reversed(self.word):
            v = apply_primitive(ctx, prim, v)
        return v

    def compose(self, other: Automorphism) -> Automorphism:
        """self o other."""
        return Automorphism(tuple(self.word) + tuple(other.word))

    def __str__(self):
        body = " o ".join(str(p) for p in self.word) or "id"
        return f"{self.label} = {body}" if self.label else body


IDENTITY = Automorphism((), "id")

Matrix3 = tuple  # 3x3 tuple of tuples of Scalar


def v1_coordinates(v: State) -> tuple[Scalar, Scalar, Scalar]:
    """Coordinates of a weight-1 vector (norm 2) in the basis x1, x2, x3."""
    h = v.coeff(((1,), 0))
    a = v.coeff(((), 1))
    b = v.coeff(((), -1))
    half_root2 = Scalar.basis(1, mpq(1, 2))
    return h * Scalar.basis(1), (a + b) * half_root2, -I * (a - b) * half_root2


def v1_matrix(ctx: LatticeContext, g: Automorphism, named=None) -> Matrix3:
    """Matrix M with g(x_j) = sum_i x_i M[i][j]."""
    if named is None:
        from latvoa.vertex import NamedVectors
        named = NamedVectors(ctx)
    cols = [v1_coordinates(g(ctx, named[f"x{j}"])) for j in (1, 2, 3)]
    return tuple(tuple(cols[j][i] for j in range(3)) for i in range(3))


def matmul3(a: Matrix3, b: Matrix3) -> Matrix3:
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(3)), ZERO) for j in range(3))
                 for i in range(3))


def int_matrix(rows) -> Matrix3:
    return tuple(tuple(Scalar.rational(x) for x in row) for row in rows)


IDENTITY3 = int_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
TAU_MATRICES = {
    1: int_matrix([[1, 0, 0], [0, -1, 0], [0, 0, -1]]),
    2: int_matrix([[-1, 0, 0], [0, 1, 0], [0, 0, -1]]),
    3: int_matrix([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]),
}
K_MATRICES = [IDENTITY3] + list(TAU_MATRICES.values())
SIGMA_MATRIX = int_matrix([[0, 1, 0], [0, 0, -1], [-1, 0, 0]])


@dataclass(frozen=True)
class GroupElement:
    matrix3: Matrix3
    word: Automorphism = field(compare=False)


def build_tau(i: int) -> Automorphism:
    words = {1: (TorusPhase(Fraction(1, 2)),), 2: (Theta(),),
             3: (Theta(), TorusPhase(Fraction(1, 2)))}
    return Automorphism(words[i], f"tau{i}")


def sigma_candidates():
    for r in (Fraction(1, 4), Fraction(-1, 4)):
        for sign in (1, -1):
            t, q = TorusPhase(r), QuarterTurn(2, sign)
            yield (q, t)
            yield (t, q)


def build_sigma(ctx: LatticeContext) -> Automorphism:
    """The order-3 automorphism with V_1 matrix [[0,1,0],[0,0,-1],[-1,0,0]].

    A quarter phase of the torus composed with one axis-2 quarter turn; the
    signs and the order are fixed by searching all eight choices.
    """
    for word in sigma_candidates():
        g = Automorphism(word, "sigma")
        m = v1_matrix(ctx, g)
        if m == SIGMA_MATRIX:
            assert matmul3(m, matmul3(m, m)) == IDENTITY3
            return g
    raise AssertionError("no sign assignment reproduces the sigma matrix")


def build_quarter_generator() -> Automorphism:
    """Extra generator of S4: the torus quarter phase (V_1 matrix of order 4)."""
    return Automorphism((TorusPhase(Fraction(1, 4)),), "rho")


def group_elements(ctx: LatticeContext, generators: Sequence[Automorphism],
                   bound: int = 200) -> list[GroupElement]:
    """Closure of the generators, with equality decided by V_1 matrices."""
    gens = [GroupElement(v1_matrix(ctx, g), g) for g in generators]
    elements = {IDENTITY3: GroupElement(IDENTITY3, Automorphism())}
    frontier = list(elements.values())
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                m = matmul3(g.matrix3, e.matrix3)
                if m not in elements:
                    el = GroupElement(m, g.word.compose(e.word))
                    elements[m] = el
                    nxt.append(el)
                    if len(elements) > bound:
                        raise ClosureError(f"group closure exceeded {bound} elements")
        frontier = nxt
    return list(elements.values())


def named_group(ctx: LatticeContext, name: str) -> list[GroupElement]:
    taus = [build_tau(1), build_tau(2)]
    if name in ("trivial", "1"):
        return group_elements(ctx, [])
    if name in ("k4", "K"):
        return group_elements(ctx, taus)
    if name in ("a4", "A4"):
        return group_elements(ctx, taus + [build_sigma(ctx)])
    if name in ("s4", "S4"):
        return group_elements(ctx, taus + [build_sigma(ctx), build_quarter_generator()])
    raise ValueError(f"unknown group {name!r}; expected trivial, k4, a4 or s4")


# -- dense action on blocks of column vectors ------------------------------------

class QiBlock:
    """Columns re + i*im with re, im FLINT rational matrices over a fixed basis."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        self.re = re
        self.im = im if im is not None else flint.fmpq_mat(re.nrows(), re.ncols())

    def __add__(self, other):
        return QiBlock(self.re + other.re, self.im + other.im)

    def scale(self, c: Scalar) -> QiBlock:
        if any(c.coords[j] for j in (1, 2, 3, 5, 6, 7)):
            raise UnsupportedPhaseError("dense blocks carry Q(i) scalars only")
        a, b = to_fmpq(c.coords[0]), to_fmpq(c.coords[4])
        return QiBlock(self.re * a - self.im * b, self.re * b + self.im * a)

    def left(self, mat) -> QiBlock:
        return QiBlock(mat * self.re, mat * self.im)

    def is_real(self) -> bool:
        return self.im == flint.fmpq_mat(self.im.nrows(), self.im.ncols())


@lru_cache(maxsize=64)
def _zero_mode_matrix(k: int, n: int, axis: int):
    ctx = LatticeContext(2 * k, n)
    basis = enumerate_basis(ctx, n)
    index = {m: i for i, m in enumerate(basis)}
    cols = [_apply_b(ctx, axis, {m: mpq(1)}) for m in basis]
    return column_matrix(cols, index)


def _monomial_block(ctx, prim, basis, block: QiBlock) -> QiBlock:
    """Theta or a Q(i) torus phase applied to a block, as row operations."""
    rows, cols = block.re.nrows(), block.re.ncols()
    re, im = block.re.entries(), block.im.entries()
    new_re = [0] * (rows * cols)
    new_im = [0] * (rows * cols)
    index = {m: i for i, m in enumerate(basis)}
    for i, (p, m) in enumerate(basis):
        if isinstance(prim, Theta):
            t = index[Monomial(p, -m)]
            s = -1 if len(p) % 2 else 1
            a, b = s, 0
        else:
            t = i
            ph = torus_phase(prim.r, m)
            if any(ph.coords[j] for j in (1, 2, 3, 5, 6, 7)):
                raise UnsupportedPhaseError(f"phase for {prim} leaves Q(i)")
            a, b = to_fmpq(ph.coords[0]), to_fmpq(ph.coords[4])
        for c in range(cols):
            x, y = re[i * cols + c], im[i * cols + c]
            new_re[t * cols + c] = a * x - b * y
            new_im[t * cols + c] = a * y + b * x
    return QiBlock(flint.fmpq_mat(rows, cols, new_re), flint.fmpq_mat(rows, cols, new_im))


def apply_word_block(ctx: LatticeContext, word: Sequence, n: int, block: QiBlock) -> QiBlock:
    basis = enumerate_basis(ctx, n)
    for prim in reversed(list(word)):
        if isinstance(prim, QuarterTurn):
            B = _zero_mode_matrix(ctx.k, n, prim.axis)
            coeffs = quarter_turn_coefficients(spectral_bound(ctx, n), prim.axis, prim.sign)
            power, acc = block, None
            for e, c in enumerate(coeffs):
                if e:
                    power = power.left(B)
                if c:
                    term = power.scale(c)
                    acc = term if acc is None else acc + term
            block = acc
        else:
            block = _monomial_block(ctx, prim, basis, block)
    return block


# -- invariants --------------------------------------------------------------------

def k_invariant_basis(ctx: LatticeContext, n: int) -> list[dict]:
    """Rational basis of the weight-n fixed points of <tau1, theta>: m even, theta-symmetric."""
    out = []
    for p, m in enumerate_basis(ctx, n):
        if m % 2 or m < 0:
            continue
        s = -1 if len(p) % 2 else 1
        if m == 0:
            if s == 1:
                out.append({Monomial(p, 0): mpq(1)})
        else:
            out.append({Monomial(p, m): mpq(1), Monomial(p, -m): mpq(s)})
    return out


def _contains_k(group: Sequence[GroupElement]) -> bool:
    mats = {g.matrix3 for g in group}
    return TAU_MATRICES[1] in mats and TAU_MATRICES[2] in mats and len(group) % 4 == 0


def coset_representatives(group, sub_matrices) -> list[GroupElement]:
    """One element of shortest word per left coset gH."""
    seen, reps = set(), []
    for g in sorted(group, key=lambda g: len(g.word.word)):
        key = frozenset(matmul3(g.matrix3, k) for k in sub_matrices)
        if key not in seen:
            seen.add(key)
            reps.append(g)
    return reps


def _block_columns_to_states(block: QiBlock, basis) -> list[State]:
    """An independent (over Q(i)) set of columns of the block, as States."""
    re_cols = matrix_columns(block.re, basis)
    if block.is_real():
        keep = independent_subset(re_cols)
        return [State({0: re_cols[j]}) for j in keep]
    im_cols = matrix_columns(block.im, basis)
    # Q-embedding: column c and i*c; a column survives iff its first copy is a pivot
    embedded = []
    for r, i in zip(re_cols, im_cols):
        embedded.append({**{(0, k): x for k, x in r.items()}, **{(1, k): x for k, x in i.items()}})
        embedded.append({**{(0, k): -x for k, x in i.items()}, **{(1, k): x for k, x in r.items()}})
    pivots = set(independent_subset(embedded))
    return [State({0: re_cols[j], 4: im_cols[j]}) for j in range(len(re_cols)) if 2 * j in pivots]


def _sparse_reynolds(ctx, group, basis_states: list[State]) -> list[State]:
    avg = []
    scale = mpq(1, len(group))
    for v in basis_states:
        acc = State()
        for g in group:
            acc = acc + g.word(ctx, v)
        avg.append(acc.scale(scale))
    # pick states independent over the scalar field
    expanded = [v for s in avg for v in expand_field(s)]
    pivots = set(independent_subset(expanded))
    return [avg[j] for j in range(len(avg)) if 8 * j in pivots]


def invariant_subspace(ctx: LatticeContext, group: Sequence[GroupElement], n: int) -> list[State]:
    """Basis of the weight-n fixed points of the group (Reynolds operator + reduction).

    When the group contains K = <tau1, theta> the average runs in two stages:
    K-invariants are orbit sums of monomials, then the remaining coset
    representatives are averaged.
    """
    ctx.check_weight(n)
    basis = enumerate_basis(ctx, n)
    if _contains_k(group):
        start = k_invariant_basis(ctx, n)
        reps = coset_representatives(group, K_MATRICES)
    else:
        start = [{m: mpq(1)} for m in basis]
        reps = list(group)
    if not start:
        return []
    if len(reps) == 1:
        keep = independent_subset(start)
        return [State({0: start[j]}) for j in keep]
    index = {m: i for i, m in enumerate(basis)}
    try:
        block0 = QiBlock(column_matrix(start, index))
        total = None
        for g in reps:
            img = apply_word_block(ctx, g.word.word, n, block0)
            total = img if total is None else total + img
        total = total.scale(Scalar.rational(mpq(1, len(reps))))
        return _block_columns_to_states(total, basis)
    except UnsupportedPhaseError:
        states = [State({0: v}) for v in start]
        return _sparse_reynolds(ctx, reps, states)


def invariant_dimension(ctx: LatticeContext, group, n: int) -> int:
    return len(invariant_subspace(ctx, group, n))


def reynolds(ctx: LatticeContext, group: Sequence[GroupElement], v: State) -> State:
    """(1/|G|) sum_g g(v), applied sparsely."""
    acc = State()
    for g in group:
        acc = acc + g.word(ctx, v)
    return acc.scale(mpq(1, len(group)))


__all__ = [
    "Theta", "TorusPhase", "QuarterTurn", "Automorphism", "GroupElement",
    "apply_theta", "apply_torus", "apply_quarter_turn", "build_tau", "build_sigma",
    "group_elements", "named_group", "invariant_subspace", "k_invariant_basis",
    "v1_matrix", "reynolds", "UnsupportedPhaseError", "ClosureError",
    "coset_representatives", "K_MATRICES", "TAU_MATRICES", "SIGMA_MATRIX", "IDENTITY3",
    "QiBlock", "apply_word_block", "matmul3", "build_quarter_generator", "IDENTITY",
]
