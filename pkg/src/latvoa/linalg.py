"""Exact linear algebra over Q for sparse vectors keyed by basis monomials.

Large eliminations are delegated to FLINT (``fmpq_mat`` / ``fmpz_mat``);
small incremental spans use a plain sparse echelon form.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import flint
from gmpy2 import mpq

from latvoa.fock import State, vec_add
from latvoa.scalars import MUL_TABLE, Scalar, ZERO_Q


class LinearAlgebraError(ArithmeticError):
    pass


def to_fmpq(x) -> flint.fmpq:
    return flint.fmpq(int(x.numerator), int(x.denominator))


def from_fmpq(x) -> mpq:
    return mpq(int(x.p), int(x.q))


def column_matrix(vectors: Sequence[dict], index: dict) -> flint.fmpq_mat:
    """Matrix whose j-th column is vectors[j] in the coordinates given by index."""
    rows, cols = len(index), len(vectors)
    ent = [0] * (rows * cols)
    for j, vec in enumerate(vectors):
        for key, x in vec.items():
            ent[index[key] * cols + j] = to_fmpq(x)
    return flint.fmpq_mat(rows, cols, ent)


def index_of(vectors: Iterable[dict]) -> dict:
    keys = set()
    for v in vectors:
        keys.update(v)
    return {k: i for i, k in enumerate(sorted(keys))}


def matrix_columns(mat, keys: Sequence) -> list[dict]:
    """Inverse of column_matrix: columns of an fmpq/fmpz matrix as sparse dicts."""
    out = []
    rows = mat.nrows()
    entries = mat.entries()
    cols = mat.ncols()
    for j in range(cols):
        vec = {}
        for i in range(rows):
            x = entries[i * cols + j]
            if x:
                vec[keys[i]] = from_fmpq(x) if isinstance(x, flint.fmpq) else mpq(int(x))
        out.append(vec)
    return out


def rank(vectors: Sequence[dict]) -> int:
    if not vectors:
        return 0
    idx = index_of(vectors)
    if not idx:
        return 0
    return column_matrix(vectors, idx).rank()


def nullspace_of_columns(columns: Sequence[dict]) -> list[list[mpq]]:
    """Basis of {c : sum_j c_j columns[j] = 0}, as coefficient lists."""
    n = len(columns)
    if n == 0:
        return []
    idx = index_of(columns)
    if not idx:
        return [[mpq(int(i == j)) for i in range(n)] for j in range(n)]
    mat = column_matrix(columns, idx)
    num, _ = mat.numer_denom()
    null, nullity = num.nullspace()
    out = []
    ent = null.entries()
    for c in range(nullity):
        vec = [mpq(int(ent[r * n + c])) for r in range(n)]
        g = next(x for x in vec if x)
        out.append([x / abs(g) for x in vec])
    return out


def combine(coeffs: Sequence, vectors: Sequence[dict]) -> dict:
    out: dict = {}
    for c, v in zip(coeffs, vectors):
        if c:
            vec_add(out, v, c)
    return out


def kernel_on_span(basis: Sequence[dict], linear_map: Callable[[dict], dict]) -> list[dict]:
    """Kernel of linear_map restricted to span(basis) (basis assumed independent)."""
    images = [linear_map(v) for v in basis]
    return [combine(c, basis) for c in nullspace_of_columns(images)]


def independent_subset(vectors: Sequence[dict]) -> list[int]:
    """Indices of a maximal independent subset (pivot columns, leftmost first)."""
    if not vectors:
        return []
    idx = index_of(vectors)
    if not idx:
        return []
    mat = column_matrix(vectors, idx)
    num, _ = mat.numer_denom()
    red, _den, r = num.rref()
    ent = red.entries()
    cols = len(vectors)
    pivots = []
    row = 0
    for j in range(cols):
        if row < r and ent[row * cols + j]:
            pivots.append(j)
            row += 1
    return pivots


def solve_in_span(basis: Sequence[dict], targets: Sequence[dict]) -> list[list[mpq]]:
    """Coordinates of each target in the independent family basis; raises if outside."""
    allvecs = list(basis) + list(targets)
    idx = index_of(allvecs)
    if not targets:
        return []
    r = len(basis)
    if not idx:
        return [[ZERO_Q] * r for _ in targets]
    mat = column_matrix(allvecs, idx)
    red, rk = mat.rref()
    if rk != r:
        raise LinearAlgebraError("target outside the span of the basis (or basis dependent)")
    cols = len(allvecs)
    ent = red.entries()
    out = []
    for t in range(len(targets)):
        out.append([from_fmpq(ent[i * cols + r + t]) for i in range(r)])
    return out


class Span:
    """Incremental sparse echelon basis over Q."""

    def __init__(self):
        self.pivots: list[tuple] = []
        self.rows: list[dict] = []
        self.originals: list[dict] = []

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        v = dict(vec)
        for key, row in zip(self.pivots, self.rows):
            c = v.get(key)
            if c:
                vec_add(v, row, -c)
        return v

    def add(self, vec: dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        key = min(v)
        c = v[key]
        self.pivots.append(key)
        self.rows.append({k: x / c for k, x in v.items()})
        self.originals.append(vec)
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


# -- states over the scalar field ----------------------------------------------

def expand_field(state: State) -> list[dict]:
    """Q-vectors e_j * state (j = 0..7) keyed by (direction, monomial).

    The Q-span of these is the Q(i, sqrt2, sqrt3)-line through state.
    """
    out = []
    for j in range(8):
        vec: dict = {}
        for k, part in state.parts.items():
            idx, f = MUL_TABLE[j][k]
            for mono, x in part.items():
                vec[(idx, mono)] = f * x
        out.append(vec)
    return out


def field_rank(states: Sequence[State]) -> int:
    """Dimension over Q(i, sqrt2, sqrt3) of the span of states."""
    if all(s.is_rational() for s in states):
        return rank([s.parts.get(0, {}) for s in states])
    vecs = [v for s in states for v in expand_field(s)]
    r = rank(vecs)
    assert r % 8 == 0
    return r // 8


def rationalize(states: Sequence[State]) -> list[dict] | None:
    """Rational representatives of states that are field multiples of rational vectors."""
    out = []
    for s in states:
        if s.is_zero():
            out.append({})
            continue
        pair = s.as_rational_multiple()
        if pair is None:
            return None
        out.append(pair[1])
    return out


def as_state(vec: dict) -> State:
    return State({0: vec})


def field_scalar_to_state(c: Scalar, vec: dict) -> State:
    return as_state(vec).scale(c)
