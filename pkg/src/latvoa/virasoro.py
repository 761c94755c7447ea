"""Virasoro primaries, isotypic decomposition and projections (c = 1).

A subspace closed under the Virasoro algebra splits as a direct sum of
L(1, h) modules.  Primaries are the joint kernel of L(1) and L(2); the
L(1, h)-block at weight n is spanned by PBW descendants
L(-m_s)...L(-m_1) p with m_s >= ... >= m_1 of the primaries p of weight h.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt
from typing import Callable, Sequence

from gmpy2 import mpq

from latvoa.fock import LatticeContext, State, partitions
from latvoa.linalg import (
    LinearAlgebraError,
    expand_field,
    independent_subset,
    nullspace_of_columns,
    solve_in_span,
)
from latvoa.qseries import extract_multiplicities, subspace_character, virasoro_character
from latvoa.scalars import Scalar
from latvoa.vertex import mode_action, rational_virasoro, virasoro_word


class DecompositionError(ArithmeticError):
    """Descendant counts disagree with the subspace (an engine inconsistency)."""


# -- helpers over the scalar field ----------------------------------------------


def _unflatten(vec: dict) -> State:
    parts: dict[int, dict] = {}
    for (j, m), x in vec.items():
        parts.setdefault(j, {})[m] = x
    return State(parts)


def field_independent(states: Sequence[State]) -> list[int]:
    """Indices of a maximal subfamily independent over Q(i, sqrt2, sqrt3)."""
    if all(s.is_rational() for s in states):
        return independent_subset([s.parts.get(0, {}) for s in states])
    expanded = [v for s in states for v in expand_field(s)]
    pivots = set(independent_subset(expanded))
    return [j for j in range(len(states)) if 8 * j in pivots]


def _stack_l1_l2(ctx: LatticeContext, vec: dict) -> dict:
    out = {}
    for tag, n in ((1, 1), (2, 2)):
        for k, x in rational_virasoro(ctx.norm, n, vec).items():
            out[(tag, k)] = x
    return out


# -- primaries -------------------------------------------------------------------

def find_primaries(ctx: LatticeContext, subspace_basis: Sequence[State], n: int) -> list[State]:
    """Basis of {v in span : L(1)v = L(2)v = 0} for a weight-n family."""
    basis = [s for s in subspace_basis if not s.is_zero()]
    if not basis:
        return []
    for s in basis:
        if s.weights(ctx) != {n}:
            raise ValueError(f"subspace vector is not homogeneous of weight {n}")
    if all(s.is_rational() for s in basis):
        vecs = [s.parts.get(0, {}) for s in basis]
        keep = independent_subset(vecs)
        vecs = [vecs[j] for j in keep]
        images = [_stack_l1_l2(ctx, v) for v in vecs]
        out = []
        for coeffs in nullspace_of_columns(images):
            acc: dict = {}
            for c, v in zip(coeffs, vecs):
                if c:
                    for k, x in v.items():
                        y = acc.get(k, 0) + c * x
                        if y:
                            acc[k] = y
                        else:
                            acc.pop(k)
            out.append(State({0: acc}))
        return out
    # general scalars: work on the Q-span of the field lines, then reduce
    qvecs = [v for s in basis for v in expand_field(s)]
    keep = independent_subset(qvecs)
    qvecs = [qvecs[j] for j in keep]

    def lmap(vec):
        out = {}
        for j_m, x in vec.items():
            j, m = j_m
            for tag, nn in ((1, 1), (2, 2)):
                for k, y in rational_virasoro(ctx.norm, nn, {m: x}).items():
                    key = (tag, j, k)
                    out[key] = out.get(key, 0) + y
        return {k: x for k, x in out.items() if x}

    kernel = []
    for coeffs in nullspace_of_columns([lmap(v) for v in qvecs]):
        acc: dict = {}
        for c, v in zip(coeffs, qvecs):
            if c:
                for k, x in v.items():
                    acc[k] = acc.get(k, 0) + c * x
        kernel.append(_unflatten({k: x for k, x in acc.items() if x}))
    return [kernel[j] for j in field_independent(kernel)]


def is_primary(ctx: LatticeContext, v: State) -> bool:
    return all(v.map_rational(lambda vec: rational_virasoro(ctx.norm, n, vec)).is_zero()
               for n in (1, 2))


# -- descendants -------------------------------------------------------------------

def descendant_words(level: int) -> tuple[tuple[int, ...], ...]:
    """PBW words (m_s >= ... >= m_1 >= 1) of total level, as negated mode lists."""
    return tuple(tuple(-m for m in p) for p in partitions(level))


def descendants(ctx: LatticeContext, p: State, level: int) -> list[State]:
    """Independent PBW descendants of p at the given level."""
    vecs = [virasoro_word(ctx, w, p) for w in descendant_words(level)]
    vecs = [v for v in vecs if not v.is_zero()]
    return [vecs[j] for j in field_independent(vecs)] if vecs else []


# -- decomposition -------------------------------------------------------------------

@dataclass
class DecompositionEntry:
    h: int
    multiplicity: int
    primary_basis: list = field(default_factory=list)


@dataclass
class DecompositionTable:
    entries: list[DecompositionEntry]
    range: int
    dims: list[int] = field(default_factory=list)

    def multiplicity(self, h: int) -> int:
        return sum(e.multiplicity for e in self.entries if e.h == h)

    def square_multiplicities(self) -> list[tuple[int, int]]:
        """[(n, a_n)] for every n with n^2 <= range."""
        return [(n, self.multiplicity(n * n)) for n in range(isqrt(self.range) + 1)]

    def primaries(self, h: int) -> list[State]:
        return [p for e in self.entries if e.h == h for p in e.primary_basis]

    def character_dims(self) -> list[int]:
        """sum_h mult_h * dim L(1, h)_n for n <= range."""
        out = [0] * (self.range + 1)
        for e in self.entries:
            ch = virasoro_character(e.h, self.range)
            for n in range(self.range + 1):
                out[n] += e.multiplicity * int(ch[n])
        return out

    def is_consistent(self) -> bool:
        return not self.dims or self.character_dims() == self.dims[: self.range + 1]

    def to_json(self, ctx: LatticeContext | None = None, with_basis: bool = False) -> dict:
        rows = []
        for e in self.entries:
            row = {"h": e.h, "multiplicity": e.multiplicity}
            if isqrt(e.h) ** 2 == e.h:
                row["n"] = isqrt(e.h)
                row["a"] = e.multiplicity
            if with_basis and ctx is not None:
                row["primary_basis"] = [p.to_json(ctx) for p in e.primary_basis]
            rows.append(row)
        return {"range": self.range, "entries": rows, "dims": self.dims}


def decompose(ctx: LatticeContext, subspace: Callable[[int], Sequence[State]], up_to: int) -> DecompositionTable:
    """Isotypic decomposition of a Virasoro-closed subspace through weight up_to.

    At each weight the descendants of the primaries found so far are counted
    by rank; the remaining dimension must be filled by new primaries.
    """
    ctx.check_weight(up_to)
    entries: list[DecompositionEntry] = []
    dims = []
    for n in range(up_to + 1):
        basis = list(subspace(n))
        dim = len(basis)
        dims.append(dim)
        desc = []
        for e in entries:
            for p in e.primary_basis:
                desc += descendants(ctx, p, n - e.h)
        drank = len(field_independent(desc)) if desc else 0
        expected = sum(e.multiplicity * int(virasoro_character(e.h, up_to)[n]) for e in entries)
        if drank != expected:
            raise DecompositionError(
                f"weight {n}: descendant rank {drank} differs from character count {expected}")
        prim = find_primaries(ctx, basis, n) if dim else []
        if drank + len(prim) != dim:
            raise DecompositionError(
                f"weight {n}: {dim} = {drank} descendants + {len(prim)} primaries fails")
        if prim:
            entries.append(DecompositionEntry(n, len(prim), prim))
    return DecompositionTable(entries, up_to, dims)


def vacuum_table(ctx: LatticeContext, up_to: int) -> DecompositionTable:
    return DecompositionTable([DecompositionEntry(0, 1, [State.vacuum()])], up_to)


# -- orbifold tables -------------------------------------------------------------------

def k_invariant_dims(ctx: LatticeContext, N: int) -> list[int]:
    from latvoa.symmetry import k_invariant_basis

    return [len(k_invariant_basis(ctx, n)) for n in range(N + 1)]


def k_primaries(ctx: LatticeContext, n: int) -> list[State]:
    """Primaries of the K-fixed subalgebra at weight n (kernel on the orbit-sum basis)."""
    from latvoa.symmetry import k_invariant_basis

    return find_primaries(ctx, [State({0: v}) for v in k_invariant_basis(ctx, n)], n)


def decompose_orbifold(ctx: LatticeContext, group, up_to: int, dense_limit: int = 20,
                       base: DecompositionTable | None = None) -> DecompositionTable:
    """Decomposition of V^G through up_to.

    Up to dense_limit the invariant subspaces are built directly.  Beyond it
    (only for groups containing K) the K-fixed primaries at square weights
    are computed first and averaged over G/K.  A previously computed table
    for the same group may be passed as base; it then replaces the dense stage.
    """
    from latvoa.symmetry import K_MATRICES, _contains_k, coset_representatives, invariant_subspace, reynolds

    if base is not None:
        dense_top = base.range
        table = DecompositionTable([DecompositionEntry(e.h, e.multiplicity, list(e.primary_basis))
                                    for e in base.entries], base.range, list(base.dims))
    else:
        dense_top = min(up_to, dense_limit)
        table = decompose(ctx, lambda n: invariant_subspace(ctx, group, n), dense_top)
    if up_to <= dense_top:
        return table
    if not _contains_k(group):
        raise DecompositionError("weights past the dense limit need a group containing K")
    kchar = subspace_character(k_invariant_dims(ctx, up_to))
    kmult = dict(extract_multiplicities(kchar, up_to))
    for n in range(dense_top + 1, up_to + 1):
        r = isqrt(n)
        if r * r != n:
            continue
        kp = k_primaries(ctx, n)
        if len(kp) != kmult[r]:
            raise DecompositionError(
                f"weight {n}: {len(kp)} K-primaries but the K character needs {kmult[r]}")
        reps = coset_representatives(group, K_MATRICES)
        avg = [reynolds(ctx, reps, p) for p in kp]
        avg = [v for v in avg if not v.is_zero()]
        keep = field_independent(avg) if avg else []
        table.entries.append(DecompositionEntry(n, len(keep), [avg[j] for j in keep]))
    table.range = up_to
    return table


# -- projections -------------------------------------------------------------------

def _blocks_at(ctx: LatticeContext, table: DecompositionTable, n: int) -> list[tuple[int, list[State]]]:
    out = []
    for e in table.entries:
        if e.h > n:
            continue
        vecs = []
        for p in e.primary_basis:
            vecs += descendants(ctx, p, n - e.h)
        if vecs:
            out.append((e.h, vecs))
    return out


def isotypic_components(ctx: LatticeContext, v: State, table: DecompositionTable) -> dict[int, State]:
    """Split v into its L(1, h)-block components (keys h with nonzero part)."""
    out: dict[int, State] = {}
    for n in sorted(v.weights(ctx)):
        if n > table.range:
            raise DecompositionError(f"weight {n} lies beyond the analyzed range {table.range}")
        piece = v.project_weight(ctx, n)
        blocks = _blocks_at(ctx, table, n)
        flat = [(h, s) for h, vecs in blocks for s in vecs]
        if not flat:
            raise DecompositionError(f"no descendants span weight {n}")
        basis_states = [s for _, s in flat]
        if not all(s.is_rational() for s in basis_states):
            raise DecompositionError("projection needs rational descendant bases")
        vecs = [s.parts.get(0, {}) for s in basis_states]
        keep = independent_subset(vecs)
        vecs = [vecs[j] for j in keep]
        hs = [flat[j][0] for j in keep]
        for j, part in piece.parts.items():
            try:
                (coeffs,) = solve_in_span(vecs, [part])
            except LinearAlgebraError as exc:
                raise DecompositionError(f"weight {n}: vector outside the descendant span") from exc
            for h in set(hs):
                acc: dict = {}
                for c, hh, vec in zip(coeffs, hs, vecs):
                    if hh == h and c:
                        for k, x in vec.items():
                            y = acc.get(k, 0) + c * x
                            if y:
                                acc[k] = y
                            else:
                                acc.pop(k)
                if acc:
                    comp = State({0: acc}).scale(Scalar.basis(j))
                    out[h] = out.get(h, State()) + comp
    return {h: s for h, s in out.items() if not s.is_zero()}


def project(ctx: LatticeContext, v: State, h: int, table: DecompositionTable) -> State:
    """Component of v in the L(1, h)-isotypic summand."""
    return isotypic_components(ctx, v, table).get(h, State())


@lru_cache(maxsize=None)
def _k_table(k: int, top: int) -> DecompositionTable:
    ctx = LatticeContext(2 * k, top)
    from latvoa.symmetry import k_invariant_basis

    return decompose(ctx, lambda n: [State({0: b}) for b in k_invariant_basis(ctx, n)], top)


def k_table(ctx: LatticeContext, top: int) -> DecompositionTable:
    """Decomposition of the K-fixed subalgebra through weight top (cached)."""
    return _k_table(ctx.k, top)


def project_in_v_k(ctx: LatticeContext, v: State, h: int) -> State:
    """L(1, h)-component of a vector of the K-fixed subalgebra."""
    top = max(v.weights(ctx), default=0)
    return project(ctx, v, h, k_table(ctx, top))


# -- fusion constraint -------------------------------------------------------------------

def allowed_blocks(m: int, n: int, top: int) -> set[int]:
    """Squares k^2 with |n - m| <= k <= n + m."""
    return {k * k for k in range(abs(n - m), n + m + 1) if k * k <= top}


@dataclass
class FusionReport:
    allowed: set
    support: dict  # mode index -> sorted list of blocks h with nonzero component
    violations: list  # (mode index, h)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"allowed": sorted(self.allowed),
                "support": {str(k): v for k, v in sorted(self.support.items())},
                "violations": [list(v) for v in self.violations]}


def fusion_check(ctx: LatticeContext, u: State, v: State, table: DecompositionTable) -> FusionReport:
    """Block support of u_j v for every mode j with output weight within the table range."""
    wu, wv = u.weight(ctx), v.weight(ctx)
    m, n = isqrt(wu), isqrt(wv)
    if m * m != wu or n * n != wv or not is_primary(ctx, u) or not is_primary(ctx, v):
        raise ValueError("fusion check needs primaries of square weight")
    allowed = allowed_blocks(m, n, table.range)
    support, violations = {}, []
    for j in range(wu + wv - 1 - min(table.range, ctx.truncation), wu + wv):
        prod = mode_action(ctx, u, j, v)
        if prod.is_zero():
            continue
        comps = isotypic_components(ctx, prod, table)
        support[j] = sorted(comps)
        violations += [(j, h) for h in comps if h not in allowed]
    return FusionReport(allowed, support, violations)


__all__ = [
    "find_primaries", "is_primary", "descendants", "DecompositionTable", "DecompositionEntry",
    "decompose", "decompose_orbifold", "project", "project_in_v_k", "isotypic_components",
    "fusion_check", "FusionReport", "DecompositionError", "k_table", "vacuum_table",
    "k_primaries", "k_invariant_dims", "field_independent", "allowed_blocks",
]
