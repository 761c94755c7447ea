import random

import pytest

from latvoa.fock import LatticeContext, State
from latvoa.symmetry import invariant_subspace, k_invariant_basis
from latvoa.vertex import virasoro_word
from latvoa.virasoro import (
    DecompositionError, allowed_blocks, decompose, find_primaries, fusion_check, is_primary,
    isotypic_components, k_table, project, vacuum_table,
)


def test_k_primaries_weight4(ctx, nv):
    basis = [State({0: v}) for v in k_invariant_basis(ctx, 4)]
    prim = find_primaries(ctx, basis, 4)
    assert len(prim) == 2
    from latvoa.virasoro import field_independent

    assert len(field_independent(prim + [nv["J"], nv["E"]])) == 2


def test_a4_primaries_low_weights(ctx, a4, nv):
    for n in range(1, 9):
        assert find_primaries(ctx, invariant_subspace(ctx, a4, n), n) == []
    p9 = find_primaries(ctx, invariant_subspace(ctx, a4, 9), 9)
    assert len(p9) == 1
    from latvoa.virasoro import field_independent

    assert len(field_independent(p9 + [nv["u9"]])) == 1
    assert is_primary(ctx, nv["u9"])


def test_find_primaries_over_the_field(ctx, nv):
    prim = find_primaries(ctx, [nv["X1"], nv["X2"], virasoro_word(ctx, [-4], State.vacuum())], 4)
    assert len(prim) == 2


def test_vacuum_module():
    ctx = LatticeContext(2, 10)
    vac = lambda n: [s for s in [virasoro_word(ctx, w, State.vacuum()) for w in _words(n)] if not s.is_zero()]
    table = decompose(ctx, lambda n: _independent(vac(n)), 10)
    assert [(e.h, e.multiplicity) for e in table.entries] == [(0, 1)]
    assert table.is_consistent()


def _words(n):
    from latvoa.virasoro import descendant_words

    return descendant_words(n)


def _independent(states):
    from latvoa.virasoro import field_independent

    return [states[j] for j in field_independent(states)] if states else []


def test_decompose_detects_missing_vectors():
    ctx = LatticeContext(2, 6)
    # a subspace that is not Virasoro-closed: the vacuum alone
    with pytest.raises(DecompositionError):
        decompose(ctx, lambda n: [State.vacuum()] if n == 0 else [], 3)


def test_projection_examples(ctx, nv):
    table = k_table(ctx, 12)
    l2 = virasoro_word(ctx, [-2], State.vacuum())
    assert project(ctx, l2, 9, table).is_zero()
    assert project(ctx, l2, 0, table) == l2
    assert project(ctx, nv["u9"], 9, table) == nv["u9"]
    assert project(ctx, nv["J"], 4, table) == nv["J"]


def test_projection_completeness(ctx):
    table = k_table(ctx, 12)
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randrange(0, 13)
        basis = k_invariant_basis(ctx, n)
        if not basis:
            continue
        v = State()
        for b in rng.sample(basis, min(3, len(basis))):
            v = v + State({0: b}).scale(rng.randint(-5, 5))
        comps = isotypic_components(ctx, v, table)
        total = State()
        for h, c in comps.items():
            total = total + c
            assert project(ctx, c, h, table) == c
        assert total == v


def test_fusion(ctx, nv):
    assert allowed_blocks(3, 3, 17) == {0, 1, 4, 9, 16}
    assert 0 not in allowed_blocks(4, 3, 100)
    table = k_table(ctx, 12)
    with pytest.raises(ValueError):
        fusion_check(ctx, virasoro_word(ctx, [-2], State.vacuum()), nv["u9"], table)
