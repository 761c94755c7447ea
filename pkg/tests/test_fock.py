from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latvoa.fock import (
    LatticeContext, Monomial, State, TruncationError, bilinear_form, enumerate_basis,
    graded_dimension, partitions,
)
from latvoa.scalars import Scalar
from latvoa.vertex import mode_action, omega, virasoro_mode


def test_partitions():
    assert partitions(4) == ((1, 1, 1, 1), (2, 1, 1), (2, 2), (3, 1), (4,))
    assert len(partitions(10)) == 42


def test_graded_dimensions():
    ctx = LatticeContext(2, 20)
    assert [graded_dimension(ctx, n) for n in range(6)] == [1, 3, 4, 7, 13, 19]
    assert graded_dimension(LatticeContext(8, 10), 4) == 7
    assert [len(enumerate_basis(ctx, n)) for n in range(6)] == [1, 3, 4, 7, 13, 19]
    assert enumerate_basis(ctx, 1) == [Monomial((1,), 0), Monomial((), 1), Monomial((), -1)]


def test_context_validation():
    with pytest.raises(ValueError):
        LatticeContext(3)
    with pytest.raises(ValueError):
        LatticeContext(2, -1)
    with pytest.raises(TruncationError):
        enumerate_basis(LatticeContext(2, 5), 6)


def test_state_roundtrip():
    ctx = LatticeContext(2, 10)
    s = State.monomial((2, 1), -1, Scalar.basis(5, Fraction(3, 7))) + State.monomial((), 2, 5)
    assert State.from_json(s.to_json(ctx)) == s
    assert s.weights(ctx) == {4}
    assert (s - s).is_zero()


def test_form_values():
    ctx = LatticeContext(2, 10)
    one = State.vacuum()
    a = State.monomial((1,), 0)
    assert bilinear_form(ctx, one, one) == 1
    # alpha(n) has adjoint -alpha(-n), so the weight-one Heisenberg vector has negative norm
    assert bilinear_form(ctx, a, a) == -2
    w = omega(ctx)
    assert bilinear_form(ctx, w, w) == Fraction(1, 2)
    e, f = State.monomial((), 1), State.monomial((), -1)
    assert bilinear_form(ctx, e, f) == -1


small_monos = st.sampled_from([m for n in range(4) for m in enumerate_basis(LatticeContext(2, 10), n)])


def random_state(draw_terms):
    s = State()
    for mono, c in draw_terms:
        s = s + State.monomial(mono.partition, mono.exponent, c)
    return s


states = st.lists(st.tuples(small_monos, st.integers(-3, 3)), min_size=1, max_size=4).map(random_state)


@settings(max_examples=30, deadline=None)
@given(states, states, st.integers(-3, 3))
def test_form_adjoint_laws(u, v, n):
    ctx = LatticeContext(2, 12)
    # weight-one primaries: (a_n u, v) = -(u, a_{-n} v)
    for a in (State.monomial((1,), 0), State.monomial((), 1), State.monomial((), -1)):
        lhs = bilinear_form(ctx, mode_action(ctx, a, n, u), v)
        rhs = -bilinear_form(ctx, u, mode_action(ctx, a, -n, v))
        assert lhs == rhs
    # (L(n) u, v) = (u, L(-n) v)
    assert bilinear_form(ctx, virasoro_mode(ctx, n, u), v) == bilinear_form(ctx, u, virasoro_mode(ctx, -n, v))


@settings(max_examples=30, deadline=None)
@given(states, states)
def test_form_symmetric(u, v):
    ctx = LatticeContext(2, 12)
    assert bilinear_form(ctx, u, v) == bilinear_form(ctx, v, u)
