from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latvoa.fock import LatticeContext, State, TruncationError, enumerate_basis
from latvoa.vertex import iterated_modes, mode_action, omega, virasoro_mode, virasoro_word

CTX = LatticeContext(2, 14)
MONOS = [m for n in range(4) for m in enumerate_basis(CTX, n)]
monos = st.sampled_from(MONOS)


def mono_state(m, c=1):
    return State.monomial(m.partition, m.exponent, c)


def test_lattice_products():
    e, f = State.monomial((), 1), State.monomial((), -1)
    assert mode_action(CTX, e, 1, f) == State.vacuum()
    assert mode_action(CTX, e, 0, f) == State.monomial((1,), 0)
    assert mode_action(CTX, State.vacuum(), -1, e) == e


def test_omega_and_virasoro(nv):
    ctx = nv.ctx
    J = nv["J"]
    assert mode_action(ctx, omega(ctx), 1, J) == J.scale(4)
    assert virasoro_mode(ctx, 1, J).is_zero() and virasoro_mode(ctx, 2, J).is_zero()


@pytest.mark.parametrize("n", range(-3, 4))
def test_sugawara_matches_omega_modes(n, nv):
    ctx = nv.ctx
    w = omega(ctx)
    for v in (nv["J"], nv["E"], State.monomial((2, 1), 1), nv["x3"]):
        assert virasoro_mode(ctx, n, v) == mode_action(ctx, w, n + 1, v)


def test_truncation_guard():
    ctx = LatticeContext(2, 5)
    with pytest.raises(TruncationError):
        mode_action(ctx, State.monomial((2, 1), 0), -3, State.monomial((1,), 1))


def test_iterated_modes(nv):
    ctx = nv.ctx
    assert iterated_modes(ctx, [("J", 3)], nv["J"], nv) == mode_action(ctx, nv["J"], 3, nv["J"])


@settings(max_examples=40, deadline=None)
@given(monos, monos, monos, st.integers(-2, 2), st.integers(-2, 2))
def test_commutator_formula(a, b, c, m, n):
    """[u_m, v_n] w = sum_i C(m, i) (u_i v)_{m+n-i} w, by brute force."""
    u, v, w = mono_state(a), mono_state(b), mono_state(c)
    lhs = mode_action(CTX, u, m, mode_action(CTX, v, n, w)) - mode_action(CTX, v, n, mode_action(CTX, u, m, w))
    rhs = State()
    top = sum(a.partition) + a.exponent ** 2 + sum(b.partition) + b.exponent ** 2
    for i in range(0, top + 1):
        uv = mode_action(CTX, u, i, v)
        if uv.is_zero():
            continue
        if m >= 0 and i > m:
            continue
        c_mi = Fraction(comb(m, i)) if m >= 0 else _gen_binom(m, i)
        rhs = rhs + mode_action(CTX, uv, m + n - i, w).scale(c_mi)
    assert lhs == rhs


def _gen_binom(m, i):
    out = Fraction(1)
    for j in range(i):
        out *= Fraction(m - j, j + 1)
    return out


@settings(max_examples=40, deadline=None)
@given(monos, monos, st.integers(-3, 3))
def test_skew_symmetry(a, b, n):
    """u_n v = sum_i (-1)^{n+i+1} L(-1)^i / i! v_{n+i} u."""
    u, v = mono_state(a), mono_state(b)
    rhs = State()
    top = sum(a.partition) + a.exponent ** 2 + sum(b.partition) + b.exponent ** 2
    for i in range(0, top + 4):
        t = mode_action(CTX, v, n + i, u)
        if t.is_zero():
            continue
        t = virasoro_word(CTX, [-1] * i, t).scale(Fraction(-1 if (n + i + 1) % 2 else 1, factorial(i)))
        rhs = rhs + t
    assert mode_action(CTX, u, n, v) == rhs


@settings(max_examples=40, deadline=None)
@given(monos, st.integers(-3, 3), st.integers(-3, 3))
def test_virasoro_brackets(a, m, n):
    v = mono_state(a)
    lhs = virasoro_mode(CTX, m, virasoro_mode(CTX, n, v)) - virasoro_mode(CTX, n, virasoro_mode(CTX, m, v))
    rhs = virasoro_mode(CTX, m + n, v).scale(m - n)
    if m + n == 0:
        rhs = rhs + v.scale(Fraction(m ** 3 - m, 12))
    assert lhs == rhs
