"""Graded Fock space V_L = M(1) (x) C[L] for a rank-one even lattice L = Z*gamma.

A basis monomial ``alpha(-n1)...alpha(-ns) (x) e^{m gamma}`` is stored as the
pair ``(partition, m)`` with the partition weakly decreasing.  The Heisenberg
part is treated as a commutative polynomial in the creation operators, so a
partition doubles as a polynomial monomial.

A :class:`State` keeps its coefficients split along the 8 basis directions of
the scalar field: ``parts[j]`` is a sparse rational vector and the state is
``sum_j e_j * parts[j]``.  Every operator of the lattice algebra is defined
over Q, so it acts on each part separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Iterable, NamedTuple

from gmpy2 import mpq

from latvoa.scalars import MUL_TABLE, ONE, Scalar, ZERO_Q, to_mpq


class Monomial(NamedTuple):
    partition: tuple[int, ...]
    exponent: int


VACUUM_MONO = Monomial((), 0)


class TruncationError(ValueError):
    """A requested component lies above the configured truncation weight."""


@dataclass
class LatticeContext:
    """Rank-one lattice Z*gamma with (gamma, gamma) = norm and a truncation weight."""

    norm: int = 2
    truncation: int = 20
    _signs: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.norm < 2 or self.norm % 2:
            raise ValueError(f"lattice norm must be an even integer >= 2, got {self.norm}")
        if self.truncation < 0:
            raise ValueError("truncation must be non-negative")

    @property
    def k(self) -> int:
        return self.norm // 2

    def weight(self, mono) -> int:
        return sum(mono[0]) + self.k * mono[1] * mono[1]

    def check_weight(self, n: int) -> None:
        if n > self.truncation:
            raise TruncationError(f"weight {n} exceeds truncation {self.truncation}")

    def lattice_sign(self, m: int) -> mpq:
        """Value of (e^{m gamma}, e^{-m gamma}) fixed by invariance of the form."""
        if m not in self._signs:
            self._signs[m] = _derive_lattice_sign(self, m)
        return self._signs[m]


def _derive_lattice_sign(ctx: LatticeContext, m: int) -> mpq:
    # (e^a, e^{-a}) = ((e^a)_{-1} 1, e^{-a}) = (-1)^{wt} (1, (e^a)_{2wt-1} e^{-a})
    from latvoa.vertex import mono_mode

    if m == 0:
        return mpq(1)
    wt = ctx.k * m * m
    res = mono_mode(ctx.norm, ((), m), 2 * wt - 1, ((), -m))
    return (-1) ** wt * res.get(((), 0), ZERO_Q)


# -- partitions -------------------------------------------------------------

@lru_cache(maxsize=None)
def partitions(n: int, max_part: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Partitions of n (parts <= max_part) as decreasing tuples, sorted lexicographically."""
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for first in range(1, min(n, max_part) + 1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    return len(partitions(n)) if n >= 0 else 0


def merge(p: tuple, q: tuple) -> tuple:
    """Product of two Heisenberg monomials."""
    if not p:
        return q
    if not q:
        return p
    return tuple(sorted(p + q, reverse=True))


def part_counts(p: tuple) -> dict[int, int]:
    counts: dict[int, int] = {}
    for x in p:
        counts[x] = counts.get(x, 0) + 1
    return counts


def z_factor(p: tuple) -> int:
    """prod_v v^{r_v} r_v!  (the Heisenberg norm of a monomial up to (2k)^len)."""
    out = 1
    for v, r in part_counts(p).items():
        out *= v ** r * factorial(r)
    return out


# -- basis ------------------------------------------------------------------

def exponent_order(ctx: LatticeContext, n: int) -> list[int]:
    """Lattice exponents m with k*m^2 <= n in canonical order 0, 1, -1, 2, -2, ..."""
    out = [0]
    m = 1
    while ctx.k * m * m <= n:
        out += [m, -m]
        m += 1
    return out


@lru_cache(maxsize=None)
def _basis(k: int, n: int) -> tuple[Monomial, ...]:
    out = []
    m = 0
    exps = [0]
    while k * (m + 1) ** 2 <= n:
        m += 1
        exps += [m, -m]
    for e in exps:
        for p in partitions(n - k * e * e):
            out.append(Monomial(p, e))
    return tuple(out)


def enumerate_basis(ctx: LatticeContext, n: int) -> list[Monomial]:
    """Basis monomials of weight n in canonical order (by |m|, sign, then partition)."""
    if n < 0:
        return []
    ctx.check_weight(n)
    return list(_basis(ctx.k, n))


def basis_index(ctx: LatticeContext, n: int) -> dict[Monomial, int]:
    return _basis_index(ctx.k, n)


@lru_cache(maxsize=None)
def _basis_index(k: int, n: int) -> dict:
    return {mono: i for i, mono in enumerate(_basis(k, n))}


def graded_dimension(ctx: LatticeContext, n: int) -> int:
    """sum over k*m^2 <= n of p(n - k*m^2)."""
    if n < 0:
        return 0
    ctx.check_weight(n)
    return sum(partition_count(n - ctx.k * m * m) for m in exponent_order(ctx, n))


def canonical_key(ctx: LatticeContext, mono) -> tuple:
    p, m = mono
    return (ctx.weight(mono), abs(m), m < 0, p)


# -- sparse rational vectors ------------------------------------------------

def vec_add(acc: dict, vec: dict, c=1) -> None:
    """acc += c * vec, in place, dropping zeros."""
    for key, val in vec.items():
        new = acc.get(key, ZERO_Q) + c * val
        if new:
            acc[key] = new
        else:
            acc.pop(key, None)


def vec_scale(vec: dict, c) -> dict:
    if not c:
        return {}
    return {key: c * val for key, val in vec.items()}


# -- states -----------------------------------------------------------------

class State:
    """Sparse combination of basis monomials with coefficients in Q(i, sqrt2, sqrt3)."""

    __slots__ = ("parts",)

    def __init__(self, parts: dict[int, dict] | None = None):
        self.parts = {j: v for j, v in (parts or {}).items() if v}

    # -- construction -------------------------------------------------------
    @classmethod
    def rational(cls, vec: dict) -> State:
        return cls({0: {Monomial(*m): to_mpq(c) for m, c in vec.items() if c}})

    @classmethod
    def from_terms(cls, terms: dict) -> State:
        parts: dict[int, dict] = {}
        for mono, c in terms.items():
            c = Scalar.coerce(c)
            for j, x in enumerate(c.coords):
                if x:
                    parts.setdefault(j, {})[Monomial(*mono)] = x
        return cls(parts)

    @classmethod
    def monomial(cls, partition: Iterable[int] = (), exponent: int = 0, coeff=1) -> State:
        mono = Monomial(tuple(sorted(partition, reverse=True)), exponent)
        return cls.from_terms({mono: coeff})

    @classmethod
    def vacuum(cls) -> State:
        return cls({0: {VACUUM_MONO: mpq(1)}})

    @classmethod
    def zero(cls) -> State:
        return cls()

    # -- views ----------------------------------------------------------------
    def terms(self) -> dict[Monomial, Scalar]:
        out: dict[Monomial, list] = {}
        for j, vec in self.parts.items():
            for mono, x in vec.items():
                out.setdefault(mono, [ZERO_Q] * 8)[j] = x
        return {Monomial(*m): Scalar(c) for m, c in out.items()}

    def coeff(self, mono) -> Scalar:
        mono = Monomial(*mono)
        c = [ZERO_Q] * 8
        for j, vec in self.parts.items():
            c[j] = vec.get(mono, ZERO_Q)
        return Scalar(c)

    def monomials(self) -> set:
        out = set()
        for vec in self.parts.values():
            out.update(vec)
        return out

    def __len__(self):
        return len(self.monomials())

    def is_zero(self) -> bool:
        return not self.parts

    def is_rational(self) -> bool:
        return set(self.parts) <= {0}

    def rational_part(self) -> dict:
        if not self.is_rational():
            raise ValueError("state has irrational coefficients")
        return self.parts.get(0, {})

    def weights(self, ctx: LatticeContext) -> set[int]:
        return {ctx.weight(m) for m in self.monomials()}

    def weight(self, ctx: LatticeContext) -> int:
        ws = self.weights(ctx)
        if len(ws) != 1:
            raise ValueError(f"state is not homogeneous (weights {sorted(ws)})")
        return ws.pop()

    def is_homogeneous(self, ctx: LatticeContext) -> bool:
        return len(self.weights(ctx)) <= 1

    def as_rational_multiple(self) -> tuple[Scalar, dict] | None:
        """Return (s, r) with self = s*r and r rational, if the state has one direction."""
        if len(self.parts) != 1:
            return None
        (j, vec), = self.parts.items()
        return Scalar.basis(j), vec

    # -- linear structure ---------------------------------------------------
    def __add__(self, other: State) -> State:
        parts = {j: dict(v) for j, v in self.parts.items()}
        for j, vec in other.parts.items():
            vec_add(parts.setdefault(j, {}), vec)
        return State(parts)

    def __sub__(self, other: State) -> State:
        return self + (-other)

    def __neg__(self) -> State:
        return State({j: {m: -x for m, x in v.items()} for j, v in self.parts.items()})

    def scale(self, c) -> State:
        if not isinstance(c, Scalar):
            q = to_mpq(c)
            return State({j: vec_scale(v, q) for j, v in self.parts.items()})
        parts: dict[int, dict] = {}
        for k, a in enumerate(c.coords):
            if not a:
                continue
            for j, vec in self.parts.items():
                idx, f = MUL_TABLE[k][j]
                vec_add(parts.setdefault(idx, {}), vec, f * a)
        return State(parts)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scale(Scalar.coerce(c).inverse())

    def map_rational(self, fn) -> State:
        """Apply a Q-linear map (rational dict -> rational dict) to every direction."""
        return State({j: fn(vec) for j, vec in self.parts.items()})

    def project_weight(self, ctx: LatticeContext, n: int) -> State:
        return State({j: {m: x for m, x in v.items() if ctx.weight(m) == n}
                      for j, v in self.parts.items()})

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(tuple(sorted((j, frozenset(v.items())) for j, v in self.parts.items())))

    def __repr__(self):
        terms = self.terms()
        if not terms:
            return "State(0)"
        shown = sorted(terms.items(), key=lambda t: (abs(t[0][1]), t[0][1] < 0, t[0][0]))
        body = " + ".join(f"({c})*{format_monomial(m)}" for m, c in shown[:6])
        more = f" + ... [{len(shown)} terms]" if len(shown) > 6 else ""
        return f"State({body}{more})"

    # -- serialization ------------------------------------------------------
    def to_json(self, ctx: LatticeContext) -> list[dict]:
        terms = self.terms()
        return [
            {"partition": list(m.partition), "exponent": m.exponent, "coeff": terms[m].to_text()}
            for m in sorted(terms, key=lambda mono: canonical_key(ctx, mono))
        ]

    @classmethod
    def from_json(cls, data: list[dict]) -> State:
        return cls.from_terms({
            Monomial(tuple(d["partition"]), int(d["exponent"])): Scalar.parse(d["coeff"])
            for d in data
        })


def format_monomial(mono) -> str:
    p, m = mono
    heis = "".join(f"a({-x})" for x in p)
    lat = f"e^{m}" if m else "1"
    return f"{heis}{lat}" if heis else lat


def add_states(*states: State) -> State:
    out = State()
    for s in states:
        out = out + s
    return out


def scale_state(c, s: State) -> State:
    return s.scale(c)


def project_weight(ctx: LatticeContext, u: State, n: int) -> State:
    return u.project_weight(ctx, n)


# -- invariant bilinear form ------------------------------------------------

def monomial_pairing(ctx: LatticeContext, mu, mv) -> mpq:
    """(mu, mv) on basis monomials.

    alpha(n) has adjoint -alpha(-n), so the Heisenberg part pairs diagonally
    with (-1)^len * (2k)^len * z_factor; the lattice part pairs e^a with e^{-a}.
    """
    (p, a), (q, b) = mu, mv
    if p != q or a + b != 0:
        return ZERO_Q
    s = len(p)
    return (-1) ** s * ctx.norm ** s * z_factor(p) * ctx.lattice_sign(a)


def rational_form(ctx: LatticeContext, u: dict, v: dict) -> mpq:
    total = ZERO_Q
    if len(u) > len(v):
        u, v = v, u
    for (p, a), x in u.items():
        y = v.get((p, -a))
        if y is not None:
            total += x * y * monomial_pairing(ctx, (p, a), (p, -a))
    return total


def bilinear_form(ctx: LatticeContext, u: State, v: State) -> Scalar:
    """The invariant symmetric bilinear form normalized by (1, 1) = 1."""
    out = [ZERO_Q] * 8
    for j, uj in u.parts.items():
        for k, vk in v.parts.items():
            val = rational_form(ctx, uj, vk)
            if val:
                idx, f = MUL_TABLE[j][k]
                out[idx] += f * val
    return Scalar(out)


__all__ = [
    "LatticeContext", "Monomial", "State", "TruncationError", "ONE",
    "enumerate_basis", "graded_dimension", "bilinear_form", "partitions",
    "add_states", "scale_state", "project_weight",
]
