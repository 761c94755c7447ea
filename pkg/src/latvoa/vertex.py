"""Mode products u_n v in the lattice vertex operator algebra.

For a basis monomial u = alpha(-n1)...alpha(-ns) e^{a gamma} the field is the
normal-ordered product

    Y(u, z) = : prod_i d^{(n_i - 1)} alpha(z) * E^-(-a, z) E^+(-a, z) e_a z^{a gamma(0)} :

with the trivial cocycle.  Creation modes alpha(-m) multiply the Heisenberg
polynomial by x_m, annihilation modes alpha(m) act as norm*m*d/dx_m and
alpha(0) acts on e^{b gamma} by norm*b.  E^+(-a, z) is then the translation
x_m -> x_m - norm*a*z^{-m}, and E^-(-a, z) = exp(a sum_m x_m z^m / m).

Normal ordering of the product over the Heisenberg factors sums over every
way of sending each factor to the creation or annihilation side; factors with
equal mode index are grouped so the sum runs over counts, not subsets.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb

from gmpy2 import mpq

from latvoa.fock import (
    LatticeContext,
    Monomial,
    State,
    TruncationError,
    merge,
    part_counts,
    vec_add,
    z_factor,
)
from latvoa.scalars import MUL_TABLE, SQRT2, I, Scalar, ZERO_Q

# -- monomial kernels ---------------------------------------------------------


def _without(p: tuple, m: int) -> tuple:
    i = p.index(m)
    return p[:i] + p[i + 1:]


@lru_cache(maxsize=None)
def schur_coefficient(a: int, p: int) -> tuple:
    """Coefficient of z^p in exp(a * sum_m x_m z^m / m), as ((partition, coeff), ...)."""
    from latvoa.fock import partitions

    if p < 0:
        return ()
    if a == 0:
        return (((), mpq(1)),) if p == 0 else ()
    return tuple((nu, mpq(a) ** len(nu) / z_factor(nu)) for nu in partitions(p))


@lru_cache(maxsize=None)
def creation_coefficient(cre: tuple, a: int, pc: int) -> dict:
    """Coefficient of z^pc in prod_{(v, c) in cre} cre_v(z)^c * E^-(-a, z).

    cre_v(z) = sum_{m >= v} C(m-1, v-1) x_m z^{m-v} is the creation half of
    d^{(v-1)} alpha(z).
    """
    if pc < 0:
        return {}
    if not cre:
        return dict(schur_coefficient(a, pc))
    (v, c), rest = cre[0], cre[1:]
    rest = ((v, c - 1),) + rest if c > 1 else rest
    out: dict = {}
    for shift in range(pc + 1):
        m = v + shift
        sub = creation_coefficient(rest, a, pc - shift)
        if not sub:
            continue
        coef = comb(m - 1, v - 1)
        for p, x in sub.items():
            key = merge((m,), p)
            out[key] = out.get(key, ZERO_Q) + coef * x
    return {p: x for p, x in out.items() if x}


@lru_cache(maxsize=None)
def annihilation_series(norm: int, ann: tuple, a: int, nu: tuple, b: int) -> tuple:
    """Apply the annihilation halves of the Heisenberg factors and E^+(-a, z) to x^nu e^b.

    Returns ((z_power, poly), ...) with z_power <= 0.
    """
    # E^+(-a, z): x_v -> x_v - norm*a*z^{-v}
    series: dict[int, dict] = {0: {(): mpq(1)}}
    if a == 0:
        series = {0: {nu: mpq(1)}}
    else:
        t = -norm * a
        for v, r in part_counts(nu).items():
            new: dict[int, dict] = {}
            for i in range(r + 1):
                coef = comb(r, i) * mpq(t) ** i
                mono = (v,) * (r - i)
                for zp, poly in series.items():
                    bucket = new.setdefault(zp - v * i, {})
                    for p, x in poly.items():
                        key = merge(p, mono)
                        bucket[key] = bucket.get(key, ZERO_Q) + coef * x
            series = new
    for v, count in ann:
        sign = -1 if (v - 1) % 2 else 1
        for _ in range(count):
            new = {}
            for zp, poly in series.items():
                for p, x in poly.items():
                    if b:
                        bucket = new.setdefault(zp - v, {})
                        bucket[p] = bucket.get(p, ZERO_Q) + sign * norm * b * x
                    for m, r in part_counts(p).items():
                        coef = sign * comb(m + v - 1, v - 1) * norm * m * r
                        bucket = new.setdefault(zp - m - v, {})
                        key = _without(p, m)
                        bucket[key] = bucket.get(key, ZERO_Q) + coef * x
            series = new
    return tuple((zp, {p: x for p, x in poly.items() if x}) for zp, poly in series.items())


@lru_cache(maxsize=200_000)
def mono_mode(norm: int, mu: tuple, n: int, mv: tuple) -> dict:
    """Rational vector (mu)_n (mv) for basis monomials; the result must not be mutated."""
    lam, a = mu
    nu, b = mv
    k = norm // 2
    out_wt = sum(lam) + k * a * a + sum(nu) + k * b * b - n - 1
    c = a + b
    if out_wt - k * c * c < 0:
        return {}
    target = -n - 1 - norm * a * b
    counts = sorted(part_counts(lam).items())
    result: dict = {}
    for split in product(*[range(r + 1) for _, r in counts]):
        mult = 1
        cre, ann = [], []
        for (v, r), cv in zip(counts, split):
            mult *= comb(r, cv)
            if cv:
                cre.append((v, cv))
            if r - cv:
                ann.append((v, r - cv))
        cre_t = tuple(cre)
        for zp, poly in annihilation_series(norm, tuple(ann), a, nu, b):
            pc = target - zp
            if pc < 0:
                continue
            cpoly = creation_coefficient(cre_t, a, pc)
            if not cpoly:
                continue
            for p1, x1 in cpoly.items():
                x1 = mult * x1
                for p2, x2 in poly.items():
                    key = (merge(p1, p2), c)
                    result[key] = result.get(key, ZERO_Q) + x1 * x2
    return {m: x for m, x in result.items() if x}


def rational_mode(norm: int, u: dict, n: int, v: dict) -> dict:
    out: dict = {}
    for mu, x in u.items():
        for mv, y in v.items():
            r = mono_mode(norm, mu, n, mv)
            if r:
                vec_add(out, r, x * y)
    return out


# -- Virasoro modes (Sugawara form) --------------------------------------------

def _alpha_nonneg(norm: int, p: tuple, b: int, q: int):
    """alpha(q), q >= 0, on x^p e^b: yields (poly, coeff)."""
    if q == 0:
        if b:
            yield p, norm * b
        return
    r = p.count(q)
    if r:
        yield _without(p, q), norm * q * r


@lru_cache(maxsize=200_000)
def mono_virasoro(norm: int, n: int, mono: tuple) -> dict:
    """L(n) on a basis monomial via L(n) = (1/(2*norm)) sum_{p+q=n} :alpha(p) alpha(q):."""
    p, b = mono
    out: dict = {}

    def add(poly, coef):
        key = (poly, b)
        out[key] = out.get(key, ZERO_Q) + coef

    # both creation
    for i in range(1, -n):
        j = -n - i
        add(merge(p, (i, j) if i >= j else (j, i)), 1)
    # one creation (mode -i), one annihilation/zero (mode n+i); two orderings
    top = p[0] if p else 0
    for i in range(max(1, -n), top - n + 1):
        q = n + i
        for poly, c in _alpha_nonneg(norm, p, b, q):
            add(merge(poly, (i,)), 2 * c)
    # both annihilation/zero
    if n >= 0:
        for q1 in range(0, n + 1):
            q2 = n - q1
            for poly1, c1 in _alpha_nonneg(norm, p, b, q2):
                for poly2, c2 in _alpha_nonneg(norm, poly1, b, q1):
                    add(poly2, c1 * c2)
    scale = mpq(1, 2 * norm)
    return {m: x * scale for m, x in out.items() if x}


def rational_virasoro(norm: int, n: int, v: dict) -> dict:
    out: dict = {}
    for mono, x in v.items():
        r = mono_virasoro(norm, n, mono)
        if r:
            vec_add(out, r, x)
    return out


# -- public operations --------------------------------------------------------

def _check_output(ctx: LatticeContext, u: State, n: int, v: State) -> None:
    wu = [ctx.weight(m) for m in u.monomials()]
    wv = [ctx.weight(m) for m in v.monomials()]
    if wu and wv:
        top = max(wu) + max(wv) - n - 1
        if top > ctx.truncation:
            raise TruncationError(
                f"u_{n} v reaches weight {top}, above truncation {ctx.truncation}")


def mode_action(ctx: LatticeContext, u: State, n: int, v: State) -> State:
    """u_n v, the coefficient of z^{-n-1} in Y(u, z) v."""
    _check_output(ctx, u, n, v)
    parts: dict[int, dict] = {}
    for j, uj in u.parts.items():
        for k, vk in v.parts.items():
            r = rational_mode(ctx.norm, uj, n, vk)
            if r:
                idx, f = MUL_TABLE[j][k]
                vec_add(parts.setdefault(idx, {}), r, f)
    return State(parts)


def virasoro_mode(ctx: LatticeContext, n: int, v: State) -> State:
    """L(n) v = omega_{n+1} v."""
    wv = [ctx.weight(m) for m in v.monomials()]
    if wv and max(wv) - n > ctx.truncation:
        raise TruncationError(f"L({n}) v reaches weight {max(wv) - n}")
    return v.map_rational(lambda vec: rational_virasoro(ctx.norm, n, vec))


def virasoro_word(ctx: LatticeContext, modes, v: State) -> State:
    """Apply L(modes[0]) L(modes[1]) ... to v (rightmost first)."""
    for n in reversed(list(modes)):
        v = virasoro_mode(ctx, n, v)
    return v


def omega(ctx: LatticeContext) -> State:
    return State.monomial((1, 1), 0, Scalar.rational(mpq(1, 2 * ctx.norm)))


# -- named vectors ------------------------------------------------------------

class NamedVectors:
    """Registry of the distinguished vectors of V_{L_2}; u9 and u16 are built on first access."""

    NAMES = ("h", "x1", "x2", "x3", "omega", "J", "E", "X1", "X2", "u9", "u16", "E2beta", "vacuum")

    def __init__(self, ctx: LatticeContext):
        if ctx.norm != 2:
            raise ValueError("named vectors live in the norm-2 lattice algebra")
        self.ctx = ctx
        self._store: dict[str, State] = {}
        half = Scalar.rational(mpq(1, 2))
        inv_sqrt2 = SQRT2 * half
        a = State.monomial
        s = self._store
        s["vacuum"] = State.vacuum()
        s["h"] = a((1,), 0, inv_sqrt2)
        s["x1"] = s["h"]
        s["x2"] = (a((), 1) + a((), -1)).scale(inv_sqrt2)
        s["x3"] = (a((), 1) - a((), -1)).scale(I * inv_sqrt2)
        s["omega"] = omega(ctx)
        # h = alpha/sqrt2, so h(-1)^4 = alpha(-1)^4/4 etc.
        s["J"] = (a((1, 1, 1, 1), 0, mpq(1, 4)) - a((3, 1), 0, 1) + a((2, 2), 0, mpq(3, 4)))
        s["E"] = a((), 2) + a((), -2)
        root27i = Scalar.basis(6, 3)  # sqrt27 * i = 3 sqrt3 i
        s["X1"] = s["J"] - s["E"].scale(root27i)
        s["X2"] = s["J"] + s["E"].scale(root27i)
        s["E2beta"] = a((), 4) + a((), -4)

    def __getitem__(self, name: str) -> State:
        if name == "u9" and "u9" not in self._store:
            J, E = self._store["J"], self._store["E"]
            jm2e = mode_action(self.ctx, J, -2, E)
            em2j = mode_action(self.ctx, E, -2, J)
            self._store["u9"] = (jm2e - em2j).scale(SQRT2 * Scalar.rational(mpq(-1, 4)))
        if name == "u16" and "u16" not in self._store:
            self._store["u16"] = build_u16(self.ctx, self._store["J"], self._store["E"])
        try:
            return self._store[name]
        except KeyError:
            raise KeyError(f"unknown named vector {name!r}; known: {', '.join(self.NAMES)}") from None

    def __contains__(self, name):
        return name in self.NAMES

    def names(self):
        return self.NAMES


def weight16_source(ctx: LatticeContext, J: State, E: State) -> State:
    """J_{-9} J + 27 E_{-9} E."""
    return mode_action(ctx, J, -9, J) + mode_action(ctx, E, -9, E).scale(27)


def build_u16(ctx: LatticeContext, J: State, E: State) -> State:
    """(J_{-9}J + 27 E_{-9}E) minus its L(1,0) component."""
    from latvoa.virasoro import project_in_v_k

    ctx.check_weight(16)
    src = weight16_source(ctx, J, E)
    return src - project_in_v_k(ctx, src, 0)


def build_named(ctx: LatticeContext) -> NamedVectors:
    return NamedVectors(ctx)


def iterated_modes(ctx: LatticeContext, word, seed: State, named: NamedVectors | None = None) -> State:
    """Apply a word [(u, n), ...] right-to-left: u1_{n1} u2_{n2} ... seed.

    Each u is a State or a registry name.
    """
    v = seed
    for u, n in reversed(list(word)):
        if isinstance(u, str):
            if named is None:
                named = NamedVectors(ctx)
            u = named[u]
        v = mode_action(ctx, u, n, v)
    return v


__all__ = [
    "mode_action", "virasoro_mode", "virasoro_word", "omega", "NamedVectors",
    "build_named", "iterated_modes", "mono_mode", "weight16_source", "build_u16",
]
