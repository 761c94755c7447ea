"""Scenario runner: each scenario recomputes one structural fact about the
A4-orbifold of the rank-one lattice algebra and reports exact pass/fail checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from gmpy2 import mpq

from latvoa.fock import LatticeContext, State, bilinear_form
from latvoa.linalg import Span
from latvoa.qseries import burnside_character, subspace_character, virasoro_character
from latvoa.scalars import OMEGA, SQRT2, Scalar
from latvoa.symmetry import build_sigma, invariant_subspace, named_group
from latvoa.vertex import NamedVectors, mode_action, virasoro_mode, virasoro_word, weight16_source
from latvoa.virasoro import (
    decompose_orbifold,
    field_independent,
    fusion_check,
    is_primary,
    isotypic_components,
    k_table,
)

PASS, FAIL, SHORT, SKIP = "pass", "fail", "insufficient-truncation", "skipped"


class UnknownScenarioError(KeyError):
    pass


@dataclass
class Check:
    label: str
    status: str
    witness: object = None

    def to_json(self) -> dict:
        return {"label": self.label, "status": self.status, "witness": self.witness}


@dataclass
class Scenario:
    name: str
    description: str
    anchor: str
    min_truncation: int
    level: str
    run: Callable = field(repr=False)


def check(label: str, ok: bool, witness=None) -> Check:
    return Check(label, PASS if ok else FAIL, witness)


def state_diff(ctx: LatticeContext, lhs: State, rhs: State) -> dict:
    return {"lhs": lhs.to_json(ctx), "rhs": rhs.to_json(ctx), "lhs-rhs": (lhs - rhs).to_json(ctx)}


def equal_check(ctx, label: str, lhs: State, rhs: State) -> Check:
    ok = lhs == rhs
    return Check(label, PASS if ok else FAIL, None if ok else state_diff(ctx, lhs, rhs))


# -- shared heavy objects, cached per context --------------------------------------

_CACHE: dict = {}


def _cached(key, build):
    if key not in _CACHE:
        _CACHE[key] = build()
    return _CACHE[key]


def named(ctx: LatticeContext) -> NamedVectors:
    return _cached(("named", ctx.norm, ctx.truncation), lambda: NamedVectors(ctx))


def a4_group(ctx: LatticeContext):
    return _cached(("a4", ctx.norm), lambda: named_group(ctx, "a4"))


def a4_table(ctx: LatticeContext, up_to: int = 17):
    return _cached(("a4-table", ctx.norm, up_to),
                   lambda: decompose_orbifold(ctx, a4_group(ctx), up_to))


def h_monomial(partition, exponent: int, coeff) -> State:
    """coeff * h(-n1)...h(-ns) e^{exponent} with h = alpha/sqrt2."""
    c = Scalar.coerce(coeff) * (SQRT2 * mpq(1, 2)) ** len(partition)
    return State.monomial(partition, exponent, c)


# -- scenarios ----------------------------------------------------------------------

def _vir(ctx, modes):
    return virasoro_word(ctx, modes, State.vacuum())


def scenario_j3j(ctx, level):
    nv = named(ctx)
    J, E = nv["J"], nv["E"]
    l4, l22 = _vir(ctx, [-4]), _vir(ctx, [-2, -2])
    rhs_j = l4.scale(-72) + l22.scale(336) + J.scale(-60)
    rhs_e = l4.scale(Fraction(-8, 3)) + l22.scale(Fraction(112, 9)) + J.scale(Fraction(20, 9))
    return [
        equal_check(ctx, "J_3 J = -72 L(-4)1 + 336 L(-2)^2 1 - 60 J", mode_action(ctx, J, 3, J), rhs_j),
        equal_check(ctx, "E_3 E = -8/3 L(-4)1 + 112/9 L(-2)^2 1 + 20/9 J", mode_action(ctx, E, 3, E), rhs_e),
    ]


def scenario_k_weight4(ctx, level):
    nv = named(ctx)
    J, E, X1, X2 = nv["J"], nv["E"], nv["X1"], nv["X2"]
    k4 = named_group(ctx, "k4")
    inv = invariant_subspace(ctx, k4, 4)
    stated = [_vir(ctx, [-2, -2]), _vir(ctx, [-4]), J, E]
    union = len(field_independent(inv + stated))
    sigma = build_sigma(ctx)
    omega_bar = OMEGA.conjugate_i()
    return [
        check("dim of K-invariants at weight 4 is 4", len(inv) == 4, len(inv)),
        check("L(-2)^2 1, L(-4)1, J, E are independent and span them",
              len(field_independent(stated)) == 4 and union == 4, union),
        equal_check(ctx, "sigma(J) = -1/2 J + 9/2 E", sigma(ctx, J),
                    J.scale(Fraction(-1, 2)) + E.scale(Fraction(9, 2))),
        equal_check(ctx, "sigma(E) = -1/6 J - 1/2 E", sigma(ctx, E),
                    J.scale(Fraction(-1, 6)) + E.scale(Fraction(-1, 2))),
        equal_check(ctx, "sigma(X1) = (-1+sqrt3 i)/2 X1", sigma(ctx, X1), X1.scale(OMEGA)),
        equal_check(ctx, "sigma(X2) = (-1-sqrt3 i)/2 X2", sigma(ctx, X2), X2.scale(omega_bar)),
    ]


def explicit_u9() -> State:
    """The weight-9 primary written out in h-monomials."""
    r2 = Scalar.basis(1, mpq(1, 2))  # 1/sqrt2
    sym = h_monomial((4, 1), 2, 15) + h_monomial((3, 2), 2, 10) + h_monomial((2, 1, 1, 1), 2, 10)
    sym = sym + h_monomial((4, 1), -2, 15) + h_monomial((3, 2), -2, 10) + h_monomial((2, 1, 1, 1), -2, 10)
    anti = State()
    for p, c in (((5,), 6), ((3, 1, 1), 10), ((2, 2, 1), Fraction(15, 2)), ((1, 1, 1, 1, 1), 1)):
        anti = anti + h_monomial(p, 2, c) - h_monomial(p, -2, c)
    return sym.scale(-r2) + anti


def scenario_u9(ctx, level):
    u9 = named(ctx)["u9"]
    return [
        equal_check(ctx, "-(sqrt2/4)(J_{-2}E - E_{-2}J) equals the explicit h-monomial form", u9, explicit_u9()),
        check("L(1) u9 = 0", virasoro_mode(ctx, 1, u9).is_zero()),
        check("L(2) u9 = 0", virasoro_mode(ctx, 2, u9).is_zero()),
        check("u9 is nonzero of weight 9", not u9.is_zero() and u9.weight(ctx) == 9),
    ]


def scenario_u16(ctx, level):
    nv = named(ctx)
    src = weight16_source(ctx, nv["J"], nv["E"])
    comps = isotypic_components(ctx, src, k_table(ctx, 16))
    u16 = nv["u16"]
    rest = u16 - nv["E2beta"].scale(27)
    from latvoa.symmetry import apply_theta

    return [
        check("J_{-9}J + 27 E_{-9}E has blocks only at h = 0 and 16", set(comps) <= {0, 16}, sorted(comps)),
        check("source minus its vacuum-block part is primary of weight 16",
              is_primary(ctx, u16) and u16.weight(ctx) == 16),
        check("e^{4 alpha} and e^{-4 alpha} coefficients are 27",
              u16.coeff(((), 4)) == 27 and u16.coeff(((), -4)) == 27,
              [str(u16.coeff(((), 4))), str(u16.coeff(((), -4)))]),
        check("u16 - 27(e^{4a} + e^{-4a}) lies in the theta-fixed Heisenberg part",
              all(m[1] == 0 for m in rest.monomials()) and apply_theta(ctx, rest) == rest),
    ]


def scenario_decompose(ctx, level):
    table = a4_table(ctx, 17)
    mult = dict(table.square_multiplicities())
    out = [
        check("no primaries at weights 1..8", all(e.h == 0 or e.h >= 9 for e in table.entries),
              [e.h for e in table.entries]),
        check("a3 = 1", mult.get(3) == 1, mult.get(3)),
        check("a4 = 1", mult.get(4) == 1, mult.get(4)),
        check("multiplicities reproduce the graded dimension through 17", table.is_consistent(),
              {"dims": table.dims, "from characters": table.character_dims()}),
    ]
    if level == "full" and ctx.truncation >= 26:
        full = decompose_orbifold(ctx, a4_group(ctx), 26, base=table)
        a5 = full.multiplicity(25)
        out.append(check("a5 = 0 (no primary of weight 25)", a5 == 0, a5))
    else:
        out.append(Check("a5 = 0 (no primary of weight 25)", SKIP, "needs level full and N >= 26"))
    return out


def scenario_characters(ctx, level):
    top = 12
    out = []
    for name in ("trivial", "k4", "a4"):
        group = a4_group(ctx) if name == "a4" else named_group(ctx, name)
        burn = burnside_character(ctx, group, top).integer_coeffs()
        dims = [len(invariant_subspace(ctx, group, n)) for n in range(top + 1)]
        out.append(check(f"trace average equals invariant dimensions ({name}, weights <= {top})",
                         burn == dims, {"burnside": burn, "invariants": dims}))
    table = a4_table(ctx, 17)
    total = None
    for n, a in table.square_multiplicities():
        if a:
            term = virasoro_character(n * n, 17).scale(a)
            total = term if total is None else total + term
    target = subspace_character(table.dims)
    out.append(check("sum a_n ch L(1, n^2) = ch V^A4 through 17", total == target,
                     {"sum": total.integer_coeffs(), "orbifold": target.integer_coeffs()}))
    return out


def scenario_fusion(ctx, level):
    nv = named(ctx)
    u9, u16 = nv["u9"], nv["u16"]
    table = a4_table(ctx, 17)
    rep = fusion_check(ctx, u9, u9, table)
    observed = sorted({h for hs in rep.support.values() for h in hs})
    out = [
        check("u9_n u9 lies in the blocks h = 0, 9, 16 through weight 17",
              rep.ok and set(observed) <= {0, 9, 16}, rep.to_json()),
    ]
    x1x = mode_action(ctx, u9, 1, u9)
    comps = isotypic_components(ctx, x1x, table)
    rest = comps.get(16, State())
    a1 = _ratio(rest, u16)
    out.append(check("u9_1 u9 = (vacuum block) + a1 u16 with a1 != 0",
                     set(comps) <= {0, 16} and a1 is not None and not a1.is_zero(),
                     {"blocks": sorted(comps), "a1": None if a1 is None else a1.to_text()}))
    return out


def _ratio(v: State, w: State) -> Scalar | None:
    """c with v = c*w, or None."""
    if w.is_zero():
        return None
    mono = next(iter(sorted(w.monomials())))
    c = v.coeff(mono) / w.coeff(mono)
    return c if v == w.scale(c) else None


def generated_dimensions(ctx: LatticeContext, seed: State, top: int) -> list[int]:
    """Dimensions of the span of iterated seed-modes and Virasoro modes applied to 1."""
    spans = {n: Span() for n in range(top + 1)}
    rational_seed = seed.parts.get(0) or next(iter(seed.parts.values()))
    seed = State({0: rational_seed})
    ws = seed.weight(ctx)
    queue = [State.vacuum()]
    spans[0].add(State.vacuum().parts[0])
    while queue:
        v = queue.pop()
        w = v.weight(ctx)
        images = []
        for n in (-1, -2, 1, 2):
            if 0 <= w - n <= top:
                images.append(virasoro_mode(ctx, n, v))
        for j in range(ws + w - 1 - top, ws + w):
            images.append(mode_action(ctx, seed, j, v))
        for img in images:
            if img.is_zero():
                continue
            vec = img.parts[0]
            if spans[img.weight(ctx)].add(vec):
                queue.append(State({0: vec}))
    return [len(spans[n]) for n in range(top + 1)]


def scenario_generation(ctx, level):
    nv = named(ctx)
    top = 14
    # u9 = -(sqrt2/4) * (rational vector): the rational part spans the same line
    seed = mode_action(ctx, nv["J"], -2, nv["E"]) - mode_action(ctx, nv["E"], -2, nv["J"])
    gen = generated_dimensions(ctx, seed, top)
    dims = [len(invariant_subspace(ctx, a4_group(ctx), n)) for n in range(top + 1)]
    return [check(f"closure of u9 fills V^A4 at every weight <= {top}", gen == dims,
                  {"generated": gen, "orbifold": dims})]


def scenario_forms(ctx, level):
    nv = named(ctx)
    x, y = nv["u9"], nv["u16"]
    lhs = bilinear_form(ctx, mode_action(ctx, x, 1, x), y)
    rhs = -bilinear_form(ctx, x, mode_action(ctx, x, 15, y))
    yy = bilinear_form(ctx, y, y)
    y31y = mode_action(ctx, y, 31, y)
    return [
        check("(x_1 x, y) = -(x, x_15 y)", lhs == rhs and not lhs.is_zero(),
              {"lhs": lhs.to_text(), "rhs": rhs.to_text()}),
        check("y_31 y = (y, y) 1", y31y == State.vacuum().scale(yy),
              {"(y,y)": yy.to_text(), "y_31 y": y31y.to_json(ctx)}),
        Check("(x, x) reported", PASS, bilinear_form(ctx, x, x).to_text()),
    ]


SCENARIOS: dict[str, Scenario] = {s.name: s for s in [
    Scenario("j3j", "J_3 J and E_3 E in terms of Virasoro descendants and J",
             "weight-4 products J_3 J, E_3 E", 8, "quick", scenario_j3j),
    Scenario("lemma-3.1", "K-invariants at weight 4 and the sigma action on J, E, X1, X2",
             "weight-4 K-invariants and sigma eigenvectors", 4, "quick", scenario_k_weight4),
    Scenario("u9", "explicit weight-9 primary from J_{-2}E - E_{-2}J",
             "weight-9 primary u9", 9, "quick", scenario_u9),
    Scenario("u16", "weight-16 primary from J_{-9}J + 27 E_{-9}E",
             "weight-16 primary u16", 17, "quick", scenario_u16),
    Scenario("decompose", "multiplicities a_n of L(1, n^2) in V^A4",
             "isotypic decomposition of V^A4", 17, "quick", scenario_decompose),
    Scenario("characters", "trace-average characters against invariant dimensions",
             "orbifold characters", 17, "quick", scenario_characters),
    Scenario("fusion-spot", "block support of u9_n u9",
             "c = 1 fusion constraint on primary products", 17, "quick", scenario_fusion),
    Scenario("generation", "u9 generates V^A4 through weight 14",
             "generation of V^A4 by u9", 14, "quick", scenario_generation),
    Scenario("form-identities", "invariance of the bilinear form on u9, u16",
             "form invariance for x = u9, y = u16", 17, "quick", scenario_forms),
]}


def run_scenario(name: str, truncation: int = 20, level: str = "quick", norm: int = 2) -> dict:
    if name not in SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}")
    sc = SCENARIOS[name]
    start = time.perf_counter()
    if norm != 2:
        checks = [Check("scenario needs the norm-2 lattice", SKIP, norm)]
    elif truncation < sc.min_truncation:
        checks = [Check("truncation", SHORT, f"requires N >= {sc.min_truncation}, got {truncation}")]
    else:
        ctx = LatticeContext(norm, truncation)
        checks = sc.run(ctx, level)
    return {
        "scenario": sc.name,
        "anchor": sc.anchor,
        "description": sc.description,
        "checks": [c.to_json() for c in checks],
        "elapsed_ms": int((time.perf_counter() - start) * 1000),
    }


def report_status(report: dict) -> str:
    statuses = {c["status"] for c in report["checks"]}
    if FAIL in statuses:
        return FAIL
    if SHORT in statuses:
        return SHORT
    return PASS


def run_all(level: str = "quick", truncation: int = 20, norm: int = 2) -> dict:
    if level not in ("quick", "full"):
        raise ValueError("level must be quick or full")
    reports = []
    for name, sc in SCENARIOS.items():
        if level == "quick" and sc.level != "quick":
            continue
        reports.append(run_scenario(name, truncation, level, norm))
    failed = [r["scenario"] for r in reports if report_status(r) == FAIL]
    return {"level": level, "truncation": truncation, "reports": reports,
            "failed": failed, "ok": not failed}
