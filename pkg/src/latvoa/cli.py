"""Command-line front end.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from latvoa import __version__
from latvoa.fock import LatticeContext, State, canonical_key, format_monomial, graded_dimension

FORMATS = ("json", "text", "csv")
GROUPS = ("trivial", "k4", "a4", "s4")
DEFAULTS = {"truncation": 20, "norm": 2, "group": "a4", "format": "json", "level": "quick"}
CONVENTIONS = ("cocycle: trivial (epsilon = 1); "
               "form: (1,1) = 1, alpha(n)^* = -alpha(-n), (e^a, e^-a) = (-1)^{k a^2}; "
               "fields: FLM normal ordering, Y(e^a, z) = E^-(-a,z) E^+(-a,z) e_a z^{a(0)}")


class UsageError(Exception):
    pass


# -- configuration -------------------------------------------------------------------

def read_config(path: str) -> dict:
    """Parse a ``key = value`` file; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in ("truncate", "n"):
            key = "truncation"
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    try:
        cfg["truncation"] = int(cfg["truncation"])
        cfg["norm"] = int(cfg["norm"])
    except ValueError as exc:
        raise UsageError(f"bad integer setting: {exc}") from None
    if cfg["truncation"] < 0:
        raise UsageError("truncation must be >= 0")
    if cfg["norm"] < 2 or cfg["norm"] % 2:
        raise UsageError("norm must be an even integer >= 2")
    if cfg["group"] not in GROUPS:
        raise UsageError(f"group must be one of {', '.join(GROUPS)}")
    if cfg["format"] not in FORMATS:
        raise UsageError(f"format must be one of {', '.join(FORMATS)}")
    if cfg["level"] not in ("quick", "full"):
        raise UsageError("level must be quick or full")
    return cfg


def context(cfg: dict) -> LatticeContext:
    return LatticeContext(cfg["norm"], cfg["truncation"])


def need_norm2(cfg: dict, what: str) -> None:
    if cfg["norm"] != 2 and cfg["group"] != "trivial":
        raise UsageError(f"{what} with group {cfg['group']} needs norm 2")


# -- output -------------------------------------------------------------------

def emit(fmt: str, payload: dict, text: str, rows: list[list] | None, header: list[str] | None) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True)
    if fmt == "text":
        return text
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    w.writerows(rows or [])
    return buf.getvalue().rstrip("\n")


def states_rows(ctx, states):
    rows = []
    for i, s in enumerate(states):
        for t in s.to_json(ctx):
            rows.append([i, " ".join(map(str, t["partition"])), t["exponent"], t["coeff"]])
    return rows


STATE_HEADER = ["vector", "partition", "exponent", "coeff"]


# -- commands -------------------------------------------------------------------

def _group(ctx, cfg):
    from latvoa.symmetry import named_group

    return named_group(ctx, cfg["group"])


def cmd_char(args, cfg):
    from latvoa.qseries import subspace_character

    ctx = context(cfg)
    N = cfg["truncation"]
    if cfg["group"] == "trivial":
        dims = [graded_dimension(ctx, n) for n in range(N + 1)]
    else:
        need_norm2(cfg, "char")
        from latvoa.symmetry import invariant_subspace

        group = _group(ctx, cfg)
        dims = [len(invariant_subspace(ctx, group, n)) for n in range(N + 1)]
    ch = subspace_character(dims)
    payload = {"command": "char", "group": cfg["group"], "norm": cfg["norm"], "series": ch.to_json()}
    return emit(cfg["format"], payload, ch.to_text(),
                [[n, d] for n, d in enumerate(dims)], ["weight", "dimension"])


def cmd_invariants(args, cfg):
    from latvoa.symmetry import invariant_subspace

    need_norm2(cfg, "invariants")
    ctx = context(cfg)
    basis = invariant_subspace(ctx, _group(ctx, cfg), args.weight)
    payload = {"command": "invariants", "group": cfg["group"], "weight": args.weight,
               "dimension": len(basis), "basis": [b.to_json(ctx) for b in basis]}
    text = f"group {cfg['group']}, weight {args.weight}: dimension {len(basis)}"
    return emit(cfg["format"], payload, text, states_rows(ctx, basis), STATE_HEADER)


def cmd_primaries(args, cfg):
    from latvoa.symmetry import invariant_subspace
    from latvoa.virasoro import find_primaries

    need_norm2(cfg, "primaries")
    ctx = context(cfg)
    n = args.weight
    if cfg["group"] == "trivial":
        from latvoa.fock import enumerate_basis

        basis = [State.monomial(m.partition, m.exponent) for m in enumerate_basis(ctx, n)]
    else:
        basis = invariant_subspace(ctx, _group(ctx, cfg), n)
    prim = find_primaries(ctx, basis, n)
    payload = {"command": "primaries", "group": cfg["group"], "weight": n,
               "dimension": len(prim), "basis": [p.to_json(ctx) for p in prim]}
    text = f"group {cfg['group']}, weight {n}: {len(prim)} primary vector(s)"
    return emit(cfg["format"], payload, text, states_rows(ctx, prim), STATE_HEADER)


def cmd_decompose(args, cfg):
    from latvoa.virasoro import decompose_orbifold

    need_norm2(cfg, "decompose")
    up_to = args.up_to if args.up_to is not None else cfg["truncation"]
    ctx = LatticeContext(cfg["norm"], max(cfg["truncation"], up_to))
    table = decompose_orbifold(ctx, _group(ctx, cfg), up_to)
    mults = table.square_multiplicities()
    payload = {"command": "decompose", "group": cfg["group"], "up_to": up_to,
               "table": table.to_json(),
               "multiplicities": [{"n": n, "a": a} for n, a in mults]}
    lines = [f"decomposition of the {cfg['group']}-orbifold through weight {up_to}:"]
    lines += [f"  a_{n} = {a}   (L(1,{n * n}))" for n, a in mults]
    lines.append(f"  character consistent: {table.is_consistent()}")
    return emit(cfg["format"], payload, "\n".join(lines),
                [[n, n * n, a] for n, a in mults], ["n", "h", "a"])


def parse_state(ctx, spec: str, named):
    if spec.startswith("@"):
        return State.from_json(json.loads(Path(spec[1:]).read_text()))
    if spec.lstrip().startswith("["):
        return State.from_json(json.loads(spec))
    try:
        return named[spec]
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def cmd_mode_product(args, cfg):
    from latvoa.vertex import NamedVectors, mode_action

    ctx = context(cfg)
    if cfg["norm"] != 2 and not (args.u.lstrip().startswith(("[", "@")) and args.v.lstrip().startswith(("[", "@"))):
        raise UsageError("named vectors need norm 2; pass inline JSON states otherwise")
    named = NamedVectors(ctx) if cfg["norm"] == 2 else {}
    u, v = parse_state(ctx, args.u, named), parse_state(ctx, args.v, named)
    out = mode_action(ctx, u, args.n, v)
    payload = {"command": "mode-product", "u": args.u, "n": args.n, "v": args.v, "result": out.to_json(ctx)}
    terms = out.terms()
    text = "\n".join(f"({terms[m]}) {format_monomial(m)}"
                     for m in sorted(terms, key=lambda m: canonical_key(ctx, m))) or "0"
    return emit(cfg["format"], payload, text, states_rows(ctx, [out]), STATE_HEADER)


def cmd_verify(args, cfg):
    from latvoa.verify import report_status, run_all, run_scenario

    N, level = cfg["truncation"], cfg["level"]
    if args.scenario:
        reports = [run_scenario(args.scenario, N, level, cfg["norm"])]
    else:
        reports = run_all(level, N, cfg["norm"])["reports"]
    ok = all(report_status(r) != "fail" for r in reports)
    payload = reports[0] if args.scenario else {"level": level, "truncation": N, "reports": reports, "ok": ok}
    lines, rows = [], []
    for r in reports:
        lines.append(f"[{report_status(r)}] {r['scenario']}: {r['anchor']} ({r['elapsed_ms']} ms)")
        for c in r["checks"]:
            lines.append(f"    {c['status']:>5}  {c['label']}")
            rows.append([r["scenario"], c["label"], c["status"]])
    return emit(cfg["format"], payload, "\n".join(lines), rows, ["scenario", "check", "status"]), ok


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--truncate", "-N", dest="truncation", type=int, help="truncation weight N (default 20)")
    common.add_argument("--norm", type=int, help="lattice norm 2k (default 2)")
    common.add_argument("--group", choices=GROUPS, help="automorphism group (default a4)")
    common.add_argument("--format", choices=FORMATS, help="output format (default json)")
    common.add_argument("--config", help="key = value settings file; flags take precedence")

    p = argparse.ArgumentParser(prog="latvoa", description="Exact computations in the rank-one lattice vertex algebra and its orbifolds.")
    p.add_argument("--version", action="version", version=f"latvoa {__version__}; {CONVENTIONS}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("char", parents=[common], help="graded character of the orbifold")
    s = sub.add_parser("invariants", parents=[common], help="basis of invariants at one weight")
    s.add_argument("--weight", type=int, required=True)
    s = sub.add_parser("primaries", parents=[common], help="Virasoro primaries of the orbifold at one weight")
    s.add_argument("--weight", type=int, required=True)
    s = sub.add_parser("decompose", parents=[common], help="multiplicities of L(1, n^2)")
    s.add_argument("--up-to", type=int, dest="up_to")
    s = sub.add_parser("mode-product", parents=[common], help="u_n v for named or inline states")
    s.add_argument("u")
    s.add_argument("n", type=int)
    s.add_argument("v")
    s = sub.add_parser("verify", parents=[common], help="run verification scenarios")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--scenario")
    g.add_argument("--all", action="store_true")
    s.add_argument("--level", choices=("quick", "full"))
    return p


COMMANDS = {
    "char": cmd_char, "invariants": cmd_invariants, "primaries": cmd_primaries,
    "decompose": cmd_decompose, "mode-product": cmd_mode_product, "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        if getattr(args, "weight", None) is not None and args.weight < 0:
            raise UsageError("weight must be non-negative")
        result = COMMANDS[args.command](args, cfg)
    except (UsageError, OSError) as exc:
        print(f"latvoa: usage error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"latvoa: usage error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # computation failures
        print(f"latvoa: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    ok = True
    if isinstance(result, tuple):
        result, ok = result
    print(result)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
