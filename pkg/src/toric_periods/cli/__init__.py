"""Command-line front end: ``toric-periods {verify,classset,brandt,local}``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import sympy

from ..errors import DomainError, PrecisionShortfall, ToricPeriodsError
from .cache import ClassSetCache
from .config import RunConfig, load_config

EXIT_OK, EXIT_INAPPLICABLE, EXIT_PRECISION, EXIT_INTERNAL = 0, 2, 3, 4

__all__ = ["main", "RunConfig", "ClassSetCache"]


def _flag(parser: argparse.ArgumentParser, *names: str, **kw) -> None:
    kw.setdefault("default", None)
    parser.add_argument(*names, **kw)


def _switch(parser: argparse.ArgumentParser, name: str, help_text: str) -> None:
    parser.add_argument(name, action="store_const", const=True, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toric-periods", description="Toric period identities for weight-2 newforms.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _flag(common, "--config", help="JSON file with RunConfig fields; flags override it")
    _flag(common, "--output", "-o", help="write the result here instead of stdout")
    _flag(common, "--format", choices=["json", "text"])
    _flag(common, "--cache-dir", dest="cache_dir")
    _switch(common, "--deterministic", "omit runtime and cache statistics so output is reproducible")

    v = sub.add_parser("verify", parents=[common], help="compare both sides of the period formula")
    _flag(v, "--level", type=int)
    _flag(v, "--disc", type=int)
    _flag(v, "--cond", type=int)
    _flag(v, "--char", help="'trivial', 'all', or a character index")
    _flag(v, "--precision-bits", dest="precision_bits", type=int)
    _flag(v, "--terms", type=int, help="coefficient budget for the adjoint series")
    _flag(v, "--tolerance", type=float)
    _switch(v, "--degree4-afe", "enable the degree-4 route (not implemented)")

    c = sub.add_parser("classset", parents=[common], help="right ideal classes of a maximal order")
    _flag(c, "--ramified", type=int, nargs="+")

    b = sub.add_parser("brandt", parents=[common], help="Brandt matrix of a maximal order")
    _flag(b, "--ramified", type=int, nargs="+")
    _flag(b, "--prime", type=int)

    lc = sub.add_parser("local", parents=[common], help="local constant table")
    _switch(lc, "--grid", "the full kv_type x n x c grid")
    _flag(lc, "--kv-type", dest="kv_type", choices=["split", "inert", "ramified"])
    _flag(lc, "--n", type=int)
    _flag(lc, "--c", type=int)
    return parser


def _maximal(ramified: list[int]):
    from ..quaternion import algebra_from_ramification, maximal_order

    if not ramified:
        raise DomainError("--ramified is required", "cli")
    if len(ramified) % 2 == 0:
        raise DomainError("a definite algebra ramifies at an odd number of finite primes", "cli")
    return maximal_order(algebra_from_ramification(ramified))


def _class_set(cfg: RunConfig, order):
    from ..brandt import class_set

    if cfg.cache_dir:
        return ClassSetCache(cfg.cache_dir).class_set(order)
    return class_set(order)


def cmd_verify(cfg: RunConfig) -> tuple[int, object]:
    from ..lvalues import VerifyOptions, verify
    from ..quadratic import QuadOrder, characters, class_group

    opts = VerifyOptions(
        digits=cfg.digits,
        petersson_digits=min(cfg.digits, 20),
        tolerance=cfg.tolerance,
        degree4=cfg.degree4_afe,
        terms=cfg.terms,
    )
    if cfg.char == "all":
        group = class_group(QuadOrder(cfg.disc, cfg.cond))
        specs = [i for i, chi in enumerate(characters(group)) if chi.conductor == cfg.cond]
    else:
        specs = [cfg.char]
    cache = ClassSetCache(cfg.cache_dir) if cfg.cache_dir else None
    reports, code = [], EXIT_OK
    for spec in specs:
        spec = int(spec) if isinstance(spec, str) and spec.lstrip("-").isdigit() else spec
        try:
            rep = verify(cfg.level, cfg.disc, cfg.cond, spec, opts, cache).to_json()
            rep["config"] = cfg.to_json()
            if cfg.deterministic:
                rep["runtime_ms"] = None
                rep["cache"] = None
            if not rep["passed"]:
                code = max(code, EXIT_PRECISION)
        except ToricPeriodsError as exc:
            rep = {"inputs": {"level": cfg.level, "disc": cfg.disc, "conductor": cfg.cond, "character": str(spec)}, "error": str(exc), "module": exc.module}
            code = max(code, exc.exit_code)
        reports.append(rep)
    return code, reports[0] if len(reports) == 1 and cfg.char != "all" else reports


def cmd_classset(cfg: RunConfig) -> tuple[int, object]:
    order = _maximal(cfg.ramified)
    cs = _class_set(cfg, order)
    return EXIT_OK, {
        "ramified": list(order.algebra.ramified_primes),
        "level": cs.level,
        "n": len(cs),
        "weights": list(cs.weights),
        "mass": str(cs.mass_sum()),
        "norms": [str(x) for x in cs.norms],
    }


def cmd_brandt(cfg: RunConfig) -> tuple[int, object]:
    from ..brandt import brandt_matrix

    if cfg.prime is None:
        raise DomainError("--prime is required", "cli")
    order = _maximal(cfg.ramified)
    cs = _class_set(cfg, order)
    bm = brandt_matrix(cs, cfg.prime)
    eig = sympy.Matrix(bm.matrix).eigenvals()
    return EXIT_OK, {
        "ramified": list(order.algebra.ramified_primes),
        "prime": cfg.prime,
        "matrix": [list(r) for r in bm.matrix],
        "eigenvalues": {str(k): int(v) for k, v in sorted(eig.items(), key=lambda kv: str(kv[0]))},
    }


def cmd_local(cfg: RunConfig) -> tuple[int, object]:
    from ..local_constants import LocalInput, combined_identity, identity_grid

    if cfg.grid or cfg.kv_type is None:
        rows = identity_grid()
    else:
        rows = [combined_identity(LocalInput(cfg.kv_type, cfg.n or 0, cfg.c or 0))]
    out = [r.to_json() for r in rows]
    code = EXIT_OK if all(r.equal for r in rows) else EXIT_INTERNAL
    return code, out


COMMANDS = {"verify": cmd_verify, "classset": cmd_classset, "brandt": cmd_brandt, "local": cmd_local}


def _as_text(result) -> str:
    if isinstance(result, list):
        if result and isinstance(result[0], dict) and "kv_type" in result[0]:
            lines = [f"{'kv':9} {'n':>2} {'c':>2} {'B':>5} {'case':>4}  equal  lhs"]
            for r in result:
                b = "-" if r["b_split"] is None else ("split" if r["b_split"] else "div")
                lines.append(f"{r['kv_type']:9} {r['n']:>2} {r['c']:>2} {b:>5} {r['beta_case']:>4}  {str(r['equal']).lower():5}  {r['lhs']}")
            return "\n".join(lines)
        return "\n\n".join(_as_text(r) for r in result)
    if isinstance(result, dict):
        return "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in result.items())
    return str(result)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k != "config"}
    try:
        cfg = load_config(args.config, overrides)
        code, result = COMMANDS[cfg.command](cfg)
    except PrecisionShortfall as exc:
        print(json.dumps({"error": str(exc), "achieved": exc.achieved}), file=sys.stderr)
        return EXIT_PRECISION
    except ToricPeriodsError as exc:
        print(json.dumps({"error": str(exc), "module": exc.module}), file=sys.stderr)
        return exc.exit_code
    fmt = getattr(cfg, "format", "json")
    text = json.dumps(result, sort_keys=True, indent=2) if fmt == "json" else _as_text(result)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n")
    else:
        print(text)
    if isinstance(result, dict) and "error" in result:
        print(result["error"], file=sys.stderr)
    return code
