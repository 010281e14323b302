"""Command-line front end.

    python3 -m taylortower <command> [flags]

Every command prints one JSON document (or an aligned table derived from it).
Exit codes: 0 success, 2 validation error, 3 budget or iteration cap exhausted.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

from . import atlas, calculus, representations as reps, tower
from .chain import DEFAULT_BUDGET, BudgetExceeded, ChainComplex, ChainComplexError, sphere
from .functors import SumInclusion, functor_from_json, natmap_from_json
from .homology import homology
from .linalg import QQ, Ring
from .serialize import complex_from_json, complex_to_json, dumps
from .simplicial import builtin, config_chains, simplicial_from_json


@dataclass(frozen=True)
class RunConfig:
    ring: Ring
    budget: int
    cap: int | None
    window: tuple | None
    fmt: str
    seed: int


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# input parsing


def _load(text: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return json.load(fh)
    return json.loads(text)


def parse_complex(text: str, ring: Ring) -> ChainComplex:
    """``S<k>``, ``zero``, a built-in simplicial set name, inline JSON or ``@file``."""
    t = text.strip()
    if t.startswith("{") or t.startswith("@"):
        return complex_from_json(_load(t), ring)
    if t[:1] == "S" and t[1:].lstrip("-").isdigit():
        return sphere(int(t[1:]), ring)
    if t == "zero":
        return ChainComplex(ring, {})
    try:
        K = builtin(t)
    except ValueError:
        raise UsageError(f"cannot parse complex {text!r}") from None
    return config_chains(K, 1, based=False, ring=ring).complex


def parse_rep(text: str, ring: Ring) -> reps.Representation:
    """Shorthands ``trivial:n``, ``sign:n``, ``regular:n``, ``lie:n``,
    ``partition:n``, ``atheory:n``; or a representation JSON document."""
    t = text.strip()
    if t.startswith("{") or t.startswith("@"):
        return reps.rep_from_json(_load(t), ring)
    name, _, arg = t.partition(":")
    if not arg.isdigit():
        raise UsageError(f"cannot parse representation {text!r}")
    n = int(arg)
    table = {
        "trivial": lambda: reps.trivial_rep(n, ring),
        "sign": lambda: reps.sign_rep(n, ring),
        "regular": lambda: reps.regular_rep("S", n, ring),
        "lie": lambda: atlas.lie_module(n, ring),
        "partition": lambda: atlas.partition_complex(n, ring),
        "atheory": lambda: atlas.a_theory_coefficient(n, ring),
    }
    if name not in table:
        raise UsageError(f"unknown representation shorthand {name!r}")
    return table[name]()


def parse_natmap(text: str, ring: Ring):
    """Natural map JSON, or ``F->G`` for the prefix inclusion of sums."""
    t = text.strip()
    if "->" in t and not t.startswith("{"):
        a, b = t.split("->", 1)
        return SumInclusion(functor_from_json(a, ring), functor_from_json(b, ring))
    return natmap_from_json(_load(t), ring)


def parse_window(text: str | None) -> tuple | None:
    if text is None:
        return None
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"window must be 'lo,hi', got {text!r}") from None
    if lo > hi:
        raise UsageError("window lower end exceeds upper end")
    return lo, hi


def _inputs(args, cfg: RunConfig, n: int) -> list[ChainComplex]:
    ats = args.at or ["S0"]
    Xs = [parse_complex(a, cfg.ring) for a in ats]
    if len(Xs) == 1:
        Xs = Xs * n
    if len(Xs) != n:
        raise UsageError(f"expected 1 or {n} inputs, got {len(Xs)}")
    return Xs


# ---------------------------------------------------------------------------
# commands


def _rep_summary(r: reps.Representation) -> dict:
    rq = r if r.ring == QQ or r.ring.kind == "Fp" else reps.change_rep_ring(r, QQ)
    H = homology(r.complex)
    return {"homology": H.to_json(), "character": reps.character(rq).to_json(),
            "certification": "exact"}


def cmd_homology(args, cfg):
    C = parse_complex(args.complex, cfg.ring)
    return {"complex": complex_to_json(C), "homology": homology(C).to_json(),
            "certification": "exact"}


def cmd_crosseffect(args, cfg):
    F = functor_from_json(args.functor, cfg.ring)
    Xs = _inputs(args, cfg, args.n)
    if all(X is Xs[0] for X in Xs):
        r = calculus.cross_effect_representation(F, args.n, Xs[0], cfg.budget)
        out = _rep_summary(r)
    else:
        C = calculus.cross_effect(F, args.n, Xs, cfg.budget)
        out = {"homology": homology(C).to_json(), "certification": "exact"}
    out["n"] = args.n
    return out


def cmd_multilinearize(args, cfg):
    F = functor_from_json(args.functor, cfg.ring)
    Xs = _inputs(args, cfg, args.n)
    ml = calculus.multilinearize(F, Xs, cfg.window, cfg.cap or calculus.DEFAULT_CAP, cfg.budget)
    out = ml.to_json()
    out["certification"] = "window" if ml.stabilized else "not-stabilized"
    return out


def cmd_tower(args, cfg):
    F = functor_from_json(args.functor, cfg.ring)
    X = parse_complex(args.at[0] if args.at else "S0", cfg.ring)
    rep = tower.taylor_P(F, args.n, X, cfg.cap or tower.DEFAULT_IMAX, cfg.window, cfg.budget, args.model)
    out = rep.to_json()
    if rep.verdict == "budget-exhausted":
        raise _Partial(out)
    return out


def cmd_layer(args, cfg):
    F = functor_from_json(args.functor, cfg.ring)
    X = parse_complex(args.at[0] if args.at else "S0", cfg.ring)
    L = tower.layer_D(F, args.n, X, cfg.cap or tower.DEFAULT_IMAX, cfg.window, cfg.budget, args.model)
    out = L.to_json()
    out["certification"] = "window"
    return out


def cmd_coefficient(args, cfg):
    F = functor_from_json(args.functor, cfg.ring)
    r = calculus.layer_coefficient(F, args.n, cfg.ring, cfg.window, cfg.cap or calculus.DEFAULT_CAP, cfg.budget)
    out = _rep_summary(r)
    H = homology(r.complex)
    out.update({"n": args.n, "rank": H.total_rank(), "degrees": sorted(H.ranks()),
                "stabilization": {k: v for k, v in r.meta.items() if k in ("level", "window", "stabilized")},
                "certification": "window"})
    return out


def cmd_delta(args, cfg):
    r = parse_rep(args.rep, cfg.ring)
    X = parse_complex(args.at[0] if args.at else "S0", cfg.ring)
    res = calculus.delta_n(r, X, cfg.cap, cfg.budget)
    return res.to_json()


def cmd_roundtrip(args, cfg):
    r = parse_rep(args.rep, cfg.ring)
    Xs = _inputs(args, cfg, r.n)
    out = calculus.roundtrip_check(r, Xs, cfg.budget)
    return {k: (v.to_json() if hasattr(v, "to_json") else v) for k, v in out.items()}


def cmd_partition(args, cfg):
    r = atlas.partition_complex(args.n, cfg.ring, cfg.cap or atlas.DEFAULT_CAP, cfg.budget)
    H = homology(r.complex)
    out = _rep_summary(r)
    out.update({"n": args.n, "degree": args.n - 3, "rank": H.betti(args.n - 3),
                "suspended_degree": args.n - 1, "dual_degree": 1 - args.n})
    return out


def cmd_lie(args, cfg):
    r = atlas.lie_module(args.n, cfg.ring, cfg.cap or atlas.DEFAULT_CAP)
    out = _rep_summary(r)
    out.update({"n": args.n, "rank": r.rank(), "basis": r.meta["basis"],
                "action": r.to_json()["generators"]})
    return out


def cmd_compare(args, cfg):
    return atlas.compare_partition_lie(args.n, cfg.cap or atlas.DEFAULT_CAP)


def cmd_config(args, cfg):
    space = args.space
    if space.startswith("{") or space.startswith("@"):
        K = simplicial_from_json(_load(space))
    else:
        K = builtin(space)
    r = atlas.config_compactified(K, args.n, args.based, cfg.ring, cfg.budget)
    out = _rep_summary(r)
    out.update({"n": args.n, "based": args.based, "space": K.name, "cells": r.meta["cells"]})
    return out


def cmd_identity(args, cfg):
    r = atlas.identity_derivative(args.n, cfg.ring, cfg.cap or atlas.DEFAULT_CAP)
    out = _rep_summary(r)
    out.update({"n": args.n, "degree": args.n - 1, "dual_degree": 1 - args.n})
    return out


def cmd_atheory(args, cfg):
    r = atlas.a_theory_coefficient(args.n, cfg.ring, cfg.cap or atlas.DEFAULT_CAP)
    out = _rep_summary(r)
    out.update({"n": args.n, "degree": args.n - 1, "dual_degree": 1 - args.n})
    if args.consistency:
        out["consistency"] = atlas.a_theory_consistency(args.n, cfg.ring)
    return out


def cmd_character(args, cfg):
    r = parse_rep(args.rep, cfg.ring)
    return _rep_summary(r)


def cmd_group_homology(args, cfg):
    r = parse_rep(args.rep, cfg.ring)
    cap = 4 if cfg.cap is None else cfg.cap
    return reps.group_homology(r, cap, cfg.budget).to_json()


def cmd_agreement(args, cfg):
    u = parse_natmap(args.map, cfg.ring)
    ks = tuple(int(k) for k in args.ks.split(","))
    out = calculus.agreement_order(u, args.n, ks, cfg.ring, cfg.budget)
    out["connectivity"] = {str(k): v for k, v in out["connectivity"].items()}
    out["certification"] = "exact on samples"
    return out


COMMANDS = {
    "homology": cmd_homology,
    "crosseffect": cmd_crosseffect,
    "multilinearize": cmd_multilinearize,
    "tower": cmd_tower,
    "layer": cmd_layer,
    "coefficient": cmd_coefficient,
    "delta": cmd_delta,
    "roundtrip": cmd_roundtrip,
    "partition": cmd_partition,
    "lie": cmd_lie,
    "compare-partition-lie": cmd_compare,
    "config": cmd_config,
    "identity-derivative": cmd_identity,
    "atheory": cmd_atheory,
    "character": cmd_character,
    "group-homology": cmd_group_homology,
    "agreement": cmd_agreement,
}


class _Partial(Exception):
    def __init__(self, doc):
        super().__init__("budget exhausted")
        self.doc = doc


# ---------------------------------------------------------------------------
# argument parsing and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", default="Z", help="Z, Q or Fp:<p>")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="generator budget per assembly")
    common.add_argument("--cap", type=int, default=None, help="iteration, suspension or degree cap")
    common.add_argument("--window", default=None, help="stabilization window 'lo,hi'")
    common.add_argument("--format", dest="fmt", choices=("json", "table"), default="json")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="taylortower", description="Functor calculus on chain complexes.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, *extra):
        sp = sub.add_parser(name, parents=[common])
        for flags, kw in extra:
            sp.add_argument(*flags, **kw)
        return sp

    functor = (("--functor",), {"required": True, "help": "JSON or shorthand such as tensor_power:2"})
    nflag = (("--n",), {"type": int, "required": True})
    at = (("--at",), {"action": "append", "help": "input complex (repeatable)"})
    rep = (("--rep",), {"required": True, "help": "representation JSON or shorthand such as lie:3"})
    model = (("--model",), {"choices": ("auto", "coefficient", "generic"), "default": "auto"})

    add("homology", (("--complex",), {"required": True}))
    add("crosseffect", functor, nflag, at)
    add("multilinearize", functor, nflag, at)
    add("tower", functor, nflag, at, model)
    add("layer", functor, nflag, at, model)
    add("coefficient", functor, nflag)
    add("delta", rep, at)
    add("roundtrip", rep, at)
    add("partition", nflag)
    add("lie", nflag)
    add("compare-partition-lie", nflag)
    add("config", nflag, (("--space",), {"default": "circle"}),
        (("--based",), {"action": "store_true"}))
    add("identity-derivative", nflag)
    add("atheory", nflag, (("--consistency",), {"action": "store_true"}))
    add("character", rep)
    add("group-homology", rep)
    add("agreement", (("--map",), {"required": True}), nflag, (("--ks",), {"default": "1,2,3"}))
    return p


def _flatten(doc, prefix="") -> list[tuple[str, str]]:
    if isinstance(doc, dict):
        out = []
        for k in sorted(doc):
            out += _flatten(doc[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(doc, list) and doc and all(isinstance(x, (dict, list)) for x in doc):
        out = []
        for i, x in enumerate(doc):
            out += _flatten(x, f"{prefix}[{i}]")
        return out
    return [(prefix, json.dumps(doc, sort_keys=True, default=str))]


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc)
    rows = _flatten(doc)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def run(argv: list[str]) -> tuple[int, dict]:
    """Parse ``argv`` and execute; returns ``(exit code, output document)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (2 if e.code else 0), {"error": "usage"}
    try:
        if args.budget <= 0:
            raise UsageError("budget must be positive")
        if args.cap is not None and args.cap < 0:
            raise UsageError("cap must be non-negative")
        cfg = RunConfig(Ring.parse(args.ring), args.budget, args.cap,
                        parse_window(args.window), args.fmt, args.seed)
        random.seed(cfg.seed)
        doc = COMMANDS[args.command](args, cfg)
        doc = {"command": args.command, "ring": cfg.ring.name, "result": doc}
        return 0, doc
    except _Partial as e:
        return 3, {"command": args.command, "error": "budget", "partial": e.doc}
    except BudgetExceeded as e:
        return 3, {"command": args.command, "error": "budget", "message": str(e),
                   "partial": getattr(e, "partial", None)}
    except (calculus.NotStabilized, tower.TowerNotStable) as e:
        part = getattr(e, "partial", None)
        if hasattr(part, "to_json"):
            part = part.to_json()
        return 3, {"command": args.command, "error": "not-stabilized", "message": str(e), "partial": part}
    except ChainComplexError as e:
        return 2, {"command": args.command, "error": "validation", "message": str(e),
                   "degree": getattr(e, "degree", None)}
    except (ValueError, KeyError, json.JSONDecodeError, OSError) as e:
        return 2, {"command": args.command, "error": "validation", "message": str(e), "degree": None}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, doc = run(argv)
    if doc.get("error") == "usage":
        return code
    fmt = build_parser().parse_args(argv).fmt
    print(render(doc, fmt))
    return code


__all__ = ["run", "main", "build_parser", "parse_complex", "parse_rep", "parse_natmap", "RunConfig"]
