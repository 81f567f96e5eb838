"""Command-line front end: ``moonshine-forge COMMAND [options]``.

Exit codes: 0 pass or plain computation, 1 an identity or verdict failed,
2 usage, parse or data-range errors.  Every failure report carries a
machine-readable ``reason``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import fricke, replicate, twisted
from .errors import (
    InconsistentError,
    MoonshineError,
    NegativityError,
    NonIntegralityError,
    UnderDeterminedError,
)
from .exact import CycNumber, format_scalar
from .modcatalog import Catalog, default_catalog, load_catalog
from .qseries import PSeries, format_series, parse_series, set_modulus_cap

COMMANDS = (
    "expand",
    "grunsky",
    "replicable",
    "extend",
    "roots",
    "cartan",
    "denom-check",
    "compat-check",
    "witness-set",
    "hecke",
    "hecke-monic",
    "corollary-check",
    "theorem-check",
    "classify",
)

VERDICT_ERRORS = (InconsistentError, UnderDeterminedError, NonIntegralityError, NegativityError)


class UsageError(Exception):
    reason = "usage"


@dataclass
class RunConfig:
    command: str
    catalogPath: str | None = None
    familyPath: str | None = None
    truncation: int = 20
    level: int = 1
    modulusCap: int = 360
    outputFormat: str = "json"
    out: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.truncation < 1:
            raise UsageError("--trunc must be at least 1")
        if self.level < 1:
            raise UsageError("--level must be at least 1")
        if self.modulusCap < self.level:
            raise UsageError("--modulus-cap must be at least --level")
        if self.outputFormat not in ("json", "text"):
            raise UsageError("--format must be json or text")


# ---------------------------------------------------------------------------
# rendering


def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, CycNumber):
        return format_scalar(x)
    if isinstance(x, PSeries):
        return series_json(x)
    if isinstance(x, dict):
        return {_key(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return [jsonable(v) for v in sorted(x)]
    return str(x)


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(jsonable(v)) for v in k)
    return str(jsonable(k))


def series_json(f: PSeries) -> dict:
    return {
        "coefficients": {str(e): jsonable(c) for e, c in f.items()},
        "trunc": jsonable(f.trunc),
    }


def _text(report, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in report.items():
        if isinstance(v, dict) and v:
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    return "\n".join(lines)


def emit(report: dict, cfg: RunConfig, text: str | None = None) -> None:
    if cfg.outputFormat == "json":
        data = json.dumps(jsonable(report), indent=2) + "\n"
    else:
        data = (text if text is not None else _text(jsonable(report))) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(data)
    else:
        sys.stdout.write(data)


# ---------------------------------------------------------------------------
# inputs


def _catalog(cfg: RunConfig) -> Catalog:
    path = cfg.catalogPath or os.environ.get("MOONSHINE_FORGE_CATALOG")
    return load_catalog(path) if path else default_catalog()


def _series(spec: str, cfg: RunConfig, trunc) -> PSeries:
    if spec is None:
        raise UsageError("a series is required (--f NAME or --f 'series text')")
    if "q^" in spec:
        return parse_series(spec)
    return _catalog(cfg).expand(spec, trunc)


def _members(args) -> list:
    return [s.strip() for s in args.members.split(",") if s.strip()]


def _replicable_family(args, cfg, depth) -> replicate.ReplicableFamily:
    if cfg.familyPath:
        doc = json.loads(Path(cfg.familyPath).read_text())
        if "vtable" in doc:
            raise UsageError("this command needs a replicate family, not a trace table")
        cat = _catalog(cfg)
        return replicate.load_family(doc, cat, depth)
    if args.members:
        return replicate.ReplicableFamily.from_catalog(_catalog(cfg), _members(args), depth)
    raise UsageError("a family is required (--family PATH or --members A,B,...)")


def _trace_family(args, cfg, depth) -> twisted.TraceFamily:
    if args.f and not cfg.familyPath and not args.members:
        f = _series(args.f, cfg, depth)
        alg = fricke.root_multiplicities(f, args.bound)
        return twisted.from_fricke(alg, cfg.level)
    if cfg.familyPath:
        doc = json.loads(Path(cfg.familyPath).read_text())
        if "vtable" in doc:
            return twisted.load_trace_family(doc)
        return twisted.from_replicable(replicate.load_family(doc, _catalog(cfg), depth))
    return twisted.from_replicable(_replicable_family(args, cfg, depth))


def _load_override(path) -> dict:
    doc = json.loads(Path(path).read_text())
    out = {}
    items = doc.items() if isinstance(doc, dict) else ((f"{m},{n}", v) for m, n, v in doc)
    for key, v in items:
        m, n = (int(x) for x in str(key).split(","))
        out[(m, n)] = int(v)
    return out


# ---------------------------------------------------------------------------
# commands; each returns (report, exit code, optional text rendering)


def cmd_expand(args, cfg):
    f = _series(args.name or args.f, cfg, cfg.truncation)
    return {"name": args.name or args.f, **series_json(f)}, 0, format_series(f)


def cmd_grunsky(args, cfg):
    bound = args.bound or cfg.truncation
    H = replicate.grunsky(_series(args.f, cfg, bound), bound)
    return {"bound": bound, "entries": H.to_dict()}, 0, None


def cmd_replicable(args, cfg):
    bound = args.bound or cfg.truncation
    rep = replicate.is_replicable(_series(args.f, cfg, bound), bound)
    return rep, 0 if rep["verdict"] else 1, None


def cmd_extend(args, cfg):
    fam = _replicable_family(args, cfg, args.seed_depth or 7)
    if args.seed_depth:
        fam = fam.truncated(args.seed_depth)
    target = args.target or cfg.truncation
    out = replicate.extend_family(fam, target)
    members = {str(s): series_json(f) for s, f in sorted(out.members.items())}
    return {"period": out.period, "target": target, "members": members}, 0, None


def _algebra(args, cfg):
    bound = args.bound or cfg.truncation
    f = _series(args.f, cfg, bound - 1)
    return fricke.root_multiplicities(f, bound, cfg.level)


def cmd_roots(args, cfg):
    alg = _algebra(args, cfg)
    mult = {f"{m},{n}": v for (m, n), v in sorted(alg.mult.items())}
    return {"bound": alg.bound, "multiplicities": mult}, 0, None


def cmd_cartan(args, cfg):
    alg = _algebra(args, cfg)
    maxn = args.maxn or 3
    return {"bound": alg.bound, **fricke.cartan_block(alg, maxn)}, 0, None


def cmd_denom_check(args, cfg):
    alg = _algebra(args, cfg)
    if args.override:
        alg = alg.with_override(_load_override(args.override))
    rep = fricke.denominator_verify(alg)
    return rep, 0 if rep["verdict"] else 1, None


def cmd_compat_check(args, cfg):
    alg = _algebra(args, cfg)
    if args.override:
        alg = alg.with_override(_load_override(args.override))
    rep = fricke.compat_predicate(alg, cfg.level)
    return rep, 0 if rep["verdict"] else 1, None


def cmd_witness_set(args, cfg):
    bound = args.bound or 200
    exc = sorted(fricke.witness_exceptional_set(bound))
    rep = {"bound": bound, "exceptional": exc, "ogg_primes": fricke.ogg_primes()}
    code = 0
    if args.group_order:
        divides = int(args.group_order) % fricke.ogg_product() == 0
        rep["ogg_product_divides_order"] = divides
        code = 0 if divides else 1
    return rep, code, None


def _mt_depth(cfg, args):
    d = cfg.truncation
    return max(40, d * d // 4 + 2, getattr(args, "depth", None) or 0)


def cmd_hecke(args, cfg):
    n = args.n or 2
    depth = _mt_depth(cfg, args)
    fam = _trace_family(args, cfg, depth)
    g = twisted.equivariant_hecke(fam, n, args.k, args.l, args.m).scale(n)
    if args.trunc is not None and (g.top is None or Fraction(args.trunc) <= g.trunc):
        g = g.truncate(args.trunc)
    g = g.reduced()
    return {"n": n, "level": fam.level, "series": series_json(g)}, 0, format_series(g)


def cmd_hecke_monic(args, cfg):
    fam = _trace_family(args, cfg, _mt_depth(cfg, args))
    rep = twisted.hecke_monic_report(fam, args.maxn or 4)
    return rep, 0 if rep["verdict"] else 1, None


def cmd_corollary_check(args, cfg):
    fam = _trace_family(args, cfg, _mt_depth(cfg, args))
    rep = twisted.corollary_check(fam, cfg.truncation)
    return rep, 0 if rep["verdict"] else 1, None


def cmd_theorem_check(args, cfg):
    fam = _trace_family(args, cfg, _mt_depth(cfg, args))
    rep = twisted.theorem_check(fam, cfg.truncation)
    return rep, 0 if rep["verdict"] else 1, None


def cmd_classify(args, cfg):
    f = _series(args.f, cfg, cfg.truncation)
    return {"classification": replicate.classify_degenerate(f)}, 0, None


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", dest="catalog")
    common.add_argument("--family", dest="family")
    common.add_argument("--trunc", type=int, default=None)
    common.add_argument("--level", type=int, default=1)
    common.add_argument("--modulus-cap", type=int, default=360)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out")
    common.add_argument("--name")
    common.add_argument("--f")
    common.add_argument("--bound", type=int)
    common.add_argument("--maxn", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=int, default=1)
    common.add_argument("--l", type=int, default=0)
    common.add_argument("--m", type=int, default=1)
    common.add_argument("--members", help="comma-separated catalog names for h, h^2, ..., h^order")
    common.add_argument("--override", help="JSON multiplicity override {\"m,n\": value}")
    common.add_argument("--target", type=int)
    common.add_argument("--seed-depth", type=int)
    common.add_argument("--depth", type=int)
    common.add_argument("--group-order")
    parser = argparse.ArgumentParser(prog="moonshine-forge", description="Exact q-series and identity checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(cfg: RunConfig, args) -> int:
    cfg.validate()
    set_modulus_cap(cfg.modulusCap)
    report, code, text = HANDLERS[cfg.command](args, cfg)
    emit(report, cfg, text)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    cfg = RunConfig(
        command=args.command,
        catalogPath=args.catalog,
        familyPath=args.family,
        truncation=args.trunc if args.trunc is not None else 20,
        level=args.level,
        modulusCap=args.modulus_cap,
        outputFormat=args.format,
        out=args.out,
    )
    try:
        return run(cfg, args)
    except VERDICT_ERRORS as exc:
        emit({"verdict": False, "reason": exc.reason, "error": str(exc), "details": exc.details}, cfg)
        return 1
    except MoonshineError as exc:
        emit({"reason": exc.reason, "error": str(exc), "details": exc.details}, cfg)
        return 2
    except UsageError as exc:
        emit({"reason": exc.reason, "error": str(exc)}, cfg)
        return 2
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        emit({"reason": "input", "error": str(exc)}, cfg)
        return 2


if __name__ == "__main__":
    sys.exit(main())
