"""Command-line front end.

Points are given in interleaved real form ``x1,y1,...,xn,yn``. Exit codes: 0 success
(or all verification checks passed), 1 usage/config/IO error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .core import DEFAULT_THRESHOLDS, Thresholds, as_point, validate_weights
from .defexpr import ParseError, compile_source
from .domains import CATALOG, resolve
from .errors import BadParameters, ConfigError, QGaugeError, UnknownFamily
from .gauge import DomainDefinition, gauge, gauge_gradient, radial_value
from .verify import CHECKS, _map, boundary_sample, expected_to_pass, run_suite, sample_rng

CONFIG_KEYS = {
    "name",
    "dimension",
    "weights",
    "defining_function",
    "builtin",
    "bounding_radius",
    "solver",
    "thresholds",
    "seed",
    "expected",
}
FLAG_KEYS = ("quasi_balanced", "pseudoconvex", "smooth_boundary")


@dataclass
class DomainConfig:
    name: str
    dimension: int
    weights: list[int]
    bounding_radius: float
    defining_function: Optional[str] = None
    builtin: Optional[dict] = None
    solver: dict = field(default_factory=lambda: {"tol": 1e-12, "max_iter": 200})
    thresholds: dict = field(default_factory=dict)
    seed: int = 42
    expected: dict = field(default_factory=lambda: {k: True for k in FLAG_KEYS})

    def as_dict(self) -> dict:
        out = {"name": self.name, "dimension": self.dimension, "weights": list(self.weights)}
        if self.defining_function is not None:
            out["defining_function"] = self.defining_function
        else:
            out["builtin"] = self.builtin
        out.update(
            bounding_radius=self.bounding_radius,
            solver=dict(self.solver),
            thresholds=dict(self.thresholds),
            seed=self.seed,
            expected=dict(self.expected),
        )
        return out

    def threshold_record(self) -> Thresholds:
        return DEFAULT_THRESHOLDS.replace(**self.thresholds)


def _positive_float(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ConfigError(path, f"expected a positive number, got {value!r}")
    return float(value)


def _int(value, path, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return value


def parse_config(raw: dict, default_name: str = "domain") -> tuple[DomainConfig, DomainDefinition]:
    """Validate a config object and build its domain."""
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    for key in raw:
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown field")
    has_expr = "defining_function" in raw
    has_builtin = "builtin" in raw
    if has_expr and has_builtin:
        raise ConfigError("defining_function", "'defining_function' and 'builtin' are mutually exclusive")
    if not (has_expr or has_builtin):
        raise ConfigError("", "one of 'defining_function' or 'builtin' is required")

    name = raw.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "expected a nonempty string")

    solver_raw = raw.get("solver", {})
    if not isinstance(solver_raw, dict):
        raise ConfigError("solver", "expected an object")
    for key in solver_raw:
        if key not in ("tol", "max_iter"):
            raise ConfigError(f"solver.{key}", "unknown field")
    solver = {
        "tol": _positive_float(solver_raw.get("tol", 1e-12), "solver.tol"),
        "max_iter": _int(solver_raw.get("max_iter", 200), "solver.max_iter", 1),
    }

    thresholds = raw.get("thresholds", {})
    if not isinstance(thresholds, dict):
        raise ConfigError("thresholds", "expected an object")
    for key, value in thresholds.items():
        if key not in Thresholds.__dataclass_fields__:
            raise ConfigError(f"thresholds.{key}", "unknown threshold")
        _positive_float(value, f"thresholds.{key}")
    thresholds = {k: float(v) for k, v in thresholds.items()}

    seed = _int(raw.get("seed", 42), "seed", 0)
    if seed >= 2**64:
        raise ConfigError("seed", "must fit in 64 bits")

    expected_raw = raw.get("expected", {})
    if not isinstance(expected_raw, dict):
        raise ConfigError("expected", "expected an object")
    expected = {k: True for k in FLAG_KEYS}
    for key, value in expected_raw.items():
        if key not in FLAG_KEYS:
            raise ConfigError(f"expected.{key}", "unknown flag")
        if not isinstance(value, bool):
            raise ConfigError(f"expected.{key}", "expected true or false")
        expected[key] = value

    dimension = raw.get("dimension")
    if dimension is not None:
        dimension = _int(dimension, "dimension", 1)
    weights_raw = raw.get("weights")
    weights = None
    if weights_raw is not None:
        if not isinstance(weights_raw, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in weights_raw):
            raise ConfigError("weights", "expected a list of integers")
        try:
            weights = validate_weights(weights_raw)
        except QGaugeError as exc:
            raise ConfigError("weights", f"{type(exc).__name__}: {exc}") from exc
    radius = raw.get("bounding_radius")
    if radius is not None:
        radius = _positive_float(radius, "bounding_radius")

    if has_expr:
        src = raw["defining_function"]
        if dimension is None:
            raise ConfigError("dimension", "required with 'defining_function'")
        if weights is None:
            raise ConfigError("weights", "required with 'defining_function'")
        if radius is None:
            raise ConfigError("bounding_radius", "required with 'defining_function'")
        if len(weights) != dimension:
            raise ConfigError("weights", f"length {len(weights)} does not match dimension {dimension}")
        if not isinstance(src, str):
            raise ConfigError("defining_function", "expected a string")
        try:
            psi = compile_source(src, dimension)
        except ParseError as exc:
            raise ConfigError("defining_function", f"{type(exc).__name__}: {exc}") from exc
        build = dict(name=name, weights=weights, psi=psi, bounding_radius=radius, source=src)
        builtin_echo = None
    else:
        spec = raw["builtin"]
        if not isinstance(spec, dict) or "family" not in spec:
            raise ConfigError("builtin", "expected an object with 'family' and optional 'params'")
        for key in spec:
            if key not in ("family", "params"):
                raise ConfigError(f"builtin.{key}", "unknown field")
        params = spec.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("builtin.params", "expected an object")
        try:
            b = resolve(spec["family"], params)
        except UnknownFamily as exc:
            raise ConfigError("builtin.family", str(exc)) from exc
        except BadParameters as exc:
            raise ConfigError("builtin.params", str(exc)) from exc
        if dimension is not None and dimension != len(b.weights):
            raise ConfigError("dimension", f"{dimension} does not match builtin dimension {len(b.weights)}")
        if weights is not None and weights != b.weights:
            raise ConfigError("weights", f"{list(weights.p)} does not match builtin weights {list(b.weights.p)}")
        weights = b.weights
        dimension = len(weights)
        radius = b.bounding_radius if radius is None else radius
        src = None
        build = dict(
            name=name,
            weights=weights,
            psi=b.psi,
            bounding_radius=radius,
            oracle=b.oracle,
            smooth=b.expected.smooth_boundary,
            source=b.expression,
        )
        builtin_echo = {"family": b.family, "params": b.params}

    try:
        dom = DomainDefinition(solver_tol=solver["tol"], max_iter=solver["max_iter"], **build)
    except QGaugeError as exc:
        path = "solver.tol" if "solver_tol" in str(exc) else "bounding_radius" if "bounding_radius" in str(exc) else ""
        raise ConfigError(path or ("defining_function" if has_expr else "builtin"), str(exc)) from exc

    cfg = DomainConfig(
        name=name,
        dimension=dimension,
        weights=list(weights.p),
        bounding_radius=radius,
        defining_function=src,
        builtin=builtin_echo,
        solver=solver,
        thresholds=thresholds,
        seed=seed,
        expected=expected,
    )
    return cfg, dom


def load_config(path) -> tuple[DomainConfig, DomainDefinition]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON in {path}: {exc}") from exc
    return parse_config(raw, default_name=path.stem)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    # repr-based float formatting in json round-trips exactly
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def build_report(cfg: DomainConfig, checks, hopf, suite, n_samples) -> dict:
    entries = []
    overall = True
    for rep in checks:
        d = rep.as_dict()
        d["expected_pass"] = expected_to_pass(rep.check_name, cfg.expected)
        if d["expected_pass"] and not rep.passed:
            overall = False
        entries.append(d)
    hopf_dict = None
    if hopf is not None:
        hopf_dict = hopf.as_dict()
        hopf_dict["expected_pass"] = expected_to_pass("hopf", cfg.expected)
        if hopf_dict["expected_pass"] and not hopf.passed:
            overall = False
    return {
        "tool_version": __version__,
        "domain": cfg.as_dict(),
        "suite": list(suite),
        "samples": n_samples,
        "seed": cfg.seed,
        "checks": entries,
        "hopf": hopf_dict,
        "overall_pass": overall,
    }


def _parse_point(text: str, n: int) -> np.ndarray:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError as exc:
        raise ConfigError("--point", f"not a comma-separated list of numbers: {text!r}") from exc
    try:
        return as_point(values, n)
    except QGaugeError as exc:
        raise ConfigError("--point", str(exc)) from exc


def _fmt(v: float) -> str:
    return repr(float(v))


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


POINT_HELP = "point in interleaved real form x1,y1,...,xn,yn"


def make_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="qgauge",
        description="Minkowski functions of quasi-balanced domains and sampled checks of their properties.",
        epilog="Points are interleaved real coordinates x1,y1,...,xn,yn. Exit codes: 0 ok, 1 error, 2 checks failed.",
    )
    parser.add_argument("--version", action="version", version=f"qgauge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("eval", help="print the gauge h(z) (and its gradient) as JSON")
    p.add_argument("--domain", required=True, help="domain config JSON file")
    p.add_argument("--point", required=True, help=POINT_HELP)
    p.add_argument("--grad", action="store_true", help="also print the real gradient of h")

    p = sub.add_parser("verify", help="run verification checks and write a JSON report")
    p.add_argument("--domain", required=True)
    p.add_argument("--suite", default=",".join(CHECKS), help=f"comma-separated subset of {','.join(CHECKS)}")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--psh-samples", type=int, default=None, help="samples for the psh check (default: --samples)")
    p.add_argument("--hopf-interior", type=int, default=200)
    p.add_argument("--hopf-mesh", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--out", default=None, help="report path (default: stdout)")

    p = sub.add_parser("boundary", help="CSV cloud of boundary points x1,y1,...,psi_residual")
    p.add_argument("--domain", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="CSV of t, g(z,t), dg/dt along a radial ray")
    p.add_argument("--domain", required=True)
    p.add_argument("--direction", required=True, help=POINT_HELP)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("domains", help="builtin catalog")
    dsub = p.add_subparsers(dest="domains_command", required=True, parser_class=_ArgumentParser)
    dsub.add_parser("list", help="list catalog entries with their expected flags")
    show = dsub.add_parser("show", help="print a config file for a catalog entry")
    show.add_argument("entry")
    return parser


def _cmd_eval(args) -> int:
    cfg, dom = load_config(args.domain)
    z = _parse_point(args.point, dom.n)
    res = gauge(dom, z)
    out = {
        "h": res.h,
        "iterations": res.iterations,
        "method": res.method,
        "residual": res.residual,
        "evaluations": res.evaluations,
    }
    if args.grad:
        out["gradient"] = gauge_gradient(dom, z, degenerate=cfg.threshold_record().degenerate_radial)
    sys.stdout.write(dumps(out))
    return 0


def _cmd_verify(args) -> int:
    cfg, dom = load_config(args.domain)
    suite = [s.strip() for s in args.suite.split(",") if s.strip()]
    unknown = [s for s in suite if s not in CHECKS]
    if unknown or not suite:
        raise ConfigError("--suite", f"unknown check(s) {unknown}; choose from {','.join(CHECKS)}")
    if args.samples < 1:
        raise ConfigError("--samples", "must be >= 1")
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed", "must be a 64-bit unsigned integer")
        cfg.seed = args.seed
    if args.hopf_mesh < 100 or args.hopf_interior < 1:
        raise ConfigError("--hopf-mesh", "need --hopf-mesh >= 100 and --hopf-interior >= 1")
    checks, hopf = run_suite(
        dom,
        suite,
        n_samples=args.samples,
        seed=cfg.seed,
        thresholds=cfg.threshold_record(),
        psh_samples=args.psh_samples,
        hopf_interior=args.hopf_interior,
        hopf_mesh=args.hopf_mesh,
    )
    report = build_report(cfg, checks, hopf, suite, args.samples)
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if report["overall_pass"] else 2


def _cmd_boundary(args) -> int:
    cfg, dom = load_config(args.domain)
    if args.samples < 1:
        raise ConfigError("--samples", "must be >= 1")
    seed = cfg.seed if args.seed is None else args.seed

    def one(i):
        xi = boundary_sample(dom, sample_rng(seed, "boundary", i), i)
        return xi, float(dom.psi(xi.tolist()))

    rows = _map(one, args.samples)
    header = [f"{c}{j + 1}" for j in range(dom.n) for c in "xy"] + ["psi_residual"]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for xi, res in rows:
            w.writerow([_fmt(v) for v in xi] + [_fmt(res)])
    return 0


def _cmd_sweep(args) -> int:
    cfg, dom = load_config(args.domain)
    z = _parse_point(args.direction, dom.n)
    if not (0 < args.t_min <= args.t_max) or args.steps < 1:
        raise ConfigError("--t-min", "need 0 < t-min <= t-max and steps >= 1")
    ts = np.linspace(args.t_min, args.t_max, args.steps) if args.steps > 1 else np.array([args.t_min])
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "g", "dg_dt"])
        for t in ts:
            prof = radial_value(dom, z, float(t))
            w.writerow([_fmt(t), _fmt(prof.g_value), _fmt(prof.dg_dt)])
    return 0


def _cmd_domains(args) -> int:
    if args.domains_command == "list":
        rows = [("name", "family", "quasi_balanced", "pseudoconvex", "smooth_boundary", "oracle", "note")]
        for e in CATALOG.values():
            f = e.expected
            rows.append(
                (e.name, e.family, str(f.quasi_balanced), str(f.pseudoconvex), str(f.smooth_boundary),
                 "yes" if e.has_oracle else "no", e.note)
            )
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]) - 1)]
        for r in rows:
            sys.stdout.write("  ".join(c.ljust(wd) for c, wd in zip(r, widths)) + "  " + r[-1] + "\n")
        return 0
    entry = CATALOG.get(args.entry)
    if entry is None:
        raise ConfigError("entry", f"no catalog entry {args.entry!r}; see `qgauge domains list`")
    b = entry.resolved
    cfg = {
        "name": entry.name,
        "dimension": len(b.weights),
        "weights": list(b.weights.p),
        "builtin": {"family": b.family, "params": b.params},
        "bounding_radius": b.bounding_radius,
    }
    sys.stdout.write(dumps(cfg))
    return 0


COMMANDS = {
    "eval": _cmd_eval,
    "verify": _cmd_verify,
    "boundary": _cmd_boundary,
    "sweep": _cmd_sweep,
    "domains": _cmd_domains,
}


def run(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 1
    try:
        return COMMANDS[args.command](args)
    except (QGaugeError, OSError, ValueError, ArithmeticError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        sys.stderr.write(f"qgauge: error: {msg}\n")
        return 1


def main() -> None:
    sys.exit(run())
