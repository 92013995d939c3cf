"""Command-line front end: ``aqec-lab <command> [options]``.

Exit codes: 0 success, 2 usage error, 3 parameter error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import re
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

from . import __version__
from .analytics import (
    CURVE_COLUMNS,
    NONSMOOTH,
    SMOOTH,
    block_lower_bound,
    block_poly_exponent,
    choi_upper_bound,
    default_grid,
    double_layer_poly_exponent,
    emit_rate_curves,
    fitted_exponent,
)
from .choi import default_workers, estimate_ensemble_choi
from .domainwall import (
    BoundaryTraces,
    block_erasure_transfer,
    brickwork_layers,
    dense_transfer_oracle,
    haar_second_moment,
    markov_second_moment_exact,
    random_product_traces,
)
from .ensembles import FAMILIES, CircuitSpec, EnsembleParams, build, build_double_layer, constructed_depth, matched_xi
from .errors import AqecError, ParameterError
from .lightcone import choi_floor, depth_lower_bound, disjoint_logical_set, light_cones
from .noise import ErasureIID, is_erasure, noise_to_dict, parse_noise

PROG = "aqec-lab"
CSV_FLOAT = "%.12g"


class UsageError(Exception):
    """Bad command-line or config-file usage (exit code 2)."""


def parse_eps(text: str, n: int) -> float:
    """Literal epsilon or a rule ``n^-alpha`` evaluated at ``n``."""
    text = str(text).strip()
    m = re.fullmatch(r"n\^\(?(-?[0-9.]+(?:[eE]-?[0-9]+)?)\)?", text)
    try:
        value = n ** float(m.group(1)) if m else float(text)
    except ValueError as exc:
        raise ParameterError(f"epsilon must be a number or a rule like n^-1, got {text!r}") from exc
    if not value > 0:
        raise ParameterError("epsilon must be positive")
    return value


def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return CSV_FLOAT % v
    return str(v)


def format_csv(header, rows, meta: Optional[dict] = None) -> str:
    """CSV text with LF endings; metadata goes in leading ``#`` comment lines."""
    out = io.StringIO()
    for key in sorted(meta or {}):
        out.write(f"# {key}: {json.dumps(meta[key], sort_keys=True)}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


# Subcommand options: (flag, dest, kwargs). Config files use the dest names.
COMMON = [
    ("--config", "config", dict(help="JSON file with option values (keys are option names with underscores)")),
    ("--output", "output", dict(help="write to this path instead of stdout")),
    ("--format", "format", dict(choices=["json", "csv"], help="output format")),
    ("--seed", "seed", dict(type=int, help="64-bit RNG seed (drawn and recorded if omitted)")),
    ("--workers", "workers", dict(type=int, help="worker processes (default: $AQEC_LAB_THREADS or 1)")),
]

ENSEMBLE = [
    ("--family", "family", dict(choices=list(FAMILIES), help="encoder ensemble")),
    ("--noise", "noise", dict(help="noise model TAG:VALUE, e.g. erasure-iid:0.1")),
    ("--n", "n", dict(type=int, help="physical qubits")),
    ("--k", "k", dict(type=int, help="logical qubits")),
    ("--eps", "eps", dict(help="approximation parameter: literal or rule n^-alpha")),
    ("--eps-rule", "eps_rule", dict(help="alias of --eps taking a rule such as n^-1")),
    ("--xi", "xi", dict(type=int, help="override the region width")),
]

COMMANDS: dict[str, dict] = {
    "bounds": dict(
        help="analytic Choi-error bounds",
        options=ENSEMBLE + [
            ("--delta", "delta", dict(type=float, help="smoothing parameter (smooth regime)")),
            ("--regime", "regime", dict(choices=[NONSMOOTH, SMOOTH], help="bound regime")),
            ("--xi-exact", "xi_exact", dict(action="store_true", default=None, help="finite-width ZZ rate")),
        ],
        required=["family", "noise", "n", "k", "eps"],
        defaults=dict(format="json", regime=NONSMOOTH, xi_exact=False),
    ),
    "curves": dict(
        help="encoding-rate curves on a noise grid",
        options=[
            ("--points", "points", dict(type=int, help="grid points on [0, p_max]")),
            ("--p-max", "p_max", dict(type=float, help="largest noise strength (<= 0.6)")),
        ],
        required=[],
        defaults=dict(format="csv", points=61, p_max=0.6),
    ),
    "simulate": dict(
        help="Monte-Carlo Choi error of a random encoder under erasure",
        options=ENSEMBLE + [
            ("--circuits", "circuits", dict(type=int, help="circuit draws")),
            ("--patterns", "patterns", dict(type=int, help="erasure patterns per circuit")),
            ("--twirl", "twirl", dict(action="store_true", default=None, help="prepend a random logical Pauli")),
        ],
        required=["family", "noise", "n", "k", "eps"],
        defaults=dict(format="json", circuits=100, patterns=1000, twirl=False),
    ),
    "compare-block": dict(
        help="block encoding versus double-layer encoding under erasure",
        options=[
            ("--n", "n", dict(type=int, help="physical qubits")),
            ("--rate", "rate", dict(type=float, help="k/n")),
            ("--p", "p", dict(type=float, help="erasure probability")),
            ("--eps-exponent", "eps_exponent", dict(type=float, help="epsilon = n^-exponent")),
            ("--circuits", "circuits", dict(type=int, help="circuit draws per family")),
            ("--patterns", "patterns", dict(type=int, help="erasure patterns per circuit")),
        ],
        required=[],
        defaults=dict(format="json", n=240, rate=0.2, p=0.25, eps_exponent=0.375, circuits=100, patterns=500),
    ),
    "second-moment": dict(
        help="exact second moments: Markov engine or erasure transfer matrix",
        options=[
            ("--mode", "mode", dict(choices=["markov", "transfer"], help="which engine")),
            ("--n", "n", dict(type=int, help="sites (markov) or physical qubits (transfer)")),
            ("--q", "q", dict(type=int, help="local dimension (markov)")),
            ("--depth", "depth", dict(type=int, help="brickwork layers (markov)")),
            ("--k", "k", dict(type=int, help="logical qubits (transfer)")),
            ("--xi", "xi", dict(type=int, help="region width (transfer)")),
            ("--pattern", "pattern", dict(help="per-region erased counts, comma separated (transfer)")),
        ],
        required=[],
        defaults=dict(format="json", mode="markov", n=6, q=2, depth=50, k=1, xi=1, pattern=None),
    ),
    "lightcone": dict(
        help="light cones, disjoint logical set and depth lower bounds",
        options=[
            ("--circuit", "circuit", dict(help="CircuitSpec JSON file; otherwise built from the ensemble flags")),
            ("--p", "p", dict(type=float, help="depolarizing strength for the floor and depth table")),
        ] + ENSEMBLE[:1] + ENSEMBLE[2:],
        required=[],
        defaults=dict(format="json", p=0.1, family="double-layer", n=64, k=16, eps="n^-1"),
    ),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Random stabilizer encoders for approximate error correction.")
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, info in COMMANDS.items():
        p = sub.add_parser(name, help=info["help"])
        for flag, dest, kw in COMMON + info["options"]:
            kw = dict(kw)
            kw.setdefault("default", None)
            p.add_argument(flag, dest=dest, **kw)
    return parser


def _option_dests(command: str) -> set[str]:
    return {dest for _, dest, _ in COMMON + COMMANDS[command]["options"]} - {"config"}


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags over the optional JSON config and fill defaults."""
    command = args.command
    allowed = _option_dests(command)
    merged: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        data.pop("command", None)
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise UsageError(f"unknown config fields for {command}: {', '.join(unknown)}")
        merged.update(data)
    for dest in allowed:
        v = getattr(args, dest, None)
        if v is not None:
            merged[dest] = v
    info = COMMANDS[command]
    for key, v in info["defaults"].items():
        merged.setdefault(key, v)
    if merged.get("eps_rule") is not None:
        if merged.get("eps") is not None:
            raise UsageError("give only one of --eps and --eps-rule")
        merged["eps"] = merged.pop("eps_rule")
    merged.pop("eps_rule", None)
    missing = [r for r in info["required"] if merged.get(r) is None]
    if missing:
        raise UsageError(f"{command}: missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    if merged.get("seed") is None:
        merged["seed"] = int(np.random.SeedSequence().entropy % 2 ** 64)
    if merged.get("workers") is None:
        merged["workers"] = default_workers()
    if merged["workers"] < 1:
        raise ParameterError("workers must be >= 1")
    return {k: v for k, v in merged.items() if v is not None or k in ("pattern",)}


def _ensemble(cfg: dict) -> tuple[EnsembleParams, float]:
    n, k = int(cfg["n"]), int(cfg["k"])
    eps = parse_eps(cfg["eps"], n)
    return EnsembleParams(n, k, eps, cfg["family"], cfg.get("xi")), eps


def cmd_bounds(cfg: dict) -> tuple[dict, Optional[tuple]]:
    noise = parse_noise(cfg["noise"])
    n, k, family = int(cfg["n"]), int(cfg["k"]), cfg["family"]
    eps = parse_eps(cfg["eps"], n)
    if family == "block":
        if not isinstance(noise, ErasureIID):
            raise ParameterError("the block lower bound needs erasure-iid noise")
        xi = cfg.get("xi") or matched_xi(n, eps)
        lb = block_lower_bound(n, k, eps, noise.p, xi=xi)
        result = {"family": "block", "kind": "lower", "term_poly": lb.term_poly, "term_const": lb.term_const,
                  "value": max(lb.term_poly, lb.term_const), "xi": xi, "epsilon": eps, "n": n, "k": k,
                  "noise": noise_to_dict(noise)}
    else:
        rep = choi_upper_bound(family, noise, n, k, eps, delta=cfg.get("delta"),
                               regime=cfg["regime"], xi_exact=bool(cfg.get("xi_exact")))
        result = rep.to_dict()
        result["kind"] = "upper"
    table = (["family", "kind", "n", "k", "epsilon", "value"],
             [[result["family"], result["kind"], n, k, eps, result["value"]]])
    return result, table


def cmd_curves(cfg: dict) -> tuple[dict, tuple]:
    points, top = int(cfg["points"]), float(cfg["p_max"])
    if points < 2:
        raise ParameterError("need at least two grid points")
    rows = emit_rate_curves(default_grid(points, top))
    return {"columns": list(CURVE_COLUMNS), "rows": rows.tolist()}, (list(CURVE_COLUMNS), rows.tolist())


def _bound_fields(family: str, noise, n: int, k: int, eps: float) -> dict:
    try:
        rep = choi_upper_bound(family, noise, n, k, eps)
        return {"bound": rep.value, "bound_formula": rep.formula_id, "bound_warnings": rep.warnings}
    except AqecError as exc:
        return {"bound": None, "bound_formula": None, "bound_warnings": [str(exc)]}


def cmd_simulate(cfg: dict) -> tuple[dict, tuple]:
    params, eps = _ensemble(cfg)
    noise = parse_noise(cfg["noise"])
    if not is_erasure(noise):
        raise ParameterError("simulation supports erasure noise only")
    spec = build(params, seed=cfg["seed"])
    rep = estimate_ensemble_choi(spec, noise, int(cfg["circuits"]), int(cfg["patterns"]), cfg["seed"],
                                 workers=cfg["workers"], pauli_twirl=bool(cfg["twirl"]))
    result = rep.to_dict()
    result.pop("wall_time")
    result["epsilon"] = eps
    result["xi"] = spec.meta.get("xi")
    result["depth"] = constructed_depth(spec)
    result.update(_bound_fields(params.family, noise, params.n, params.k, eps))
    header = ["family", "n", "k", "mean_epsilon", "ci_low", "ci_high", "bound"]
    row = [rep.family, rep.n, rep.k, rep.mean_epsilon, rep.ci[0], rep.ci[1],
           result["bound"] if result["bound"] is not None else "nan"]
    return result, (header, [row])


def cmd_compare_block(cfg: dict) -> tuple[dict, tuple]:
    n, r, p, a = int(cfg["n"]), float(cfg["rate"]), float(cfg["p"]), float(cfg["eps_exponent"])
    k = round(r * n)
    if abs(k - r * n) > 1e-9:
        raise ParameterError("rate * n must be an integer")
    eps = n ** -a
    xi = matched_xi(n, eps, 4)
    noise = ErasureIID(p)
    lb = block_lower_bound(n, k, eps, p, xi=xi)
    ub = choi_upper_bound("double-layer", noise, n, k, eps)
    analytic = {
        "block_poly_exponent": block_poly_exponent(r, p, a),
        "double_layer_exponent": double_layer_poly_exponent(r, a),
        "block_poly_exponent_fit": fitted_exponent(
            lambda m: block_lower_bound(int(m), round(r * m), m ** -a, p, xi=1).term_poly, 1e4, 1e8),
        "double_layer_exponent_fit": fitted_exponent(
            lambda m: 2.0 ** (choi_upper_bound("double-layer", noise, int(m), round(r * m), m ** -a)
                              .log2_terms["approximation"] / 4.0), 1e6, 1e12),
        "block_term_poly": lb.term_poly,
        "block_term_const": lb.term_const,
        "double_layer_bound": ub.value,
        "double_layer_bound_warnings": ub.warnings,
    }
    seed, workers = cfg["seed"], cfg["workers"]
    runs = {}
    for family in ("double-layer", "block"):
        spec = build(EnsembleParams(n, k, eps, family, xi), seed=seed)
        rep = estimate_ensemble_choi(spec, noise, int(cfg["circuits"]), int(cfg["patterns"]), seed, workers=workers)
        runs[family] = {"mean_epsilon": rep.mean_epsilon, "ci": list(rep.ci), "mean_f2": rep.mean_f2,
                        "mean_epsilon_mixture": rep.mean_epsilon_mixture, "depth": constructed_depth(spec)}
    dl, bl = runs["double-layer"], runs["block"]
    result = {
        "n": n, "k": k, "p": p, "epsilon": eps, "xi": xi,
        "analytic": analytic,
        "empirical": runs,
        "double_layer_better": dl["mean_epsilon"] < bl["mean_epsilon"],
        "cis_disjoint": dl["ci"][1] < bl["ci"][0] or bl["ci"][1] < dl["ci"][0],
    }
    header = ["quantity", "value"]
    rows = [["block_poly_exponent", analytic["block_poly_exponent"]],
            ["double_layer_exponent", analytic["double_layer_exponent"]],
            ["double_layer_mean_epsilon", dl["mean_epsilon"]],
            ["block_mean_epsilon", bl["mean_epsilon"]]]
    return result, (header, rows)


def cmd_second_moment(cfg: dict) -> tuple[dict, tuple]:
    if cfg["mode"] == "markov":
        n, q, depth = int(cfg["n"]), int(cfg["q"]), int(cfg["depth"])
        rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
        o1, o2 = random_product_traces(n, q, rng), random_product_traces(n, q, rng)
        exact = markov_second_moment_exact(brickwork_layers(n, depth), n, q, o1, o2)
        haar = haar_second_moment(o1.identity_trace, o1.swap_trace, o2.identity_trace, o2.swap_trace, n, q)
        result = {"inputs": {"n": n, "q": q, "depth": depth, "boundary": "random unit-trace product"},
                  "exact": exact, "haar": haar, "residual": abs(exact - haar)}
        return result, (["exact", "haar", "residual"], [[exact, haar, abs(exact - haar)]])
    n, k, xi = int(cfg["n"]), int(cfg["k"]), int(cfg["xi"])
    if cfg.get("pattern") is None:
        raise UsageError("second-moment --mode transfer needs --pattern")
    try:
        pattern = [int(c) for c in str(cfg["pattern"]).split(",")]
    except ValueError as exc:
        raise ParameterError("pattern must be comma-separated integers") from exc
    exact = block_erasure_transfer(n, k, xi, pattern)
    result = {"inputs": {"n": n, "k": k, "xi": xi, "pattern": pattern}, "exact": exact, "value": float(exact)}
    if k + n <= 6:
        spec = build_double_layer(EnsembleParams(n, k, 1.0, xi=xi))
        erased = []
        for i, c in enumerate(pattern):
            erased.extend(range(i * xi, i * xi + c))
        dense = dense_transfer_oracle(spec, [erased])[0]
        result["dense"] = dense
        result["residual"] = float(abs(exact - dense))
    return result, (["value"], [[float(exact)]])


def cmd_lightcone(cfg: dict) -> tuple[dict, tuple]:
    if cfg.get("circuit"):
        try:
            with open(cfg["circuit"], encoding="utf-8") as fh:
                spec = CircuitSpec.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read circuit {cfg['circuit']}: {exc}") from exc
    else:
        params, _ = _ensemble(cfg)
        spec = build(params, seed=cfg["seed"])
    p = float(cfg["p"])
    cones = light_cones(spec)
    j = disjoint_logical_set(spec)
    k = max(1, spec.k)
    table = []
    for eps in (0.01, 0.05, 0.09):
        row = {"eps": eps}
        for label, mode, dim in (("1d", "ddim", 1), ("2d", "ddim", 2), ("all_to_all", "all-to-all", 1)):
            row[label] = depth_lower_bound(mode, p, eps, k, dim) if 0 < p < 1 else None
        table.append(row)
    result = {"M": cones.M, "J_size": len(j), "J": j, "floor": choi_floor(spec, p), "min_depth_table": table,
              "constructed_depth": constructed_depth(spec), "n": spec.n_qubits, "k": spec.k, "p": p}
    header = ["eps", "1d", "2d", "all_to_all"]
    return result, (header, [[r["eps"], r["1d"], r["2d"], r["all_to_all"]] for r in table])


HANDLERS: dict[str, Callable[[dict], tuple]] = {
    "bounds": cmd_bounds,
    "curves": cmd_curves,
    "simulate": cmd_simulate,
    "compare-block": cmd_compare_block,
    "second-moment": cmd_second_moment,
    "lightcone": cmd_lightcone,
}


def run(argv: Optional[list[str]] = None) -> tuple[str, dict]:
    """Execute a command; return the rendered output and the resolved config."""
    args = build_parser().parse_args(argv)
    cfg = resolve_config(args)
    start = time.perf_counter()
    result, table = HANDLERS[args.command](cfg)
    wall = time.perf_counter() - start
    echo = {k: v for k, v in cfg.items() if k not in ("output", "format")}
    meta = {"tool": PROG, "version": __version__, "command": args.command, "config": echo,
            "seed": cfg["seed"], "wall_time": wall}
    if cfg["format"] == "csv":
        return format_csv(table[0], table[1], meta), cfg
    return dumps_json({**meta, "result": result}), cfg


def main(argv: Optional[list[str]] = None) -> int:
    try:
        text, cfg = run(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except AqecError as exc:
        print(f"{PROG}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:
        return int(exc.code or 0)
    if cfg.get("output"):
        with open(cfg["output"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
