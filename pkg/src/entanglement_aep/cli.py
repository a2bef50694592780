"""Command-line harness for the convergence experiments and property sweeps.

Usage::

    entanglement-aep --config run.json [--out result.csv] [--seed 7] [--jobs 4]

The config is one JSON document whose ``command`` field picks the run:

``classical-aep``
    ``distribution`` (list or path), ``epsilons``, ``n``.  Emits CSV rows
    ``n, epsilon, value, entropy, gap``.
``quantum-aep``
    ``state`` (inline ``{dims, re, im}``, a path to such a file,
    ``{"ghz": {"k": 3, "r": 2}}`` or ``{"random": {"dims": [2, 2, 2]}}``),
    optional ``theta`` (uniform by default), ``epsilons``, ``n`` and ``mode``.
    Emits CSV rows ``n, epsilon, rank_0 .. rank_{k-1}, estimate, limit, gap``.
``axioms``, ``locc-check``, ``appendix``
    Optional ``samples``, ``dims`` (largest local dimensions), ``theta`` and
    ``steps``.  Emit a JSON report with one entry per property.

Exit codes: 0 when every property holds, 1 on a violation, 2 on a bad config.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import locc
from .entropy import as_distribution, shannon
from .measures import (
    MeasureSpec,
    check_additivity,
    check_direct_sum_identity,
    check_log_boundedness,
    continuity_bound,
    evaluate,
    sandwich_bounds,
)
from .smoothing import MAX_COPIES, phi_estimate, regularized_smooth_h0
from .tensor_core import (
    MultipartiteState,
    fidelity_sq,
    ghz,
    random_state,
    state_from_dict,
    tensor_product,
    trace_distance,
    trace_distance_pure,
)

COMMANDS = ("classical-aep", "quantum-aep", "axioms", "locc-check", "appendix")
EXIT_PASS, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2
DEFAULT_SAMPLES = 200
MAX_SAMPLES = 10**7
MAX_LOCAL_DIM = 8


class ConfigError(ValueError):
    """Invalid experiment configuration; ``line`` points into the config text."""

    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass
class ExperimentConfig:
    command: str
    raw: dict
    text: str = ""
    source: str = "<config>"
    seed: int = 0
    base_dir: Path = field(default_factory=Path.cwd)

    def line_of(self, key: str) -> int | None:
        m = re.search(r'"' + re.escape(key) + r'"\s*:', self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, self.line_of(key), self.source)

    def get(self, key: str, default: Any = None) -> Any:
        return self.raw.get(key, default)

    def floats(self, key: str, lo: float, hi: float, lo_open: bool = True, required: bool = True) -> list[float]:
        vals = self.raw.get(key)
        if vals is None:
            if required:
                raise ConfigError(f"missing required field {key!r}", None, self.source)
            return []
        if not isinstance(vals, list) or not vals or not all(_is_number(v) for v in vals):
            raise self.error(key, f"{key!r} must be a nonempty list of numbers")
        for v in vals:
            if not ((lo < v if lo_open else lo <= v) and v < hi):
                bracket = "(" if lo_open else "["
                raise self.error(key, f"{key!r} value {v} outside {bracket}{lo}, {hi})")
        return [float(v) for v in vals]

    def ints(self, key: str, lo: int, hi: int, default: list[int] | None = None) -> list[int]:
        vals = self.raw.get(key, default)
        if vals is None:
            raise ConfigError(f"missing required field {key!r}", None, self.source)
        if not isinstance(vals, list) or not vals or not all(isinstance(v, int) and not isinstance(v, bool) for v in vals):
            raise self.error(key, f"{key!r} must be a nonempty list of integers")
        for v in vals:
            if not lo <= v <= hi:
                raise self.error(key, f"{key!r} value {v} outside [{lo}, {hi}]")
        return vals

    def count(self, key: str, default: int) -> int:
        v = self.raw.get(key, default)
        if not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= MAX_SAMPLES:
            raise self.error(key, f"{key!r} must be an integer in [1, {MAX_SAMPLES}], got {v!r}")
        return v


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def parse_config(text: str, source: str = "<config>", base_dir: Path | None = None) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno, source) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object", 1, source)
    cfg = ExperimentConfig("", raw, text, source, base_dir=base_dir or Path.cwd())
    command = raw.get("command")
    if command not in COMMANDS:
        raise cfg.error("command", f"'command' must be one of {list(COMMANDS)}, got {command!r}")
    cfg.command = command
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise cfg.error("seed", f"'seed' must be an unsigned 64-bit integer, got {seed!r}")
    cfg.seed = seed
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path), path.parent)


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def write_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------- AEP curves

def _load_json_source(cfg: ExperimentConfig, key: str):
    val = cfg.get(key)
    if isinstance(val, str):
        path = Path(val)
        if not path.is_absolute():
            path = cfg.base_dir / path
        try:
            return json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise cfg.error(key, f"cannot load {key!r} from {val}: {exc}") from None
    return val


def run_classical_aep(cfg: ExperimentConfig) -> str:
    """CSV of ``(1/n) H_0^eps(P^n)`` against ``H(P)``."""
    dist = _load_json_source(cfg, "distribution")
    if dist is None:
        raise ConfigError("missing required field 'distribution'", None, cfg.source)
    try:
        p = as_distribution(dist)
    except (ValueError, TypeError) as exc:
        raise cfg.error("distribution", str(exc)) from None
    eps_list = cfg.floats("epsilons", 0.0, 1.0, lo_open=False)
    n_list = cfg.ints("n", 1, MAX_COPIES)
    h = shannon(p)
    rows = []
    for n in sorted(set(n_list)):
        for eps in sorted(set(eps_list)):
            try:
                value = regularized_smooth_h0(p, eps, n)
            except ValueError as exc:
                raise cfg.error("n", str(exc)) from None
            rows.append((n, eps, value, h, value - h))
    return write_csv(("n", "epsilon", "value", "entropy", "gap"), rows)


def _theta(cfg: ExperimentConfig, k: int) -> list[float] | None:
    theta = cfg.get("theta")
    if theta is None:
        return None
    if not isinstance(theta, list) or len(theta) != k or not all(_is_number(t) for t in theta):
        raise cfg.error("theta", f"'theta' must be a list of {k} numbers")
    try:
        MeasureSpec.e_theta(theta)
    except ValueError as exc:
        raise cfg.error("theta", str(exc)) from None
    return [float(t) for t in theta]


def _state(cfg: ExperimentConfig) -> MultipartiteState:
    src = _load_json_source(cfg, "state")
    if not isinstance(src, dict):
        raise ConfigError("missing or malformed field 'state'", cfg.line_of("state"), cfg.source)
    try:
        if "ghz" in src:
            return ghz(int(src["ghz"]["k"]), int(src["ghz"]["r"]))
        if "random" in src:
            dims = [int(d) for d in src["random"]["dims"]]
            return random_state(dims, np.random.default_rng(np.random.SeedSequence([cfg.seed])))
        psi = state_from_dict(src)
    except (KeyError, TypeError, ValueError) as exc:
        raise cfg.error("state", f"bad state: {exc}") from None
    if not psi.is_unit(1e-10):
        raise cfg.error("state", f"state has norm {psi.norm()!r}, expected a unit vector")
    return psi


def run_quantum_aep(cfg: ExperimentConfig) -> str:
    """CSV of per-copy upper estimates of the smoothed rank measure."""
    psi = _state(cfg)
    if psi.k < 2:
        raise cfg.error("state", "need at least 2 parties")
    theta = _theta(cfg, psi.k) or [1.0 / psi.k] * psi.k
    eps_list = cfg.floats("epsilons", 0.0, 1.0)
    n_list = cfg.ints("n", 1, MAX_COPIES)
    mode = cfg.get("mode", "spectral")
    if mode not in ("spectral", "auto", "explicit"):
        raise cfg.error("mode", f"'mode' must be spectral, auto or explicit, got {mode!r}")
    spec = MeasureSpec.e_theta(theta, 0.0)
    rows = []
    for eps in sorted(set(eps_list)):
        try:
            est = phi_estimate(spec, psi, eps, sorted(set(n_list)), mode=mode)
        except ValueError as exc:
            raise cfg.error("n", str(exc)) from None
        for r in est:
            rows.append((r.n, r.epsilon, *r.rank_bounds, r.value, r.limit, r.gap))
    rows.sort(key=lambda row: (row[0], row[1]))
    header = ("n", "epsilon", *(f"rank_{j}" for j in range(psi.k)), "estimate", "limit", "gap")
    return write_csv(header, rows)


# ---------------------------------------------------------------- property sweeps

@dataclass(frozen=True)
class Property:
    """One sampled inequality; ``kind`` is ``slack`` (want >= -tol) or ``residual`` (want <= tol)."""

    name: str
    anchor: str
    kind: str
    tolerance: float
    sample: Callable[[np.random.Generator, dict], float]


def _rand_dims(rng: np.random.Generator, top: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(rng.integers(2, d + 1)) if d >= 2 else 1 for d in top)


def _rand_theta(rng: np.random.Generator, k: int, params: dict) -> list[float]:
    theta = params.get("theta")
    if theta is not None:
        return theta
    w = rng.dirichlet(np.ones(k))
    return list(w / w.sum())


def _rand_spec(rng: np.random.Generator, k: int, params: dict) -> MeasureSpec:
    return MeasureSpec.e_theta(_rand_theta(rng, k, params))


def _ghz_norm(rng, params):
    k = int(rng.integers(2, 5))
    spec = MeasureSpec.e_theta(rng.dirichlet(np.ones(k)))
    return abs(evaluate(spec, ghz(k, 2)) - 1.0)


def _additivity(rng, params):
    k = len(params["dims"])
    spec = _rand_spec(rng, k, params)
    psi = random_state(_rand_dims(rng, params["dims"]), rng)
    phi = random_state(_rand_dims(rng, params["dims"]), rng)
    return check_additivity(spec, psi, phi)


def _direct_sum(rng, params):
    k = len(params["dims"])
    spec = _rand_spec(rng, k, params)
    psi = random_state(_rand_dims(rng, params["dims"]), rng)
    phi = random_state(_rand_dims(rng, params["dims"]), rng)
    return check_direct_sum_identity(spec, psi, phi, float(rng.uniform()))


def _log_bounded(rng, params):
    k = len(params["dims"])
    spec = _rand_spec(rng, k, params)
    l = int(rng.integers(1, 5))
    w = rng.dirichlet(np.ones(l))
    summands = [random_state(_rand_dims(rng, params["dims"]), rng).scaled(math.sqrt(x)) for x in w]
    return check_log_boundedness(spec, summands)


def _near_pair(rng, dims, scale=None):
    psi = random_state(dims, rng)
    scale = float(10 ** rng.uniform(-4, 0.5)) if scale is None else scale
    noise = random_state(dims, rng).amps * scale
    phi = MultipartiteState(dims, psi.amps + noise).normalized()
    return psi, phi


def _continuity(rng, params):
    dims = _rand_dims(rng, params["dims"])
    k = len(dims)
    spec = _rand_spec(rng, k, params)
    psi, phi = _near_pair(rng, dims)
    delta = trace_distance_pure(psi, phi)
    if delta >= 1.0:
        return math.inf
    cb = continuity_bound(k, delta)
    return cb.bound(math.log2(psi.dim)) - abs(evaluate(spec, phi) - evaluate(spec, psi))


def _sandwich(rng, params):
    dims = _rand_dims(rng, params["dims"])
    theta = _rand_theta(rng, len(dims), params)
    alpha = float(rng.uniform())
    psi = random_state(dims, rng)
    sb = sandwich_bounds(psi, theta)
    e = evaluate(MeasureSpec.e_theta(theta, alpha), psi)
    return min(e - sb.lower, sb.upper - e)


def _protocol_pair(rng, params):
    dims = _rand_dims(rng, params["dims"])
    psi = random_state(dims, rng)
    protocol = locc.random_protocol(dims, params["steps"], rng)
    return psi, protocol


def _monotone_avg(rng, params):
    psi, protocol = _protocol_pair(rng, params)
    return locc.monotone_avg_check(_rand_spec(rng, psi.k, params), psi, protocol)


def _weak_monotone(rng, params):
    psi, protocol = _protocol_pair(rng, params)
    return locc.weak_monotone_slack(_rand_spec(rng, psi.k, params), psi, protocol)


def _weight_conservation(rng, params):
    psi, protocol = _protocol_pair(rng, params)
    return abs(locc.compose_and_discard(protocol, psi).total_weight() - 1.0)


def _parallel_consistency(rng, params):
    dims = _rand_dims(rng, [min(d, 2) for d in params["dims"]])
    psi = random_state(dims, rng)
    protocol = locc.random_protocol(dims, min(params["steps"], 2), rng, max_branches=2)
    single = locc.compose_and_discard(protocol, psi).by_label()
    pair = locc.compose_and_discard(locc.parallel_protocol(protocol, dims), tensor_product(psi, psi))
    m = max((len(ch.kraus) for ch in protocol), default=1)
    worst = abs(pair.total_weight() - sum(b.weight for b in single.values()) ** 2)
    for b in pair.branches:
        x1, x2 = divmod(b.label, m)
        want = tensor_product(single[x1].state, single[x2].state)
        worst = max(worst, abs(b.weight - single[x1].weight * single[x2].weight), 1.0 - fidelity_sq(b.state, want))
    return worst


def _register_discard(rng, params):
    psi, protocol = _protocol_pair(rng, params)
    phi = random_state(psi.dims, rng)
    a = locc.compose_and_discard(protocol, psi)
    b = locc.compose_and_discard(protocol, phi)
    return locc.cq_trace_distance(a, b) - trace_distance(a.density_matrix(), b.density_matrix())


def _rand_ensemble_pair(rng, params):
    dims = _rand_dims(rng, params["dims"])
    labels = int(rng.integers(1, 5))
    p = rng.dirichlet(np.ones(labels)) * rng.uniform(0.5, 1.0)
    q = np.clip(p + rng.normal(scale=10 ** rng.uniform(-4, -0.5), size=labels), 0.0, None)
    q = q / max(1.0, q.sum())
    near = rng.uniform() < 0.5
    rho, sigma = [], []
    for x in range(labels):
        psi, phi = _near_pair(rng, dims, None if near else 10.0)
        rho.append(locc.Branch(float(p[x]), x, psi))
        sigma.append(locc.Branch(float(q[x]), x, phi))
    return locc.ConditionallyPureState(tuple(rho)), locc.ConditionallyPureState(tuple(sigma))


def _cond_pure_tv(rng, params):
    rho, sigma = _rand_ensemble_pair(rng, params)
    c = locc.check_cond_pure_distance(rho, sigma)
    return c.T - c.tv


def _cond_pure_avg(rng, params):
    rho, sigma = _rand_ensemble_pair(rng, params)
    c = locc.check_cond_pure_distance(rho, sigma)
    return 2.0 * c.T - c.avg_branch


def _outcome_mass(rng, params):
    dims = _rand_dims(rng, params["dims"])
    psi, phi = _near_pair(rng, dims, float(10 ** rng.uniform(-3, -1.5)))
    protocol = locc.random_protocol(dims, params["steps"], rng)
    c = locc.check_outcome_prob_lower(psi, phi, protocol, params.get("eps_prime", 0.1))
    return c.mass - c.bound


def _max_eig(rng, params):
    dim = int(rng.integers(1, MAX_LOCAL_DIM + 1))
    rho = locc.random_density_matrix(dim, rng, int(rng.integers(1, dim + 1)))
    sigma = locc.random_density_matrix(dim, rng, int(rng.integers(1, dim + 1)))
    c = locc.check_max_eig(rho, sigma)
    return 2.0 * c.T - c.gap


AXIOMS = (
    Property("ghz_normalization", "normalization: E(GHZ_2) = 1", "residual", 1e-10, _ghz_norm),
    Property("additivity", "additivity: E(psi x phi) = E(psi) + E(phi)", "residual", 1e-9, _additivity),
    Property("direct_sum", "direct sum: E(sqrt(p) phi + sqrt(1-p) psi) = pE(phi) + (1-p)E(psi) + h(p)", "residual", 1e-9, _direct_sum),
    Property("log_boundedness", "log-boundedness: E(psi_1 + ... + psi_l) <= max E(psi_i) + log l", "slack", 1e-9, _log_bounded),
    Property("continuity", "asymptotic continuity: |E(phi) - E(psi)| <= a(delta) log dim + b(delta)", "slack", 1e-12, _continuity),
    Property("renyi_sandwich", "sandwich: Shannon <= Renyi_alpha <= log rank", "slack", 1e-9, _sandwich),
)

LOCC_PROPS = (
    Property("monotone_on_average", "LOCC monotonicity on average", "slack", 1e-9, _monotone_avg),
    Property("weak_monotonicity", "weak LOCC monotonicity: E(psi) >= P(x) E(psi_x)", "slack", 1e-9, _weak_monotone),
    Property("weight_conservation", "trace-preserving protocols conserve branch weight", "residual", 1e-10, _weight_conservation),
    Property("parallel_consistency", "protocol on psi x psi gives the product ensemble", "residual", 1e-10, _parallel_consistency),
    Property("register_discard", "trace distance does not grow when the register is discarded", "slack", 1e-10, _register_discard),
)

APPENDIX_PROPS = (
    Property("cond_pure_tv", "conditionally pure distance: TV(P, Q) <= T", "slack", 1e-12, _cond_pure_tv),
    Property("cond_pure_branch", "conditionally pure distance: sum P(x) T(psi_x, phi_x) <= 2T", "slack", 1e-12, _cond_pure_avg),
    Property("outcome_mass", "LOCC outcome mass >= 1 - 2 sqrt(eps)(1 + 1/sqrt(eps'))", "slack", 1e-9, _outcome_mass),
    Property("max_eigenvalue", "|lambda_max(rho) - lambda_max(sigma)| <= 2T", "slack", 1e-10, _max_eig),
)


def _run_chunk(args) -> list[float]:
    group, index, seed, start, stop, params = args
    prop = SUITES[group][index]
    out = []
    for i in range(start, stop):
        rng = np.random.default_rng(np.random.SeedSequence([seed, index, i]))
        out.append(float(prop.sample(rng, params)))
    return out


SUITES = {"axioms": AXIOMS, "locc-check": LOCC_PROPS, "appendix": APPENDIX_PROPS}


def _suite_params(cfg: ExperimentConfig) -> dict:
    dims = cfg.ints("dims", 1, MAX_LOCAL_DIM, default=[3, 3, 3])
    if len(dims) < 2:
        raise cfg.error("dims", "'dims' needs at least 2 parties")
    params = {"dims": dims, "theta": _theta(cfg, len(dims))}
    params["steps"] = cfg.count("steps", 2)
    eps_prime = cfg.get("eps_prime", 0.1)
    if not _is_number(eps_prime) or not 0.0 < eps_prime <= 1.0:
        raise cfg.error("eps_prime", f"'eps_prime' must lie in (0, 1], got {eps_prime!r}")
    params["eps_prime"] = float(eps_prime)
    return params


def run_suite(cfg: ExperimentConfig, jobs: int = 1) -> dict:
    """Sample every property of the command's suite and summarize the worst case.

    Sample ``i`` of property ``j`` draws from ``SeedSequence([seed, j, i])``,
    so results do not depend on ``jobs``.
    """
    group = cfg.command
    samples = cfg.count("samples", DEFAULT_SAMPLES)
    params = _suite_params(cfg)
    props = SUITES[group]
    chunk = max(1, samples // max(1, 4 * jobs))
    tasks = [
        (group, j, cfg.seed, start, min(samples, start + chunk), params)
        for j in range(len(props))
        for start in range(0, samples, chunk)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_chunk, tasks))
    else:
        results = [_run_chunk(t) for t in tasks]
    values: dict[int, list[float]] = {j: [] for j in range(len(props))}
    for task, vals in zip(tasks, results):
        values[task[1]].extend(vals)
    entries = []
    for j, prop in enumerate(props):
        vals = values[j]
        if prop.kind == "slack":
            worst = min(vals)
            passed = worst >= -prop.tolerance
        else:
            worst = max(vals)
            passed = worst <= prop.tolerance
        entries.append({
            "property": prop.name,
            "anchor": prop.anchor,
            "kind": prop.kind,
            "samples": len(vals),
            "worst": worst if math.isfinite(worst) else str(worst),
            "tolerance": prop.tolerance,
            "passed": bool(passed),
        })
    return {
        "command": group,
        "seed": cfg.seed,
        "passed": all(e["passed"] for e in entries),
        "properties": entries,
    }


def run_axioms(cfg: ExperimentConfig, jobs: int = 1) -> dict:
    return run_suite(cfg, jobs)


def run_locc_check(cfg: ExperimentConfig, jobs: int = 1) -> dict:
    return run_suite(cfg, jobs)


def run_appendix(cfg: ExperimentConfig, jobs: int = 1) -> dict:
    return run_suite(cfg, jobs)


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entanglement-aep", description="AEP experiments and property sweeps for entanglement measures.")
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for property sweeps")
    return parser


def run(cfg: ExperimentConfig, jobs: int = 1) -> tuple[str, int]:
    if cfg.command == "classical-aep":
        return run_classical_aep(cfg), EXIT_PASS
    if cfg.command == "quantum-aep":
        return run_quantum_aep(cfg), EXIT_PASS
    report = run_suite(cfg, jobs)
    return report_to_json(report), EXIT_PASS if report["passed"] else EXIT_VIOLATION


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1", None, "<args>")
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer", None, "<args>")
            cfg.seed = args.seed
        text, code = run(cfg, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
