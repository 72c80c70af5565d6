"""Command-line entry point emitting reproducible CSV/JSON artifacts.

Subcommands compose the library modules: ``validate`` checks a config and
prints its certificate, ``scores``/``regret`` emit curve tables, ``tau``
locates the per-applicant thresholds, ``sweep`` reproduces the full set of
figures' data for a config, ``simulate`` runs the Monte Carlo population
pipeline, and ``classify`` reports the environment class.

Conventions shared by all subcommands:

* numbers are serialized in shortest round-trip decimal form, so reruns
  with identical inputs produce byte-identical CSV bodies;
* files are written atomically (temp file, then rename) and every output
  directory receives exactly one ``run_manifest.json``, written last,
  recording the config digest, seeds, command line, and output hashes;
* tau grids are given as ``min:max:count`` and are clamped to the open
  prejudice interval with a printed notice when that changes anything;
* exit status 0 means success, 1 a validation failure (bad config or
  arguments), 2 a runtime/numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import scores as _scores
from .model import (
    DomainError,
    InvalidModelError,
    ModelConfig,
    ScreeningError,
    UnsupportedModelError,
    validate_mlrp,
)
from .population import (
    classify_environment,
    empirical_scores,
    mc_average_regret,
    run_stage_one,
    sample_population,
)
from .regret import ALGOS, expected_regret, regret_curve
from .thresholds import (
    find_regret_crossings,
    find_tau_bar,
    threshold_report,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2

SCHEMAS: dict[str, list[tuple[str, str]]] = {
    "scores.csv": [
        ("theta", "coarse signal value of the grid row"),
        ("tau", "prejudice level of the grid row"),
        ("s1", "outcome-trained score: P(qualified | theta, accepted)"),
        ("s2", "acceptance-trained score: P(accepted | theta)"),
        ("gamma1", "fine-signal cutoff above which the reviewer accepts"),
        ("phi", "qualification posterior given theta alone"),
        ("surv_q", "P(gamma > gamma1 | qualified, theta)"),
        ("surv_u", "P(gamma > gamma1 | unqualified, theta)"),
    ],
    "regret.csv": [
        ("theta", "coarse signal value"),
        ("q", "realized qualification bit"),
        ("tau", "prejudice level"),
        ("algo", "which score generated the row: s1 or s2"),
        ("score", "score value at (theta, tau)"),
        ("n", "ex ante payoff of the scored applicant"),
        ("accepted", "second-stage decision: 1 when n exceeds the cutoff"),
        ("p", "ex post payoff actually realized"),
        ("u", "regret loss n - p"),
    ],
    "regret_jumps.json": [
        ("theta/q", "curve identity"),
        ("jumps[].algo", "score whose curve jumps"),
        ("jumps[].tau_d", "critical prejudice where the jump sits"),
        ("jumps[].height", "signed jump height"),
    ],
    "thresholds.json": [
        ("per_theta[].theta", "coarse signal value"),
        ("per_theta[].tau_star", "equalizing prejudice"),
        ("per_theta[].tau_d1", "outcome-trained critical prejudice or null"),
        ("per_theta[].tau_d2", "acceptance-trained critical prejudice"),
        ("per_theta[].equalized_score", "common score value at tau_star"),
        ("per_theta[].ordering", "d1<d2, d2<d1, d1=d2 or d1-absent"),
        ("per_theta[].crossings_q0/q1", "regret-curve crossing reports"),
        ("tau_bar", "population indifference prejudice or null"),
        ("tau_bar_reason", "why tau_bar is null, e.g. irregular"),
        ("environment", "regular/irregular classification report"),
    ],
    "average_regret.csv": [
        ("tau", "prejudice level of the grid row"),
        ("avg_regret_s1", "population mean regret of the outcome-trained score"),
        ("avg_regret_s2", "population mean regret of the acceptance-trained score"),
    ],
    "stage1.csv": [
        ("theta", "coarse signal, visible downstream"),
        ("accepted", "first-stage decision"),
        ("q_label", "qualification bit, empty when rejected (selective labels)"),
    ],
    "scores_empirical.csv": [
        ("theta_lo", "bin lower edge (quantile binning)"),
        ("theta_hi", "bin upper edge"),
        ("n", "applicants in the bin"),
        ("n_accepted", "accepted applicants in the bin"),
        ("s2_hat", "empirical acceptance rate"),
        ("s2_se", "binomial standard error of s2_hat"),
        ("s1_hat", "empirical qualified fraction among accepted, empty when none"),
        ("s1_se", "binomial standard error of s1_hat, empty when none"),
    ],
    "regret_mc.csv": [
        ("algo", "score whose regret was averaged"),
        ("tau", "prejudice level"),
        ("m", "population size"),
        ("seed", "generator seed"),
        ("value", "Monte Carlo average regret"),
        ("standard_error", "sample standard error of the mean"),
    ],
    "environment.json": [
        ("alpha_q", "P(phi(Theta) <= beta | qualified)"),
        ("alpha_u", "P(phi(Theta) <= beta | unqualified)"),
        ("rhs", "right side of the regularity inequality"),
        ("lhs", "x_u / x_q"),
        ("classification", "regular or irregular"),
        ("theta_beta", "theta at which phi meets beta"),
    ],
}


# =====================================================================
# Small serialization helpers
# =====================================================================

def fmt(value) -> str:
    """Shortest round-trip text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def write_atomic(path: str, data: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(data)
    os.replace(tmp, path)


def render_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    return buf.getvalue()


def render_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


@dataclass
class RunManifest:
    """Reproducibility record for one output directory."""

    config_path: str
    config_sha256: str
    seed: int | None
    threads: int
    argv: list[str]
    started_utc: str

    def write(self, out_dir: str, outputs: list[str]) -> None:
        entries = []
        for name in sorted(outputs):
            path = os.path.join(out_dir, name)
            with open(path, "rb") as fh:
                blob = fh.read()
            entries.append({
                "name": name,
                "sha256": hashlib.sha256(blob).hexdigest(),
                "bytes": len(blob),
            })
        doc = {
            "tool": "screenlab",
            "version": __version__,
            "config_path": self.config_path,
            "config_sha256": self.config_sha256,
            "seed": self.seed,
            "threads": self.threads,
            "argv": self.argv,
            "started_utc": self.started_utc,
            "finished_utc": datetime.now(timezone.utc).isoformat(),
            "outputs": entries,
        }
        write_atomic(os.path.join(out_dir, "run_manifest.json"), render_json(doc))


@dataclass
class SweepResult:
    """Everything a full sweep produced, before serialization."""

    thetas: list[float]
    tau_grid: np.ndarray
    score_rows: list[tuple]
    regret_rows: list[tuple]
    jump_docs: list[dict]
    per_theta: list[dict]
    average_rows: list[tuple]
    tau_bar: float | None
    tau_bar_reason: str | None
    environment: dict | None


# =====================================================================
# Argument plumbing
# =====================================================================

def _load_config(path: str) -> tuple[ModelConfig, str]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InvalidModelError(f"cannot read config {path!r}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidModelError(
            f"config parse error in {path!r} at line {exc.lineno} "
            f"column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise InvalidModelError("config document must be a JSON object")
    return ModelConfig.from_dict(doc), hashlib.sha256(raw).hexdigest()


def _parse_grid(spec: str, *, name: str) -> tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"{name} must look like min:max:count, got {spec!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise DomainError(f"cannot parse {name} {spec!r}: {exc}") from exc
    if not lo < hi:
        raise DomainError(f"{name} needs min < max, got {spec!r}")
    if count <= 1:
        raise DomainError(f"{name} needs more than one point, got {spec!r}")
    return lo, hi, count


def _tau_grid(config: ModelConfig, spec: str | None) -> np.ndarray:
    lo, hi = _scores.clamped_tau_interval(config.payoffs)
    if spec is None:
        return np.linspace(lo, hi, 400)
    g_lo, g_hi, count = _parse_grid(spec, name="tau grid")
    c_lo, c_hi = max(g_lo, lo), min(g_hi, hi)
    if (c_lo, c_hi) != (g_lo, g_hi):
        print(
            f"notice: tau grid clamped to [{c_lo!r}, {c_hi!r}] "
            "(endpoint evaluation is undefined)",
            file=sys.stderr,
        )
    if not c_lo < c_hi:
        raise DomainError(
            f"tau grid {spec!r} lies outside the open prejudice interval"
        )
    return np.linspace(c_lo, c_hi, count)


def _theta_values(args) -> list[float]:
    if getattr(args, "theta", None) is not None:
        try:
            values = [float(part) for part in str(args.theta).split(",") if part]
        except ValueError as exc:
            raise DomainError(f"cannot parse theta list {args.theta!r}") from exc
        if not values:
            raise DomainError("theta list is empty")
        return values
    if getattr(args, "theta_grid", None) is not None:
        lo, hi, count = _parse_grid(args.theta_grid, name="theta grid")
        return [float(t) for t in np.linspace(lo, hi, count)]
    raise DomainError("one of --theta or --theta-grid is required")


def _parallel_map(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _print_schema(names: list[str]) -> None:
    for name in names:
        print(name)
        for column, doc in SCHEMAS[name]:
            print(f"  {column}: {doc}")


def _ensure_out(args) -> str:
    if not args.out:
        raise DomainError("--out is required for this subcommand")
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _manifest(args, digest: str) -> RunManifest:
    return RunManifest(
        config_path=args.config,
        config_sha256=digest,
        seed=getattr(args, "seed", None),
        threads=getattr(args, "threads", 1),
        argv=sys.argv[1:] or ["<api>"],
        started_utc=datetime.now(timezone.utc).isoformat(),
    )


# =====================================================================
# Subcommands
# =====================================================================

def cmd_validate(args) -> int:
    config, _ = _load_config(args.config)
    certificate = validate_mlrp(config.signal)
    print(
        "MLRP certificate: accepted "
        f"(w_theta={certificate.w_theta!r}, w_gamma={certificate.w_gamma!r})"
    )
    print(f"beta = {config.beta!r}")
    try:
        report = classify_environment(config)
        print(f"environment: {report.classification}")
    except UnsupportedModelError as exc:
        print(f"environment: unavailable ({exc})")
    return EXIT_OK


def _score_rows(config, thetas, tau_grid, threads):
    def rows_for(theta):
        point_rows = []
        s1 = _scores.score_s1(config, theta, tau_grid)
        s2 = _scores.score_s2(config, theta, tau_grid)
        cut = _scores.gamma1(config, theta, tau_grid)
        from .model import marginal_posterior_phi
        from scipy.special import ndtr

        phi = float(marginal_posterior_phi(config, theta))
        z_q, z_u = _scores._standardized_cutoffs(config, theta, cut)
        surv_q = ndtr(-z_q)
        surv_u = ndtr(-z_u)
        for j, tau in enumerate(tau_grid):
            point_rows.append(
                (theta, tau, s1[j], s2[j], cut[j], phi, surv_q[j], surv_u[j])
            )
        return point_rows

    rows = []
    for chunk in _parallel_map(rows_for, thetas, threads):
        rows.extend(chunk)
    return rows


def cmd_scores(args) -> int:
    if args.schema:
        _print_schema(["scores.csv"])
        return EXIT_OK
    config, digest = _load_config(args.config)
    manifest = _manifest(args, digest)
    thetas = _theta_values(args)
    tau_grid = _tau_grid(config, args.tau_grid)
    rows = _score_rows(config, thetas, tau_grid, args.threads)
    out = _ensure_out(args)
    write_atomic(
        os.path.join(out, "scores.csv"),
        render_csv([c for c, _ in SCHEMAS["scores.csv"]], rows),
    )
    manifest.write(out, ["scores.csv"])
    return EXIT_OK


def _threshold_doc(config, theta, with_crossings=True) -> dict:
    report = threshold_report(config, theta)
    doc = {
        "theta": report.theta,
        "tau_star": report.tau_star,
        "tau_d1": report.tau_d1,
        "tau_d2": report.tau_d2,
        "equalized_score": report.equalized_score,
        "ordering": report.ordering,
        "knife_edge": report.knife_edge,
    }
    if with_crossings:
        for q in (0, 1):
            crossing = find_regret_crossings(config, theta, q)
            doc[f"crossings_q{q}"] = _crossing_doc(crossing)
    return doc


def _crossing_doc(crossing) -> dict:
    return {
        "theta": crossing.theta,
        "q": crossing.q,
        "crossings": list(crossing.crossings),
        "case_label": crossing.case_label,
        "boundary_flags": list(crossing.boundary_flags),
    }


def cmd_tau(args) -> int:
    config, digest = _load_config(args.config)
    thetas = _theta_values(args)

    def doc_for(theta):
        if args.q is None:
            return _threshold_doc(config, theta)
        return _crossing_doc(find_regret_crossings(config, theta, args.q))

    docs = _parallel_map(doc_for, thetas, args.threads)
    payload = docs if getattr(args, "theta_grid", None) is not None else docs[0] if len(docs) == 1 else docs
    text = render_json(payload)
    if args.out:
        out = _ensure_out(args)
        write_atomic(os.path.join(out, "thresholds.json"), text)
        _manifest(args, digest).write(out, ["thresholds.json"])
    else:
        print(text, end="")
    return EXIT_OK


def _regret_outputs(config, theta, q, tau_grid):
    curves = regret_curve(config, theta, q, tau_grid)
    rows = []
    for algo in ALGOS:
        for j, tau in enumerate(curves.tau):
            rows.append((
                theta, q, tau, algo,
                curves.score[algo][j],
                curves.n_ex_ante[algo][j],
                curves.accepted[algo][j],
                curves.p_ex_post[algo][j],
                curves.u[algo][j],
            ))
    jumps = {
        "theta": float(theta),
        "q": int(q),
        "jumps": [
            {"algo": jump.algo, "tau_d": jump.tau_d, "height": jump.height}
            for jump in curves.jumps
        ],
    }
    return rows, jumps


def cmd_regret(args) -> int:
    if args.schema:
        _print_schema(["regret.csv", "regret_jumps.json"])
        return EXIT_OK
    config, digest = _load_config(args.config)
    manifest = _manifest(args, digest)
    tau_grid = _tau_grid(config, args.tau_grid)
    if args.q not in (0, 1):
        raise DomainError(f"--q must be 0 or 1, got {args.q!r}")
    rows, jumps = _regret_outputs(config, float(args.theta), args.q, tau_grid)
    out = _ensure_out(args)
    write_atomic(
        os.path.join(out, "regret.csv"),
        render_csv([c for c, _ in SCHEMAS["regret.csv"]], rows),
    )
    write_atomic(os.path.join(out, "regret_jumps.json"), render_json(jumps))
    manifest.write(out, ["regret.csv", "regret_jumps.json"])
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.schema:
        _print_schema([
            "scores.csv", "regret.csv", "regret_jumps.json",
            "thresholds.json", "average_regret.csv",
        ])
        return EXIT_OK
    config, digest = _load_config(args.config)
    manifest = _manifest(args, digest)
    thetas = _theta_values(args)
    tau_grid = _tau_grid(config, args.tau_grid)

    score_rows = _score_rows(config, thetas, tau_grid, args.threads)

    regret_rows: list[tuple] = []
    jump_docs: list[dict] = []
    for theta in thetas:
        for q in (0, 1):
            rows, jumps = _regret_outputs(config, theta, q, tau_grid)
            regret_rows.extend(rows)
            jump_docs.append(jumps)

    per_theta = _parallel_map(
        lambda theta: _threshold_doc(config, theta), thetas, args.threads
    )

    try:
        environment = classify_environment(config)
        env_doc = {
            "alpha_q": environment.alpha_q,
            "alpha_u": environment.alpha_u,
            "rhs": environment.rhs,
            "lhs": environment.lhs,
            "classification": environment.classification,
            "theta_beta": environment.theta_beta,
        }
        bar = find_tau_bar(config, "analytic")
        tau_bar, reason = bar.value, bar.reason
    except UnsupportedModelError as exc:
        env_doc = None
        tau_bar, reason = None, f"unsupported: {exc}"

    def average_row(tau):
        return (
            tau,
            expected_regret(config, "s1", float(tau)),
            expected_regret(config, "s2", float(tau)),
        )

    average_rows = _parallel_map(average_row, list(tau_grid), args.threads)

    result = SweepResult(
        thetas=thetas,
        tau_grid=tau_grid,
        score_rows=score_rows,
        regret_rows=regret_rows,
        jump_docs=jump_docs,
        per_theta=per_theta,
        average_rows=average_rows,
        tau_bar=tau_bar,
        tau_bar_reason=reason,
        environment=env_doc,
    )

    out = _ensure_out(args)
    write_atomic(
        os.path.join(out, "scores.csv"),
        render_csv([c for c, _ in SCHEMAS["scores.csv"]], result.score_rows),
    )
    write_atomic(
        os.path.join(out, "regret.csv"),
        render_csv([c for c, _ in SCHEMAS["regret.csv"]], result.regret_rows),
    )
    write_atomic(
        os.path.join(out, "regret_jumps.json"), render_json(result.jump_docs)
    )
    write_atomic(
        os.path.join(out, "thresholds.json"),
        render_json({
            "per_theta": result.per_theta,
            "tau_bar": result.tau_bar,
            "tau_bar_reason": result.tau_bar_reason,
            "environment": result.environment,
        }),
    )
    write_atomic(
        os.path.join(out, "average_regret.csv"),
        render_csv(
            [c for c, _ in SCHEMAS["average_regret.csv"]], result.average_rows
        ),
    )
    manifest.write(out, [
        "scores.csv", "regret.csv", "regret_jumps.json",
        "thresholds.json", "average_regret.csv",
    ])
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.schema:
        _print_schema([
            "stage1.csv", "scores_empirical.csv", "regret_mc.csv",
            "environment.json",
        ])
        return EXIT_OK
    config, digest = _load_config(args.config)
    manifest = _manifest(args, digest)
    if args.tau is None:
        raise DomainError("--tau is required for simulate")
    tau = float(args.tau)
    seed = args.seed if args.seed is not None else 0
    population = sample_population(config, args.m, seed)
    data = run_stage_one(config, population, tau)

    stage_rows = (
        (record.theta, record.accepted, record.q_label)
        for record in data.records()
    )
    bins = empirical_scores(data, args.bins)
    bin_rows = [
        (b.theta_lo, b.theta_hi, b.n, b.n_accepted,
         b.s2_hat, b.s2_se, b.s1_hat, b.s1_se)
        for b in bins
    ]
    mc_rows = []
    for algo in ALGOS:
        estimate = mc_average_regret(config, algo, tau, args.m, seed + 1)
        mc_rows.append((
            algo, estimate.tau, estimate.m, estimate.seed,
            estimate.value, estimate.standard_error,
        ))
    report = classify_environment(config)
    env_doc = {
        "alpha_q": report.alpha_q,
        "alpha_u": report.alpha_u,
        "rhs": report.rhs,
        "lhs": report.lhs,
        "classification": report.classification,
        "theta_beta": report.theta_beta,
    }

    out = _ensure_out(args)
    write_atomic(
        os.path.join(out, "stage1.csv"),
        render_csv([c for c, _ in SCHEMAS["stage1.csv"]], stage_rows),
    )
    write_atomic(
        os.path.join(out, "scores_empirical.csv"),
        render_csv([c for c, _ in SCHEMAS["scores_empirical.csv"]], bin_rows),
    )
    write_atomic(
        os.path.join(out, "regret_mc.csv"),
        render_csv([c for c, _ in SCHEMAS["regret_mc.csv"]], mc_rows),
    )
    write_atomic(os.path.join(out, "environment.json"), render_json(env_doc))
    manifest.write(out, [
        "stage1.csv", "scores_empirical.csv", "regret_mc.csv",
        "environment.json",
    ])
    return EXIT_OK


def cmd_classify(args) -> int:
    config, digest = _load_config(args.config)
    report = classify_environment(config)
    doc = {
        "alpha_q": report.alpha_q,
        "alpha_u": report.alpha_u,
        "rhs": report.rhs,
        "lhs": report.lhs,
        "classification": report.classification,
        "theta_beta": report.theta_beta,
    }
    text = render_json(doc)
    if args.out:
        out = _ensure_out(args)
        write_atomic(os.path.join(out, "environment.json"), text)
        _manifest(args, digest).write(out, ["environment.json"])
    else:
        print(text, end="")
    return EXIT_OK


# =====================================================================
# Parser and entry point
# =====================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="screenlab",
        description="Two-stage screening model laboratory",
    )
    parser.add_argument(
        "--schema", action="store_true",
        help="print every artifact schema and exit",
    )
    parser.add_argument(
        "--version", action="version", version=f"screenlab {__version__}"
    )
    sub = parser.add_subparsers(dest="command")

    def common(p, *, needs_out=False):
        p.add_argument("--config", required=True, help="model config JSON path")
        p.add_argument("--out", default=None,
                       help="output directory" + (" (required)" if needs_out else ""))
        p.add_argument("--seed", type=int, default=None, help="generator seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent theta/tau work")
        p.add_argument("--schema", action="store_true",
                       help="print this subcommand's artifact schemas and exit")

    p = sub.add_parser("validate", help="check a config and print its certificate")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("scores", help="emit the analytic score table")
    common(p, needs_out=True)
    p.add_argument("--theta", help="comma-separated theta values")
    p.add_argument("--theta-grid", help="theta grid as min:max:count")
    p.add_argument("--tau-grid", help="tau grid as min:max:count (clamped)")
    p.set_defaults(fn=cmd_scores)

    p = sub.add_parser("tau", help="locate thresholds per theta (JSON)")
    common(p)
    p.add_argument("--theta", help="comma-separated theta values")
    p.add_argument("--theta-grid", help="theta grid as min:max:count")
    p.add_argument("--q", type=int, default=None,
                   help="emit the regret-crossing report for this bit instead")
    p.set_defaults(fn=cmd_tau)

    p = sub.add_parser("regret", help="emit regret curves for one applicant")
    common(p, needs_out=True)
    p.add_argument("--theta", required=True, type=float)
    p.add_argument("--q", required=True, type=int)
    p.add_argument("--tau-grid", help="tau grid as min:max:count (clamped)")
    p.set_defaults(fn=cmd_regret)

    p = sub.add_parser("sweep", help="emit the full artifact set for a config")
    common(p, needs_out=True)
    p.add_argument("--theta", help="comma-separated theta values")
    p.add_argument("--theta-grid", help="theta grid as min:max:count")
    p.add_argument("--tau-grid", help="tau grid as min:max:count (clamped)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("simulate", help="run the Monte Carlo population pipeline")
    common(p, needs_out=True)
    p.add_argument("--tau", type=float, help="prejudice level to replay")
    p.add_argument("--m", type=int, default=100_000, help="population size")
    p.add_argument("--bins", type=int, default=50, help="theta quantile bins")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("classify", help="report the environment class (JSON)")
    common(p)
    p.set_defaults(fn=cmd_classify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        if args.schema:
            _print_schema(list(SCHEMAS))
            return EXIT_OK
        parser.print_help()
        return EXIT_INVALID
    try:
        return args.fn(args)
    except (InvalidModelError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ScreeningError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
