"""Command-line front end: demos, verification campaigns, parameter sweeps.

Exit codes are a stable contract:
  0  all assertions pass / zero findings
  2  usage or config error
  3  finding (theorem-surrogate tolerance breach or demo assertion failure)
  4  numeric/truncation failure beyond the retry budget

Outputs are machine-readable JSON (reports, trial streams) plus a run
manifest; numeric report content is byte-deterministic for a fixed
config and seed (timings and platform facts live only in the manifest).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .hilbert import FockArena, TruncationError
from .passive import apply_to_density, beam_splitter_matrix, lift_unitary
from .states import CoherentEnsemble, coherent, ensemble_to_density, fock, vacuum
from .theoremlab import (
    CampaignConfig,
    haar_unitary,
    non_sufficiency_demo,
    run_campaign,
)
from .witnesses import classicality_report, mandel_q, negativity_report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FINDING = 3
EXIT_NUMERIC = 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config parsing

_CAMPAIGN_FIELDS = {
    "version",
    "n_trials",
    "seed",
    "n_modes",
    "max_ensemble_components",
    "amplitude_bound",
    "cutoff",
    "unitary_source",
    "threads",
    "ppt_tol",
    "leak_tol",
    "ensemble",
}


def parse_ensemble(entries) -> CoherentEnsemble:
    """Parse a manual ensemble: a list of {weight, alphas: [[re, im], ...]}."""
    if not isinstance(entries, list) or not entries:
        raise ConfigError("ensemble must be a non-empty list of components")
    weights, alphas = [], []
    for comp in entries:
        unknown = set(comp) - {"weight", "alphas"}
        if unknown:
            raise ConfigError(f"unknown ensemble component fields: {sorted(unknown)}")
        w = comp.get("weight")
        if not isinstance(w, (int, float)):
            raise ConfigError("each ensemble component needs a numeric weight")
        if w < 0:
            raise ConfigError(
                f"ensemble weight {w} is negative: a classical P-function "
                "requires all weights to be non-negative"
            )
        rows = comp.get("alphas")
        if not isinstance(rows, list) or not all(
            isinstance(p, list) and len(p) == 2 for p in rows
        ):
            raise ConfigError("alphas must be a list of [re, im] pairs")
        weights.append(float(w))
        alphas.append([complex(p[0], p[1]) for p in rows])
    if len({len(a) for a in alphas}) != 1:
        raise ConfigError("all ensemble components must have the same mode count")
    try:
        return CoherentEnsemble(len(alphas[0]), np.array(weights), np.array(alphas))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_campaign_config(path: Path, overrides: dict) -> CampaignConfig:
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _CAMPAIGN_FIELDS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    if raw.get("version") != 1:
        raise ConfigError("config must declare \"version\": 1")

    ensemble = None
    if "ensemble" in raw:
        ensemble = parse_ensemble(raw["ensemble"])
    kwargs = {k: raw[k] for k in raw if k not in ("version", "ensemble")}
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    kwargs.setdefault("n_trials", 200)
    kwargs.setdefault("seed", 0)
    if ensemble is not None:
        kwargs.setdefault("n_modes", ensemble.n_modes)
    try:
        return CampaignConfig(manual_ensemble=ensemble, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output plumbing


def resolve_out_dir(args) -> Path:
    out = args.out or os.environ.get("BSE_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_manifest(out_dir: Path, config_echo, timings: dict, files: list[str]) -> Path:
    manifest = {
        "tool": "bselab",
        "version": __version__,
        "config": config_echo,
        "platform": {
            "python": platform.python_version(),
            "system": platform.platform(),
            "numpy": np.__version__,
        },
        "timings_seconds": timings,
        "outputs": files,
    }
    path = out_dir / "manifest.json"
    write_json(path, manifest)
    return path


# ---------------------------------------------------------------------------
# demos


def _demo_vacuum(args, arena: FockArena) -> dict:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(20):
        u = lift_unitary(haar_unitary(arena.n_modes, rng), arena)
        dev = float(np.abs(u.apply_to_vector(vacuum(arena).amplitudes)
                           - vacuum(arena).amplitudes).max())
        worst = max(worst, dev)
    return {"demo": "vacuum", "worst_vacuum_deviation": worst,
            "tolerance": 1e-10, "pass": worst <= 1e-10}


def _demo_bell(args, arena: FockArena) -> dict:
    m = beam_splitter_matrix(args.theta, args.phi0, args.phi1)
    u = lift_unitary(m, arena)
    rho = apply_to_density(u, fock(arena, (1, 0)).to_density())
    report = negativity_report(rho, ((0,), (1,)))
    # |1,0> maps to cos|10> + sin|01> up to phases: log-negativity
    # log2(1 + |sin 2 theta|) in closed form
    expected = float(np.log2(1.0 + abs(np.sin(2.0 * args.theta))))
    return {
        "demo": "bell",
        "theta": args.theta,
        "log_negativity": report.log_negativity,
        "expected_log_negativity": expected,
        "negativity": report.negativity,
        "min_pt_eigenvalue": report.min_pt_eigenvalue,
        "pass": bool(abs(report.log_negativity - expected) <= 1e-9),
    }


def _demo_inverse(args, arena: FockArena) -> dict:
    record = non_sufficiency_demo(args.theta, args.phi0, args.phi1, arena)
    payload = record.to_json_dict()
    payload["demo"] = "inverse"
    payload["pass"] = bool(
        record.inverse.negativity <= 1e-9
        and record.recovered_fidelity >= 1.0 - 1e-9
        and record.input_mandel_q <= -1.0 + 1e-12
    )
    return payload


def _demo_coherent_covariance(args, arena: FockArena) -> dict:
    rng = np.random.default_rng(args.seed)
    m = beam_splitter_matrix(args.theta, args.phi0, args.phi1)
    u = lift_unitary(m, arena)
    worst = 1.0
    for _ in range(10):
        alpha = 0.8 * (rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)) / np.sqrt(2)
        rho = apply_to_density(u, coherent(arena, alpha).to_density())
        target = coherent(arena, alpha @ np.conj(m.matrix))
        worst = min(worst, rho.fidelity_with_pure(target))
    return {"demo": "coherent-covariance", "theta": args.theta,
            "worst_fidelity": worst, "tolerance": 1e-6,
            "pass": worst >= 1.0 - 1e-6}


def cmd_demo(args) -> int:
    out_dir = resolve_out_dir(args)
    arena = FockArena(2, args.cutoff)
    runners = {
        "vacuum": _demo_vacuum,
        "bell": _demo_bell,
        "inverse": _demo_inverse,
        "coherent-covariance": _demo_coherent_covariance,
    }
    t0 = time.perf_counter()
    try:
        payload = runners[args.name](args, arena)
    except TruncationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - t0

    report_path = out_dir / "report.json"
    write_json(report_path, payload)
    write_manifest(out_dir, {"demo": args.name, "cutoff": args.cutoff,
                             "seed": args.seed, "theta": args.theta,
                             "phi0": args.phi0, "phi1": args.phi1},
                   {"total": elapsed}, [str(report_path)])

    print(f"demo {args.name}: {'PASS' if payload['pass'] else 'FAIL'}")
    for key, value in payload.items():
        if key not in ("demo", "pass"):
            print(f"  {key:28s} {value}")
    return EXIT_OK if payload["pass"] else EXIT_FINDING


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    out_dir = resolve_out_dir(args)
    overrides = {"seed": args.seed, "threads": args.threads, "cutoff": args.cutoff}
    cfg = load_campaign_config(Path(args.config), overrides)

    t0 = time.perf_counter()
    summary = run_campaign(cfg)
    elapsed = time.perf_counter() - t0

    trials_path = out_dir / "trials.jsonl"
    with trials_path.open("w") as fh:
        for record in summary.records:
            fh.write(json.dumps(record.to_json_dict(), sort_keys=True) + "\n")
    report_path = out_dir / "report.json"
    write_json(report_path, summary.to_json_dict())
    write_manifest(out_dir, summary.config_echo, {"total": elapsed},
                   [str(report_path), str(trials_path)])

    print(f"verify: {summary.n_completed}/{summary.n_trials} trials clean, "
          f"{len(summary.findings)} findings, "
          f"worst PT eigenvalue {summary.worst_ppt_min_eigenvalue}")
    if summary.n_overflow_failures:
        print(f"truncation overflow in {summary.n_overflow_failures} trials "
              f"after {cfg.cutoff}+retries", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if summary.clean else EXIT_FINDING


# ---------------------------------------------------------------------------
# sweep

SWEEP_COLUMNS = [
    "theta",
    "negativity",
    "log_negativity",
    "min_pt_eigenvalue",
    "mandel_q_a",
    "mandel_q_b",
]


def _parse_thetas(raw: str) -> list[float]:
    if raw.strip() == "":
        return []
    try:
        return [float(tok) for tok in raw.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --thetas value: {exc}") from exc


def cmd_sweep(args) -> int:
    out_dir = resolve_out_dir(args)
    thetas = _parse_thetas(args.thetas)
    arena = FockArena(2, args.cutoff)

    if args.input == "fock":
        occ = tuple(int(x) for x in args.occupations.split(","))
        rho_in = fock(arena, occ).to_density()
        input_echo = {"kind": "fock", "occupations": list(occ)}
    else:
        cfg_path = args.config
        if cfg_path is None:
            raise ConfigError("--input ensemble requires --config with an ensemble")
        raw = json.loads(Path(cfg_path).read_text())
        ens = parse_ensemble(raw.get("ensemble"))
        rho_in = ensemble_to_density(ens, arena)
        input_echo = {"kind": "ensemble", "components": ens.n_components}

    rows = []
    t0 = time.perf_counter()
    try:
        for theta in thetas:
            u = lift_unitary(beam_splitter_matrix(theta, args.phi0, args.phi1), arena)
            rho = apply_to_density(u, rho_in)
            report = negativity_report(rho, ((0,), (1,)))
            rows.append([theta, report.negativity, report.log_negativity,
                         report.min_pt_eigenvalue,
                         mandel_q(rho, 0), mandel_q(rho, 1)])
    except TruncationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - t0

    sweep_path = out_dir / "sweep.csv"
    with sweep_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(rows)
    write_manifest(out_dir, {"sweep_input": input_echo, "thetas": thetas,
                             "cutoff": args.cutoff},
                   {"total": elapsed}, [str(sweep_path)])
    print(f"sweep: wrote {len(rows)} rows to {sweep_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bselab",
        description="Beam-splitter separability laboratory: verify that "
        "classical inputs stay separable under passive transformations.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="run a named demonstration")
    demo.add_argument("name", choices=["bell", "inverse", "coherent-covariance", "vacuum"])
    demo.add_argument("--theta", type=float, default=np.pi / 4)
    demo.add_argument("--phi0", type=float, default=0.0)
    demo.add_argument("--phi1", type=float, default=0.0)
    demo.add_argument("--cutoff", type=int, default=12)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--out", help="output directory (or $BSE_OUT_DIR)")
    demo.set_defaults(func=cmd_demo)

    verify = sub.add_parser("verify", help="run a seeded verification campaign")
    verify.add_argument("--config", required=True, help="campaign config JSON")
    verify.add_argument("--out", help="output directory (or $BSE_OUT_DIR)")
    verify.add_argument("--seed", type=int, default=None, help="override config seed")
    verify.add_argument("--threads", type=int, default=None)
    verify.add_argument("--cutoff", type=int, default=None)
    verify.set_defaults(func=cmd_verify)

    sweep = sub.add_parser("sweep", help="sweep the splitter angle, emit CSV")
    sweep.add_argument("--thetas", default="", help="comma-separated angles (radians)")
    sweep.add_argument("--input", choices=["fock", "ensemble"], default="fock")
    sweep.add_argument("--occupations", default="1,0")
    sweep.add_argument("--config", help="config JSON holding an ensemble")
    sweep.add_argument("--phi0", type=float, default=0.0)
    sweep.add_argument("--phi1", type=float, default=0.0)
    sweep.add_argument("--cutoff", type=int, default=12)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out", help="output directory (or $BSE_OUT_DIR)")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
