"""Verification harness for the classical-input / separable-output theorem.

Each trial runs three routes over the same input and mode unitary:

  1. the exact closed-form ensemble route (the constructive separability
     certificate: output weights stay the input weights, hence >= 0);
  2. the truncated density-matrix route (lift, conjugate, PPT diagnostics);
  3. for Gaussian-expressible inputs, the covariance-matrix oracle.

Route 2 disagreeing with route 1 beyond tolerance is a finding; an exact
closure breach in route 1 would falsify the implementation itself and is
flagged as critical.  Truncation overflow is a third, distinct failure
channel and triggers a retry at a larger cutoff rather than a finding.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .gaussian import apply_passive, gaussian_from_spec, is_classical, simon_separable
from .hilbert import DensityOperator, FockArena, TruncationError
from .passive import (
    ModeUnitary,
    apply_to_density,
    beam_splitter_matrix,
    lift_unitary,
    transform_coherent_exact,
    transform_ensemble,
)
from .states import (
    CoherentEnsemble,
    GaussianSpec,
    coherent_leakage,
    ensemble_to_density,
    fock,
)
from .witnesses import (
    PPT_TOL,
    ClassicalityReport,
    EntanglementReport,
    classicality_report,
    mandel_q,
    negativity_report,
)

#: cross-pipeline agreement tolerance (max-norm between the two routes)
CROSS_PIPELINE_TOL = 1e-7
#: truncation-overflow retry policy
RETRY_BUDGET = 2
CUTOFF_STEP = 4


class ClosureBreach(AssertionError):
    """The exact ensemble route changed or negated a weight: this cannot
    happen in exact arithmetic and would falsify the implementation."""


def haar_unitary(n: int, rng: np.random.Generator) -> ModeUnitary:
    """Haar-distributed n x n unitary: QR of a complex Gaussian matrix with
    the R-diagonal phases folded back in (deterministic per rng state)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return ModeUnitary(q * (d / np.abs(d)))


def random_classical_ensemble(
    seed, n_modes: int, max_components: int, amplitude_bound: float
) -> CoherentEnsemble:
    """Random classical ensemble: component count uniform in 1..max,
    weights from the flat Dirichlet (symmetric simplex draw), amplitudes
    uniform in the complex disk of the given radius.  Deterministic per seed."""
    if max_components < 1 or amplitude_bound <= 0:
        raise ValueError("bounds must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    radii = amplitude_bound * np.sqrt(rng.uniform(0.0, 1.0, size=(k, n_modes)))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(k, n_modes))
    return CoherentEnsemble(n_modes, weights, radii * np.exp(1j * phases))


def bipartitions(n_modes: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All mode bipartitions up to complement (1-vs-rest for n <= 3)."""
    modes = set(range(n_modes))
    out = []
    for bits in range(1, 2 ** (n_modes - 1)):
        part_a = tuple(m for m in range(n_modes) if bits >> m & 1)
        part_b = tuple(sorted(modes - set(part_a)))
        out.append((part_a, part_b))
    return out


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    input_description: dict
    unitary_description: dict
    ensemble_closure: str  # "pass" | "fail"
    ppt_min_eigenvalue: float
    entanglement_reports: tuple[EntanglementReport, ...]
    classicality: ClassicalityReport
    cross_pipeline_max_dev: float
    gaussian_verdict: Optional[dict]
    wall_time: float

    def to_json_dict(self) -> dict:
        """Serializable form; excludes wall_time (timings live in the
        run manifest so reports stay byte-deterministic)."""
        return {
            "seed": self.seed,
            "input": self.input_description,
            "unitary": self.unitary_description,
            "ensemble_closure": self.ensemble_closure,
            "ppt_min_eigenvalue": self.ppt_min_eigenvalue,
            "bipartitions": [
                {
                    "modes_a": list(r.bipartition[0]),
                    "modes_b": list(r.bipartition[1]),
                    "min_pt_eigenvalue": r.min_pt_eigenvalue,
                    "negativity": r.negativity,
                    "log_negativity": r.log_negativity,
                    "verdict": r.verdict,
                }
                for r in self.entanglement_reports
            ],
            "classicality": {
                "mandel_q": list(self.classicality.mandel_q),
                "min_quadrature_variance": list(
                    self.classicality.min_quadrature_variance
                ),
                "squeezing_detected": self.classicality.squeezing_detected,
                "sub_poissonian_detected": self.classicality.sub_poissonian_detected,
            },
            "cross_pipeline_max_dev": self.cross_pipeline_max_dev,
            "gaussian": self.gaussian_verdict,
        }


def describe_ensemble(ens: CoherentEnsemble) -> dict:
    return {
        "kind": "coherent_ensemble",
        "weights": [float(w) for w in ens.weights],
        "alphas": [
            [[float(a.real), float(a.imag)] for a in row] for row in ens.alphas
        ],
    }


def describe_unitary(m: ModeUnitary, source: str) -> dict:
    return {
        "source": source,
        "matrix": [
            [[float(v.real), float(v.imag)] for v in row] for row in m.matrix
        ],
    }


def run_theorem_trial(
    ens: CoherentEnsemble,
    m: ModeUnitary,
    arena: FockArena,
    seed: int = 0,
    unitary_source: str = "explicit",
    ppt_tol: float = PPT_TOL,
) -> TrialRecord:
    """One full verification trial; raises TruncationError on overflow."""
    t0 = time.perf_counter()

    # route 1: exact closed-form certificate
    out_ens = transform_ensemble(ens, m)
    closure_ok = bool(
        np.array_equal(out_ens.weights, ens.weights) and np.all(out_ens.weights >= 0)
    )
    if not closure_ok:
        raise ClosureBreach("transform_ensemble altered the weight vector")

    # route 2: density pipeline through the lifted unitary.  The
    # conjugation is evaluated sector-exactly per coherent component and
    # projected to the cutoff afterwards, so PPT diagnostics measure the
    # output state rather than lift boundary-clipping noise.
    rho_in = ensemble_to_density(ens, arena)
    out_matrix = np.zeros((arena.total_dim, arena.total_dim), dtype=complex)
    for w, alpha in ens.components:
        amps = transform_coherent_exact(m, alpha, arena)
        out_matrix += w * np.outer(amps, amps.conj())
    rho_out = DensityOperator(arena, out_matrix)
    reports = tuple(
        negativity_report(rho_out, bp, ppt_tol=ppt_tol)
        for bp in bipartitions(arena.n_modes)
    )
    ppt_min = min(r.min_pt_eigenvalue for r in reports)

    # agreement between the two routes
    rho_closed = ensemble_to_density(out_ens, arena)
    cross_dev = float(np.abs(rho_out.matrix - rho_closed.matrix).max())

    # route 3: Gaussian oracle, when the input is a single coherent component
    gaussian_verdict = None
    if ens.n_components == 1:
        specs = [GaussianSpec("coherent", alpha=complex(a)) for a in ens.alphas[0]]
        g_out = apply_passive(gaussian_from_spec(specs), m)
        verdict = {"is_classical": is_classical(g_out).label,
                   "classicality_margin": is_classical(g_out).margin}
        if arena.n_modes == 2:
            sep = simon_separable(g_out)
            verdict["simon"] = sep.label
            verdict["simon_margin"] = sep.margin
        gaussian_verdict = verdict

    return TrialRecord(
        seed=seed,
        input_description=describe_ensemble(ens),
        unitary_description=describe_unitary(m, unitary_source),
        ensemble_closure="pass" if closure_ok else "fail",
        ppt_min_eigenvalue=ppt_min,
        entanglement_reports=reports,
        classicality=classicality_report(rho_in),
        cross_pipeline_max_dev=cross_dev,
        gaussian_verdict=gaussian_verdict,
        wall_time=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class CampaignConfig:
    n_trials: int
    seed: int
    n_modes: int = 2
    max_ensemble_components: int = 4
    amplitude_bound: float = 1.0
    cutoff: int = 14
    unitary_source: str = "random_haar"  # or "beam_splitter_grid"
    threads: int = 1
    ppt_tol: float = PPT_TOL
    leak_tol: float = 1e-6
    manual_ensemble: Optional[CoherentEnsemble] = None

    def __post_init__(self) -> None:
        if self.n_trials < 0:
            raise ValueError("n_trials must be >= 0")
        if self.n_modes < 2:
            raise ValueError("need at least 2 modes for a bipartition")
        if self.unitary_source not in ("random_haar", "beam_splitter_grid"):
            raise ValueError(f"unknown unitary source {self.unitary_source!r}")
        if self.unitary_source == "beam_splitter_grid" and self.n_modes != 2:
            raise ValueError("beam splitter grid requires exactly 2 modes")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.manual_ensemble is not None and self.manual_ensemble.n_modes != self.n_modes:
            raise ValueError("manual ensemble mode count does not match config")
        # truncation safety: the coherent tail at the amplitude bound must
        # fit the leak budget at the configured cutoff
        bound = self.amplitude_bound
        if self.manual_ensemble is not None:
            bound = max(bound, self.manual_ensemble.max_abs_alpha())
        leak = coherent_leakage(bound, self.cutoff)
        if leak > self.leak_tol:
            raise ValueError(
                f"cutoff {self.cutoff} is truncation-unsafe for |alpha| <= {bound}: "
                f"leakage {leak:.3e} > leak budget {self.leak_tol:.1e}"
            )


@dataclass(frozen=True)
class CampaignSummary:
    config_echo: dict
    n_trials: int
    n_completed: int
    n_retried: int
    n_overflow_failures: int
    worst_ppt_min_eigenvalue: Optional[float]
    worst_cross_pipeline_dev: Optional[float]
    findings: tuple[dict, ...]
    records: tuple[TrialRecord, ...] = field(repr=False)

    @property
    def clean(self) -> bool:
        return not self.findings and self.n_overflow_failures == 0

    def to_json_dict(self) -> dict:
        return {
            "config": self.config_echo,
            "n_trials": self.n_trials,
            "n_completed": self.n_completed,
            "n_retried": self.n_retried,
            "n_overflow_failures": self.n_overflow_failures,
            "worst_ppt_min_eigenvalue": self.worst_ppt_min_eigenvalue,
            "worst_cross_pipeline_dev": self.worst_cross_pipeline_dev,
            "findings": list(self.findings),
        }


def _config_echo(cfg: CampaignConfig) -> dict:
    echo = {
        "n_trials": cfg.n_trials,
        "seed": cfg.seed,
        "n_modes": cfg.n_modes,
        "max_ensemble_components": cfg.max_ensemble_components,
        "amplitude_bound": cfg.amplitude_bound,
        "cutoff": cfg.cutoff,
        "unitary_source": cfg.unitary_source,
        "threads": cfg.threads,
        "ppt_tol": cfg.ppt_tol,
        "leak_tol": cfg.leak_tol,
    }
    if cfg.manual_ensemble is not None:
        echo["ensemble"] = describe_ensemble(cfg.manual_ensemble)
    return echo


def _grid_splitter(i: int, n: int) -> ModeUnitary:
    theta = (i + 0.5) / n * (np.pi / 2.0)
    phi0 = 2.0 * np.pi * i / n
    phi1 = 4.0 * np.pi * i / n % (2.0 * np.pi)
    return beam_splitter_matrix(theta, phi0, phi1)


def _run_one(cfg: CampaignConfig, index: int, child_seed) -> tuple[TrialRecord, int]:
    """Run trial `index`, retrying at larger cutoffs on truncation overflow.
    Returns the record and the number of retries it took."""
    for attempt in range(RETRY_BUDGET + 1):
        rng = np.random.default_rng(child_seed)
        ens = cfg.manual_ensemble
        if ens is None:
            ens = random_classical_ensemble(
                rng, cfg.n_modes, cfg.max_ensemble_components, cfg.amplitude_bound
            )
        if cfg.unitary_source == "random_haar":
            m = haar_unitary(cfg.n_modes, rng)
        else:
            m = _grid_splitter(index, max(cfg.n_trials, 1))
        arena = FockArena(cfg.n_modes, cfg.cutoff + attempt * CUTOFF_STEP)
        try:
            record = run_theorem_trial(
                ens, m, arena, seed=index,
                unitary_source=cfg.unitary_source, ppt_tol=cfg.ppt_tol,
            )
            return record, attempt
        except TruncationError:
            if attempt == RETRY_BUDGET:
                raise
    raise AssertionError("unreachable")


def run_campaign(cfg: CampaignConfig) -> CampaignSummary:
    """Run a seeded campaign; deterministic given (seed, config).

    Trials are independent; with threads > 1 they run on a thread pool and
    are aggregated in trial order, so the summary does not depend on the
    degree of parallelism.
    """
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trials)
    results: list[Optional[TrialRecord]] = [None] * cfg.n_trials
    retried = 0
    overflow_failures = []

    def work(i: int):
        try:
            return _run_one(cfg, i, children[i])
        except TruncationError as exc:
            return exc

    if cfg.threads == 1:
        outcomes = [work(i) for i in range(cfg.n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(work, range(cfg.n_trials)))

    findings = []
    for i, outcome in enumerate(outcomes):
        if isinstance(outcome, TruncationError):
            overflow_failures.append({"trial": i, "kind": "truncation_overflow",
                                      "detail": str(outcome)})
            continue
        record, attempts = outcome
        retried += 1 if attempts else 0
        results[i] = record
        if record.ensemble_closure != "pass":
            findings.append({"trial": i, "kind": "closure_breach_critical",
                             "detail": "ensemble weights changed"})
        if record.ppt_min_eigenvalue < -cfg.ppt_tol:
            findings.append({"trial": i, "kind": "ppt_violation",
                             "detail": record.ppt_min_eigenvalue})
        if record.cross_pipeline_max_dev > CROSS_PIPELINE_TOL:
            findings.append({"trial": i, "kind": "cross_pipeline_disagreement",
                             "detail": record.cross_pipeline_max_dev})
        if record.gaussian_verdict is not None:
            if record.gaussian_verdict["is_classical"] != "classical":
                findings.append({"trial": i, "kind": "gaussian_classicality_lost",
                                 "detail": record.gaussian_verdict})
            if record.gaussian_verdict.get("simon", "separable") != "separable":
                findings.append({"trial": i, "kind": "gaussian_simon_entangled",
                                 "detail": record.gaussian_verdict})

    completed = [r for r in results if r is not None]
    return CampaignSummary(
        config_echo=_config_echo(cfg),
        n_trials=cfg.n_trials,
        n_completed=len(completed),
        n_retried=retried,
        n_overflow_failures=len(overflow_failures),
        worst_ppt_min_eigenvalue=(
            min(r.ppt_min_eigenvalue for r in completed) if completed else None
        ),
        worst_cross_pipeline_dev=(
            max(r.cross_pipeline_max_dev for r in completed) if completed else None
        ),
        findings=tuple(findings + overflow_failures),
        records=tuple(completed),
    )


@dataclass(frozen=True)
class NonSufficiencyRecord:
    """Forward: a nonclassical Fock input entangles; inverse: the inverse
    splitter maps that entangled state back to a separable product, showing
    nonclassicality of the (inverse-step) input does not force entanglement."""

    input_mandel_q: float
    forward: EntanglementReport
    inverse: EntanglementReport
    recovered_fidelity: float

    def to_json_dict(self) -> dict:
        return {
            "input_mandel_q": self.input_mandel_q,
            "forward_log_negativity": self.forward.log_negativity,
            "forward_negativity": self.forward.negativity,
            "inverse_negativity": self.inverse.negativity,
            "recovered_fidelity": self.recovered_fidelity,
        }


def non_sufficiency_demo(
    theta: float, phi0: float, phi1: float, arena: FockArena
) -> NonSufficiencyRecord:
    if arena.n_modes != 2:
        raise ValueError("the demo is a two-mode construction")
    m = beam_splitter_matrix(theta, phi0, phi1)
    psi_in = fock(arena, (1, 0))
    rho_in = psi_in.to_density()
    q_in = mandel_q(rho_in, 0)

    lifted = lift_unitary(m, arena)
    rho_fwd = apply_to_density(lifted, rho_in)
    forward = negativity_report(rho_fwd, ((0,), (1,)))

    lifted_inv = lift_unitary(m.inverse(), arena)
    rho_back = apply_to_density(lifted_inv, rho_fwd)
    inverse = negativity_report(rho_back, ((0,), (1,)))
    fidelity = rho_back.fidelity_with_pure(psi_in)

    return NonSufficiencyRecord(
        input_mandel_q=q_in,
        forward=forward,
        inverse=inverse,
        recovered_fidelity=fidelity,
    )
