"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line (run with -s to see them on success;
pytest shows them on failure regardless) and asserts the property at its
stated tolerance.
"""

import json

import numpy as np
import pytest

from bselab import cli
from bselab.gaussian import (
    apply_passive,
    gaussian_from_spec,
    is_classical,
    simon_separable,
)
from bselab.hilbert import FockArena
from bselab.passive import (
    apply_to_density,
    beam_splitter_matrix,
    conjugation_residual,
    lift_unitary,
)
from bselab.states import GaussianSpec, coherent, kron_densities, spec_to_density, vacuum
from bselab.theoremlab import (
    CampaignConfig,
    bipartitions,
    haar_unitary,
    non_sufficiency_demo,
    run_campaign,
)
from bselab.witnesses import negativity_report


def _verdict(n: int, name: str, ok: bool) -> None:
    print(f"ACCEPTANCE {n} ({name}): {'PASS' if ok else 'FAIL'}")
    assert ok


@pytest.fixture(scope="module")
def lift_set():
    """Shared unitary set for criteria 1 and 2: 50 random 2-mode lifts at
    cutoff 10 and 20 random 3-mode lifts at cutoff 8."""
    rng = np.random.default_rng(2024)
    lifts = []
    arena2 = FockArena(2, 10)
    for _ in range(50):
        m = haar_unitary(2, rng)
        lifts.append((m, lift_unitary(m, arena2), arena2))
    arena3 = FockArena(3, 8)
    for _ in range(20):
        m = haar_unitary(3, rng)
        lifts.append((m, lift_unitary(m, arena3), arena3))
    return lifts


def test_acceptance_1_vacuum_invariance(lift_set):
    worst = 0.0
    for _, lifted, arena in lift_set:
        vac = vacuum(arena).amplitudes
        worst = max(worst, float(np.abs(lifted.apply_to_vector(vac) - vac).max()))
    _verdict(1, "vacuum invariance", worst <= 1e-10)


def test_acceptance_2_conjugation_law(lift_set):
    worst = 0.0
    for m, lifted, arena in lift_set:
        for mode in range(arena.n_modes):
            worst = max(worst, conjugation_residual(lifted, m, mode))
    _verdict(2, "conjugation law", worst <= 1e-8)


def test_acceptance_3_coherent_covariance():
    rng = np.random.default_rng(77)
    arena = FockArena(2, 20)
    worst = 1.0
    for _ in range(100):
        radii = np.sqrt(rng.uniform(0.0, 1.0, 2))
        alpha = radii * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, 2))
        m = haar_unitary(2, rng)
        rho = apply_to_density(lift_unitary(m, arena), coherent(arena, alpha).to_density())
        target = coherent(arena, alpha @ np.conj(m.matrix))
        worst = min(worst, rho.fidelity_with_pure(target))
    _verdict(3, "coherent covariance", worst >= 1.0 - 1e-6)


def test_acceptance_4_two_mode_theorem_campaign():
    summary = run_campaign(
        CampaignConfig(
            n_trials=200,
            seed=404,
            n_modes=2,
            max_ensemble_components=4,
            amplitude_bound=1.0,
            cutoff=14,
        )
    )
    ok = (
        summary.clean
        and summary.n_completed == 200
        and all(r.ensemble_closure == "pass" for r in summary.records)
        and summary.worst_ppt_min_eigenvalue >= -1e-8
    )
    _verdict(4, "two-mode theorem campaign", ok)


def test_acceptance_5_three_mode_campaign():
    summary = run_campaign(
        CampaignConfig(
            n_trials=100,
            seed=505,
            n_modes=3,
            max_ensemble_components=4,
            amplitude_bound=0.5,
            cutoff=8,
            unitary_source="random_haar",
        )
    )
    ok = summary.clean and summary.n_completed == 100
    expected = {tuple(sorted(bp)) for bp in bipartitions(3)}
    for record in summary.records:
        seen = {tuple(sorted(r.bipartition)) for r in record.entanglement_reports}
        ok = ok and seen == expected
        ok = ok and all(
            r.min_pt_eigenvalue >= -1e-8 for r in record.entanglement_reports
        )
    _verdict(5, "three-mode campaign", ok)


def test_acceptance_6_entanglement_generation_benchmark():
    arena = FockArena(2, 6)
    record = non_sufficiency_demo(np.pi / 4, 0.0, 0.0, arena)
    ok = abs(record.forward.log_negativity - 1.0) <= 1e-9
    flat = non_sufficiency_demo(0.0, 0.0, 0.0, arena)
    ok = ok and abs(flat.forward.log_negativity) <= 1e-9
    _verdict(6, "entanglement generation benchmark", ok)


def test_acceptance_7_non_sufficiency():
    record = non_sufficiency_demo(np.pi / 4, 0.0, 0.0, FockArena(2, 6))
    ok = (
        record.inverse.negativity <= 1e-9
        and record.recovered_fidelity >= 1.0 - 1e-9
        and record.input_mandel_q == -1.0
    )
    _verdict(7, "non-sufficiency demo", ok)


def test_acceptance_8_gaussian_oracle_agreement():
    rng = np.random.default_rng(808)
    arena = FockArena(2, 18)
    ok = True
    worst_negativity = 0.0
    for _ in range(100):
        specs = []
        for _ in range(2):
            if rng.uniform() < 0.5:
                specs.append(GaussianSpec("thermal", nbar=float(rng.uniform(0.0, 0.4))))
            else:
                a = 0.7 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
                specs.append(GaussianSpec("coherent", alpha=complex(a)))
        m = haar_unitary(2, rng)

        g_out = apply_passive(gaussian_from_spec(specs), m)
        ok = ok and is_classical(g_out).label == "classical"
        ok = ok and simon_separable(g_out).label == "separable"

        rho_in = kron_densities(*(spec_to_density(s, FockArena(1, 18)) for s in specs))
        rho_out = apply_to_density(lift_unitary(m, arena), rho_in)
        neg = negativity_report(rho_out, ((0,), (1,))).negativity
        worst_negativity = max(worst_negativity, neg)
    ok = ok and worst_negativity <= 1e-7

    # two-mode squeezed vacuum at r = 0.5: both pipelines flag entanglement
    tmsv_cov = apply_passive(
        gaussian_from_spec(
            [
                GaussianSpec("squeezed_vacuum", r=0.5),
                GaussianSpec("squeezed_vacuum", r=0.5, theta_s=np.pi),
            ]
        ),
        beam_splitter_matrix(np.pi / 4),
    )
    ok = ok and simon_separable(tmsv_cov).label == "entangled"

    arena20 = FockArena(2, 20)
    sq_a = spec_to_density(GaussianSpec("squeezed_vacuum", r=0.5), FockArena(1, 20))
    sq_b = spec_to_density(
        GaussianSpec("squeezed_vacuum", r=0.5, theta_s=np.pi), FockArena(1, 20)
    )
    tmsv_fock = apply_to_density(
        lift_unitary(beam_splitter_matrix(np.pi / 4), arena20),
        kron_densities(sq_a, sq_b),
    )
    ok = ok and negativity_report(tmsv_fock, ((0,), (1,))).negativity > 0.1
    _verdict(8, "gaussian oracle agreement", ok)


def test_acceptance_9_determinism(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"version": 1, "n_trials": 20, "seed": 909, "cutoff": 14}))

    streams = []
    for tag in ("first", "second"):
        out = tmp_path / tag
        assert cli.main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
        streams.append((out / "trials.jsonl").read_bytes())
    ok = streams[0] == streams[1]

    threaded = tmp_path / "threaded"
    assert (
        cli.main(["verify", "--config", str(cfg), "--out", str(threaded), "--threads", "4"])
        == 0
    )
    ok = ok and (threaded / "trials.jsonl").read_bytes() == streams[0]
    serial_report = json.loads((tmp_path / "first" / "report.json").read_text())
    threaded_report = json.loads((threaded / "report.json").read_text())
    serial_report["config"].pop("threads")
    threaded_report["config"].pop("threads")
    ok = ok and serial_report == threaded_report
    _verdict(9, "determinism", ok)
