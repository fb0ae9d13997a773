import numpy as np
import pytest

from bselab.hilbert import FockArena
from bselab.passive import ModeUnitary, beam_splitter_matrix
from bselab.states import CoherentEnsemble
from bselab.theoremlab import (
    CampaignConfig,
    bipartitions,
    haar_unitary,
    non_sufficiency_demo,
    random_classical_ensemble,
    run_campaign,
    run_theorem_trial,
)


def test_haar_unitary_is_unitary_and_deterministic():
    u1 = haar_unitary(3, np.random.default_rng(42))
    u2 = haar_unitary(3, np.random.default_rng(42))
    assert np.array_equal(u1.matrix, u2.matrix)
    assert np.abs(u1.matrix.conj().T @ u1.matrix - np.eye(3)).max() <= 1e-12


def test_random_ensemble_contract():
    ens = random_classical_ensemble(7, 2, 4, 1.0)
    assert 1 <= ens.n_components <= 4
    assert abs(ens.weights.sum() - 1.0) <= 1e-12
    assert np.all(ens.weights >= 0)
    assert np.abs(ens.alphas).max() <= 1.0
    again = random_classical_ensemble(7, 2, 4, 1.0)
    assert np.array_equal(ens.weights, again.weights)
    assert np.array_equal(ens.alphas, again.alphas)

    single = random_classical_ensemble(3, 2, 1, 0.5)
    assert single.n_components == 1

    with pytest.raises(ValueError):
        random_classical_ensemble(0, 2, 0, 1.0)


def test_bipartitions_enumeration():
    assert bipartitions(2) == [((0,), (1,))]
    three = bipartitions(3)
    assert len(three) == 3
    splits = {frozenset(map(frozenset, pair)) for pair in three}
    assert frozenset({frozenset({0}), frozenset({1, 2})}) in splits
    assert frozenset({frozenset({1}), frozenset({0, 2})}) in splits
    assert frozenset({frozenset({2}), frozenset({0, 1})}) in splits


def test_trial_identity_unitary_keeps_diagnostics():
    arena = FockArena(2, 12)
    ens = random_classical_ensemble(1, 2, 3, 0.6)
    record = run_theorem_trial(ens, ModeUnitary(np.eye(2)), arena)
    assert record.ensemble_closure == "pass"
    assert record.ppt_min_eigenvalue >= -1e-10
    assert record.cross_pipeline_max_dev <= 1e-10
    # input diagnostics: classical ensembles never flag nonclassicality
    assert not record.classicality.sub_poissonian_detected
    assert not record.classicality.squeezing_detected


def test_trial_single_component_runs_gaussian_oracle():
    arena = FockArena(2, 12)
    ens = CoherentEnsemble(2, np.array([1.0]), np.array([[0.5, 0.2j]], complex))
    record = run_theorem_trial(ens, beam_splitter_matrix(np.pi / 4), arena)
    assert record.gaussian_verdict is not None
    assert record.gaussian_verdict["is_classical"] == "classical"
    assert record.gaussian_verdict["simon"] == "separable"


def test_trial_record_serialization_omits_wall_time():
    arena = FockArena(2, 12)
    ens = random_classical_ensemble(2, 2, 2, 0.5)
    record = run_theorem_trial(ens, haar_unitary(2, np.random.default_rng(0)), arena)
    payload = record.to_json_dict()
    assert "wall_time" not in payload
    assert payload["ensemble_closure"] == "pass"
    assert len(payload["bipartitions"]) == 1


def test_empty_campaign():
    summary = run_campaign(CampaignConfig(n_trials=0, seed=1))
    assert summary.n_completed == 0
    assert summary.findings == ()
    assert summary.worst_ppt_min_eigenvalue is None
    assert summary.clean


def test_small_campaign_clean_and_reproducible():
    cfg = CampaignConfig(n_trials=8, seed=123, n_modes=2, cutoff=14)
    s1 = run_campaign(cfg)
    s2 = run_campaign(cfg)
    assert s1.clean
    assert s1.worst_ppt_min_eigenvalue >= -1e-8
    assert s1.to_json_dict() == s2.to_json_dict()
    assert [r.to_json_dict() for r in s1.records] == [r.to_json_dict() for r in s2.records]


def test_campaign_parallel_matches_serial():
    base = CampaignConfig(n_trials=8, seed=9, n_modes=2, cutoff=14)
    parallel = CampaignConfig(n_trials=8, seed=9, n_modes=2, cutoff=14, threads=4)
    r1 = [r.to_json_dict() for r in run_campaign(base).records]
    r4 = [r.to_json_dict() for r in run_campaign(parallel).records]
    assert r1 == r4


def test_beam_splitter_grid_source():
    cfg = CampaignConfig(
        n_trials=6, seed=2, n_modes=2, cutoff=14, unitary_source="beam_splitter_grid"
    )
    summary = run_campaign(cfg)
    assert summary.clean
    assert all(
        r.unitary_description["source"] == "beam_splitter_grid" for r in summary.records
    )


def test_config_validation():
    with pytest.raises(ValueError):
        CampaignConfig(n_trials=-1, seed=0)
    with pytest.raises(ValueError):
        CampaignConfig(n_trials=1, seed=0, n_modes=1)
    with pytest.raises(ValueError):
        CampaignConfig(n_trials=1, seed=0, unitary_source="magic")
    with pytest.raises(ValueError):
        CampaignConfig(n_trials=1, seed=0, n_modes=3, unitary_source="beam_splitter_grid")
    # truncation-unsafe combination is rejected up front
    with pytest.raises(ValueError):
        CampaignConfig(n_trials=1, seed=0, amplitude_bound=2.0, cutoff=6)


def test_non_sufficiency_demo_values():
    arena = FockArena(2, 8)
    record = non_sufficiency_demo(np.pi / 4, 0.0, 0.0, arena)
    assert record.input_mandel_q == pytest.approx(-1.0)
    assert record.forward.log_negativity == pytest.approx(1.0, abs=1e-9)
    assert record.inverse.negativity <= 1e-9
    assert record.recovered_fidelity >= 1.0 - 1e-9

    flat = non_sufficiency_demo(0.0, 0.0, 0.0, arena)
    assert flat.forward.negativity <= 1e-12
