import json

import numpy as np
import pytest

from noisyqss.channels import (
    CATALOGUE,
    KrausChannel,
    amplitude_damping,
    apply_channel,
    catalogue_json,
    classify_channel_structure,
    depolarizing,
    phase_damping,
    phase_flip,
    sample_kraus_branch,
    sample_kraus_branches,
    standard_channel,
)
from noisyqss.errors import CatalogueError, ContractError, DegenerateStateError, DomainError
from noisyqss.linalg import assert_density_matrix, random_density_matrix
from noisyqss.states import SIGMA_Z, density, ghz3

from oracles import distributed_state, forwarded_state

PLUS = np.full((2, 2), 0.5, dtype=complex)
PARAMS = np.linspace(0, 1, 20)


def test_phase_damping_zero_is_identity(rng):
    ch = phase_damping(0)
    assert np.array_equal(ch.operators[0], np.eye(2))
    assert not ch.operators[1].any() and not ch.operators[2].any()
    rho = random_density_matrix(2, rng)
    assert np.abs(apply_channel(rho, ch, 0) - rho).max() < 1e-15


def test_phase_damping_one_fully_dephases():
    assert np.abs(apply_channel(PLUS, phase_damping(1), 0) - np.eye(2) / 2).max() < 1e-15


def test_phase_damping_completeness():
    assert phase_damping(0.37).completeness_error() < 1e-15


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_parameter_domain(p):
    with pytest.raises(DomainError):
        phase_damping(p)


def test_phase_flip_form():
    ch = phase_flip(0.2)
    assert np.abs(ch.operators[0] - np.sqrt(0.8) * np.eye(2)).max() < 1e-15
    assert np.abs(ch.operators[1] - np.sqrt(0.2) * SIGMA_Z).max() < 1e-15
    assert ch.is_cptp()


def test_amplitude_damping_zero_is_identity(rng):
    rho = random_density_matrix(2, rng)
    assert np.abs(apply_channel(rho, amplitude_damping(0), 0) - rho).max() < 1e-15


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_depolarizing_fixed_point(p):
    assert np.abs(apply_channel(np.eye(2) / 2, depolarizing(p), 0) - np.eye(2) / 2).max() < 1e-15


def test_unknown_channel():
    with pytest.raises(CatalogueError):
        standard_channel("two_pauli", 0.1)


def test_catalogue_size():
    assert len(CATALOGUE) == 6


@pytest.mark.parametrize("name", list(CATALOGUE))
def test_catalogue_completeness_and_positivity(name, rng):
    for p in PARAMS:
        ch = standard_channel(name, p)
        assert ch.completeness_error() < 1e-12
        rho = random_density_matrix(8, rng)
        out = apply_channel(rho, ch, int(rng.integers(3)))
        assert abs(np.trace(out) - 1) < 1e-12
        assert assert_density_matrix(out, 1e-10)


def test_phase_damping_unital():
    for p in PARAMS:
        assert np.abs(apply_channel(np.eye(2) / 2, phase_damping(p), 0) - np.eye(2) / 2).max() < 1e-15


def test_phase_damping_composition_multiplies_coherence():
    for p in (0.1, 0.4, 0.9):
        for p2 in (0.0, 0.25, 0.6):
            out = apply_channel(apply_channel(PLUS, phase_damping(p), 0), phase_damping(p2), 0)
            assert abs(out[0, 1] - 0.5 * (1 - p) * (1 - p2)) < 1e-12
            assert abs(out[0, 0] - 0.5) < 1e-15


@pytest.mark.parametrize("p", [0.0, 0.05, 0.4, 0.77, 1.0])
def test_two_legs_then_third_leg(p):
    ch = phase_damping(p)
    rho = density(ghz3())
    rho = apply_channel(apply_channel(rho, ch, 0), ch, 1)
    assert np.abs(rho - distributed_state(p)).max() < 1e-15
    rho = apply_channel(rho, ch, 0)
    assert np.abs(rho - forwarded_state(p, "I")).max() < 1e-15


def test_non_cptp_rejected():
    bad = KrausChannel("bad", 0.5, (np.eye(2, dtype=complex), np.eye(2, dtype=complex)))
    with pytest.raises(ContractError):
        apply_channel(np.eye(2) / 2, bad, 0)
    with pytest.raises(ContractError):
        sample_kraus_branch(np.eye(2) / 2, bad, 0, np.random.default_rng(0))


def test_sample_branch_zero_noise(rng):
    for _ in range(100):
        idx, post = sample_kraus_branch(PLUS, phase_damping(0), 0, rng)
        assert idx == 0
        assert np.abs(post - PLUS).max() < 1e-15


def test_sample_branch_full_damping_on_ket0(rng):
    ket0 = np.diag([1, 0]).astype(complex)
    for _ in range(100):
        idx, post = sample_kraus_branch(ket0, phase_damping(1), 0, rng)
        assert idx == 1
        assert np.abs(post - ket0).max() < 1e-15


def test_sample_branch_degenerate():
    with pytest.raises(DegenerateStateError):
        sample_kraus_branch(np.zeros((2, 2)), phase_damping(0.5), 0, np.random.default_rng(0))


def test_sample_mean_matches_exact_channel():
    n = 100_000
    rho = density(ghz3())
    ch = phase_damping(0.5)
    _, post = sample_kraus_branches(np.broadcast_to(rho, (n, 8, 8)), ch, 1, np.random.default_rng(7))
    mean = post.mean(axis=0)
    sigma = post.std(axis=0) / np.sqrt(n)
    exact = apply_channel(rho, ch, 1)
    assert np.all(np.abs(mean - exact) <= 3 * sigma + 1e-12)


def test_single_and_batched_sampling_share_a_stream():
    rho = density(ghz3())
    ch = phase_damping(0.5)
    r1 = np.random.default_rng(99)
    singles = [sample_kraus_branch(rho, ch, 0, r1)[0] for _ in range(200)]
    batched, _ = sample_kraus_branches(np.broadcast_to(rho, (200, 8, 8)), ch, 0, np.random.default_rng(99))
    assert singles == batched.tolist()


def test_sampling_deterministic_given_seed():
    rho = density(ghz3())
    ch = depolarizing(0.6)
    a, _ = sample_kraus_branches(np.broadcast_to(rho, (500, 8, 8)), ch, 2, np.random.default_rng(3))
    b, _ = sample_kraus_branches(np.broadcast_to(rho, (500, 8, 8)), ch, 2, np.random.default_rng(3))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("p", [0.0, 0.3, 0.8, 1.0])
def test_structure_phase_damping(p):
    rep = classify_channel_structure(phase_damping(p))
    assert rep.all_kraus_diagonal and rep.ghz_form_preserved
    assert abs(rep.coherence_factor - (1 - p) ** 3) < 1e-12


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_structure_phase_flip(p):
    rep = classify_channel_structure(phase_flip(p))
    assert rep.all_kraus_diagonal and rep.ghz_form_preserved
    assert abs(rep.coherence_factor - abs(1 - 2 * p) ** 3) < 1e-12


def test_structure_amplitude_damping():
    rep = classify_channel_structure(amplitude_damping(0.5))
    assert not rep.all_kraus_diagonal
    assert not rep.ghz_form_preserved


@pytest.mark.parametrize("name", ["bit_flip", "bit_phase_flip", "depolarizing"])
def test_structure_off_diagonal_channels(name):
    rep = classify_channel_structure(standard_channel(name, 0.3))
    assert not rep.all_kraus_diagonal
    assert not rep.ghz_form_preserved
    assert 0 <= rep.coherence_factor <= 1


def test_catalogue_json():
    entries = json.loads(catalogue_json(0.3))
    assert [e["name"] for e in entries] == list(CATALOGUE)
    pd = entries[0]
    assert len(pd["operators"]) == 3
    assert pd["operators"][0][0][0] == pytest.approx([np.sqrt(0.7), 0.0])
    assert pd["cptp"] and pd["structure"]["all_kraus_diagonal"]
    bpf = next(e for e in entries if e["name"] == "bit_phase_flip")
    assert bpf["operators"][1][0][1] == pytest.approx([0.0, -np.sqrt(0.3)])
