import math

import numpy as np
import pytest

from robq.bounds import fidelity_lower_bound
from robq.circuit import Circuit, gate
from robq.errors import NotSingleQubit
from robq.presets import validation_a, validation_b
from robq.rng import SeededRng
from robq.simulator import haar_state
from robq.tomography import (
    BlochEstimate,
    estimate_bloch,
    exact_probabilities,
    fidelity_pure_mixed,
    measure_basis,
    reconstruct_rho,
    tomograph,
    validation_sweep,
)

ZERO = np.array([1, 0], dtype=complex)
ONE = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)


def _bloch(r):
    return BlochEstimate(*r, shots_per_basis=0, raw_r=tuple(r))


def test_measure_basis_examples():
    gen = np.random.default_rng(30)
    assert measure_basis(ZERO, "Z", 1000, gen) == (1000, 0)
    assert measure_basis(PLUS, "x", 777, gen) == (777, 0)
    n_plus, n_minus = measure_basis(PLUS, "Z", 20000, gen)
    assert n_plus + n_minus == 20000
    assert abs(n_plus / 20000 - 0.5) <= 3 * math.sqrt(0.25 / 20000)
    with pytest.raises(ValueError):
        measure_basis(ZERO, "z", 0, gen)
    with pytest.raises(ValueError):
        measure_basis(ZERO, "w", 10, gen)


def test_estimate_bloch_examples():
    b = estimate_bloch(*(exact_probabilities(ZERO, k) for k in "xyz"))
    assert np.allclose(b.r, [0, 0, 1]) and not b.projected
    b = estimate_bloch(*(exact_probabilities(PLUS, k) for k in "xyz"))
    assert np.allclose(b.r, [1, 0, 0])


def test_radial_projection():
    b = estimate_bloch((900, 100), (850, 150), (550, 450))
    assert b.raw_r == pytest.approx((0.8, 0.7, 0.1))
    norm = math.sqrt(0.8**2 + 0.7**2 + 0.1**2)
    assert np.allclose(b.r, np.array([0.8, 0.7, 0.1]) / norm, atol=1e-15)
    assert np.linalg.norm(b.r) == pytest.approx(1.0)
    assert b.projected and b.shots_per_basis == 1000
    with pytest.raises(ValueError):
        estimate_bloch((10, 0), (5, 0), (10, 0))


def test_reconstruct_rho_examples():
    assert np.allclose(reconstruct_rho(_bloch((0, 0, 1))), np.outer(ZERO, ZERO))
    assert np.allclose(reconstruct_rho(_bloch((0, 0, 0))), np.eye(2) / 2)
    assert np.allclose(reconstruct_rho(_bloch((1, 0, 0))), np.outer(PLUS, PLUS.conj()))


def test_fidelity_pure_mixed_examples():
    assert fidelity_pure_mixed(ZERO, np.outer(ZERO, ZERO)) == 1.0
    assert fidelity_pure_mixed(ZERO, np.outer(ONE, ONE)) == 0.0
    assert fidelity_pure_mixed(ZERO, np.eye(2) / 2) == pytest.approx(1 / math.sqrt(2))


def test_reconstruction_is_a_density_matrix():
    gen = np.random.default_rng(31)
    for _ in range(100):
        t = tomograph(haar_state(1, gen), 50, gen)
        rho = t.rho
        assert np.allclose(rho, rho.conj().T)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-15)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12


def test_infinite_shot_round_trip():
    gen = np.random.default_rng(32)
    for _ in range(100):
        psi = haar_state(1, gen)
        t = tomograph(psi, None, reference=psi)
        assert t.fidelity_vs[1] == pytest.approx(1.0, abs=1e-12)


def test_finite_shot_accuracy():
    gen = np.random.default_rng(33)
    good = 0
    for _ in range(200):
        psi, ref = haar_state(1, gen), haar_state(1, gen)
        est = tomograph(psi, 20000, gen, reference=ref).fidelity_vs[1]
        good += abs(est - abs(np.vdot(ref, psi))) <= 0.02
    assert good >= 190


def test_tomograph_streams_are_addressed():
    r = SeededRng(4)
    a = tomograph(PLUS, 100, r, ("t", 1)).bloch
    b = tomograph(PLUS, 100, SeededRng(4), ("t", 1)).bloch
    assert a == b
    with pytest.raises(NotSingleQubit):
        tomograph(np.ones(4), 10, r)


@pytest.fixture(scope="module")
def sweep():
    return validation_sweep({"A": validation_a(), "B": validation_b()}, levels=16, samples=80, shots=20000)


def test_sweep_level_zero_is_shot_noise_only(sweep):
    for cid in ("A", "B"):
        assert sweep.curve(cid, stat="min")[0] >= 0.995
        assert sweep.curve(cid, "f_exact", "min")[0] == pytest.approx(1.0, abs=1e-12)


def test_sweep_circuit_a_tracks_bound(sweep):
    bound = np.array([fidelity_lower_bound(math.pi / 8, e) for e in sweep.levels])
    assert np.all(sweep.curve("A") >= bound - 0.02)
    assert np.all(sweep.curve("A", "f_exact") >= bound - 1e-12)


def test_sweep_a_beats_b(sweep):
    hi = sweep.levels >= 0.25
    assert np.all(sweep.curve("A")[hi] > sweep.curve("B")[hi])


def test_sweep_outputs(sweep):
    lines = sweep.to_csv().splitlines()
    assert lines[0] == "circuit_id,eps_level,sample_idx,eps_0,eps_1,f_qst,f_exact"
    assert len(lines) == 1 + 2 * 16 * 80
    summ = sweep.summary()
    assert len(summ) == 32 and set(summ[0]) >= {"mean_f_qst", "std_f_qst", "min_f_qst"}
    # A has one noisy gate, B two: A rows are padded
    assert lines[1].split(",")[4] == ""


def test_sweep_rejects_multi_qubit():
    with pytest.raises(NotSingleQubit):
        validation_sweep({"bad": Circuit(2, [gate("cx", [0, 1])])}, levels=2, samples=1)
