"""Dense reference simulator against a second, in-test dense implementation.

The conftest helpers intentionally use a different construction (projector
CNOT, Kraus-form noise) so agreement here is meaningful.
"""

import numpy as np
import pytest

from paulipath import (
    CliffordGate,
    Circuit,
    Hamiltonian,
    Layer,
    PauliWord,
    RotationGate,
    SparseDensity,
)
from paulipath.oracle import (
    OracleCapError,
    depolarize_all,
    evolve_noisy,
    hamiltonian_matrix,
    layer_unitary,
    noiseless_mean_value,
    noisy_mean_value,
    observable_factor,
    state_factor,
    state_matrix,
    transition_factor,
    word_matrix,
)

from conftest import (
    dense_depolarize,
    dense_layer_unitary,
    dense_noisy_mean,
    dense_state,
    dense_word,
    random_certified_instance,
)


def test_word_matrix_orientation():
    assert np.allclose(word_matrix(PauliWord.from_string("XI")),
                       dense_word(PauliWord.from_string("XI")))
    assert np.allclose(word_matrix(PauliWord.from_string("ZY")),
                       dense_word(PauliWord.from_string("ZY")))


def test_state_matrix_round_trip():
    rho = SparseDensity(2, [(0, 0, 0.5), (3, 3, 0.5), (0, 3, 0.2), (3, 0, 0.2)])
    assert np.allclose(state_matrix(rho), dense_state(rho))


@pytest.mark.parametrize("lam", [0.0, 0.15, 1.0])
def test_depolarize_matches_kraus_form(lam):
    rng = np.random.default_rng(7)
    raw = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    mat = raw @ raw.conj().T
    mat /= np.trace(mat)
    expected = dense_depolarize(mat, 3, lam)
    got = depolarize_all(mat.reshape((2,) * 6), 3, lam).reshape(8, 8)
    assert np.allclose(got, expected)


def test_layer_unitary_matches_projector_build():
    layer = Layer(
        (
            RotationGate(PauliWord.from_string("XZI"), param="a"),
            CliffordGate("H", (3,)),
        )
    )
    theta = {"a": 1.234}
    got = layer_unitary(layer, theta, 3).reshape(8, 8)
    assert np.allclose(got, dense_layer_unitary(layer, 3, theta))
    assert np.allclose(got @ got.conj().T, np.eye(8))


@pytest.mark.parametrize("seed", [0, 4, 10, 17, 23, 31])
@pytest.mark.parametrize("lam", [0.0, 0.3, 1.0])
def test_noisy_mean_matches_independent_dense(seed, lam):
    circuit, h, rho, theta = random_certified_instance(seed)
    got = noisy_mean_value(circuit, h, rho, theta, lam)
    assert got == pytest.approx(dense_noisy_mean(circuit, h, rho, theta, lam), abs=1e-12)


def test_noiseless_equals_zero_noise():
    circuit, h, rho, theta = random_certified_instance(3)
    assert noiseless_mean_value(circuit, h, rho, theta) == pytest.approx(
        noisy_mean_value(circuit, h, rho, theta, 0.0), abs=1e-12
    )


def test_full_depolarizing_kills_traceless_part():
    circuit, h, rho, theta = random_certified_instance(8)
    assert noisy_mean_value(circuit, h, rho, theta, 1.0) == pytest.approx(
        h.identity_coeff, abs=1e-12
    )


def test_cap_guard():
    n = 11
    circuit = Circuit(
        n, (Layer((RotationGate(PauliWord.from_map(n, {1: "X"}), param="a"),)),)
    )
    h = Hamiltonian(n, [(PauliWord.from_map(n, {1: "Z"}), 1.0)])
    rho = SparseDensity.computational_basis(n)
    with pytest.raises(OracleCapError):
        noisy_mean_value(circuit, h, rho, {"a": 0.5}, 0.0)
    # a raised cap admits the same instance
    assert noisy_mean_value(circuit, h, rho, {"a": 0.0}, 0.0, cap=11) == pytest.approx(1.0)


def test_state_factor_is_overlap():
    rho = SparseDensity(1, [(0, 0, 0.5), (1, 1, 0.5), (0, 1, 0.25), (1, 0, 0.25)])
    for s in "IXYZ":
        word = PauliWord.from_string(s)
        assert state_factor(rho, word) == pytest.approx(rho.overlap(word))


def test_observable_factor_normalization():
    # Tr(H N(w)) / 2^n reduces to the damped coefficient of w
    h = Hamiltonian(2, [(PauliWord.from_string("XZ"), 0.8)])
    word = PauliWord.from_string("XZ")
    assert observable_factor(h, word, lam=0.0) == pytest.approx(0.8)
    assert observable_factor(h, word, lam=0.25) == pytest.approx(0.8 * 0.75**2)
    assert observable_factor(h, PauliWord.from_string("XI"), lam=0.0) == pytest.approx(0.0)


def test_transition_factor_single_rotation():
    # R_X on |Z>: cos branch keeps Z, sin branch moves to Y with known sign
    layer = Layer((RotationGate(PauliWord.from_string("X"), param="a"),))
    theta = {"a": 0.9}
    z, y = PauliWord.from_string("Z"), PauliWord.from_string("Y")
    assert transition_factor(layer, theta, 1, z, z) == pytest.approx(np.cos(0.9))
    got_sin = transition_factor(layer, theta, 1, y, z)
    assert abs(got_sin) == pytest.approx(abs(np.sin(0.9)))


def test_evolve_noisy_matches_dense_channel():
    circuit, h, rho, theta = random_certified_instance(12)
    lam = 0.2
    got = evolve_noisy(circuit, rho, theta, lam).reshape(2**circuit.n, 2**circuit.n)
    expected = dense_state(rho)
    for layer in circuit.layers:
        expected = dense_depolarize(expected, circuit.n, lam)
        u = dense_layer_unitary(layer, circuit.n, theta)
        expected = u @ expected @ u.conj().T
    expected = dense_depolarize(expected, circuit.n, lam)
    assert np.allclose(got, expected)
    assert np.trace(got) == pytest.approx(1.0)
    assert np.allclose(got, got.conj().T)
    assert hamiltonian_matrix(h).shape == got.shape
