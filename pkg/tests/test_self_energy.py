from __future__ import annotations

import numpy as np
import pytest

from limitcycle_sync.core.errors import InvalidModel, OutOfRange
from limitcycle_sync.core.self_energy import cholesky_lower, eval_self_energy, noise_matrix
from limitcycle_sync.models.params import QuarticCouplings
from limitcycle_sync.models.self_energy import LorentzianGain, MarkovianPair, Tabulated


def test_markovian_constants():
    model = MarkovianPair(gamma1=1.0, D=0.1)
    pir, pik = eval_self_energy(model, 0.7)
    assert pir[0, 0] == pytest.approx(0.45j)
    assert pir[0, 1] == pytest.approx(-0.05j)
    assert pik[0, 0] == pytest.approx(-1.1j)
    # i Pi^K = [[1.1, 0.1], [0.1, 1.1]] has eigenvalues 1.0 and 1.2
    assert np.linalg.eigvalsh(1j * pik) == pytest.approx([1.0, 1.2])
    assert model.retarded_derivative(0.3) == (0j, 0j)


def test_lorentzian_gain_peaks_at_excitation_frequency():
    model = LorentzianGain(omega_ex=1.0, width=0.05, gain_strength=0.01)
    omegas = np.linspace(0.7, 1.3, 601)
    gains = np.array([model.gain(w).imag for w in omegas])
    assert np.all(gains >= 0)
    assert omegas[np.argmax(gains)] == pytest.approx(1.0)
    assert model.gain(1.0) == pytest.approx(0.01j)


@pytest.mark.parametrize("cross_sign", [1, -1])
def test_lorentzian_keldysh_is_positive(cross_sign):
    model = LorentzianGain(cross_sign=cross_sign, kappa_extra=0.002)
    for w in np.linspace(0.8, 1.2, 41):
        _, pik = eval_self_energy(model, w)
        assert np.linalg.eigvalsh(1j * pik).min() >= -1e-15


def test_lorentzian_derivative_matches_finite_difference():
    model = LorentzianGain()
    h = 1e-6
    for w in (0.95, 1.0, 1.02):
        up, down = model.retarded(w + h), model.retarded(w - h)
        fd = [(u - d) / (2 * h) for u, d in zip(up, down)]
        assert model.retarded_derivative(w) == pytest.approx(fd, rel=1e-6)


def test_tabulated_reproduces_samples_and_interpolates():
    source = LorentzianGain()
    grid = np.linspace(0.7, 1.3, 2001)
    table = Tabulated.sample(source, grid)
    assert table.retarded(grid[100]) == source.retarded(grid[100])
    for w in (0.8512345, 0.99987, 1.0311):
        assert np.allclose(table.retarded(w), source.retarded(w), atol=1e-6)
        assert np.allclose(table.keldysh(w), source.keldysh(w), atol=1e-6)
        assert np.allclose(table.retarded_derivative(w), source.retarded_derivative(w), rtol=1e-2, atol=2e-3)


def test_tabulated_from_csv(tmp_path):
    source = MarkovianPair(gamma1=1.0, D=0.2)
    grid = np.linspace(0.0, 2.0, 11)
    rows = []
    for w in grid:
        r11, r12 = source.retarded(w)
        k11, k12 = source.keldysh(w)
        rows.append([w, r11.real, r11.imag, r12.real, r12.imag, k11.real, k11.imag, k12.real, k12.imag])
    path = tmp_path / "pi.csv"
    header = "omega,Re_PiR_11,Im_PiR_11,Re_PiR_12,Im_PiR_12,Re_PiK_11,Im_PiK_11,Re_PiK_12,Im_PiK_12"
    np.savetxt(path, np.array(rows), delimiter=",", header=header, comments="")
    table = Tabulated.from_csv(path, interpolation="linear")
    assert table.retarded(1.05) == pytest.approx(source.retarded(1.05))
    assert table.keldysh(0.33) == pytest.approx(source.keldysh(0.33))


def test_tabulated_out_of_range():
    table = Tabulated.sample(MarkovianPair(), np.linspace(0.5, 1.5, 11))
    with pytest.raises(OutOfRange):
        table.retarded(1.6)
    with pytest.raises(OutOfRange):
        table.retarded_derivative(1.5)


def test_tabulated_rejects_unsorted_grid():
    omega = np.array([0.0, 1.0, 0.5, 2.0])
    zeros = np.zeros(4, dtype=complex)
    with pytest.raises(InvalidModel):
        Tabulated(omega=omega, pir11=zeros, pir12=zeros, pik11=zeros, pik12=zeros)


def test_gain_sign_keldysh_is_rejected():
    omega = np.linspace(0.0, 1.0, 5)
    zeros = np.zeros(5, dtype=complex)
    table = Tabulated(omega=omega, pir11=zeros, pir12=zeros, pik11=np.full(5, 1j), pik12=zeros)
    with pytest.raises(InvalidModel):
        eval_self_energy(table, 0.5)


def test_uncoupled_noise_matrix_is_three_gamma2():
    c, b = noise_matrix(MarkovianPair(gamma1=1.0, D=0.0), 1.0, (np.sqrt(10.0), np.sqrt(10.0)),
                        QuarticCouplings.stuart_landau(0.1))
    assert c == pytest.approx(np.diag([0.3, 0.3]))
    assert b @ b.conj().T == pytest.approx(c)


def test_cholesky_handles_rank_deficient_matrix():
    c = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    b = cholesky_lower(c)
    assert b @ b.conj().T == pytest.approx(c)
    assert b[1, 1] == pytest.approx(0.0)
