import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from decompfnn.vmd import ImfSet, VmdConfig, mirror_extend, vmd_decompose, vmd_reconstruct, write_modes_csv


def rel_l2(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_config_defaults():
    cfg = VmdConfig()
    assert (cfg.num_modes, cfg.alpha, cfg.tau, cfg.tolerance, cfg.max_iterations, cfg.init) == (
        9, 2000.0, 0.0, 1e-7, 500, "uniform"
    )


@pytest.mark.parametrize("kwargs", [
    {"num_modes": 0}, {"alpha": 0.0}, {"tau": -1.0}, {"tolerance": 0.0},
    {"max_iterations": 0}, {"init": "bogus"}, {"alpha": float("inf")},
])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        VmdConfig(**kwargs)


def test_two_tone_recovery(two_tone):
    x, low, high = two_tone
    imfs = vmd_decompose(x, VmdConfig(num_modes=2))
    np.testing.assert_allclose(imfs.center_frequencies, [0.04, 0.30], rtol=0.05)
    assert np.corrcoef(imfs.modes[0], low)[0, 1] >= 0.95
    assert np.corrcoef(imfs.modes[1], high)[0, 1] >= 0.95
    assert rel_l2(vmd_reconstruct(imfs), x) <= 5e-2
    assert imfs.modes.shape == (2, 1000)


def test_dual_ascent_tightens_reconstruction(two_tone):
    x, _, _ = two_tone
    imfs = vmd_decompose(x, VmdConfig(num_modes=2, tau=0.5))
    assert rel_l2(vmd_reconstruct(imfs), x) <= 1e-3


def tone_mixture(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    p = int(rng.integers(200, 800))
    t = np.arange(p)
    x = rng.uniform(-2, 2) + sum(
        rng.uniform(0.5, 3) * np.sin(2 * np.pi * rng.uniform(0.01, 0.45) * t + rng.uniform(0, 6))
        for _ in range(n)
    )
    return x, n


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_converged_dual_ascent_reconstructs(seed):
    # with tau > 0 the stopping rule includes the primal residual, so a
    # converged run certifies the reconstruction
    x, n = tone_mixture(seed)
    imfs = vmd_decompose(x, VmdConfig(num_modes=n + 1, tau=0.5, max_iterations=5000))
    assume(imfs.converged)
    assert rel_l2(vmd_reconstruct(imfs), x) <= 1e-3


def test_dual_ascent_converges_on_most_tone_mixtures():
    errors = []
    for seed in range(40):
        x, n = tone_mixture(seed)
        imfs = vmd_decompose(x, VmdConfig(num_modes=n + 1, tau=0.5, max_iterations=5000))
        errors.append(rel_l2(vmd_reconstruct(imfs), x))
    assert np.mean(np.array(errors) <= 1e-3) >= 0.85


@pytest.mark.xfail(strict=True, reason="two modes lock onto one tone and the dual oscillates "
                   "chasing the uncovered one")
def test_dual_ascent_with_mode_collision():
    x, n = tone_mixture(164)
    imfs = vmd_decompose(x, VmdConfig(num_modes=n + 1, tau=0.5, max_iterations=5000))
    assert rel_l2(vmd_reconstruct(imfs), x) <= 1e-3


@pytest.mark.xfail(strict=True, reason="dual ascent oscillates on broadband input; "
                   "reconstruction stalls near 1e-2 regardless of budget")
def test_dual_ascent_reconstruction_on_random_walk():
    x = np.cumsum(np.random.default_rng(4).normal(size=600)) + 50
    imfs = vmd_decompose(x, VmdConfig(num_modes=4, tau=0.5, max_iterations=5000))
    assert rel_l2(vmd_reconstruct(imfs), x) <= 1e-3


def test_constant_signal():
    c = 4.2
    imfs = vmd_decompose(np.full(64, c), VmdConfig(num_modes=2))
    np.testing.assert_allclose(imfs.modes[0], c, rtol=1e-9)
    assert np.max(np.abs(imfs.modes[1])) <= 1e-3 * abs(c)
    assert imfs.center_frequencies[0] == pytest.approx(0.0, abs=1e-9)


def test_modes_sorted_and_sized():
    x = np.cumsum(np.random.default_rng(0).normal(size=400)) + 100
    imfs = vmd_decompose(x, VmdConfig(num_modes=5))
    assert np.all(np.diff(imfs.center_frequencies) >= 0)
    assert np.all((imfs.center_frequencies >= 0) & (imfs.center_frequencies <= 0.5))
    assert imfs.modes.shape == (5, 400)
    # the lowest mode carries the trend of an integrated process
    energies = np.sum(imfs.modes**2, axis=1)
    assert np.argmax(energies) == 0


def test_odd_length_signal():
    x = np.sin(np.arange(101) * 0.3)
    imfs = vmd_decompose(x, VmdConfig(num_modes=2))
    assert imfs.modes.shape == (2, 101)


def test_too_short():
    with pytest.raises(ValueError):
        vmd_decompose(np.ones(5), VmdConfig(num_modes=3))


def test_non_convergence_is_reported_not_raised(two_tone):
    x, _, _ = two_tone
    imfs = vmd_decompose(x, VmdConfig(num_modes=2, max_iterations=2, tolerance=1e-30))
    assert not imfs.converged
    assert imfs.iterations_used == 2


def test_deterministic_with_random_init(two_tone):
    x, _, _ = two_tone
    cfg = VmdConfig(num_modes=3, init="random", seed=11)
    a, b = vmd_decompose(x, cfg), vmd_decompose(x, cfg)
    np.testing.assert_array_equal(a.modes, b.modes)
    np.testing.assert_array_equal(a.center_frequencies, b.center_frequencies)


def test_zero_init_runs(two_tone):
    x, _, _ = two_tone
    imfs = vmd_decompose(x, VmdConfig(num_modes=2, init="zero"))
    assert imfs.modes.shape == (2, 1000)


def test_spectral_fixed_point(two_tone):
    x, _, _ = two_tone
    cfg = VmdConfig(num_modes=2, tolerance=1e-12, max_iterations=5000)
    imfs = vmd_decompose(x, cfg)
    assert imfs.converged
    ext, _ = mirror_extend(x)
    f_hat = np.fft.rfft(ext)
    total = imfs.spectra.sum(axis=0)
    scale = np.abs(f_hat).max()
    for k in range(2):
        others = total - imfs.spectra[k]
        expected = (f_hat - others) / (1 + 2 * cfg.alpha * (imfs.freqs - imfs.center_frequencies[k]) ** 2)
        assert np.max(np.abs(expected - imfs.spectra[k])) <= 1e-5 * scale


def test_center_frequency_is_power_weighted_mean(two_tone):
    x, _, _ = two_tone
    imfs = vmd_decompose(x, VmdConfig(num_modes=2, tolerance=1e-12, max_iterations=5000))
    for k in range(2):
        p = np.abs(imfs.spectra[k]) ** 2
        assert float(imfs.freqs @ p / p.sum()) == pytest.approx(imfs.center_frequencies[k], abs=1e-6)


@pytest.mark.parametrize("seed", range(3))
def test_energy_sanity(seed):
    x = np.cumsum(np.random.default_rng(seed).normal(size=500))
    imfs = vmd_decompose(x, VmdConfig(num_modes=6))
    assert np.sum(imfs.modes**2) <= 1.1 * np.sum(x**2)


def test_reconstruct_single_and_zero():
    m = np.arange(10.0)
    np.testing.assert_array_equal(vmd_reconstruct(ImfSet(m[None, :], [0.0])), m)
    np.testing.assert_array_equal(vmd_reconstruct(ImfSet(np.zeros((3, 8)), [0, 0.1, 0.2])), 0.0)


def test_reconstruct_length_mismatch():
    with pytest.raises(ValueError):
        vmd_reconstruct(ImfSet([np.ones(4), np.ones(5)], [0.0, 0.1]))


def test_modes_csv_and_sidecar(tmp_path, two_tone):
    import csv
    import json

    x, _, _ = two_tone
    cfg = VmdConfig(num_modes=2)
    imfs = vmd_decompose(x, cfg)
    sidecar = write_modes_csv(imfs, tmp_path / "modes.csv", cfg)
    rows = list(csv.reader(open(tmp_path / "modes.csv")))
    assert rows[0] == ["imf_1", "imf_2"]
    assert len(rows) == 1001
    back = np.array(rows[1:], dtype=float).T
    np.testing.assert_array_equal(back, imfs.modes)
    meta = json.loads(sidecar.read_text())
    assert set(meta["omega"]) == {"omega_1", "omega_2"}
    assert meta["omega"]["omega_1"] == pytest.approx(0.04, rel=0.05)
