import numpy as np
import pytest

from stovol.noise import (
    IncrementTable,
    NoiseAdmissibilityError,
    NoiseModel,
    admissible_beta,
    coarsen,
    power_law_noise,
    sample_increments,
    white_noise,
)


def test_admissible_beta_power_law():
    assert admissible_beta(white_noise(16), 1.5) == pytest.approx(1 / 1.5 - 0.5)
    assert admissible_beta(power_law_noise(16, s=1.0), 1.5) == pytest.approx(2 / 3)
    assert admissible_beta(white_noise(16), 1.0) == pytest.approx(0.5)


def test_admissible_beta_explicit_matches_power_law():
    j = np.arange(1, 513, dtype=float)
    for s, rho in [(0.0, 1.5), (1.0, 1.5), (0.5, 1.25)]:
        noise = NoiseModel("explicit", 512, mu_explicit=j ** (-2 * s))
        got = admissible_beta(noise, rho)
        want = min(1 / rho, 1 / rho + s - 0.5)
        assert got == pytest.approx(want, abs=0.02)


def test_admissible_beta_rejects_growing_spectrum():
    j = np.arange(1, 129, dtype=float)
    noise = NoiseModel("explicit", 128, mu_explicit=j ** 2)
    with pytest.raises(NoiseAdmissibilityError):
        admissible_beta(noise, 1.5)


def test_zero_spectrum_gives_zero_table():
    noise = NoiseModel("explicit", 4, mu_explicit=np.zeros(4))
    t = sample_increments(noise, 0.1, 8, 4, seed=1)
    assert np.all(t.increments == 0.0)


def test_determinism_and_immutability():
    noise = white_noise(8)
    a = sample_increments(noise, 0.01, 32, 8, seed=99)
    b = sample_increments(noise, 0.01, 32, 8, seed=99)
    assert np.array_equal(a.increments, b.increments)
    c = sample_increments(noise, 0.01, 32, 8, seed=100)
    assert not np.array_equal(a.increments, c.increments)
    with pytest.raises(ValueError):
        a.increments[0, 0] = 1.0


def test_mode_extension_preserves_existing_draws():
    noise = white_noise(32)
    small = sample_increments(noise, 0.01, 16, 8, seed=5)
    big = sample_increments(noise, 0.01, 16, 32, seed=5)
    np.testing.assert_array_equal(big.increments[:, :8], small.increments)


def test_sample_variance_within_three_stderr():
    # 10^5 draws of mode 1 with mu_1 = 1, k = 0.01
    noise = white_noise(1)
    t = sample_increments(noise, 0.01, 100_000, 1, seed=1)
    x = t.increments[:, 0]
    var = x.var(ddof=1)
    stderr = 0.01 * np.sqrt(2.0 / (len(x) - 1))
    assert abs(var - 0.01) <= 3 * stderr
    assert abs(x.mean()) <= 3 * np.sqrt(0.01 / len(x))


def test_lag_one_autocorrelation_small():
    noise = white_noise(4)
    t = sample_increments(noise, 1.0, 20_000, 4, seed=31)
    for j in range(4):
        x = t.increments[:, j]
        x = (x - x.mean()) / x.std()
        r1 = float(np.mean(x[:-1] * x[1:]))
        assert abs(r1) <= 3.0 / np.sqrt(len(x))


def test_coarsen_identity_and_total():
    noise = power_law_noise(4, s=0.5)
    t = sample_increments(noise, 0.25, 16, 4, seed=7)
    assert coarsen(t, 1) is t
    total = coarsen(t, 16)
    assert total.n_steps == 1
    np.testing.assert_allclose(total.increments[0], t.increments.sum(axis=0))
    assert total.k_fine == pytest.approx(4.0)


def test_coarsen_composition_bitwise():
    noise = white_noise(3)
    t = sample_increments(noise, 0.125, 64, 3, seed=11)
    ab = coarsen(coarsen(t, 2), 4)
    once = coarsen(t, 8)
    assert np.array_equal(ab.increments, once.increments)
    assert ab.k_fine == once.k_fine


def test_coarsen_divisibility_checked():
    t = sample_increments(white_noise(2), 0.1, 10, 2, seed=0)
    with pytest.raises(ValueError):
        coarsen(t, 3)


def test_coarsened_variance_scales():
    noise = white_noise(1)
    t = sample_increments(noise, 0.01, 80_000, 1, seed=13)
    c = coarsen(t, 4)
    var = c.increments[:, 0].var(ddof=1)
    want = 4 * 0.01
    stderr = want * np.sqrt(2.0 / (c.n_steps - 1))
    assert abs(var - want) <= 3 * stderr


def test_spectrum_validation():
    with pytest.raises(ValueError):
        NoiseModel("powerlaw", 4, s=-1.0)
    with pytest.raises(ValueError):
        NoiseModel("powerlaw", 0)
    with pytest.raises(ValueError):
        NoiseModel("explicit", 4, mu_explicit=np.array([1.0, -1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        NoiseModel("explicit", 4, mu_explicit=np.ones(3))
    with pytest.raises(ValueError):
        NoiseModel("gaussian", 4)
