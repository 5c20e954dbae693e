import numpy as np
import pytest

from walshdetect.sources import (
    exact_distribution,
    noisy_function,
    parse_source_spec,
    planted_bias,
    sample,
    uniform_noise,
)
from walshdetect.walsh import Distribution, empirical_distribution, fwht


def test_uniform_exact():
    assert exact_distribution(uniform_noise(3)).mass.tolist() == [1 / 8] * 8


def test_planted_one_bit():
    np.testing.assert_allclose(exact_distribution(planted_bias(1, [(1, 0.3)])).mass, [0.65, 0.35], atol=1e-15)


def test_planted_matches_hand_formula():
    # f(x) = 2^-n (1 + sum_m d_m (-1)^<m,x>)
    planted = [(5, 0.3), (9, -0.1), (6, 0.2)]
    n = 4
    expected = [
        (1 + sum(d * (-1) ** bin(m & x).count("1") for m, d in planted)) / 16 for x in range(16)
    ]
    np.testing.assert_allclose(exact_distribution(planted_bias(n, planted)).mass, expected, atol=1e-15)


@pytest.mark.parametrize(
    "n,planted",
    [(1, [(1, 0.3)]), (4, [(5, 0.3), (9, -0.1)]), (6, [(1, 0.5), (63, -0.25), (40, 0.2)])],
)
def test_spectrum_round_trip(n, planted):
    coeffs = fwht(exact_distribution(planted_bias(n, planted))).coeffs
    expected = np.zeros(1 << n)
    expected[0] = 1
    for m, d in planted:
        expected[m] = d
    np.testing.assert_allclose(coeffs, expected, atol=1e-12, rtol=0)


def test_unrealizable_planted_rejected():
    # 0.7 + 0.7 at masks 1 and 2 makes f(3) = (1 - 1.4 + 0.49...) < 0
    with pytest.raises(ValueError, match="not realizable"):
        planted_bias(2, [(1, 0.7), (2, 0.7)])


def test_realizable_outside_envelope():
    src = planted_bias(2, [(1, 0.6), (2, 0.6), (3, 0.6)])
    assert not src.within_safe_envelope
    assert exact_distribution(src).mass.min() >= 0


@pytest.mark.parametrize("bad", [[(0, 0.1)], [(4, 0.1)], [(1, 0.1), (1, 0.2)], [(1, 1.5)]])
def test_planted_validation(bad):
    with pytest.raises(ValueError):
        planted_bias(2, bad)


def test_noisy_full_noise_is_uniform():
    table = Distribution(2, [1, 0, 0, 0])
    assert exact_distribution(noisy_function(table, 1.0)).mass.tolist() == [0.25] * 4


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 1.0])
def test_noise_mixing_linear_in_spectrum(lam):
    rng = np.random.default_rng(4)
    w = rng.random(8)
    table = Distribution(3, w / w.sum())
    got = fwht(exact_distribution(noisy_function(table, lam))).coeffs
    delta = np.zeros(8)
    delta[0] = 1
    np.testing.assert_allclose(got, (1 - lam) * fwht(table).coeffs + lam * delta, atol=1e-12, rtol=0)


def test_sample_mass_concentration():
    draws = sample(planted_bias(1, [(1, 0.3)]), 10**6, 17)
    assert abs(empirical_distribution(draws, 1).mass[0] - 0.65) < 0.0015


def test_sample_recovers_planted_bias():
    N = 40000
    draws = sample(planted_bias(4, [(11, 0.2)]), N, 5)
    coeff = fwht(empirical_distribution(draws, 4)).coeffs[11]
    assert abs(coeff - 0.2) < 3 / np.sqrt(N)


def test_sample_empty():
    assert sample(uniform_noise(2), 0, 1).size == 0


def test_sample_deterministic():
    src = planted_bias(3, [(3, 0.4)])
    assert np.array_equal(sample(src, 1000, 8), sample(src, 1000, 8))
    assert not np.array_equal(sample(src, 1000, 8), sample(src, 1000, 9))


def test_sample_support():
    src = noisy_function(Distribution(2, [0, 0, 0.5, 0.5]), 0.0)
    assert set(np.unique(sample(src, 5000, 2)).tolist()) == {2, 3}


class TestSpecStrings:
    def test_uniform(self):
        src = parse_source_spec("uniform:n=4")
        assert src.kind == "uniform-noise" and src.n == 4

    def test_planted(self):
        src = parse_source_spec("planted:n=4,m=5:d=0.3,m=9:d=-0.1")
        assert src.planted == ((5, 0.3), (9, -0.1))

    def test_file(self, tmp_path):
        path = tmp_path / "f.dist"
        path.write_text("1\n1\n0\n")
        src = parse_source_spec(f"file:{path},lambda=0.2")
        assert src.kind == "from-file" and src.noise_mix == 0.2
        np.testing.assert_allclose(exact_distribution(src).mass, [0.9, 0.1])

    @pytest.mark.parametrize("bad", ["gauss:n=3", "planted:m=1:d=0.1", "planted:n=2,m=1", "uniform:k=3"])
    def test_bad(self, bad):
        with pytest.raises(ValueError):
            parse_source_spec(bad)
