import numpy as np
import pytest

from isacnet.channel import SPEED_OF_LIGHT
from isacnet.metrics import (comm_sinr_overall, comm_sinr_standalone,
                             evaluate_all, min_sensing_sinr_overall,
                             range_std, sensing_denominators,
                             sensing_sinr_overall, sensing_sinr_standalone,
                             validate_power_vector)

from conftest import random_realization, synthetic_realization


def diag_matrix(diag, off):
    m = np.full((3, 3), off, dtype=float)
    np.fill_diagonal(m, diag)
    return m


@pytest.fixture
def hand_instance():
    # |h|^2: 1e-9 diagonal, 1e-11 off-diagonal; sigma^2 = 1e-12
    return synthetic_realization(
        h_comm_sq=diag_matrix(1e-9, 1e-11),
        g_mono_bi=diag_matrix(4e-13, 1e-13),
        g_ue_echo=diag_matrix(2e-13, 5e-14),
        h_bs_bs_sq=diag_matrix(0.0, 8e-11),
        beta_sq=np.full(3, 1e-9),
        noise_ue=np.full(3, 1e-12),
        noise_bs=np.full(3, 2.5e-12),
    )


class TestCommStandalone:
    def test_hand_arithmetic(self, hand_instance):
        # 0.1 * 1e-9 / (2 * 0.1 * 1e-11 + 1e-12) = 33.33
        rho = np.full(3, 0.1)
        got = comm_sinr_standalone(rho, hand_instance, 0)
        assert got == pytest.approx(1e-10 / (2e-12 + 1e-12), rel=1e-12)
        assert got == pytest.approx(33.333, rel=1e-3)

    def test_zero_power(self, hand_instance):
        assert comm_sinr_standalone(np.zeros(3), hand_instance, 1) == 0.0

    def test_single_bs_no_interference(self):
        ch = synthetic_realization(
            h_comm_sq=[[1e-9]], g_mono_bi=[[1e-13]], g_ue_echo=[[0.0]],
            h_bs_bs_sq=[[0.0]], beta_sq=[1e-9], noise_ue=[1e-12],
            noise_bs=[1e-12])
        rho = np.array([0.2])
        assert comm_sinr_standalone(rho, ch, 0) == pytest.approx(
            0.2 * 1e-9 / 1e-12, rel=1e-12)


class TestSensingStandalone:
    def test_reduces_without_si_and_cross(self):
        ch = synthetic_realization(
            h_comm_sq=diag_matrix(1e-9, 0.0), g_mono_bi=diag_matrix(4e-13, 0.0),
            g_ue_echo=np.zeros((3, 3)), h_bs_bs_sq=np.zeros((3, 3)),
            beta_sq=np.zeros(3), noise_ue=np.full(3, 1e-12),
            noise_bs=np.full(3, 2e-12))
        rho = np.full(3, 0.1)
        assert sensing_sinr_standalone(rho, ch, 1) == pytest.approx(
            0.1 * 4e-13 / 2e-12, rel=1e-12)

    def test_si_limit_scale_invariant(self):
        # single BS, sigma -> 0: SINR -> gamma^2 / beta^2 independent of rho
        ch = synthetic_realization(
            h_comm_sq=[[1e-9]], g_mono_bi=[[4e-13]], g_ue_echo=[[0.0]],
            h_bs_bs_sq=[[0.0]], beta_sq=[1e-10], noise_ue=[1e-12],
            noise_bs=[1e-30])
        a = sensing_sinr_standalone(np.array([0.01]), ch, 0)
        b = sensing_sinr_standalone(np.array([0.2]), ch, 0)
        assert a == pytest.approx(4e-13 / 1e-10, rel=1e-6)
        assert a == pytest.approx(b, rel=1e-6)

    def test_symmetric_instance_equal_sinrs(self, hand_instance):
        rho = np.full(3, 0.15)
        vals = [sensing_sinr_standalone(rho, hand_instance, n) for n in range(3)]
        assert vals[0] == pytest.approx(vals[1], rel=1e-12)
        assert vals[1] == pytest.approx(vals[2], rel=1e-12)


class TestOverall:
    def test_comm_reduces_when_echoes_zero(self, hand_instance):
        ch = synthetic_realization(
            h_comm_sq=np.abs(hand_instance.h_comm) ** 2,
            g_mono_bi=hand_instance.g_mono_bi,
            g_ue_echo=np.zeros((3, 3)),
            h_bs_bs_sq=np.abs(hand_instance.h_bs_bs) ** 2,
            beta_sq=hand_instance.beta_sq,
            noise_ue=hand_instance.noise_ue, noise_bs=hand_instance.noise_bs)
        rho = np.array([0.05, 0.1, 0.2])
        for m in range(3):
            assert comm_sinr_overall(rho, ch, m) == pytest.approx(
                comm_sinr_standalone(rho, ch, m), rel=1e-14)

    def test_sensing_reduces_when_direct_zero(self, hand_instance):
        ch = synthetic_realization(
            h_comm_sq=np.abs(hand_instance.h_comm) ** 2,
            g_mono_bi=hand_instance.g_mono_bi,
            g_ue_echo=hand_instance.g_ue_echo,
            h_bs_bs_sq=np.zeros((3, 3)),
            beta_sq=hand_instance.beta_sq,
            noise_ue=hand_instance.noise_ue, noise_bs=hand_instance.noise_bs)
        rho = np.array([0.05, 0.1, 0.2])
        for n in range(3):
            assert sensing_sinr_overall(rho, ch, n) == pytest.approx(
                sensing_sinr_standalone(rho, ch, n), rel=1e-14)

    def test_echo_enlarges_numerator(self, hand_instance):
        rho = np.array([0.1, 0.0, 0.0])
        assert comm_sinr_overall(rho, hand_instance, 0) > \
            comm_sinr_standalone(rho, hand_instance, 0)

    def test_full_3x3_against_literal_sums(self):
        # independent oracle: literal loops over the formula terms
        rng = np.random.default_rng(42)
        ch = random_realization(rng)
        rho = rng.uniform(0.01, 0.19, 3)
        h_sq = np.abs(ch.h_comm) ** 2
        hb_sq = np.abs(ch.h_bs_bs) ** 2
        for m in range(3):
            num = rho[m] * (h_sq[m, m] + ch.g_ue_echo[m, m])
            den = ch.noise_ue[m]
            for k in range(3):
                if k != m:
                    den += rho[k] * (h_sq[m, k] + ch.g_ue_echo[m, k])
            assert comm_sinr_overall(rho, ch, m) == pytest.approx(num / den,
                                                                  rel=1e-12)
        for n in range(3):
            num = rho[n] * ch.g_mono_bi[n, n]
            den = ch.noise_bs[n] + rho[n] * ch.beta_sq[n]
            for k in range(3):
                if k != n:
                    den += rho[k] * (ch.g_mono_bi[n, k] + hb_sq[n, k])
            assert sensing_sinr_overall(rho, ch, n) == pytest.approx(num / den,
                                                                     rel=1e-12)

    def test_monotone_in_own_power(self):
        rng = np.random.default_rng(3)
        ch = random_realization(rng)
        rho = rng.uniform(0.02, 0.15, 3)
        for n in range(3):
            bumped = rho.copy()
            bumped[n] *= 2.0
            assert sensing_sinr_overall(bumped, ch, n) > \
                sensing_sinr_overall(rho, ch, n)
            assert comm_sinr_overall(bumped, ch, n) > comm_sinr_overall(ch=ch, rho=rho, m=n)

    def test_interference_dominance(self):
        # increasing any off-diagonal gain never helps anyone
        rng = np.random.default_rng(8)
        ch = random_realization(rng)
        rho = rng.uniform(0.02, 0.19, 3)
        base_comm = [comm_sinr_overall(rho, ch, m) for m in range(3)]
        base_sens = [sensing_sinr_overall(rho, ch, n) for n in range(3)]
        for (i, j) in ((0, 1), (1, 2), (2, 0)):
            bumped = synthetic_realization(
                h_comm_sq=np.abs(ch.h_comm) ** 2 + _bump(i, j, 5e-11),
                g_mono_bi=ch.g_mono_bi + _bump(i, j, 5e-13),
                g_ue_echo=ch.g_ue_echo + _bump(i, j, 5e-13),
                h_bs_bs_sq=np.abs(ch.h_bs_bs) ** 2 + _bump(i, j, 5e-11),
                beta_sq=ch.beta_sq, noise_ue=ch.noise_ue, noise_bs=ch.noise_bs)
            for m in range(3):
                assert comm_sinr_overall(rho, bumped, m) <= base_comm[m] * (1 + 1e-12)
                assert sensing_sinr_overall(rho, bumped, n=m) <= base_sens[m] * (1 + 1e-12)

    def test_homogeneity_zero_noise(self):
        rng = np.random.default_rng(12)
        ch = random_realization(rng, noise=0.0)
        ch = synthetic_realization(
            h_comm_sq=np.abs(ch.h_comm) ** 2, g_mono_bi=ch.g_mono_bi,
            g_ue_echo=ch.g_ue_echo, h_bs_bs_sq=np.abs(ch.h_bs_bs) ** 2,
            beta_sq=ch.beta_sq, noise_ue=np.zeros(3), noise_bs=np.zeros(3))
        rho = rng.uniform(0.01, 0.1, 3)
        for t in (0.5, 2.0, 7.0):
            for m in range(3):
                assert comm_sinr_overall(t * rho, ch, m) == pytest.approx(
                    comm_sinr_overall(rho, ch, m), rel=1e-12)
                assert sensing_sinr_overall(t * rho, ch, m) == pytest.approx(
                    sensing_sinr_overall(rho, ch, m), rel=1e-12)


def _bump(i, j, amount):
    m = np.zeros((3, 3))
    m[i, j] = amount
    return m


class TestRangeStd:
    def test_reference_value(self):
        # c / (2 * 1e8 * sqrt(2 * 0.5)) = c / 2e8
        assert range_std(0.5, 100e6) == pytest.approx(SPEED_OF_LIGHT / 2e8,
                                                      rel=1e-12)
        assert abs(range_std(0.5, 100e6) - 1.4990) < 1e-4

    def test_inverse_sqrt_law(self):
        assert range_std(4 * 0.37, 100e6) == pytest.approx(
            range_std(0.37, 100e6) / 2, rel=1e-12)

    def test_inverse_bandwidth(self):
        assert range_std(0.7, 200e6) == pytest.approx(range_std(0.7, 100e6) / 2,
                                                      rel=1e-12)

    def test_zero_sinr_sentinel(self):
        assert range_std(0.0, 100e6) == float("inf")

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            range_std(1.0, 0.0)
        with pytest.raises(ValueError):
            range_std(-0.1, 100e6)


class TestEvaluateAll:
    def test_composition(self):
        rng = np.random.default_rng(23)
        ch = random_realization(rng)
        rho = rng.uniform(0.01, 0.19, 3)
        rep = evaluate_all(rho, ch)
        for n in range(3):
            assert rep.comm_standalone[n] == comm_sinr_standalone(rho, ch, n)
            assert rep.sensing_standalone[n] == sensing_sinr_standalone(rho, ch, n)
            assert rep.comm_overall[n] == comm_sinr_overall(rho, ch, n)
            assert rep.sensing_overall[n] == sensing_sinr_overall(rho, ch, n)
            assert rep.range_std[n] == range_std(rep.sensing_overall[n],
                                                 ch.bandwidth_per_bs[n])

    def test_worst_sigma_is_min_sinr_bs(self):
        # equal bandwidths: argmax sigma == argmin sensing SINR
        rng = np.random.default_rng(31)
        for _ in range(20):
            ch = random_realization(rng)
            rho = rng.uniform(0.01, 0.19, 3)
            rep = evaluate_all(rho, ch)
            assert np.argmax(rep.range_std) == np.argmin(rep.sensing_overall)
            assert min_sensing_sinr_overall(rho, ch) == rep.sensing_overall.min()

    def test_denominators_vectorized(self):
        rng = np.random.default_rng(5)
        ch = random_realization(rng)
        rho = rng.uniform(0.01, 0.19, 3)
        den = sensing_denominators(rho, ch)
        hb_sq = np.abs(ch.h_bs_bs) ** 2
        for n in range(3):
            expected = ch.noise_bs[n] + rho[n] * ch.beta_sq[n]
            for k in range(3):
                if k != n:
                    expected += rho[k] * (ch.g_mono_bi[n, k] + hb_sq[n, k])
            assert den[n] == pytest.approx(expected, rel=1e-14)

    def test_power_vector_validation(self):
        validate_power_vector(np.array([0.0, 0.1]), 0.2)
        with pytest.raises(ValueError):
            validate_power_vector(np.array([0.3]), 0.2)
        with pytest.raises(ValueError):
            validate_power_vector(np.array([-0.01]), 0.2)
