import numpy as np
import pytest

from isacnet.channel import ChannelParams, ChannelRealization, realize_channels
from isacnet.montecarlo import campaign_rng
from isacnet.optimizer import OptConstraints
from isacnet.scenario import DeploymentConfig, build_deployment, sample_realization

P_MAX_W = 10 ** (23 / 10) * 1e-3  # 23 dBm


@pytest.fixture(scope="session")
def template():
    return build_deployment(DeploymentConfig())


@pytest.fixture(scope="session")
def channel_params():
    return ChannelParams()


@pytest.fixture(scope="session")
def constraints():
    return OptConstraints(gamma_comm=np.ones(3), p_max=P_MAX_W)


@pytest.fixture
def make_instance(template, channel_params):
    def _make(seed: int, params: ChannelParams | None = None):
        rng = campaign_rng(seed, 0)
        scenario = sample_realization(template, rng)
        ch = realize_channels(scenario, params or channel_params, rng, P_MAX_W)
        return scenario, ch
    return _make


def synthetic_realization(h_comm_sq, g_mono_bi, g_ue_echo, h_bs_bs_sq,
                          beta_sq, noise_ue, noise_bs, bandwidth=100e6):
    """Build a ChannelRealization from power gains (zero phases)."""
    h_comm_sq = np.asarray(h_comm_sq, dtype=float)
    K = h_comm_sq.shape[0]
    h_bs_bs = np.sqrt(np.asarray(h_bs_bs_sq, dtype=float)).astype(complex)
    np.fill_diagonal(h_bs_bs, 0.0)
    return ChannelRealization(
        h_comm=np.sqrt(h_comm_sq).astype(complex),
        g_mono_bi=np.asarray(g_mono_bi, dtype=float),
        g_ue_echo=np.asarray(g_ue_echo, dtype=float),
        h_bs_bs=h_bs_bs,
        beta_sq=np.asarray(beta_sq, dtype=float),
        tau_bs=np.full((K, K), 1e-6),
        tau_ue=np.full((K, K), 1e-6),
        noise_ue=np.asarray(noise_ue, dtype=float),
        noise_bs=np.asarray(noise_bs, dtype=float),
        bandwidth_per_bs=np.full(K, float(bandwidth)),
    )


def random_realization(rng, K=3, si=5e-12, noise=2.5e-12):
    """Random but physically-plausible gains for property tests."""
    h_comm_sq = rng.uniform(0.2, 1.0, (K, K)) * 1e-11
    h_comm_sq[np.arange(K), np.arange(K)] = rng.uniform(0.5, 2.0, K) * 1e-9
    g = rng.uniform(0.2, 2.0, (K, K)) * 1e-13
    g_ue = rng.uniform(0.1, 1.0, (K, K)) * 1e-13
    h_bb = rng.uniform(0.2, 1.0, (K, K)) * 1e-10
    return synthetic_realization(
        h_comm_sq=h_comm_sq, g_mono_bi=g, g_ue_echo=g_ue, h_bs_bs_sq=h_bb,
        beta_sq=np.full(K, si / P_MAX_W), noise_ue=np.full(K, noise),
        noise_bs=np.full(K, noise))
