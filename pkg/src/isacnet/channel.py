"""Channel realization: Rician links, radar echoes, self-interference, noise.

All gains are kept linear.  Echo paths (anything bouncing off the target) are
deterministic and follow the bistatic radar equation; direct links are Rician
with a deterministic LoS phase.  Sector antennas act as a hard mask on echo
paths only: a bounce whose target lies outside the transmitting (or, for
BS receivers, the receiving) sector contributes zero gain.  Direct BS-UE and
BS-BS links are not masked, since the sectors only define sensing coverage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import NetworkScenario, point_in_sector

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_PER_HZ = -174.0

# Linear K-factor at or above this is treated as a pure-LoS link.
PURE_LOS_K_FACTOR = 1e6

# Diagnostic counter: how many path-loss evaluations were clamped to the
# reference distance.  Process-local, best effort under threads.
_clamp_count = 0


def pathloss_clamp_count() -> int:
    return _clamp_count


@dataclass(frozen=True)
class ChannelParams:
    """Link-budget parameters, all linear unless the name says otherwise."""

    carrier_frequency: float = 3.5e9
    bandwidth_per_bs: tuple[float, ...] = (100e6, 100e6, 100e6)
    subcarrier_spacing: float = 30e3
    num_subcarriers: int = 3264
    num_symbols: int = 28
    rician_k_factor: float = 10 ** (5 / 10)          # 5 dB
    comm_pathloss_exponent: float = 2.5
    sensing_pathloss_exponent: float = 2.0
    target_rcs: float = 10 ** (7 / 10)               # 7 dBsm
    antenna_gain_tx: float = 1.0
    antenna_gain_rx: float = 1.0
    si_level: float = -90.0                          # dB or dBm, see si_mode
    si_mode: str = "absolute-at-pmax"                # "attenuation" | "absolute-at-pmax"
    noise_figure_ue_db: float = 8.0
    noise_figure_bs_db: float = 8.0
    reference_distance: float = 1.0
    # Optional overrides for the BS-BS direct channel; None = same as comm.
    bs_bs_pathloss_exponent: float | None = None
    bs_bs_k_factor: float | None = None
    # Residual SI power (watts) above which a receiver's ADC is considered
    # saturated; diagnostic only, never enforced. None disables the check.
    adc_saturation_limit: float | None = None

    def __post_init__(self) -> None:
        if self.carrier_frequency <= 0 or self.subcarrier_spacing <= 0:
            raise ValueError("frequencies must be > 0")
        if min(self.bandwidth_per_bs) <= 0:
            raise ValueError("bandwidths must be > 0")
        if self.num_subcarriers < 1 or self.num_symbols < 1:
            raise ValueError("subcarrier/symbol counts must be >= 1")
        if self.num_subcarriers * self.subcarrier_spacing > max(self.bandwidth_per_bs) * (1 + 1e-9):
            raise ValueError("occupied bandwidth exceeds the channel bandwidth")
        if self.rician_k_factor <= 0 or self.target_rcs <= 0:
            raise ValueError("K-factor and RCS must be > 0")
        for exp in (self.comm_pathloss_exponent, self.sensing_pathloss_exponent):
            if not 1.5 <= exp <= 6.0:
                raise ValueError(f"path-loss exponent {exp} outside sane range [1.5, 6]")
        if self.si_mode not in ("attenuation", "absolute-at-pmax"):
            raise ValueError(f"unknown si_mode {self.si_mode!r}")
        if self.reference_distance <= 0:
            raise ValueError("reference_distance must be > 0")
        if self.antenna_gain_tx <= 0 or self.antenna_gain_rx <= 0:
            raise ValueError("antenna gains must be > 0 (linear)")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency


@dataclass
class ChannelRealization:
    """All gains, delays and noise powers for one scenario draw."""

    h_comm: np.ndarray       # (K, K) complex, [m, k]: BS k -> UE m
    g_mono_bi: np.ndarray    # (K, K) power gain, [n, k]: BS k -> target -> BS n
    g_ue_echo: np.ndarray    # (K, K) power gain, [m, k]: BS k -> target -> UE m
    h_bs_bs: np.ndarray      # (K, K) complex, zero diagonal, [n, k]: BS k -> BS n
    beta_sq: np.ndarray      # (K,) self-interference power gains
    tau_bs: np.ndarray       # (K, K) echo delays BS k -> target -> BS n, seconds
    tau_ue: np.ndarray       # (K, K) echo delays BS k -> target -> UE m, seconds
    noise_ue: np.ndarray     # (K,) watts
    noise_bs: np.ndarray     # (K,) watts
    bandwidth_per_bs: np.ndarray  # (K,) Hz

    @property
    def num_bs(self) -> int:
        return self.beta_sq.shape[0]


def pathloss_power_gain(distance: float, exponent: float, wavelength: float,
                        reference_distance: float = 1.0) -> float:
    """Log-distance path loss anchored at the free-space reference gain.

    Returns (lambda / (4 pi d0))^2 * (d0 / d)^exponent.  Distances below the
    reference are clamped to it, so the gain never exceeds the reference value.
    """
    global _clamp_count
    if reference_distance <= 0:
        raise ValueError("reference_distance must be > 0")
    if distance < reference_distance:
        _clamp_count += 1
        distance = reference_distance
    ref_gain = (wavelength / (4.0 * math.pi * reference_distance)) ** 2
    return ref_gain * (reference_distance / distance) ** exponent


def rician_coefficient(distance: float, pathloss_exponent: float, k_factor: float,
                       wavelength: float, rng: np.random.Generator,
                       reference_distance: float = 1.0) -> complex:
    """Rician channel draw with deterministic LoS phase exp(-j 2 pi d / lambda).

    E[|h|^2] equals the path-loss power gain.  K-factors >= PURE_LOS_K_FACTOR
    drop the diffuse part entirely.
    """
    pl = pathloss_power_gain(distance, pathloss_exponent, wavelength, reference_distance)
    phase = -2.0 * math.pi * distance / wavelength
    los = complex(math.cos(phase), math.sin(phase))
    if k_factor >= PURE_LOS_K_FACTOR:
        return math.sqrt(pl) * los
    w = complex(rng.standard_normal(), rng.standard_normal()) / math.sqrt(2.0)
    mix = math.sqrt(k_factor / (k_factor + 1.0)) * los + math.sqrt(1.0 / (k_factor + 1.0)) * w
    return math.sqrt(pl) * mix


def bistatic_radar_power_gain(d_tx: float, d_rx: float, params: ChannelParams) -> float:
    """Echo power gain |gamma|^2 via the bistatic radar equation.

    G_tx G_rx lambda^2 rcs / ((4 pi)^3 d_tx^2 d_rx^2), with each leg further
    scaled by (d0/d)^(exponent-2) when the sensing exponent is not 2.
    """
    if d_tx <= 0 or d_rx <= 0:
        raise ValueError("leg distances must be > 0")
    lam = params.wavelength
    gain = (params.antenna_gain_tx * params.antenna_gain_rx * lam ** 2 * params.target_rcs
            / ((4.0 * math.pi) ** 3 * d_tx ** 2 * d_rx ** 2))
    extra = params.sensing_pathloss_exponent - 2.0
    if extra != 0.0:
        d0 = params.reference_distance
        gain *= (d0 / max(d_tx, d0)) ** extra * (d0 / max(d_rx, d0)) ** extra
    return gain


def self_interference_power_gain(si_level: float, si_mode: str, p_max: float) -> float:
    """Residual self-interference power gain |beta|^2.

    "attenuation": si_level is a dB attenuation of the own transmit power.
    "absolute-at-pmax": si_level is the residual power in dBm observed when
    transmitting at p_max, so |beta|^2 = mW(si_level) / p_max.
    """
    if p_max <= 0:
        raise ValueError("p_max must be > 0")
    if si_mode == "attenuation":
        beta_sq = 10.0 ** (si_level / 10.0)
    elif si_mode == "absolute-at-pmax":
        beta_sq = (10.0 ** (si_level / 10.0) * 1e-3) / p_max
    else:
        raise ValueError(f"unknown si_mode {si_mode!r}")
    if beta_sq >= 1.0:
        raise ValueError(
            f"self-interference gain {beta_sq:.3g} >= 1; the residual cannot "
            "exceed direct leakage of the full signal")
    return beta_sq


def noise_power(bandwidth: float, noise_figure_db: float) -> float:
    """Thermal noise floor in watts: -174 dBm/Hz + 10 log10(BW) + NF."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth) + noise_figure_db
    return 10.0 ** (dbm / 10.0) * 1e-3


def propagation_delay(scenario: NetworkScenario, k: int, n: int,
                      via_target: bool) -> float:
    """One-way delay BS k -> BS n, optionally bouncing off the target."""
    xk = scenario.bs_positions[k]
    xn = scenario.bs_positions[n]
    if via_target:
        xt = scenario.target_position
        dist = float(np.linalg.norm(xk - xt) + np.linalg.norm(xt - xn))
    else:
        dist = float(np.linalg.norm(xk - xn))
    return dist / SPEED_OF_LIGHT


def _target_in_sector_mask(scenario: NetworkScenario) -> np.ndarray:
    tpl = scenario.template
    t_xy = scenario.target_position[:2]
    return np.array([
        point_in_sector(t_xy, tpl.comm_centers[k], tpl.boresights_deg[k],
                        tpl.config.sector_width_deg)
        for k in range(scenario.num_bs)
    ])


def realize_channels(scenario: NetworkScenario, params: ChannelParams,
                     rng: np.random.Generator, p_max: float) -> ChannelRealization:
    """Draw every gain, delay and noise power for one placement.

    p_max is needed only in "absolute-at-pmax" self-interference mode; the
    draw order is fixed (comm links, then BS-BS links) so results are
    bit-reproducible for a given rng state.
    """
    K = scenario.num_bs
    lam = params.wavelength
    bs = scenario.bs_positions
    ue = scenario.ue_positions
    target = scenario.target_position

    d_bs_ue = np.linalg.norm(ue[:, None, :] - bs[None, :, :], axis=2)   # [m, k]
    d_bs_bs = np.linalg.norm(bs[:, None, :] - bs[None, :, :], axis=2)   # [n, k]
    d_bs_t = np.linalg.norm(bs - target[None, :], axis=1)               # [k]
    d_ue_t = np.linalg.norm(ue - target[None, :], axis=1)               # [m]

    h_comm = np.empty((K, K), dtype=complex)
    for m in range(K):
        for k in range(K):
            h_comm[m, k] = rician_coefficient(
                d_bs_ue[m, k], params.comm_pathloss_exponent,
                params.rician_k_factor, lam, rng, params.reference_distance)

    bb_exp = params.bs_bs_pathloss_exponent or params.comm_pathloss_exponent
    bb_kf = params.bs_bs_k_factor or params.rician_k_factor
    h_bs_bs = np.zeros((K, K), dtype=complex)
    for n in range(K):
        for k in range(K):
            if n == k:
                continue
            h_bs_bs[n, k] = rician_coefficient(
                d_bs_bs[n, k], bb_exp, bb_kf, lam, rng, params.reference_distance)

    in_sector = _target_in_sector_mask(scenario)
    g_mono_bi = np.zeros((K, K))
    g_ue_echo = np.zeros((K, K))
    for n in range(K):
        for k in range(K):
            if in_sector[k] and in_sector[n]:
                g_mono_bi[n, k] = bistatic_radar_power_gain(d_bs_t[k], d_bs_t[n], params)
    for m in range(K):
        for k in range(K):
            if in_sector[k]:
                g_ue_echo[m, k] = bistatic_radar_power_gain(d_bs_t[k], d_ue_t[m], params)

    beta = self_interference_power_gain(params.si_level, params.si_mode, p_max)
    beta_sq = np.full(K, beta)

    tau_bs = (d_bs_t[None, :] + d_bs_t[:, None]) / SPEED_OF_LIGHT   # [n, k]
    tau_ue = (d_bs_t[None, :] + d_ue_t[:, None]) / SPEED_OF_LIGHT   # [m, k]

    bw = np.asarray(params.bandwidth_per_bs, dtype=float)
    if bw.shape != (K,):
        raise ValueError(f"bandwidth_per_bs must have length {K}")
    noise_ue = np.array([noise_power(bw[m], params.noise_figure_ue_db) for m in range(K)])
    noise_bs = np.array([noise_power(bw[n], params.noise_figure_bs_db) for n in range(K)])

    return ChannelRealization(
        h_comm=h_comm, g_mono_bi=g_mono_bi, g_ue_echo=g_ue_echo,
        h_bs_bs=h_bs_bs, beta_sq=beta_sq, tau_bs=tau_bs, tau_ue=tau_ue,
        noise_ue=noise_ue, noise_bs=noise_bs, bandwidth_per_bs=bw)
