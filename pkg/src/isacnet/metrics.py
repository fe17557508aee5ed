"""SINR expressions and the range-measurement standard deviation.

Four SINRs per index: stand-alone communication (no target), stand-alone
sensing (no UEs), and the overall versions where each service also sees the
other's interference.  Everything is linear scale; dB conversion happens at
the I/O boundary only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SPEED_OF_LIGHT, ChannelRealization


@dataclass(frozen=True)
class SinrReport:
    """Per-index linear SINRs plus the per-BS range STD in meters."""

    comm_standalone: np.ndarray
    sensing_standalone: np.ndarray
    comm_overall: np.ndarray
    sensing_overall: np.ndarray
    range_std: np.ndarray


def validate_power_vector(rho: np.ndarray, p_max: float, tol: float = 1e-9) -> None:
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1:
        raise ValueError("power vector must be 1-D")
    if np.any(rho < -tol * p_max) or np.any(rho > p_max * (1 + tol)):
        raise ValueError(f"power vector outside [0, {p_max}]")


def comm_sinr_standalone(rho: np.ndarray, ch: ChannelRealization, m: int) -> float:
    """UE m downlink SINR without the target: own signal over other-BS DL."""
    g = np.abs(ch.h_comm[m]) ** 2
    signal = rho[m] * g[m]
    interference = float(np.dot(rho, g) - rho[m] * g[m])
    return signal / (interference + ch.noise_ue[m])


def sensing_sinr_standalone(rho: np.ndarray, ch: ChannelRealization, n: int) -> float:
    """BS n echo SINR without UEs: own echo over cross echoes + SI + noise."""
    g = ch.g_mono_bi[n]
    signal = rho[n] * g[n]
    cross = float(np.dot(rho, g) - rho[n] * g[n])
    return signal / (cross + rho[n] * ch.beta_sq[n] + ch.noise_bs[n])


def comm_sinr_overall(rho: np.ndarray, ch: ChannelRealization, m: int) -> float:
    """UE m SINR with sensing active: target echoes add to both signal and
    interference."""
    gh = np.abs(ch.h_comm[m]) ** 2
    ge = ch.g_ue_echo[m]
    signal = rho[m] * (gh[m] + ge[m])
    tot = gh + ge
    interference = float(np.dot(rho, tot) - rho[m] * tot[m])
    return signal / (interference + ch.noise_ue[m])


def sensing_sinr_overall(rho: np.ndarray, ch: ChannelRealization, n: int) -> float:
    """BS n echo SINR with communication active: other BSs' DL leaks in
    directly on top of their echoes."""
    g = ch.g_mono_bi[n]
    hb = np.abs(ch.h_bs_bs[n]) ** 2
    signal = rho[n] * g[n]
    tot = g + hb
    interference = float(np.dot(rho, tot) - rho[n] * tot[n])
    return signal / (interference + rho[n] * ch.beta_sq[n] + ch.noise_bs[n])


def range_std(sinr_overall: float, bandwidth: float) -> float:
    """Matched-filter range STD in meters: c / (2 BW sqrt(2 SINR)).

    Zero SINR maps to +inf so degenerate draws can be censored downstream
    instead of crashing a campaign.
    """
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    if sinr_overall < 0:
        raise ValueError("SINR must be >= 0")
    if sinr_overall == 0.0:
        return float("inf")
    return SPEED_OF_LIGHT / (2.0 * bandwidth * np.sqrt(2.0 * sinr_overall))


def sensing_denominators(rho: np.ndarray, ch: ChannelRealization) -> np.ndarray:
    """Denominator of the overall sensing SINR for every BS (vectorized)."""
    cross = ch.g_mono_bi + np.abs(ch.h_bs_bs) ** 2
    np.fill_diagonal(cross, 0.0)
    return cross @ rho + rho * ch.beta_sq + ch.noise_bs


def min_sensing_sinr_overall(rho: np.ndarray, ch: ChannelRealization) -> float:
    K = ch.num_bs
    return min(sensing_sinr_overall(rho, ch, n) for n in range(K))


def evaluate_all(rho: np.ndarray, ch: ChannelRealization) -> SinrReport:
    """Evaluate every SINR and the per-BS range STD for one power vector."""
    K = ch.num_bs
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (K,):
        raise ValueError(f"power vector must have length {K}")
    comm_sa = np.array([comm_sinr_standalone(rho, ch, m) for m in range(K)])
    sens_sa = np.array([sensing_sinr_standalone(rho, ch, n) for n in range(K)])
    comm_ov = np.array([comm_sinr_overall(rho, ch, m) for m in range(K)])
    sens_ov = np.array([sensing_sinr_overall(rho, ch, n) for n in range(K)])
    sigma_r = np.array([range_std(sens_ov[n], ch.bandwidth_per_bs[n]) for n in range(K)])
    return SinrReport(comm_standalone=comm_sa, sensing_standalone=sens_sa,
                      comm_overall=comm_ov, sensing_overall=sens_ov,
                      range_std=sigma_r)
