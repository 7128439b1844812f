"""Eavesdropper: same front end as Bob, then an exhaustive permutation search."""

from __future__ import annotations

import enum
import itertools
from functools import lru_cache

import numpy as np

from .bob import DecodeResult, decode_hfcs, detect_peaks, dft
from .channel import ChannelLink, steering_vector
from .core import Codebook, ConfigError, InputError, RadarConfig, decode_bits

# M! candidates are scored jointly; 8! = 40320 is the largest we allow.
MAX_EVE_ANTENNAS = 8


class EveKnowledge(enum.Enum):
    KNOWS_BOB_AOD = "knows_bob_aod"
    NO_BOB_AOD = "no_bob_aod"


def eve_reference(M: int, u_theta: float, u_phi: float, knowledge: EveKnowledge,
                  epc_enabled: bool = True) -> np.ndarray:
    """Array response Eve expects from an antenna-ordered peak vector."""
    if not epc_enabled:
        return steering_vector(u_theta, M)
    if knowledge is EveKnowledge.KNOWS_BOB_AOD:
        return steering_vector(2 * np.pi / M + u_theta - u_phi, M)
    return steering_vector(2 * np.pi / M + u_theta, M)


@lru_cache(maxsize=None)
def all_permutations(M: int) -> np.ndarray:
    """All ``M!`` permutations in ascending lexicographic order, shape ``(M!, M)``."""
    if M > MAX_EVE_ANTENNAS:
        raise ConfigError(f"exhaustive Eve search supports M <= {MAX_EVE_ANTENNAS}, got {M}")
    out = np.array(list(itertools.permutations(range(M))), dtype=np.int64)
    out.setflags(write=False)
    return out


def eve_detect_permutation(values, alpha: complex, reference) -> np.ndarray:
    """``argmin_i sum_m |alpha ref[m] - x[i[m]]|^2``; ties go to the lexicographically first ``i``."""
    x = np.asarray(values, dtype=complex)
    M = x.size
    perms = all_permutations(M)
    target = alpha * np.asarray(reference)
    cost = np.abs(target[None, :] - x[perms]) ** 2
    return perms[int(np.argmin(cost.sum(axis=1)))]


def eve_decode_symbol(rx: np.ndarray, link: ChannelLink, u_phi: float, codebook: Codebook,
                      config: RadarConfig, knowledge: EveKnowledge = EveKnowledge.KNOWS_BOB_AOD,
                      epc_enabled: bool = True) -> DecodeResult:
    """HFCS as Bob does, no RSR handling, HFPS by exhaustive search."""
    rx = np.asarray(rx)
    if rx.shape != (config.L,):
        raise InputError(f"expected {config.L} samples, got shape {rx.shape}")
    peaks = detect_peaks(dft(rx), config.M, config.P)
    c_index, hfcs_ok = decode_hfcs(peaks, codebook)
    ref = eve_reference(config.M, link.u, u_phi, knowledge, epc_enabled)
    i = eve_detect_permutation(peaks.values, link.gain, ref)
    p = codebook.perm_index(i)
    p_index = 0 if p is None else p
    bits = decode_bits(c_index, p_index, codebook)
    return DecodeResult(c_index, p_index, peaks.freq_set[i], bits, np.ones(config.M),
                        hfcs_ok, p is not None)
