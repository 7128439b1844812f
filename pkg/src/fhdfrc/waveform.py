"""Per-antenna baseband hop synthesis with EPC phase compensation and RSR.

Buffers are complex arrays of shape ``(M, L)``: row ``m`` is antenna ``m``,
column ``i`` is the sample at ``t = i / (2B)``. A pulse of ``H`` hops is the
row-wise concatenation of ``H`` hop buffers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ConfigError, RadarConfig, encode_hop, Codebook, HopMessage, InputError


def epc_phase(m, M: int, u_phi: float):
    """EPC factor ``exp(-j m (2 pi / M - u_phi))`` for antenna(s) ``m``.

    It turns Bob's array response ``exp(-j m u_phi)`` into the fixed
    ``exp(-j 2 pi m / M)`` whatever his angle is.
    """
    m = np.asarray(m)
    if np.any((m < 0) | (m >= M)):
        raise InputError(f"antenna index out of range for M={M}")
    return np.exp(-1j * m * (2 * np.pi / M - u_phi))


@dataclass(frozen=True)
class SignPattern:
    b_h: np.ndarray
    reversed_pairs: np.ndarray

    @property
    def Q(self) -> int:
        return int(np.count_nonzero(self.b_h < 0))


def draw_sign_pattern(k_h, Q: int, rng: np.random.Generator) -> SignPattern:
    """Draw the RSR signs for one hop.

    Q of the M/2 antenna pairs ``(m, m + M/2)`` are picked uniformly without
    replacement, so no pair is reversed twice. Inside a picked pair the
    antenna on the lower sub-band is reversed, which is what Bob's detector
    assumes.
    """
    k_h = np.asarray(k_h)
    M = k_h.size
    if Q == 0:
        return SignPattern(np.ones(M), np.empty(0, dtype=np.int64))
    if M % 2 or not 0 < Q <= M // 2:
        raise ConfigError(f"cannot reverse Q={Q} antennas out of M={M} under the pairing rule")
    pairs = rng.choice(M // 2, size=Q, replace=False)
    return sign_pattern_for_pairs(k_h, pairs)


def sign_pattern_for_pairs(k_h, pairs) -> SignPattern:
    """Reverse the lower-sub-band antenna of every pair ``(p, p + M/2)`` in ``pairs``."""
    k_h = np.asarray(k_h)
    M = k_h.size
    half = M // 2
    pairs = np.sort(np.asarray(pairs, dtype=np.int64))
    if np.any((pairs < 0) | (pairs >= half)) or np.unique(pairs).size != pairs.size:
        raise InputError(f"pair indices must be distinct and in [0, {half})")
    b_h = np.ones(M)
    for p in pairs:
        lo = p if k_h[p] < k_h[p + half] else p + half
        b_h[lo] = -1.0
    return SignPattern(b_h, pairs)


def sign_constraints_hold(k_h, b_h, Q: int) -> bool:
    """Exactly Q reversals, never both antennas of a pair, always the lower sub-band."""
    k_h, b_h = np.asarray(k_h), np.asarray(b_h)
    M = k_h.size
    if np.count_nonzero(b_h < 0) != Q:
        return False
    if Q == 0:
        return True
    half = M // 2
    for m in range(half):
        r0, r1 = b_h[m] < 0, b_h[m + half] < 0
        if r0 and r1:
            return False
        if r0 and not k_h[m] < k_h[m + half]:
            return False
        if r1 and not k_h[m + half] < k_h[m]:
            return False
    return True


def make_hop(bits, codebook: Codebook, Q: int, rng: np.random.Generator) -> HopMessage:
    c_index, p_index, k_h = encode_hop(bits, codebook)
    pattern = draw_sign_pattern(k_h, Q, rng)
    return HopMessage(np.asarray(bits, dtype=np.int8), c_index, p_index, k_h, pattern.b_h)


def synthesize_hop(k_h, b_h, u_phi: float, config: RadarConfig,
                   epc_enabled: bool = True, rsr_enabled: bool = True) -> np.ndarray:
    """Sampled hop for every antenna, shape ``(M, L)``.

    Sample ``i`` of antenna ``m`` is
    ``b_h[m] * epc_phase(m) * exp(j 2 pi P i k_h[m] / L)``; a disabled stage
    contributes a factor of one.
    """
    k_h = np.asarray(k_h)
    M, L, P = config.M, config.L, config.P
    if k_h.shape != (M,):
        raise InputError(f"k_h must have {M} entries")
    i = np.arange(L)
    tones = np.exp(2j * np.pi * P * np.outer(k_h, i) / L)
    coef = np.ones(M, dtype=complex)
    if epc_enabled:
        coef *= epc_phase(np.arange(M), M, u_phi)
    if rsr_enabled:
        coef *= np.asarray(b_h)
    return coef[:, None] * tones


def synthesize_pulse(k_plan, b_plan, u_phi: float, config: RadarConfig,
                     epc_enabled: bool = True, rsr_enabled: bool = True) -> np.ndarray:
    """Concatenate ``H`` hops; ``k_plan`` and ``b_plan`` have shape ``(H, M)``."""
    k_plan = np.asarray(k_plan)
    b_plan = np.ones_like(k_plan, dtype=float) if b_plan is None else np.asarray(b_plan)
    hops = [synthesize_hop(k_plan[h], b_plan[h], u_phi, config, epc_enabled, rsr_enabled)
            for h in range(k_plan.shape[0])]
    return np.concatenate(hops, axis=1)


def dump_waveform(path, buffers: np.ndarray, config: RadarConfig) -> tuple[Path, Path]:
    """Write ``buffers`` as interleaved float64 re/im, row-major ``[antenna][sample]``.

    A sidecar ``<path>.hdr`` records M, L, B and T, one ``key=value`` per line.
    """
    path = Path(path)
    buffers = np.ascontiguousarray(buffers, dtype=np.complex128)
    buffers.view(np.float64).tofile(path)
    hdr = path.with_name(path.name + ".hdr")
    hdr.write_text(
        f"M={buffers.shape[0]}\nL={config.L}\nsamples={buffers.shape[1]}\n"
        f"B={config.B!r}\nT={config.T!r}\ndtype=float64\nlayout=interleaved_re_im_antenna_major\n"
    )
    return path, hdr


def load_waveform(path) -> np.ndarray:
    path = Path(path)
    hdr = dict(line.split("=", 1) for line in path.with_name(path.name + ".hdr").read_text().split())
    data = np.fromfile(path, dtype=np.float64).view(np.complex128)
    return data.reshape(int(hdr["M"]), int(hdr["samples"]))
