"""Legitimate receiver: DFT, peak picking, HFCS lookup, RSR removal and HFPS decoding."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelLink
from .core import Codebook, InputError, RadarConfig, decode_bits


def dft(buf: np.ndarray) -> np.ndarray:
    """Forward DFT with ``1/L`` scaling, ``X[l] = sum_i x[i] exp(-j 2 pi l i / L) / L``."""
    buf = np.asarray(buf)
    return np.fft.fft(buf, axis=-1) / buf.shape[-1]


@dataclass(frozen=True)
class PeakVector:
    """M complex peak samples at strictly increasing bins."""

    values: np.ndarray
    bins: np.ndarray
    P: int

    @property
    def M(self) -> int:
        return self.values.size

    @property
    def on_grid(self) -> bool:
        """True when every bin is a multiple of ``P``."""
        return bool(np.all(self.bins % self.P == 0))

    @property
    def freq_set(self) -> np.ndarray:
        """Sub-band indices, off-grid bins rounded to the nearest multiple of ``P``."""
        return np.rint(self.bins / self.P).astype(np.int64)

    def with_values(self, values) -> "PeakVector":
        return replace(self, values=np.asarray(values, dtype=complex))


def detect_peaks(spec: np.ndarray, M: int, P: int) -> PeakVector:
    """Keep the M largest-magnitude bins, then sort them ascending.

    Equal magnitudes are resolved toward the lower bin (stable sort).
    """
    spec = np.asarray(spec)
    if spec.size < M:
        raise InputError(f"spectrum of {spec.size} bins cannot hold {M} peaks")
    order = np.argsort(-np.abs(spec), kind="stable")
    bins = np.sort(order[:M])
    return PeakVector(spec[bins].astype(complex), bins, P)


def decode_hfcs(peaks: PeakVector, codebook: Codebook) -> tuple[int, bool]:
    """Return ``(c_index, exact)``.

    Without an exact match the codeword sharing the most sub-bands is
    returned, lowest index on ties; ``exact`` is then False.
    """
    idx = codebook.combo_index(peaks.freq_set)
    if idx is not None and peaks.on_grid:
        return idx, True
    if idx is not None:
        return idx, False
    member = np.zeros(max(codebook.K, int(peaks.freq_set.max()) + 1), dtype=bool)
    member[peaks.freq_set] = True
    overlap = member[codebook.combos].sum(axis=1)
    return int(np.argmax(overlap)), False


@dataclass
class RsrTrace:
    Y: np.ndarray
    y_min: np.ndarray
    d: np.ndarray
    d1: np.ndarray
    flipped: list = field(default_factory=list)


def rsr_trace(values, freqs, Q: int) -> tuple[np.ndarray, RsrTrace]:
    """Undo the sign reversals on a peak vector.

    Each reversed peak sits next to the negative of its pair partner, so the
    Q closest pairs are taken as reversed pairs and the peak on the lower
    sub-band of each pair is negated.
    """
    y = np.asarray(values, dtype=complex)
    freqs = np.asarray(freqs)
    M = y.size
    if Q > M // 2 or Q < 0:
        raise InputError(f"Q={Q} exceeds M/2 for M={M}")
    Y = np.abs(y[:, None] - y[None, :]) ** 2
    masked = Y + np.diag(np.full(M, np.inf))
    d = np.argmin(masked, axis=1)
    y_min = masked[np.arange(M), d]
    d1 = list(np.argsort(y_min, kind="stable"))
    trace = RsrTrace(Y, y_min, d, np.array(d1))
    out = y.copy()
    for q in range(Q):
        if q >= len(d1):
            break
        i = d1[q]
        i2 = d[i]
        if i2 in d1[q + 1:]:
            d1.remove(i2)
        flip = i if freqs[i] <= freqs[i2] else i2
        out[flip] = -out[flip]
        trace.flipped.append(int(flip))
    return out, trace


def remove_rsr(peaks: PeakVector, Q: int) -> tuple[PeakVector, np.ndarray]:
    """Return the RSR-free peaks and the detected sign pattern (in peak order)."""
    if Q == 0:
        return peaks, np.ones(peaks.M)
    values, trace = rsr_trace(peaks.values, peaks.freq_set, Q)
    pattern = np.ones(peaks.M)
    pattern[trace.flipped] = -1.0
    return peaks.with_values(values), pattern


@dataclass
class HfpsTrace:
    omega_raw: np.ndarray
    omega: np.ndarray
    i_sorted: np.ndarray
    shifted: bool
    i: np.ndarray


def hfps_from_angles(omega_raw) -> tuple[np.ndarray, HfpsTrace]:
    """Antenna ordering from the peak phases.

    Angles are moved into ``(-2 pi, 0]`` and sorted descending; when the
    smallest angle is closer to zero (on the circle) than the largest, the
    antenna-0 peak has wrapped and the order is rotated right by one.
    """
    omega_raw = np.asarray(omega_raw, dtype=float)
    omega = np.where(omega_raw > 0, omega_raw - 2 * np.pi, omega_raw)
    i_sorted = np.argsort(-omega, kind="stable")
    i = i_sorted
    shifted = abs(np.exp(1j * omega[i[-1]]) - 1) < abs(np.exp(1j * omega[i[0]]) - 1)
    if shifted:
        i = np.roll(i, 1)
    return i, HfpsTrace(omega_raw, omega, i_sorted, bool(shifted), i)


def perm_matrix(i) -> np.ndarray:
    """``P[i[m], m] = 1``."""
    i = np.asarray(i)
    P = np.zeros((i.size, i.size), dtype=int)
    P[i, np.arange(i.size)] = 1
    return P


def decode_hfps(tilde_y: PeakVector, beta: complex, codebook: Codebook):
    """Return ``(p_index, k_h, ok, trace)``; ``ok`` is False when the ordering is not a codeword."""
    omega_raw = np.angle(np.conj(beta) * tilde_y.values)
    i, trace = hfps_from_angles(omega_raw)
    k_h = tilde_y.freq_set[i]
    p = codebook.perm_index(i)
    return (0 if p is None else p), k_h, p is not None, trace


@dataclass(frozen=True)
class DecodeResult:
    c_index: int
    p_index: int
    k_h: np.ndarray
    bits: np.ndarray
    rsr_pattern: np.ndarray
    hfcs_ok: bool
    hfps_ok: bool

    @property
    def ok(self) -> bool:
        return self.hfcs_ok and self.hfps_ok


def bob_decode_symbol(rx: np.ndarray, link: ChannelLink, codebook: Codebook,
                      config: RadarConfig, rsr: bool = True) -> DecodeResult:
    """DFT, peak picking, HFCS, optional RSR removal, HFPS, bits."""
    rx = np.asarray(rx)
    if rx.shape != (config.L,):
        raise InputError(f"expected {config.L} samples, got shape {rx.shape}")
    peaks = detect_peaks(dft(rx), config.M, config.P)
    c_index, hfcs_ok = decode_hfcs(peaks, codebook)
    if rsr and config.Q > 0:
        peaks, pattern = remove_rsr(peaks, config.Q)
    else:
        pattern = np.ones(config.M)
    p_index, k_h, hfps_ok, _ = decode_hfps(peaks, link.gain, codebook)
    bits = decode_bits(c_index, p_index, codebook)
    return DecodeResult(c_index, p_index, k_h, bits, pattern, hfcs_ok, hfps_ok)
