"""Line-of-sight propagation from the transmit ULA to a single-antenna user."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InputError, RadarConfig


def beamspace_aod(aod_deg, spacing_ratio: float = 0.5):
    """``u = 2 pi (d / lambda) sin(aod)`` in radians."""
    return 2 * np.pi * spacing_ratio * np.sin(np.deg2rad(aod_deg))


def steering_vector(u: float, M: int) -> np.ndarray:
    """``[1, exp(-j u), ..., exp(-j (M-1) u)]``."""
    return np.exp(-1j * np.arange(M) * u)


def noise_power_for_snr(gamma_db: float, M: int, gain: complex = 1.0) -> float:
    """Time-domain noise variance giving ``gamma = M |gain|^2 / sigma^2``."""
    return M * abs(gain) ** 2 / 10 ** (gamma_db / 10)


def random_gain(rng: np.random.Generator) -> complex:
    """Unit-modulus gain with uniform phase."""
    return complex(np.exp(1j * rng.uniform(0.0, 2 * np.pi)))


@dataclass(frozen=True)
class ChannelLink:
    """One user's LoS link: angle (degrees), complex gain and noise variance."""

    aod_deg: float
    gain: complex = 1.0
    noise_power: float = 0.0
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if not -90.0 <= self.aod_deg <= 90.0:
            raise InputError(f"AoD {self.aod_deg} deg outside [-90, 90]")
        if self.noise_power < 0:
            raise InputError("noise power must be non-negative")

    @property
    def u(self) -> float:
        return float(beamspace_aod(self.aod_deg, self.spacing_ratio))

    @classmethod
    def at_snr(cls, aod_deg, gamma_db, M, gain=1.0, spacing_ratio=0.5) -> "ChannelLink":
        return cls(aod_deg, gain, noise_power_for_snr(gamma_db, M, gain), spacing_ratio)


def complex_awgn(rng: np.random.Generator, n: int, power: float) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise with ``E|n|^2 = power``."""
    if power == 0:
        return np.zeros(n, dtype=complex)
    w = rng.standard_normal((2, n))
    return math.sqrt(power / 2) * (w[0] + 1j * w[1])


def propagate(tx: np.ndarray, link: ChannelLink, rng: np.random.Generator | None = None) -> np.ndarray:
    """Received samples ``gain * sum_m exp(-j m u) tx[m] + noise``."""
    tx = np.atleast_2d(tx)
    M = tx.shape[0]
    y = link.gain * (steering_vector(link.u, M) @ tx)
    if link.noise_power > 0:
        if rng is None:
            raise InputError("a noisy link needs an rng")
        y = y + complex_awgn(rng, y.size, link.noise_power)
    return y


def ebn0_db(gamma_db, config: RadarConfig, E: int):
    """Energy per bit over noise density, ``L * gamma * B T / E``, in dB."""
    if E < 1:
        raise InputError("E must be at least one bit")
    return 10 * np.log10(config.L * config.BT / E) + np.asarray(gamma_db)
