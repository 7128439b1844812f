"""Range ambiguity of a frequency-hopped pulse, sidelobe metrics and multi-target SIR.

A pulse is described by a frequency plan ``k_plan`` of shape ``(H, M)``
(sub-band of antenna ``m`` in hop ``h``, tone ``f = k B / K``) and complex
per-hop, per-antenna coefficients ``coeffs`` of the same shape. Plain
FH-MIMO uses ``coeffs = 1``; EPC with RSR uses ``b_hm * epc_phase(m)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Codebook, ConfigError, InputError, RadarConfig
from ..waveform import draw_sign_pattern, epc_phase

# reported for a metric whose interference term is exactly zero
CAPPED_DB = 200.0


def chi(x, y, T: float):
    """Ambiguity of a rectangular pulse of length ``T`` at delay ``x``, Doppler ``y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rem = np.clip(T - np.abs(x), 0.0, None)
    return rem * np.sinc(y * rem) * np.exp(1j * np.pi * y * (x + T)) * (np.abs(x) < T)


@dataclass(frozen=True)
class AmbiguityGrid:
    tau: np.ndarray
    R: np.ndarray
    coeffs: np.ndarray

    def at_zero(self) -> float:
        return float(self.R[int(np.argmin(np.abs(self.tau)))])


def _check_plan(k_plan, coeffs, config):
    k_plan = np.asarray(k_plan)
    if k_plan.ndim != 2 or k_plan.shape[1] != config.M:
        raise InputError(f"k_plan must have shape (H, {config.M})")
    coeffs = np.ones(k_plan.shape, dtype=complex) if coeffs is None else np.asarray(coeffs, dtype=complex)
    if coeffs.shape != k_plan.shape:
        raise InputError("coeffs must match k_plan")
    return k_plan, coeffs


def range_ambiguity(k_plan, coeffs, config: RadarConfig, tau) -> AmbiguityGrid:
    """``R(tau) = |sum c*_hm c_h'm' chi(tau - T(h'-h), nu) e^{j 2 pi nu h T} e^{j 2 pi f_h'm' tau}|``.

    This is ``|integral s(t) s*(t - tau) dt|`` of the summed pulse. The
    conjugate sits on the hop-``h`` coefficient; with unit coefficients the
    placement is immaterial. Only hop offsets ``n = h' - h`` with ``|tau - n T| < T`` contribute, so
    every delay touches at most two offsets.
    """
    k_plan, coeffs = _check_plan(k_plan, coeffs, config)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if tau.size == 0:
        raise InputError("empty delay grid")
    H, M = k_plan.shape
    T = config.T
    f = k_plan * (config.B / config.K)
    acc = np.zeros(tau.size, dtype=complex)
    n_lo = np.floor(tau / T).astype(int)
    h = np.arange(H)
    for n in range(-(H - 1), H):
        sel = np.flatnonzero((n_lo == n) | (n_lo == n - 1))
        sel = sel[np.abs(tau[sel] - n * T) < T]
        if sel.size == 0:
            continue
        h0 = h[max(0, -n): H - max(0, n)]  # hops h with h + n inside the pulse
        h1 = h0 + n
        fa, fb = f[h0][:, :, None], f[h1][:, None, :]
        nu = (fa - fb).reshape(-1)
        w = (np.conj(coeffs[h0])[:, :, None] * coeffs[h1][:, None, :]
             * np.exp(2j * np.pi * (fa - fb) * (h0[:, None, None] * T))).reshape(-1)
        fb_flat = np.broadcast_to(fb, (h0.size, M, M)).reshape(-1)
        for s in range(0, sel.size, 256):
            idx = sel[s:s + 256]
            t = tau[idx][:, None]
            terms = chi(t - n * T, nu[None, :], T) * np.exp(2j * np.pi * fb_flat[None, :] * t)
            acc[idx] += terms @ w
    return AmbiguityGrid(tau, np.abs(acc), coeffs)


def sampled_pulse(k_plan, coeffs, config: RadarConfig, oversample: int = 1) -> np.ndarray:
    """Sum over antennas of the sampled pulse at rate ``2 B * oversample``."""
    k_plan, coeffs = _check_plan(k_plan, coeffs, config)
    H, M = k_plan.shape
    Lo = config.L * oversample
    t = np.arange(H * Lo) / (config.fs * oversample)
    f = np.repeat(k_plan * (config.B / config.K), Lo, axis=0)  # (H*Lo, M)
    c = np.repeat(coeffs, Lo, axis=0)
    return (c * np.exp(2j * np.pi * f * t[:, None])).sum(axis=1)


def autocorrelation_oracle(k_plan, coeffs, config: RadarConfig, oversample: int = 4):
    """``|sum_n s[n + k] s*[n]| dt`` over all lags, as ``(tau, R)``."""
    s = sampled_pulse(k_plan, coeffs, config, oversample)
    dt = 1.0 / (config.fs * oversample)
    r = np.correlate(s, s, mode="full") * dt
    lags = np.arange(-(s.size - 1), s.size)
    return lags * dt, np.abs(r)


def msr_db(grid: AmbiguityGrid, mainlobe_width: float) -> float:
    """Peak at zero delay over the largest value with ``|tau| >= mainlobe_width``, as a power ratio in dB."""
    side = grid.R[np.abs(grid.tau) >= mainlobe_width * (1 - 1e-9)]
    peak = grid.at_zero()
    if side.size == 0 or side.max() == 0:
        return CAPPED_DB
    return float(20 * np.log10(peak / side.max()))


# --- frequency plans ---------------------------------------------------------

def conventional_plan(config: RadarConfig, rng: np.random.Generator) -> np.ndarray:
    """Independent random ``M``-of-``K`` choices per hop, random antenna order."""
    return np.array([rng.choice(config.K, config.M, replace=False) for _ in range(config.H)])


def hfcs_plan(codebook: Codebook, H: int, rng: np.random.Generator) -> np.ndarray:
    """Random codebook combinations, antennas in ascending sub-band order."""
    idx = rng.integers(0, codebook.combos.shape[0], H)
    return codebook.combos[idx].copy()


def processed_plan(base_plan, config: RadarConfig, rng: np.random.Generator,
                   u_phi: float | None = None, Q: int | None = None):
    """Permute each hop of ``base_plan`` and attach EPC and RSR coefficients.

    Returns ``(k_plan, coeffs)``; ``u_phi`` is drawn from a uniform AoD when
    not given and ``Q`` defaults to ``M / 2``.
    """
    base_plan = np.asarray(base_plan)
    H, M = base_plan.shape
    Q = M // 2 if Q is None else Q
    if u_phi is None:
        u_phi = float(2 * np.pi * config.spacing_ratio * np.sin(np.deg2rad(rng.uniform(-90, 90))))
    k_plan = np.array([row[rng.permutation(M)] for row in base_plan])
    signs = np.array([draw_sign_pattern(row, Q, rng).b_h for row in k_plan])
    coeffs = signs * epc_phase(np.arange(M), M, u_phi)[None, :]
    return k_plan, coeffs


# --- interference ------------------------------------------------------------

def draw_target_delays(n_targets: int, config: RadarConfig, rng: np.random.Generator,
                       min_sep: float | None = None, max_tries: int = 1000) -> np.ndarray:
    """Delays of ``n - 1`` interferers relative to a reference target at zero.

    All delays lie in ``[-H T, H T]`` and every pair, reference included, is
    at least ``min_sep`` (default one hop) apart.
    """
    if n_targets < 2:
        raise ConfigError("need at least two targets")
    min_sep = config.T if min_sep is None else min_sep
    span = config.H * config.T
    per_side = int(np.floor((span - min_sep) / min_sep + 1e-9)) + 1 if span >= min_sep else 0
    if n_targets - 1 > 2 * per_side:
        raise ConfigError(f"{n_targets} targets do not fit {min_sep:g} s apart within +-{span:g} s")
    for _ in range(max_tries):
        d = rng.uniform(min_sep, span, n_targets - 1) * rng.choice([-1.0, 1.0], n_targets - 1)
        pts = np.sort(np.append(d, 0.0))
        if np.all(np.diff(pts) >= min_sep):
            return d
    raise ConfigError(f"could not place {n_targets} targets {min_sep:g} s apart")


@dataclass(frozen=True)
class SirResult:
    n_targets: int
    sir_plain_db: float
    sir_processed_db: float

    @property
    def gain_db(self) -> float:
        return self.sir_processed_db - self.sir_plain_db


def sir_vs_targets(config: RadarConfig, codebook: Codebook, n_targets, trials: int,
                   rng: np.random.Generator, plain: str = "hfcs") -> list[SirResult]:
    """SIR of a reference target against ``n - 1`` interferers, plain vs processed waveform.

    Each trial draws a fresh plan, its processed version and fresh delays;
    ``SIR = R(0)^2 / E[sum_j R(tau_j)^2]`` with the expectation over
    trials. ``plain`` selects the HFCS plan (``"hfcs"``) or a conventional
    random plan (``"conventional"``) as the unprocessed reference.
    """
    out = []
    for n in np.atleast_1d(n_targets):
        n = int(n)
        sig_p = sig_q = int_p = int_q = 0.0
        for _ in range(trials):
            if plain == "hfcs":
                base = hfcs_plan(codebook, config.H, rng)
            elif plain == "conventional":
                base = conventional_plan(config, rng)
            else:
                raise ConfigError(f"unknown plain waveform {plain!r}")
            kq, cq = processed_plan(base, config, rng)
            delays = draw_target_delays(n, config, rng)
            taus = np.append(0.0, delays)
            Rp = range_ambiguity(base, None, config, taus).R
            Rq = range_ambiguity(kq, cq, config, taus).R
            sig_p += Rp[0] ** 2
            sig_q += Rq[0] ** 2
            int_p += np.sum(Rp[1:] ** 2)
            int_q += np.sum(Rq[1:] ** 2)
        out.append(SirResult(n, _ratio_db(sig_p, int_p), _ratio_db(sig_q, int_q)))
    return out


def _ratio_db(sig: float, interf: float) -> float:
    if interf == 0:
        return CAPPED_DB
    return float(10 * np.log10(sig / interf))
