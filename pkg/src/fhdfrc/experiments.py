"""Monte Carlo drivers: SER against SNR or angle, eavesdropper-metric tables, ambiguity tables.

Every trial owns its generator, ``np.random.default_rng([seed, point, trial])``,
so a table depends only on the run parameters and not on evaluation order.
"""

from __future__ import annotations

import configparser
import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .bob import bob_decode_symbol
from .channel import ChannelLink, ebn0_db, noise_power_for_snr, propagate, random_gain
from .core import ConfigError, RadarConfig, build_codebook, Codebook
from .eve import EveKnowledge, eve_decode_symbol
from .waveform import make_hop, synthesize_hop


class Scenario(enum.Enum):
    BOB_PROPOSED = "BobProposed"
    BOB_WITHOUT_RSR = "BobWithoutRSR"
    EVE = "Eve"
    EVE_NO_BOB_AOD = "EveNoBobAoD"
    EVE_WITHOUT_RSR = "EveWithoutRSR"
    HFCS_ONLY_BOB = "HFCSOnlyBob"
    HFCS_ONLY_EVE = "HFCSOnlyEve"

    @classmethod
    def parse(cls, name: str) -> "Scenario":
        for s in cls:
            if name in (s.value, s.name):
                return s
        raise ConfigError(f"unknown scenario {name!r}; choose from {[s.value for s in cls]}")

    @property
    def epc(self) -> bool:
        return not self.hfcs_only

    @property
    def rsr(self) -> bool:
        return self in (Scenario.BOB_PROPOSED, Scenario.EVE)

    @property
    def eve(self) -> bool:
        return self in (Scenario.EVE, Scenario.EVE_NO_BOB_AOD, Scenario.EVE_WITHOUT_RSR,
                        Scenario.HFCS_ONLY_EVE)

    @property
    def hfcs_only(self) -> bool:
        return self in (Scenario.HFCS_ONLY_BOB, Scenario.HFCS_ONLY_EVE)

    @property
    def knowledge(self) -> EveKnowledge:
        if self is Scenario.EVE_NO_BOB_AOD:
            return EveKnowledge.NO_BOB_AOD
        return EveKnowledge.KNOWS_BOB_AOD

    def scored_bits(self, config: RadarConfig) -> int:
        return config.E1 if self.hfcs_only else config.E


def trial_rng(seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, point, trial])


def simulate_trial(config: RadarConfig, codebook: Codebook, scenario: Scenario, gamma_db: float,
                   rng: np.random.Generator, phi_deg: float | None = None,
                   rx_deg: float | None = None) -> bool:
    """One hop through one receiver; returns True on a symbol error.

    ``phi_deg`` fixes Bob's angle and ``rx_deg`` the eavesdropper's; unset
    angles are drawn uniformly on ``[-90, 90]``. The eavesdropper sees the
    same SNR as Bob. An HFPS ordering that is not a codeword counts as
    an error.
    """
    bits = rng.integers(0, 2, config.E)
    Q = config.Q if scenario.rsr else 0
    hop = make_hop(bits, codebook, Q, rng)
    phi = rng.uniform(-90.0, 90.0) if phi_deg is None else phi_deg
    theta = rng.uniform(-90.0, 90.0) if rx_deg is None else rx_deg
    bob = ChannelLink(phi, spacing_ratio=config.spacing_ratio)
    tx = synthesize_hop(hop.k_h, hop.b_h, bob.u, config, scenario.epc, scenario.rsr)
    gain = random_gain(rng)
    link = ChannelLink(theta if scenario.eve else phi, gain,
                       noise_power_for_snr(gamma_db, config.M, gain), config.spacing_ratio)
    rx = propagate(tx, link, rng)
    if scenario.eve:
        res = eve_decode_symbol(rx, link, bob.u, codebook, config, scenario.knowledge, scenario.epc)
    else:
        res = bob_decode_symbol(rx, link, codebook, config, rsr=scenario.rsr)
    if scenario.hfcs_only:
        return res.c_index != hop.c_index
    # an ordering outside the codebook carries no decision, whatever index stands in for it
    return not res.hfps_ok or not np.array_equal(res.bits, hop.bits)


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(errors, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class RunSpec:
    config: RadarConfig
    scenario: Scenario = Scenario.BOB_PROPOSED
    snr_db: Sequence[float] = (-10.0, -8.0, -6.0, -4.0, -2.0)
    angles_deg: Sequence[float] = ()
    phi_deg: float | None = None
    trials: int = 10_000
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        self.snr_db = tuple(float(s) for s in self.snr_db)
        self.angles_deg = tuple(float(a) for a in self.angles_deg)


@dataclass
class Table:
    """Column-named rows, written as CSV with 17 significant digits."""

    columns: list
    rows: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows])

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv_text())


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return v


def _count_errors(spec: RunSpec, codebook, point: int, gamma_db: float,
                  phi_deg=None, rx_deg=None, scenario=None) -> int:
    scenario = scenario or spec.scenario
    return sum(
        simulate_trial(spec.config, codebook, scenario, gamma_db,
                       trial_rng(spec.seed, point, t), phi_deg, rx_deg)
        for t in range(spec.trials)
    )


SER_COLUMNS = ["ebn0_db", "gamma_db", "ser", "trials", "errors", "ci_low", "ci_high"]


def run_ser_sweep(spec: RunSpec) -> Table:
    """SER at each time-domain SNR of ``spec.snr_db``."""
    if not spec.snr_db:
        raise ConfigError("empty SNR grid")
    config = spec.config
    codebook = build_codebook(config)
    E = spec.scenario.scored_bits(config)
    table = Table(list(SER_COLUMNS))
    for point, g in enumerate(spec.snr_db):
        errors = _count_errors(spec, codebook, point, g, phi_deg=spec.phi_deg)
        lo, hi = wilson_interval(errors, spec.trials)
        table.rows.append([float(ebn0_db(g, config, E)), g, errors / spec.trials,
                           spec.trials, errors, lo, hi])
        if spec.out:
            table.write(spec.out)
    return table


ANGLE_COLUMNS = ["angle_deg", "receiver", "ser", "trials", "errors", "ci_low", "ci_high"]


def angle_grid(step: float = 0.5) -> np.ndarray:
    n = int(round(180.0 / step))
    return np.linspace(-90.0, 90.0, n + 1)


def run_angle_sweep(spec: RunSpec) -> Table:
    """SER against receiver angle with Bob fixed at ``spec.phi_deg``.

    At Bob's angle the receiver is Bob; at every other angle it is an
    eavesdropper that knows Bob's AoD. HFCS-only scenarios use the matching
    HFCS-only receivers.
    """
    if spec.phi_deg is None:
        raise ConfigError("an angle sweep needs a fixed Bob angle")
    if len(spec.snr_db) != 1:
        raise ConfigError("an angle sweep runs at a single SNR")
    gamma = spec.snr_db[0]
    angles = spec.angles_deg or tuple(angle_grid())
    codebook = build_codebook(spec.config)
    if spec.scenario.hfcs_only:
        bob_s, eve_s = Scenario.HFCS_ONLY_BOB, Scenario.HFCS_ONLY_EVE
    elif spec.scenario.rsr:
        bob_s, eve_s = Scenario.BOB_PROPOSED, Scenario.EVE
    else:
        bob_s, eve_s = Scenario.BOB_WITHOUT_RSR, Scenario.EVE_WITHOUT_RSR
    table = Table(list(ANGLE_COLUMNS))
    for point, a in enumerate(angles):
        at_bob = math.isclose(a, spec.phi_deg, abs_tol=1e-9)
        scenario = bob_s if at_bob else eve_s
        errors = _count_errors(spec, codebook, point, gamma, spec.phi_deg, a, scenario)
        lo, hi = wilson_interval(errors, spec.trials)
        table.rows.append([a, "bob" if at_bob else "eve", errors / spec.trials,
                           spec.trials, errors, lo, hi])
        if spec.out:
            table.write(spec.out)
    return table


# --- config files -----------------------------------------------------------

CONFIG_KEYS = ("M", "K", "H", "B_hz", "T_s", "Q", "spacing_ratio", "scenario",
               "snr_db_start", "snr_db_stop", "snr_db_step", "trials", "seed", "out",
               "phi_deg")


def snr_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive grid; ``stop`` is kept when it lands on the step."""
    if step <= 0:
        raise ConfigError("snr_db_step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9))
    if n < 0:
        raise ConfigError("snr_db_stop is below snr_db_start")
    return tuple(round(start + i * step, 12) for i in range(n + 1))


def parse_config_text(text: str) -> RunSpec:
    """Read ``key = value`` lines (``#`` comments) into a RunSpec."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string("[run]\n" + text)
    raw = dict(cp["run"])
    unknown = set(raw) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        config = RadarConfig(
            M=int(raw["M"]), K=int(raw["K"]), H=int(raw.get("H", 15)),
            B=float(raw.get("B_hz", 100e6)), T=float(raw.get("T_s", 1e-6)),
            Q=int(raw.get("Q", 0)), spacing_ratio=float(raw.get("spacing_ratio", 0.5)),
        )
        snr = snr_grid(float(raw.get("snr_db_start", -10)), float(raw.get("snr_db_stop", -2)),
                       float(raw.get("snr_db_step", 2)))
        phi = raw.get("phi_deg")
        return RunSpec(
            config=config,
            scenario=Scenario.parse(raw.get("scenario", "BobProposed")),
            snr_db=snr,
            phi_deg=None if phi is None else float(phi),
            trials=int(raw.get("trials", 10_000)),
            seed=int(raw.get("seed", 0)),
            out=raw.get("out"),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]}") from None


def load_config(path) -> RunSpec:
    return parse_config_text(Path(path).read_text())


# --- worked example -----------------------------------------------------------

# Reference numbers of the M=4, K=5, Q=1 walk-through (symbol 01 0011).
EXAMPLE_BITS = (0, 1, 0, 0, 1, 1)
EXAMPLE_COMBOS = ((0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 3, 4), (0, 2, 3, 4))
EXAMPLE_PERMS = ((3, 2, 1, 0), (3, 2, 0, 1), (3, 1, 2, 0), (3, 1, 0, 2))
EXAMPLE_K_H = (4, 1, 0, 2)
EXAMPLE_B_H = (1, 1, -1, 1)
EXAMPLE_BINS = (0, 20, 40, 80)
EXAMPLE_Y_BREVE = (-0.3416 - 1.0724j, -0.9379 + 0.0325j, 0.9413 - 0.1311j, 0.0198 - 0.9291j)
# Row 2, column 1 of the printed distance matrix reads 2.5584; the matrix is
# symmetric and row 1, column 2 reads 3.5584, which the inputs reproduce.
EXAMPLE_Y_MATRIX = ((0, 1.5764, 2.5319, 0.1511),
                    (1.5764, 0, 3.5584, 1.8420),
                    (2.5319, 3.5584, 0, 1.4860),
                    (0.1511, 1.8420, 1.4860, 0))
EXAMPLE_Y_MIN = (0.1511, 1.5764, 1.4860, 0.1511)
EXAMPLE_D = (3, 0, 3, 0)
EXAMPLE_D1 = (0, 3, 2, 1)
EXAMPLE_Y_TILDE = (0.3416 + 1.0724j, -0.9379 + 0.0325j, 0.9413 - 0.1311j, 0.0198 - 0.9291j)
EXAMPLE_OMEGA_RAW = (3.0695, -1.4878, 1.5972, 0.1131)
EXAMPLE_OMEGA = (-3.2137, -1.4878, -4.6859, -6.1701)
EXAMPLE_I_SORTED = (1, 0, 2, 3)
EXAMPLE_ZIGZAG = (0.1130, 1.3543)
EXAMPLE_I = (3, 1, 0, 2)
EXAMPLE_P_H = ((0, 0, 1, 0), (0, 1, 0, 0), (0, 0, 0, 1), (1, 0, 0, 0))
# The distance matrix is rebuilt from 4-decimal inputs, so its entries
# can move by a few units in the last printed place.
_INPUT_ROUNDING_TOL = 5e-4
_PRINT_TOL = 1e-4 + 1e-9


@dataclass
class Transcript:
    lines: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def check(self, label: str, got, want, tol: float = 0.0) -> bool:
        g, w = np.asarray(got), np.asarray(want)
        ok = g.shape == w.shape and bool(np.all(np.abs(g - w) <= tol))
        self.lines.append(f"[{'ok' if ok else 'MISMATCH'}] {label}: {_show(got)}"
                          + ("" if ok else f" (expected {_show(want)})"))
        if not ok:
            self.failures.append(label)
        return ok

    def note(self, text: str) -> None:
        self.lines.append(f"      {text}")

    @property
    def ok(self) -> bool:
        return not self.failures

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _show(v) -> str:
    a = np.asarray(v)
    if np.iscomplexobj(a):
        return "[" + ", ".join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in a.ravel()) + "]"
    if a.dtype.kind == "f":
        a = np.round(a, 4)
    return np.array2string(a, separator=", ", max_line_width=10_000).replace("\n", "")


def run_worked_example(phi_deg: float = 20.0) -> Transcript:
    """Replay the M=4, K=5, Q=1 walk-through and the receivers on its printed vectors."""
    from .bob import decode_hfcs, decode_hfps, detect_peaks, dft, hfps_from_angles, perm_matrix, PeakVector
    from .bob import remove_rsr, rsr_trace
    from .core import decode_bits, encode_hop, int_to_bits
    from .waveform import sign_pattern_for_pairs

    tr = Transcript()
    config = RadarConfig(M=4, K=5, Q=1)
    cb = build_codebook(config)
    tr.lines.append(f"config: M=4 K=5 Q=1 L={config.L} P={config.P} E1={cb.E1} E2={cb.E2}")
    tr.check("I   combos[0..3]", cb.combos[:4], EXAMPLE_COMBOS)
    tr.check("I   perms[0..3]", cb.perms[:4], EXAMPLE_PERMS)
    c_index, p_index, k_h = encode_hop(EXAMPLE_BITS, cb)
    tr.check("II  (c_index, p_index)", (c_index, p_index), (1, 3))
    tr.check("II  k_h", k_h, EXAMPLE_K_H)
    b_h = sign_pattern_for_pairs(k_h, [0]).b_h
    tr.check("IV  b_h (pair 0 reversed)", b_h, EXAMPLE_B_H)

    # noiseless chain through the real transmitter and receiver
    link = ChannelLink(phi_deg)
    tx = synthesize_hop(k_h, b_h, link.u, config)
    rx = propagate(tx, link)
    peaks = detect_peaks(dft(rx), config.M, config.P)
    tr.check("V   peak bins", peaks.bins, EXAMPLE_BINS)
    tr.check("V   K_h", peaks.freq_set, (0, 1, 2, 4))
    c_hat, _ = decode_hfcs(peaks, cb)
    tr.check("V   HFCS bits", int_to_bits(c_hat, cb.E1), (0, 1))
    clean, pattern = remove_rsr(peaks, config.Q)
    tr.check("VI  noiseless reversal detected at peak", np.flatnonzero(pattern < 0), (0,))
    p_hat, k_hat, _, _ = decode_hfps(clean, link.gain, cb)
    tr.check("VII noiseless k_h", k_hat, EXAMPLE_K_H)
    tr.check("VII noiseless bits", decode_bits(c_hat, p_hat, cb), EXAMPLE_BITS)

    # algorithm replay on the printed noisy peak vector
    y_tilde, t2 = rsr_trace(EXAMPLE_Y_BREVE, np.array(EXAMPLE_BINS) // config.P, config.Q)
    tr.check("VI  Y(0,3)", t2.Y[0, 3], 0.1511, _PRINT_TOL)
    tr.check("VI  Y", t2.Y, EXAMPLE_Y_MATRIX, _INPUT_ROUNDING_TOL)
    tr.note("printed row 2 column 1 (2.5584) is taken as the symmetric entry 3.5584")
    tr.check("VI  y_min", t2.y_min, EXAMPLE_Y_MIN, _PRINT_TOL)
    tr.check("VI  d", t2.d, EXAMPLE_D)
    tr.check("VI  d1", t2.d1, EXAMPLE_D1)
    tr.check("VI  flipped index", t2.flipped, (0,))
    tr.check("VI  y_tilde", y_tilde, EXAMPLE_Y_TILDE, _PRINT_TOL)

    i, t1 = hfps_from_angles(EXAMPLE_OMEGA_RAW)
    tr.check("VII revised omega", t1.omega, EXAMPLE_OMEGA, _PRINT_TOL)
    tr.check("VII sorted i", t1.i_sorted, EXAMPLE_I_SORTED)
    om = t1.omega
    zig = (abs(np.exp(1j * om[t1.i_sorted[-1]]) - 1), abs(np.exp(1j * om[t1.i_sorted[0]]) - 1))
    tr.check("VII zigzag test values", zig, EXAMPLE_ZIGZAG, _PRINT_TOL)
    tr.check("VII shifted i", i, EXAMPLE_I)
    tr.check("VII P_h", perm_matrix(i), EXAMPLE_P_H)
    k_rep = np.array([0, 1, 2, 4])[i]
    tr.check("VII k_h", k_rep, EXAMPLE_K_H)
    p_rep = cb.perm_index(i)
    tr.check("VII HFPS bits", int_to_bits(p_rep, cb.E2), (0, 0, 1, 1))
    tr.check("    decoded symbol", decode_bits(c_hat, p_rep, cb), EXAMPLE_BITS)

    # the printed y_tilde phases sit a quarter turn from the printed omega
    p_beta, _, _, _ = decode_hfps(PeakVector(np.array(EXAMPLE_Y_TILDE), np.array(EXAMPLE_BINS), 20), -1j, cb)
    tr.check("    printed y_tilde with gain -j -> p_index", p_beta, 3)
    tr.lines.append("PASS" if tr.ok else f"FAIL ({len(tr.failures)} mismatches)")
    return tr


# --- analysis tables ----------------------------------------------------------

PROP1_COLUMNS = ["u_thetaphi", "mu_analytic", "mu_empirical", "sigma2_analytic", "sigma2_empirical"]


def prop1_grid(M: int, n: int = 64) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi * (M - 2) / M, n)


def run_prop1(M: int, Q: int, u_grid=None, trials: int = 100_000, seed: int = 0,
              method: str = "direct") -> Table:
    from .analysis.statistics import prop1_empirical, prop1_params

    u_grid = prop1_grid(M) if u_grid is None else np.atleast_1d(u_grid)
    table = Table(list(PROP1_COLUMNS))
    for point, u in enumerate(u_grid):
        ana = prop1_params(M, Q, float(u))
        emp = prop1_empirical(M, Q, float(u), trials, np.random.default_rng([seed, point]), method)
        table.rows.append([float(u), ana.mu_f, emp.mean, ana.sigma2_f, emp.var])
    return table


AMBIGUITY_COLUMNS = ["tau", "R_plain", "R_processed"]


def ambiguity_realization(config: RadarConfig, seed: int, realization: int, tau=None):
    """Return ``(plain, processed)`` AmbiguityGrids for one random HFCS plan.

    The default delay grid is every sample lag at ``2B`` over ``[-HT, HT]``.
    """
    from .analysis.ambiguity import hfcs_plan, processed_plan, range_ambiguity

    rng = np.random.default_rng([seed, realization])
    cb = build_codebook(config)
    if tau is None:
        n = config.H * config.L
        tau = np.arange(-n, n + 1) / config.fs
    base = hfcs_plan(cb, config.H, rng)
    k_q, c_q = processed_plan(base, config, rng)
    return range_ambiguity(base, None, config, tau), range_ambiguity(k_q, c_q, config, tau)


def run_ambiguity(config: RadarConfig, seed: int = 0, realization: int = 0) -> Table:
    plain, proc = ambiguity_realization(config, seed, realization)
    table = Table(list(AMBIGUITY_COLUMNS))
    table.rows = [[t, a, b] for t, a, b in zip(plain.tau.tolist(), plain.R.tolist(), proc.R.tolist())]
    return table


SIR_COLUMNS = ["n_targets", "sir_plain_db", "sir_processed_db"]


def run_sir(config: RadarConfig, n_targets=(2, 3, 4, 5, 6), trials: int = 500, seed: int = 0,
            plain: str = "hfcs") -> Table:
    from .analysis.ambiguity import sir_vs_targets

    cb = build_codebook(config)
    table = Table(list(SIR_COLUMNS))
    for point, n in enumerate(n_targets):
        (res,) = sir_vs_targets(config, cb, [n], trials, np.random.default_rng([seed, point]), plain)
        table.rows.append([res.n_targets, res.sir_plain_db, res.sir_processed_db])
    return table
