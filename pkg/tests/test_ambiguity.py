import numpy as np
import pytest

from fhdfrc.analysis.ambiguity import (
    CAPPED_DB, AmbiguityGrid, autocorrelation_oracle, chi, conventional_plan, draw_target_delays,
    hfcs_plan, msr_db, processed_plan, range_ambiguity, sir_vs_targets,
)
from fhdfrc.core import ConfigError, InputError, RadarConfig, build_codebook
from fhdfrc.waveform import epc_phase

CFG = RadarConfig(M=4, K=20, H=4)


def test_chi_values():
    T = 1e-6
    assert chi(0.0, 0.0, T) == pytest.approx(T)
    assert chi(T / 2, 0.0, T) == pytest.approx(T / 2)
    assert chi(T, 0.0, T) == 0
    assert chi(-1.5 * T, 3e5, T) == 0
    # rem * sinc(y rem) vanishes when y rem is an integer
    assert abs(chi(0.0, 1 / T, T)) < 1e-20


def _compare_with_oracle(k_plan, coeffs, cfg, over=4):
    tau, R_ref = autocorrelation_oracle(k_plan, coeffs, cfg, over)
    R = range_ambiguity(k_plan, coeffs, cfg, tau).R
    peak = R_ref[tau.size // 2]
    return abs(R[tau.size // 2] - peak) / peak, np.max(np.abs(R - R_ref)) / peak


def test_matches_oracle_unit_coefficients():
    rng = np.random.default_rng(0)
    plan = conventional_plan(CFG, rng)
    rel_peak, rel_any = _compare_with_oracle(plan, None, CFG)
    assert rel_peak < 1e-2
    assert rel_any < 1e-3


def test_matches_oracle_with_coefficients():
    rng = np.random.default_rng(1)
    cb = build_codebook(CFG)
    k, c = processed_plan(hfcs_plan(cb, CFG.H, rng), CFG, rng)
    rel_peak, rel_any = _compare_with_oracle(k, c, CFG)
    assert rel_peak < 1e-2
    assert rel_any < 2e-3


def test_peak_at_zero_equals_energy():
    rng = np.random.default_rng(2)
    plan = conventional_plan(CFG, rng)
    g = range_ambiguity(plan, None, CFG, np.linspace(-CFG.H * CFG.T, CFG.H * CFG.T, 2001))
    # orthogonal tones within a hop: R(0) = H M T
    assert g.at_zero() == pytest.approx(CFG.H * CFG.M * CFG.T)
    assert g.at_zero() == pytest.approx(g.R.max())
    assert np.all(g.R[np.abs(g.tau) >= CFG.H * CFG.T] < 1e-12 * g.at_zero())


def test_permutation_invariance():
    rng = np.random.default_rng(3)
    cfg = RadarConfig(M=8, K=20, H=6)
    cb = build_codebook(cfg)
    base = hfcs_plan(cb, cfg.H, rng)
    tau = rng.uniform(-cfg.H * cfg.T, cfg.H * cfg.T, 500)
    R0 = range_ambiguity(base, None, cfg, tau).R
    shuffled = np.array([row[rng.permutation(8)] for row in base])
    R1 = range_ambiguity(shuffled, None, cfg, tau).R
    assert np.max(np.abs(R1 - R0)) <= 1e-9 * R0.max()


def test_input_checks():
    with pytest.raises(InputError):
        range_ambiguity(np.zeros((3, 5), int), None, CFG, [0.0])
    with pytest.raises(InputError):
        range_ambiguity(np.zeros((3, 4), int), np.ones((3, 3)), CFG, [0.0])
    with pytest.raises(InputError):
        range_ambiguity(np.zeros((3, 4), int), None, CFG, [])


def test_msr_cap_and_value():
    g = AmbiguityGrid(np.array([-2.0, 0.0, 2.0]), np.array([0.0, 4.0, 0.0]), np.ones(1))
    assert msr_db(g, 1.0) == CAPPED_DB
    g = AmbiguityGrid(np.array([-2.0, -0.5, 0.0, 2.0]), np.array([0.4, 3.0, 4.0, 0.04]), np.ones(1))
    assert msr_db(g, 1.0) == pytest.approx(20.0)


def test_processed_plan_structure():
    rng = np.random.default_rng(4)
    cb = build_codebook(CFG)
    base = hfcs_plan(cb, CFG.H, rng)
    k, c = processed_plan(base, CFG, rng, u_phi=0.3)
    assert np.array_equal(np.sort(k, axis=1), base)
    assert np.allclose(np.abs(c), 1)
    signs = c / epc_phase(np.arange(CFG.M), CFG.M, 0.3)[None, :]
    assert np.allclose(signs.imag, 0)
    assert np.all(np.sum(signs.real < 0, axis=1) == CFG.M // 2)


def test_target_delays():
    rng = np.random.default_rng(5)
    for n in (2, 4, 6):
        d = draw_target_delays(n, CFG, rng)
        pts = np.sort(np.append(d, 0.0))
        assert d.size == n - 1
        assert np.all(np.diff(pts) >= CFG.T)
        assert np.all(np.abs(d) <= CFG.H * CFG.T)
    with pytest.raises(ConfigError):
        draw_target_delays(1, CFG, rng)
    with pytest.raises(ConfigError):
        draw_target_delays(2 * CFG.H + 2, CFG, rng)


def test_sir_runs_and_orders():
    cfg = RadarConfig(M=8, K=20, H=15)
    res = sir_vs_targets(cfg, build_codebook(cfg), [2], 40, np.random.default_rng(6))
    assert res[0].n_targets == 2
    assert np.isfinite(res[0].sir_plain_db) and np.isfinite(res[0].sir_processed_db)
    with pytest.raises(ConfigError):
        sir_vs_targets(cfg, build_codebook(cfg), [2], 1, np.random.default_rng(0), plain="chirp")
