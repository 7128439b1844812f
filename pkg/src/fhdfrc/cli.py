"""Command line entry point: ``fhdfrc <command> [options]``."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import experiments as ex
from .core import ConfigError, InputError, RadarConfig, build_codebook


def _radar_args(p, M=4, K=20, Q=2):
    p.add_argument("--M", type=int, default=M)
    p.add_argument("--K", type=int, default=K)
    p.add_argument("--H", type=int, default=15)
    p.add_argument("--B-hz", type=float, default=100e6)
    p.add_argument("--T-s", type=float, default=1e-6)
    p.add_argument("--Q", type=int, default=Q)
    p.add_argument("--spacing-ratio", type=float, default=0.5)


def _radar(a) -> RadarConfig:
    return RadarConfig(M=a.M, K=a.K, H=a.H, B=a.B_hz, T=a.T_s, Q=a.Q, spacing_ratio=a.spacing_ratio)


def _mc_args(p):
    p.add_argument("--config", help="key=value run file; overrides the radar options")
    p.add_argument("--scenario", default="BobProposed",
                   help="one of: " + ", ".join(s.value for s in ex.Scenario))
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: stdout)")


def _emit(table: ex.Table, out):
    if out:
        table.write(out)
    else:
        sys.stdout.write(table.to_csv_text())


def _spec_from(a, snr) -> ex.RunSpec:
    if a.config:
        spec = ex.load_config(a.config)
        if a.out:
            spec.out = a.out
        return spec
    return ex.RunSpec(_radar(a), ex.Scenario.parse(a.scenario), snr, trials=a.trials,
                      seed=a.seed, out=a.out, phi_deg=getattr(a, "phi_deg", None))


def cmd_ser_sweep(a):
    snr = ex.snr_grid(a.snr_db_start, a.snr_db_stop, a.snr_db_step)
    spec = _spec_from(a, snr)
    _emit(ex.run_ser_sweep(spec), spec.out)


def cmd_angle_sweep(a):
    spec = _spec_from(a, (a.gamma_db,))
    # the sweep always runs at --gamma-db; a config file may still pin phi_deg
    spec.snr_db = (a.gamma_db,)
    if spec.phi_deg is None:
        spec.phi_deg = a.phi_deg
    spec.angles_deg = tuple(ex.angle_grid(a.step))
    _emit(ex.run_angle_sweep(spec), spec.out)


def cmd_prop1(a):
    u = None if a.u is None else np.array(a.u)
    t = ex.run_prop1(a.M, a.Q, ex.prop1_grid(a.M, a.points) if u is None else u,
                     a.trials, a.seed, a.method)
    _emit(t, a.out)


def cmd_ambiguity(a):
    _emit(ex.run_ambiguity(_radar(a), a.seed, a.realization), a.out)


def cmd_sir(a):
    _emit(ex.run_sir(_radar(a), a.targets, a.trials, a.seed, a.plain), a.out)


def cmd_example(a):
    t0 = time.perf_counter()
    tr = ex.run_worked_example()
    sys.stdout.write(tr.text())
    sys.stdout.write(f"elapsed {time.perf_counter() - t0:.3f} s\n")
    return 0 if tr.ok else 1


def cmd_dump_codebook(a):
    cb = build_codebook((a.M, a.K), a.combo_order, a.perm_order)
    cb.to_csv(a.out if a.out else sys.stdout)


def cmd_dump_waveform(a):
    from .core import int_to_bits
    from .channel import beamspace_aod
    from .waveform import dump_waveform, make_hop, synthesize_hop

    config = _radar(a)
    cb = build_codebook(config)
    rng = np.random.default_rng(a.seed)
    bits = rng.integers(0, 2, cb.E) if a.symbol is None else int_to_bits(a.symbol, cb.E)
    hop = make_hop(bits, cb, config.Q, rng)
    buf = synthesize_hop(hop.k_h, hop.b_h, float(beamspace_aod(a.phi_deg, config.spacing_ratio)), config)
    dump_waveform(a.out, buf, config)
    print(f"bits={''.join(map(str, hop.bits))} k_h={hop.k_h.tolist()} b_h={hop.b_h.astype(int).tolist()}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fhdfrc", description="Secure FH-MIMO DFRC simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ser-sweep", help="SER against SNR for one scenario")
    _radar_args(p)
    _mc_args(p)
    p.add_argument("--snr-db-start", type=float, default=-10.0)
    p.add_argument("--snr-db-stop", type=float, default=-2.0)
    p.add_argument("--snr-db-step", type=float, default=2.0)
    p.add_argument("--phi-deg", type=float, default=None, help="fix Bob's angle")
    p.set_defaults(func=cmd_ser_sweep)

    p = sub.add_parser("angle-sweep", help="SER against receiver angle, Bob fixed")
    _radar_args(p, M=6, Q=3)
    _mc_args(p)
    p.add_argument("--phi-deg", type=float, default=-30.0)
    p.add_argument("--gamma-db", type=float, default=-3.0)
    p.add_argument("--step", type=float, default=0.5)
    p.set_defaults(func=cmd_angle_sweep, trials=2000)

    p = sub.add_parser("prop1", help="mean and variance of the scrambled Eve metric")
    p.add_argument("--M", type=int, default=8)
    p.add_argument("--Q", type=int, default=2)
    p.add_argument("--u", type=float, nargs="*", default=None, help="angles (rad); default: region grid")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--method", choices=("direct", "conditional"), default="direct")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_prop1)

    p = sub.add_parser("ambiguity", help="range ambiguity, plain vs EPC+RSR")
    _radar_args(p, M=8, Q=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--realization", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ambiguity)

    p = sub.add_parser("sir", help="SIR against number of targets")
    _radar_args(p, M=8, Q=0)
    p.add_argument("--targets", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--plain", choices=("hfcs", "conventional"), default="hfcs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sir)

    p = sub.add_parser("example", help="M=4, K=5 walk-through with intermediate values")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("dump-codebook", help="write the HFCS/HFPS lists as CSV")
    p.add_argument("--M", type=int, default=4)
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--combo-order", default="lexicographic")
    p.add_argument("--perm-order", default="reverse-lexicographic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump_codebook)

    p = sub.add_parser("dump-waveform", help="write one hop's antenna buffers as raw float64")
    _radar_args(p)
    p.add_argument("--phi-deg", type=float, default=0.0)
    p.add_argument("--symbol", type=int, default=None, help="symbol as an integer; default random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dump_waveform)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return int(rc or 0)


if __name__ == "__main__":
    sys.exit(main())
