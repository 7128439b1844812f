"""Radar configuration, HFCS/HFPS codebooks and the bit <-> hop mapping.

A hop carries ``E1 + E2`` bits. The first ``E1`` bits pick a sorted
combination of ``M`` sub-bands out of ``K`` (HFCS), the last ``E2`` bits pick
a permutation that pairs those sub-bands with the ``M`` antennas (HFPS).
Antenna ``m`` then hops to ``combo[perm[m]]``.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Largest codebook list we are willing to materialise.
MAX_CODEBOOK_ENTRIES = 1 << 22


class ConfigError(ValueError):
    """Invalid or unsupported radar / experiment configuration."""


class InputError(ValueError):
    """Malformed argument to an encoder or decoder."""


@dataclass(frozen=True)
class RadarConfig:
    """Static FH-MIMO radar parameters.

    ``B`` is in Hz and ``T`` in seconds. Each hop is sampled at ``2B`` into
    ``L = 2BT`` samples, and sub-band ``k`` shows up in DFT bin ``P*k`` with
    ``P = BT/K``.
    """

    M: int
    K: int
    H: int = 15
    B: float = 100e6
    T: float = 1e-6
    Q: int = 0
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.M < 1 or self.K < 1 or self.H < 1:
            raise ConfigError(f"M, K, H must be positive (got {self.M}, {self.K}, {self.H})")
        if self.M > self.K:
            raise ConfigError(f"need M <= K distinct sub-bands per hop (M={self.M}, K={self.K})")
        if self.B <= 0 or self.T <= 0:
            raise ConfigError("B and T must be positive")
        bt = self.B * self.T
        if abs(bt - round(bt)) > 1e-6 * max(1.0, bt) or round(bt) < 1:
            raise ConfigError(f"B*T must be a positive integer (got {bt})")
        if round(bt) % self.K:
            raise ConfigError(f"B*T/K must be an integer (B*T={round(bt)}, K={self.K})")
        if not 0 <= self.Q <= self.M // 2:
            raise ConfigError(f"need 0 <= Q <= M/2 (Q={self.Q}, M={self.M})")
        if self.Q > 0 and self.M % 2:
            raise ConfigError("sign reversal pairs antennas m and m+M/2, so M must be even when Q > 0")
        if not self.spacing_ratio > 0:
            raise ConfigError("spacing_ratio must be positive")
        e1, e2 = hfcs_bits(self.M, self.K), hfps_bits(self.M)
        if e1 >= 63 or e2 >= 63:
            raise ConfigError(f"codebook sizes 2^{e1} / 2^{e2} overflow a 64-bit count")

    @property
    def BT(self) -> int:
        return int(round(self.B * self.T))

    @property
    def L(self) -> int:
        """Samples per hop."""
        return 2 * self.BT

    @property
    def P(self) -> int:
        """DFT bin stride between adjacent sub-bands."""
        return self.BT // self.K

    @property
    def fs(self) -> float:
        return 2.0 * self.B

    @property
    def E1(self) -> int:
        return hfcs_bits(self.M, self.K)

    @property
    def E2(self) -> int:
        return hfps_bits(self.M)

    @property
    def E(self) -> int:
        return self.E1 + self.E2

    def replace(self, **changes) -> "RadarConfig":
        fields = dict(M=self.M, K=self.K, H=self.H, B=self.B, T=self.T, Q=self.Q,
                      spacing_ratio=self.spacing_ratio)
        fields.update(changes)
        return RadarConfig(**fields)


def hfcs_bits(M: int, K: int) -> int:
    """floor(log2 C(K, M)), computed on exact integers."""
    return math.comb(K, M).bit_length() - 1


def hfps_bits(M: int) -> int:
    """floor(log2 M!), computed on exact integers."""
    return math.factorial(M).bit_length() - 1


@dataclass(frozen=True)
class Codebook:
    """HFCS combinations and HFPS permutations, as integer arrays.

    ``combos`` has shape ``(2**E1, M)`` with ascending rows; ``perms`` has
    shape ``(2**E2, M)`` and each row is a bijection on ``range(M)``.
    """

    M: int
    K: int
    combos: np.ndarray
    perms: np.ndarray
    _combo_lookup: dict = field(repr=False, compare=False, default_factory=dict)
    _perm_lookup: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def E1(self) -> int:
        return int(self.combos.shape[0]).bit_length() - 1

    @property
    def E2(self) -> int:
        return int(self.perms.shape[0]).bit_length() - 1

    @property
    def E(self) -> int:
        return self.E1 + self.E2

    def combo_index(self, subset: Iterable[int]) -> int | None:
        """Index of an M-subset (any order), or None if it is not a codeword."""
        return self._combo_lookup.get(tuple(sorted(int(k) for k in subset)))

    def perm_index(self, perm: Sequence[int]) -> int | None:
        return self._perm_lookup.get(tuple(int(p) for p in perm))

    def to_csv(self, dest) -> None:
        """Write both lists as ``kind,index,e0..e{M-1}`` rows to a path or text stream."""
        if hasattr(dest, "write"):
            self._write_csv(dest)
            return
        with open(dest, "w", newline="") as fh:
            self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "index"] + [f"e{m}" for m in range(self.M)])
        for i, row in enumerate(self.combos):
            w.writerow(["combo", i, *row.tolist()])
        for i, row in enumerate(self.perms):
            w.writerow(["perm", i, *row.tolist()])


_ORDERINGS = ("lexicographic", "reverse-lexicographic")


def _take(iterator, n, what):
    if n > MAX_CODEBOOK_ENTRIES:
        raise ConfigError(f"{what} list of {n} entries is too large to materialise")
    out = np.array(list(itertools.islice(iterator, n)), dtype=np.int64)
    return out.reshape(n, -1)


def build_codebook(config: RadarConfig | tuple[int, int],
                   combo_order: str = "lexicographic",
                   perm_order: str = "reverse-lexicographic") -> Codebook:
    """Build the HFCS/HFPS constellations for ``(M, K)``.

    Both lists keep the first ``2**E`` entries of the chosen ordering. The
    defaults give combos ``{0,1,2,3}, {0,1,2,4}, ...`` and permutations
    ``(3,2,1,0), (3,2,0,1), ...`` for ``M=4, K=5``.
    """
    if isinstance(config, RadarConfig):
        M, K = config.M, config.K
    else:
        M, K = config
    for order in (combo_order, perm_order):
        if order not in _ORDERINGS:
            raise ConfigError(f"unknown ordering policy {order!r}; choose from {_ORDERINGS}")

    n_combo = 1 << hfcs_bits(M, K)
    n_perm = 1 << hfps_bits(M)
    if combo_order == "lexicographic":
        combos_it = itertools.combinations(range(K), M)
    else:
        combos_it = (tuple(sorted(c)) for c in itertools.combinations(range(K - 1, -1, -1), M))
    # itertools.permutations follows the order of its input sequence
    base = range(M) if perm_order == "lexicographic" else range(M - 1, -1, -1)
    combos = _take(combos_it, n_combo, "combination")
    perms = _take(itertools.permutations(base), n_perm, "permutation")

    return Codebook(
        M=M, K=K, combos=combos, perms=perms,
        _combo_lookup={tuple(r): i for i, r in enumerate(combos.tolist())},
        _perm_lookup={tuple(r): i for i, r in enumerate(perms.tolist())},
    )


def bits_to_int(bits: Sequence[int]) -> int:
    """Big-endian: ``[0, 0, 1, 1] -> 3``."""
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >> width:
        raise InputError(f"{value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - j)) & 1 for j in range(width)], dtype=np.int8)


def encode_hop(bits: Sequence[int], codebook: Codebook) -> tuple[int, int, np.ndarray]:
    """Map ``E1 + E2`` bits to ``(c_index, p_index, k_h)``."""
    bits = np.asarray(bits).ravel()
    if bits.size != codebook.E:
        raise InputError(f"expected {codebook.E} bits, got {bits.size}")
    if np.any((bits != 0) & (bits != 1)):
        raise InputError("bits must be 0/1")
    c_index = bits_to_int(bits[:codebook.E1])
    p_index = bits_to_int(bits[codebook.E1:])
    k_h = codebook.combos[c_index][codebook.perms[p_index]]
    return c_index, p_index, k_h


def decode_bits(c_index: int, p_index: int, codebook: Codebook) -> np.ndarray:
    if not 0 <= c_index < codebook.combos.shape[0]:
        raise InputError(f"combination index {c_index} out of range")
    if not 0 <= p_index < codebook.perms.shape[0]:
        raise InputError(f"permutation index {p_index} out of range")
    return np.concatenate([int_to_bits(c_index, codebook.E1), int_to_bits(p_index, codebook.E2)])


@dataclass(frozen=True)
class HopMessage:
    """One hop's transmitted symbol."""

    bits: np.ndarray
    c_index: int
    p_index: int
    k_h: np.ndarray
    b_h: np.ndarray

    @property
    def reversed_antennas(self) -> np.ndarray:
        return np.flatnonzero(self.b_h < 0)
