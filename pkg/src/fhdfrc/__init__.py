"""Secure FH-MIMO dual-function radar-communication simulator.

Information rides on which sub-bands a hop uses (HFCS) and on how they are
assigned to antennas (HFPS). Element-wise phase compensation (EPC) makes the
assignment readable only at the intended receiver's angle, and random sign
reversal (RSR) scrambles it for everyone else.
"""

from .core import (
    Codebook, ConfigError, HopMessage, InputError, RadarConfig, bits_to_int, build_codebook,
    decode_bits, encode_hop, int_to_bits,
)
from .channel import ChannelLink, beamspace_aod, ebn0_db, noise_power_for_snr, propagate, steering_vector
from .waveform import draw_sign_pattern, epc_phase, make_hop, synthesize_hop, synthesize_pulse
from .bob import PeakVector, DecodeResult, bob_decode_symbol, decode_hfcs, decode_hfps, detect_peaks, dft, remove_rsr
from .eve import EveKnowledge, eve_decode_symbol, eve_detect_permutation

__version__ = "0.1.0"
