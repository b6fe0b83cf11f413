"""Polar codes with memory: encoding, decoding, PER models and a simulation harness.

Consecutive polar blocks share ``K_p`` mutual information bits placed on the
least reliable information positions. When exactly one block of a chunk
fails its CRC, it is decoded again with those bits frozen to the values
recovered from the blocks that passed.
"""

from .analysis import (AlphaEstimate, AlphaRecord, additional_rate, direct_extension_per,
                       estimate_alpha, general_per, pcm2_per, pcm_per, union_bound)
from .bp_decoder import bp_decode
from .channel import ChannelParams, chunk_rng, modulate, transmit
from .codec import FreezeMask, PolarCode, bit_reversal_permutation, polar_encode, polar_transform
from .construction import (CodeConfig, CodeLayout, DecoderKind, RateScheme, ReliabilityProfile,
                           build_layout, compute_reliability, construct, effective_rate,
                           rate_matched_config)
from .crc import CRC12, CrcSpec, crc_bits, crc_check
from .harness import ExperimentSpec, FigureId, SweepResult, System, run_figure, run_sweep
from .latency_model import LatencyParams, LatencyTrace, is_latency, latency_report, lli_latency
from .pcm import (BlockDecoder, ChunkResult, Scheme, decode_chunk, decode_chunks,
                  encode_chunk_general, encode_chunk_pairwise, recover_mutual_bits)
from .sc_decoder import sc_decode
from .scl_decoder import scl_decode

__version__ = "0.1.0"
