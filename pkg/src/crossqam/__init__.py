"""4D cross-QAM constellations with a Gray bits-to-signal mapping.

Includes baseline 4D constellations, DFT-s-OFDM PAPR measurement and
uncoded/LDPC-coded BER simulation over AWGN.
"""
from .constellation import (
    Constellation2D,
    Constellation4D,
    NeighborStats,
    build_cross_qam,
    build_dicyclic,
    build_square_qam,
    build_welti_class1,
    constellation_papr,
    neighbor_stats,
    trim_high_power,
)
from .detection import SnrSpec, add_awgn, detect_ml, llr, snr_to_n0
from .estimators import Modulator4D, SoftDemapper
from .exceptions import (
    ConfigurationError,
    ConstructionFailedError,
    InvalidParameterError,
    NotACodewordError,
)
from .graymap import (
    Labeling4D,
    demap_hard,
    enumerate_used,
    gray_labeling,
    map12,
    map_general,
    per_bit_reliability,
    progressive_labeling,
    verify_gray,
)
from .ldpc import ParityCheckMatrix, build_h, decode_bp, encode
from .ofdm import WaveformConfig, ccdf, dfts_ofdm_symbol, papr_db

__version__ = "0.1.0"
