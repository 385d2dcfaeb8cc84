"""Bit-accurate software model of a Q32.32 PLUGIN bandwidth selector.

The fixed-point pipeline lives in :mod:`fixedkde.plugin`, its elementary
functions in :mod:`fixedkde.elementary`, and the binary64 reference used to
certify it in :mod:`fixedkde.oracle`.
"""

from .errors import (
    ConvergenceError,
    DegenerateDataError,
    DivByZeroError,
    DomainError,
    EmptyInputError,
    ParseError,
    RangeError,
)
from .fixedq import ONE, ZERO, FixedQ, decode, encode
from .kde import KdeCurve, kde_curve, kde_eval
from .oracle import OracleResult, compare, oracle_bandwidth
from .plugin import BandwidthResult, Dataset, Strategy, bandwidth
from .remez import PolyApprox, remez_minimax

__version__ = "0.1.0"

__all__ = [
    "BandwidthResult",
    "ConvergenceError",
    "Dataset",
    "DegenerateDataError",
    "DivByZeroError",
    "DomainError",
    "EmptyInputError",
    "FixedQ",
    "KdeCurve",
    "ONE",
    "OracleResult",
    "ParseError",
    "PolyApprox",
    "RangeError",
    "Strategy",
    "ZERO",
    "bandwidth",
    "compare",
    "decode",
    "encode",
    "kde_curve",
    "kde_eval",
    "oracle_bandwidth",
    "remez_minimax",
]
