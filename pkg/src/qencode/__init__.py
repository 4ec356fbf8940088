"""Structured amplitude encoding: pattern declarations compiled to verified {CX, U3} circuits."""

from .circuit import Circuit, Gate
from .encoding import ValidationError, encode
from .mps import encode_mps, encode_mps_from_tensors
from .patterns import (
    Dicke,
    EncodingInfo,
    Fourier,
    Geometric,
    Hamming,
    Partition,
    PatternError,
    Polynomial,
    Sparse,
    Square,
    Staircase,
    Step,
    Sum,
    Tensor,
    Walsh,
    build_vector,
)
from .predict import PredictResult, predict_gates
from .qasm import to_qasm

__all__ = [
    "Circuit",
    "Dicke",
    "EncodingInfo",
    "Fourier",
    "Gate",
    "Geometric",
    "Hamming",
    "Partition",
    "PatternError",
    "Polynomial",
    "PredictResult",
    "Sparse",
    "Square",
    "Staircase",
    "Step",
    "Sum",
    "Tensor",
    "ValidationError",
    "Walsh",
    "build_vector",
    "encode",
    "encode_mps",
    "encode_mps_from_tensors",
    "predict_gates",
    "to_qasm",
]
