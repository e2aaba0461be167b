"""Soft-bit rate-distortion image codec."""

from ._softbit import (
    SoftbitError,
    bpp,
    compress,
    decode_indices,
    decompress,
    dequantize,
    encode_indices,
    evaluate,
    quantize,
    run_cli,
    soft_bits,
)

__all__ = [
    "SoftbitError",
    "bpp",
    "compress",
    "decode_indices",
    "decompress",
    "dequantize",
    "encode_indices",
    "evaluate",
    "quantize",
    "run_cli",
    "soft_bits",
]
