"""Reduced-precision floating-point emulation on top of binary64.

Values are carried as ordinary binary64 scalars or numpy arrays.  Reducing
precision means rounding a value to the nearest member of a smaller format's
value grid (round to nearest, ties to even), with gradual underflow and
overflow to infinity.  Operations are computed exactly in binary64 and the
*result* is rounded once; operands are never pre-rounded.

A format with 52 mantissa bits and 11 exponent bits has the same value grid
as binary64 itself, so rounding to it is the identity and emulated operations
are bit-identical to native ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MANTISSA_MIN = 1
MANTISSA_MAX = 52
EXPONENT_MIN = 2
EXPONENT_MAX = 11


@dataclass(frozen=True)
class FlexFormat:
    """A floating-point format: explicit mantissa bits + exponent field width.

    mantissa_bits counts the bits after the implicit leading one, so the
    significand carries mantissa_bits + 1 bits of precision for normals.
    The exponent field follows IEEE conventions: the all-ones code is
    reserved, bias is 2**(exponent_bits-1) - 1, and values below the
    smallest normal are represented on the fixed subnormal grid.
    """

    mantissa_bits: int
    exponent_bits: int = 11

    def __post_init__(self) -> None:
        if not MANTISSA_MIN <= self.mantissa_bits <= MANTISSA_MAX:
            raise ValueError(
                f"mantissa_bits must be in [{MANTISSA_MIN}, {MANTISSA_MAX}], "
                f"got {self.mantissa_bits}"
            )
        if not EXPONENT_MIN <= self.exponent_bits <= EXPONENT_MAX:
            raise ValueError(
                f"exponent_bits must be in [{EXPONENT_MIN}, {EXPONENT_MAX}], "
                f"got {self.exponent_bits}"
            )

    @property
    def emax(self) -> int:
        return 2 ** (self.exponent_bits - 1) - 1

    @property
    def emin(self) -> int:
        return 1 - self.emax

    @property
    def max_value(self) -> float:
        # (2 - 2^-m) * 2^emax, always finite in binary64 since emax <= 1023
        return float(np.ldexp(2.0 - np.ldexp(1.0, -self.mantissa_bits), self.emax))


BINARY64 = FlexFormat(52, 11)


def round_to_format(x, fmt: FlexFormat):
    """Round binary64 value(s) to the nearest value of fmt, ties to even.

    NaN stays NaN, +/-inf stay themselves, signed zeros are preserved.
    Finite values whose rounded magnitude exceeds fmt's largest finite
    value overflow to +/-inf.  Accepts scalars or arrays; returns a float
    for scalar input and an ndarray otherwise.

    The grid spacing at x is 2^(max(e-1, emin) - mantissa_bits) where
    e is the frexp exponent of x, which covers normals, the subnormal
    range (fixed spacing) and the binade crossings in one formula.  All
    the scalings below are exact in binary64, so the single rint is the
    only rounding step and inherits the FPU's ties-to-even behaviour.
    """
    arr = np.asarray(x, dtype=np.float64)
    finite = np.isfinite(arr)
    work = np.where(finite, arr, 0.0)

    _, e = np.frexp(work)
    k = np.maximum(e - 1, fmt.emin) - fmt.mantissa_bits
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = np.ldexp(work, -k)
        rounded = np.ldexp(np.rint(scaled), k)
        overflow = np.abs(rounded) > fmt.max_value
        rounded = np.where(overflow, np.copysign(np.inf, work), rounded)

    out = np.where(finite, rounded, arr)
    if np.ndim(x) == 0:
        return float(out)
    return out


_OPS = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.true_divide,
}


def flex_op(kind: str, a, b, result_fmt: FlexFormat):
    """Apply a binary op in binary64 and round the result to result_fmt.

    kind is one of "add", "sub", "mul", "div".  Division by zero and
    invalid operations follow IEEE semantics (inf / nan results), no
    exceptions are raised.
    """
    try:
        op = _OPS[kind]
    except KeyError:
        raise ValueError(f"unknown op kind {kind!r}, expected one of {sorted(_OPS)}")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        raw = op(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    return round_to_format(raw, result_fmt)
