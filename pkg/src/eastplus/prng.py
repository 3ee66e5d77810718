"""Counter-based random stream for projection matrix entries.

Every matrix entry (row r, column q) gets an independent uniform variate
computed by hashing (seed, r, q) with two rounds of the splitmix64
finalizer. Nothing is stateful: any node can generate any row, and the
base station regenerates the identical matrix from the seed alone. The
compiled and numpy kernels implement the same stream; this module is the
plain-integer reference they are tested against.

Stream definition (all arithmetic mod 2^64, r and q zero-based):

    row_key(seed, r) = mix64(seed XOR (0x9E3779B97F4A7C15 * (r+1)))
    h(seed, r, q)    = mix64(row_key XOR (0xC2B2AE3D27D4EB4F * (q+1)))
    u01              = (h >> 11) * 2^-53        # uniform in [0, 1)

Three-point mapping with per-column probability g (value v = sqrt(1/g)):

    u01 <  g/2      -> +v
    u01 >= 1 - g/2  -> -v
    otherwise       ->  0
"""

import math

MASK64 = (1 << 64) - 1
ROW_MULT = 0x9E3779B97F4A7C15
COL_MULT = 0xC2B2AE3D27D4EB4F


def mix64(z):
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def row_key(seed, r):
    """Per-row hash key; r is the zero-based row index."""
    return mix64((seed & MASK64) ^ ((ROW_MULT * (r + 1)) & MASK64))


def entry_hash(seed, r, q):
    """64-bit hash of entry (r, q), both zero-based."""
    return mix64(row_key(seed, r) ^ ((COL_MULT * (q + 1)) & MASK64))


def entry_u01(seed, r, q):
    """Uniform variate in [0, 1) for entry (r, q)."""
    return (entry_hash(seed, r, q) >> 11) * 2.0**-53


def entry_value(seed, r, q, g):
    """Three-point projection entry for column probability g in (0, 1]."""
    u = entry_u01(seed, r, q)
    if u < 0.5 * g:
        return math.sqrt(1.0 / g)
    if u >= 1.0 - 0.5 * g:
        return -math.sqrt(1.0 / g)
    return 0.0
