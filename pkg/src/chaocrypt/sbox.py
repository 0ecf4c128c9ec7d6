"""Fixed 16x16 byte-substitution table with forward/inverse lookup.

The embedded table is printed 1-indexed (values 1..256) in its source; every
entry is decremented by 1 here to act on bytes.  Rows 17-18 of the printed
table duplicate rows 15-16 and are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Row-major 16x16 table, already shifted to the 0..255 range.
SBOX_FORWARD = np.array([
    52, 74, 32, 113, 0, 229, 175, 254, 130, 89, 211, 108, 27, 151, 200, 182,
    129, 16, 79, 171, 255, 46, 9, 146, 84, 236, 104, 125, 179, 202, 213, 55,
    30, 230, 87, 210, 119, 131, 106, 168, 181, 48, 145, 207, 36, 13, 251, 76,
    192, 11, 163, 31, 51, 118, 184, 135, 218, 101, 44, 78, 249, 81, 237, 148,
    173, 222, 194, 86, 34, 159, 228, 73, 12, 241, 58, 139, 103, 21, 176, 120,
    227, 57, 188, 248, 204, 20, 157, 209, 43, 70, 174, 7, 133, 111, 114, 80,
    6, 98, 212, 231, 68, 201, 33, 28, 253, 155, 128, 83, 122, 190, 63, 165,
    247, 116, 97, 42, 17, 220, 75, 189, 150, 195, 95, 232, 160, 50, 137, 14,
    40, 140, 61, 149, 221, 177, 198, 107, 67, 23, 2, 250, 94, 121, 164, 239,
    124, 197, 158, 141, 238, 240, 82, 47, 169, 4, 183, 49, 214, 72, 26, 99,
    105, 152, 245, 60, 85, 10, 142, 224, 127, 162, 22, 180, 205, 35, 71, 219,
    223, 243, 8, 185, 136, 167, 53, 90, 96, 126, 77, 18, 156, 235, 38, 193,
    91, 191, 25, 3, 153, 66, 252, 196, 225, 45, 117, 166, 56, 208, 110, 138,
    69, 93, 134, 206, 102, 59, 215, 115, 24, 186, 244, 144, 226, 172, 1, 41,
    178, 39, 234, 100, 170, 88, 112, 5, 62, 143, 203, 217, 65, 246, 147, 29,
    154, 161, 123, 64, 187, 109, 19, 54, 199, 216, 233, 37, 15, 132, 92, 242,
], dtype=np.uint8)

SBOX_INVERSE = np.empty(256, dtype=np.uint8)
SBOX_INVERSE[SBOX_FORWARD] = np.arange(256, dtype=np.uint8)


def sbox_forward(b: int) -> int:
    """Substitute one byte through the forward table."""
    return int(SBOX_FORWARD[b])


def sbox_inverse(b: int) -> int:
    """Invert one byte: sbox_inverse(sbox_forward(x)) == x."""
    return int(SBOX_INVERSE[b])


def substitute(data: np.ndarray) -> np.ndarray:
    """Forward-substitute a uint8 array elementwise."""
    return SBOX_FORWARD[data]


def substitute_inverse(data: np.ndarray) -> np.ndarray:
    """Inverse-substitute a uint8 array elementwise."""
    return SBOX_INVERSE[data]


@dataclass
class SboxReport:
    """Structural validation result for a 256-entry substitution table."""

    is_bijective: bool
    duplicate_values: list = field(default_factory=list)
    missing_values: list = field(default_factory=list)
    fixed_point_count: int = 0

    def to_dict(self) -> dict:
        return {
            "is_bijective": self.is_bijective,
            "duplicate_values": list(self.duplicate_values),
            "missing_values": list(self.missing_values),
            "fixed_point_count": self.fixed_point_count,
        }


def validate_sbox(table=None) -> SboxReport:
    """Check a table (default: the embedded one) for bijectivity and anomalies."""
    table = SBOX_FORWARD if table is None else np.asarray(table)
    counts = np.bincount(table.astype(np.int64), minlength=256)
    duplicates = [int(v) for v in np.nonzero(counts > 1)[0]]
    missing = [int(v) for v in np.nonzero(counts == 0)[0]]
    fixed = int(np.sum(table == np.arange(len(table))))
    return SboxReport(
        is_bijective=len(table) == 256 and not duplicates and not missing,
        duplicate_values=duplicates,
        missing_values=missing,
        fixed_point_count=fixed,
    )
