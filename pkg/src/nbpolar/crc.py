"""Binary CRC outer code used for list-decoder path selection.

Bit-serial MSB-first register; the generator polynomial is given as a mask
without the leading x^t term (0x07 for the 8-bit check, 0x1021 for the
16-bit CCITT check).  init/xorout default to zero, which keeps the check
linear over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CrcConfig:
    bits: int
    poly: int
    init: int = 0
    xorout: int = 0

    def __post_init__(self):
        if not 1 <= self.bits <= 32:
            raise ValueError(f"unsupported check length {self.bits}")
        if self.poly >> self.bits:
            raise ValueError("polynomial mask wider than the check length")


CRC8 = CrcConfig(bits=8, poly=0x07)
CRC16 = CrcConfig(bits=16, poly=0x1021)


def crc_remainder(msg: np.ndarray, cfg: CrcConfig) -> int:
    """Register contents after clocking the message bits through."""
    reg = cfg.init
    top = 1 << (cfg.bits - 1)
    mask = (1 << cfg.bits) - 1
    for b in np.asarray(msg, dtype=np.uint8):
        fb = ((reg & top) != 0) ^ int(b)
        reg = (reg << 1) & mask
        if fb:
            reg ^= cfg.poly
    return reg ^ cfg.xorout


def crc_append(msg: np.ndarray, cfg: CrcConfig) -> np.ndarray:
    """Systematic message followed by its t check bits (MSB first)."""
    msg = np.asarray(msg, dtype=np.uint8)
    rem = crc_remainder(msg, cfg)
    checks = np.array([(rem >> (cfg.bits - 1 - k)) & 1 for k in range(cfg.bits)],
                      dtype=np.uint8)
    return np.concatenate([msg, checks])


def crc_check(frame: np.ndarray, cfg: CrcConfig) -> bool:
    """True when the trailing t bits match the CRC of the leading bits."""
    frame = np.asarray(frame, dtype=np.uint8)
    if frame.size < cfg.bits:
        raise ValueError(f"frame shorter than the {cfg.bits}-bit check field")
    rem = crc_remainder(frame[:-cfg.bits], cfg)
    recv = 0
    for b in frame[-cfg.bits:]:
        recv = (recv << 1) | int(b)
    return rem == recv
