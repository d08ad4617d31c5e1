"""Code description and two-stage encoding.

The generator is the r-fold Kronecker power of the 2x2 kernel
[[1, 0], [mu, 1]] with a (generally different) nonzero multiplier mu per
Kronecker level.  Encoding applies the per-symbol linear transformation and
then the q-ary butterfly in natural order; the bit-reversal permutation is
applied to the codeword symbols so the receiver sees them in the order the
successive-cancellation recursions assume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .crc import CrcConfig
from .gf import Field, LinearTransform, build_field, make_transform


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Involutive permutation reversing the log2(n) index bits."""
    r = n.bit_length() - 1
    if 1 << r != n:
        raise ValueError(f"n={n} is not a power of two")
    idx = np.arange(n)
    out = np.zeros(n, dtype=np.int64)
    for b in range(r):
        out |= ((idx >> b) & 1) << (r - 1 - b)
    return out


def default_multiplier_exponents(q: int, r: int) -> list[int]:
    """Level-j multiplier exponent 2^(j-1) mod (q-1); alpha has order q-1."""
    return [pow(2, j - 1, q - 1) if q > 2 else 0 for j in range(1, r + 1)]


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Symbol-level transform: length n = 2^r and one multiplier per level.

    ``multipliers[j-1]`` is the nonzero element scaling the repeated symbol
    at Kronecker level j (level 1 couples adjacent inputs).
    """

    n: int
    multipliers: tuple[int, ...]

    def __post_init__(self):
        r = self.n.bit_length() - 1
        if 1 << r != self.n:
            raise ValueError(f"n={self.n} is not a power of two")
        if len(self.multipliers) != r:
            raise ValueError(
                f"need {r} multipliers for n={self.n}, got {len(self.multipliers)}")
        if any(m == 0 for m in self.multipliers):
            raise ValueError("kernel multipliers must be nonzero")

    @property
    def r(self) -> int:
        return self.n.bit_length() - 1


def make_kernel(fld: Field, n: int,
                exponents: list[int] | None = None) -> KernelSpec:
    if exponents is None:
        exponents = default_multiplier_exponents(fld.q, n.bit_length() - 1)
    mults = tuple(fld.pow_alpha(e) for e in exponents)
    return KernelSpec(n=n, multipliers=mults)


def generator_matrix(kernel: KernelSpec, fld: Field) -> np.ndarray:
    """n x n q-ary generator built by the block recursion
    G_n = [[G_{n/2}, 0], [mu_r * G_{n/2}, G_{n/2}]]."""
    g = np.array([[1]], dtype=np.int64)
    for j in range(kernel.r):
        mu = kernel.multipliers[j]
        half = g.shape[0]
        out = np.zeros((2 * half, 2 * half), dtype=np.int64)
        out[:half, :half] = g
        out[half:, :half] = fld.mul_table[mu][g]
        out[half:, half:] = g
        g = out
    return g


def polar_transform(fld: Field, kernel: KernelSpec, v: np.ndarray) -> np.ndarray:
    """Natural-order butterfly c = v G_n over the last axis (batched).

    O(n log n) field operations; level j couples positions at stride
    2^(j-1) as x[a] += mu_j * x[b].
    """
    v = np.asarray(v)
    n = kernel.n
    if v.shape[-1] != n:
        raise ValueError(f"expected length-{n} symbol vectors, got {v.shape[-1]}")
    x = np.array(v, dtype=np.int64)
    lead = x.shape[:-1]
    for j in range(kernel.r):
        s = 1 << j
        mu_row = fld.mul_table[kernel.multipliers[j]]
        blk = x.reshape(lead + (n // (2 * s), 2, s))
        blk[..., 0, :] ^= mu_row[blk[..., 1, :]]
    return x


@dataclass(frozen=True)
class AckDesign:
    """Active-check bits: one promoted frozen bit per partially-frozen symbol.

    ``bit_positions[i]`` is the flat (1-based) index of the i-th check bit;
    ``sources[i]`` are the flat indices of the unfrozen bits whose parity it
    carries, after random puncturing with the recorded seed.
    """

    bit_positions: tuple[int, ...]
    sources: tuple[tuple[int, ...], ...]
    seed: int | None = None

    def __post_init__(self):
        if len(self.bit_positions) != len(self.sources):
            raise ValueError("one source set per active-check bit required")


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """Complete description of one code instance.

    ``unfrozen_bits`` is the sorted 1-based flat index set carrying payload
    (information plus CRC) bits; everything else is frozen to zero except
    active-check positions, which are parity functions of earlier payload
    bits.  Flat index (i, j) <-> m*(i-1) + j.
    """

    field: Field
    transform: LinearTransform
    kernel: KernelSpec
    payload_bits: int                 # information bits K (CRC excluded)
    unfrozen_bits: tuple[int, ...]    # sorted, 1-based, length K + t
    crc: CrcConfig | None = None
    ack: AckDesign | None = None
    bit_reversal: bool = True

    def __post_init__(self):
        if tuple(sorted(self.unfrozen_bits)) != self.unfrozen_bits:
            raise ValueError("unfrozen_bits must be sorted")
        t = self.crc.bits if self.crc else 0
        if len(self.unfrozen_bits) != self.payload_bits + t:
            raise ValueError(
                f"|B|={len(self.unfrozen_bits)} != K + t = {self.payload_bits + t}")
        if self.unfrozen_bits and not (
                1 <= self.unfrozen_bits[0] and self.unfrozen_bits[-1] <= self.bit_length):
            raise ValueError("unfrozen bit index out of range")

    @property
    def n(self) -> int:
        return self.kernel.n

    @property
    def bit_length(self) -> int:
        """Equivalent length in bits, N = m*n."""
        return self.field.m * self.kernel.n

    @property
    def rate(self) -> float:
        return self.payload_bits / self.bit_length

    @cached_property
    def unfrozen_mask(self) -> np.ndarray:
        """(N,) bool, 0-based; True at payload bit positions."""
        mask = np.zeros(self.bit_length, dtype=bool)
        mask[np.array(self.unfrozen_bits, dtype=np.int64) - 1] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def ack_mask(self) -> np.ndarray:
        mask = np.zeros(self.bit_length, dtype=bool)
        if self.ack:
            mask[np.array(self.ack.bit_positions, dtype=np.int64) - 1] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def frozen_bits(self) -> tuple[int, ...]:
        """B^c: neither payload nor active-check, 1-based."""
        free = ~(self.unfrozen_mask | self.ack_mask)
        return tuple(int(i) + 1 for i in np.nonzero(free)[0])

    @cached_property
    def unfrozen_symbols(self) -> tuple[int, ...]:
        """Symbols containing at least one unfrozen bit (1-based)."""
        per = self.unfrozen_mask.reshape(self.n, self.field.m)
        return tuple(int(i) + 1 for i in np.nonzero(per.any(axis=1))[0])

    @cached_property
    def frozen_symbols(self) -> tuple[int, ...]:
        per = self.unfrozen_mask.reshape(self.n, self.field.m)
        return tuple(int(i) + 1 for i in np.nonzero(~per.any(axis=1))[0])

    @cached_property
    def partially_frozen_symbols(self) -> tuple[int, ...]:
        """Unfrozen symbols with fewer than m unfrozen bits (1-based)."""
        per = self.unfrozen_mask.reshape(self.n, self.field.m)
        cnt = per.sum(axis=1)
        return tuple(int(i) + 1 for i in np.nonzero((cnt > 0) & (cnt < self.field.m))[0])

    @cached_property
    def channel_order(self) -> np.ndarray:
        """Codeword symbol permutation applied before transmission."""
        if self.bit_reversal:
            return bit_reversal_permutation(self.n)
        return np.arange(self.n)


def frame_to_symbols(spec: CodeSpec, payload: np.ndarray) -> np.ndarray:
    """Scatter payload bits into the unfrozen positions and pack symbols.

    Frozen bits are zero; active-check bits are the parities of their
    (already placed) source bits.  Returns the length-n symbol vector fed
    to the encoder.
    """
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape != (len(spec.unfrozen_bits),):
        raise ValueError(
            f"payload length {payload.shape} != |B| = {len(spec.unfrozen_bits)}")
    bits = np.zeros(spec.bit_length, dtype=np.uint8)
    bits[np.array(spec.unfrozen_bits, dtype=np.int64) - 1] = payload
    if spec.ack:
        for pos, src in zip(spec.ack.bit_positions, spec.ack.sources):
            src_idx = np.array(src, dtype=np.int64) - 1
            if not spec.unfrozen_mask[src_idx].all():
                raise RuntimeError("active-check source outside unfrozen set")
            bits[pos - 1] = bits[src_idx].sum() & 1
    weights = 1 << np.arange(spec.field.m, dtype=np.int64)
    return bits.reshape(spec.n, spec.field.m).astype(np.int64) @ weights


def symbols_to_payload(spec: CodeSpec, u: np.ndarray) -> np.ndarray:
    """Gather the payload bits back out of a symbol vector."""
    u = np.asarray(u, dtype=np.int64)
    bits = ((u[:, None] >> np.arange(spec.field.m)) & 1).reshape(-1)
    return bits[np.array(spec.unfrozen_bits, dtype=np.int64) - 1].astype(np.uint8)


def encode(spec: CodeSpec, u: np.ndarray) -> np.ndarray:
    """Codeword in transmit order: per-symbol transformation, butterfly,
    then the bit-reversal permutation when the spec calls for it."""
    u = np.asarray(u, dtype=np.int64)
    v = spec.transform.apply(u)
    c = polar_transform(spec.field, spec.kernel, v)
    return c[..., spec.channel_order]


def encode_frame(spec: CodeSpec, payload: np.ndarray) -> np.ndarray:
    return encode(spec, frame_to_symbols(spec, payload))


def equivalent_binary_matrix(spec: CodeSpec, with_transform: bool = True) -> np.ndarray:
    """mn x mn binary generator: each q-ary entry alpha^e of G_n becomes the
    m x m block A^e (matrix representation), left-multiplied by the
    per-symbol transformation matrix when ``with_transform`` is set, so that
    bits(c) = bits(u) @ G_b mod 2 for the natural-order codeword."""
    fld, m = spec.field, spec.field.m
    g = generator_matrix(spec.kernel, fld)
    n = spec.n
    out = np.zeros((m * n, m * n), dtype=np.uint8)
    h = spec.transform.matrix
    for i in range(n):
        for k in range(n):
            e = g[i, k]
            if e == 0:
                continue
            block = fld.companion_powers[fld.log[e]]
            if with_transform:
                block = (h @ block) % 2
            out[m * i:m * i + m, m * k:m * k + m] = block
    return out


def symbol_weight(c: np.ndarray) -> np.ndarray:
    return np.count_nonzero(np.asarray(c), axis=-1)


def min_distance_bound(spec: CodeSpec) -> int:
    """min over unfrozen symbols i of 2^wt(i-1) (row-weight bound)."""
    return min(1 << bin(i - 1).count("1") for i in spec.unfrozen_symbols)


def min_distance_oracle(spec: CodeSpec, max_enum: int = 1 << 20,
                        chunk: int = 1 << 14) -> int:
    """Exhaustive minimum symbol-wise Hamming weight over all nonzero
    messages with frozen symbols zero.  Enumerates q^|A| codewords through
    the butterfly, so only desk-scale configurations are accepted."""
    fld = spec.field
    a_set = np.array(spec.unfrozen_symbols, dtype=np.int64) - 1
    total = fld.q ** len(a_set)
    if total > max_enum:
        raise ValueError(f"q^|A| = {total} exceeds enumeration budget {max_enum}")
    best = spec.n + 1
    digits = fld.q ** np.arange(len(a_set), dtype=np.int64)
    for start in range(1, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        u = np.zeros((idx.size, spec.n), dtype=np.int64)
        u[:, a_set] = (idx[:, None] // digits) % fld.q
        c = polar_transform(fld, spec.kernel, spec.transform.apply(u))
        best = min(best, int(symbol_weight(c).min()))
    return best


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def spec_to_dict(spec: CodeSpec) -> dict:
    fld = spec.field
    d = {
        "field": {"m": fld.m, "poly": hex(fld.poly_mask)},
        "transform": {"rows": spec.transform.matrix.tolist()},
        "kernel": {
            "n": spec.kernel.n,
            "multiplier_exponents": [int(fld.log[mu]) for mu in spec.kernel.multipliers],
        },
        "payload_bits": spec.payload_bits,
        "unfrozen_bits": list(spec.unfrozen_bits),
        "bit_reversal": spec.bit_reversal,
        "crc": None,
        "ack": None,
    }
    if spec.crc:
        d["crc"] = {"bits": spec.crc.bits, "poly": hex(spec.crc.poly),
                    "init": spec.crc.init, "xorout": spec.crc.xorout}
    if spec.ack:
        d["ack"] = {"bit_positions": list(spec.ack.bit_positions),
                    "sources": [list(s) for s in spec.ack.sources],
                    "seed": spec.ack.seed}
    return d


def spec_from_dict(d: dict) -> CodeSpec:
    fld = build_field(d["field"]["m"], int(d["field"]["poly"], 16))
    lt = make_transform(fld.m, np.array(d["transform"]["rows"], dtype=np.uint8))
    kernel = make_kernel(fld, d["kernel"]["n"], d["kernel"]["multiplier_exponents"])
    crc = None
    if d.get("crc"):
        c = d["crc"]
        crc = CrcConfig(bits=c["bits"], poly=int(c["poly"], 16),
                        init=c["init"], xorout=c["xorout"])
    ack = None
    if d.get("ack"):
        a = d["ack"]
        ack = AckDesign(bit_positions=tuple(a["bit_positions"]),
                        sources=tuple(tuple(s) for s in a["sources"]),
                        seed=a.get("seed"))
    return CodeSpec(field=fld, transform=lt, kernel=kernel,
                    payload_bits=d["payload_bits"],
                    unfrozen_bits=tuple(d["unfrozen_bits"]),
                    crc=crc, ack=ack, bit_reversal=d.get("bit_reversal", True))


def save_spec(spec: CodeSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_spec(path) -> CodeSpec:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))
