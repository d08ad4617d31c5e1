"""AWGN channel with BPSK and square-QAM signaling.

A q-ary codeword symbol either expands to m antipodal BPSK uses of its bit
vector (one real dimension per bit, 0 -> +1) or maps one-to-one onto a
2^m-point constellation.  The demapper returns normalized length-q
probability rows for the symbol-domain decoder.

Noise convention: Es = 1 per channel use and the per-real-dimension variance
is sigma^2 = 1 / (2 * (info bits per channel use) * Eb/N0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np


def pam_gray(bits: np.ndarray) -> float:
    """Gray-labelled PAM point in {+-1, +-3, ...}, MSB first."""
    if len(bits) > 1:
        return (1 - 2 * bits[0]) * (2 ** (len(bits) - 1) - pam_gray(bits[1:]))
    return 1 - 2 * bits[0]


def gray_qam_points(bits_per_symbol: int) -> np.ndarray:
    """Unit-energy square QAM, label bit k (LSB first) = c^(k+1); the first
    half of the label bits drives the in-phase axis."""
    if bits_per_symbol % 2 or bits_per_symbol < 2:
        raise ValueError("square QAM needs an even number of label bits >= 2")
    half = bits_per_symbol // 2
    pts = np.zeros(1 << bits_per_symbol, dtype=np.complex128)
    for label in range(1 << bits_per_symbol):
        bits = np.array([(label >> k) & 1 for k in range(bits_per_symbol)])
        pts[label] = pam_gray(bits[:half]) + 1j * pam_gray(bits[half:])
    return pts / math.sqrt(float(np.mean(np.abs(pts) ** 2)))


def set_partition_points(bits_per_symbol: int) -> np.ndarray:
    """Square QAM relabelled by recursive max-min-distance bipartition.

    Label bit 1 selects the first (coarsest) partition, so successive bits
    see geometrically growing intra-subset distances.  Ties are broken by
    the lexicographically smallest subset holding the lowest point index,
    which keeps the labeling deterministic.
    """
    base = gray_qam_points(bits_per_symbol)
    out = np.zeros_like(base)

    def min_dist(idx: tuple[int, ...]) -> float:
        if len(idx) < 2:
            return math.inf
        return min(abs(base[a] - base[b]) for a, b in combinations(idx, 2))

    def split(idx: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        half = len(idx) // 2
        best = None
        for sub in combinations(idx[1:], half - 1):
            s0 = (idx[0],) + sub
            s1 = tuple(i for i in idx if i not in s0)
            score = min(min_dist(s0), min_dist(s1))
            key = (-score, s0)
            if best is None or key < best[0]:
                best = (key, s0, s1)
        return best[1], best[2]

    def assign(idx: tuple[int, ...], label: int, depth: int):
        if len(idx) == 1:
            out[label] = base[idx[0]]
            return
        s0, s1 = split(idx)
        assign(s0, label, depth + 1)
        assign(s1, label | (1 << depth), depth + 1)

    assign(tuple(range(len(base))), 0, 0)
    return out


@dataclass(frozen=True, eq=False)
class ChannelConfig:
    """One signaling configuration: modulation, labeling and noise level."""

    snr_db: float                     # Eb/N0; math.inf = noiseless
    modulation: str                   # "bpsk" | "qam"
    bits_per_symbol: int              # m' label bits per channel use
    sigma: float                      # per-real-dimension noise std
    points: np.ndarray | None = None          # constellation by label int
    label_of_symbol: np.ndarray | None = None  # field element -> label
    labeling: str = "gray"

    @property
    def noiseless(self) -> bool:
        return self.sigma == 0.0

    def describe(self) -> dict:
        d = {"modulation": self.modulation, "snr_db": self.snr_db,
             "bits_per_symbol": self.bits_per_symbol, "labeling": self.labeling}
        if self.label_of_symbol is not None:
            d["label_table"] = [int(x) for x in self.label_of_symbol]
        return d


def noise_sigma(snr_db: float, info_bits_per_use: float) -> float:
    if math.isinf(snr_db):
        return 0.0
    ebn0 = 10.0 ** (snr_db / 10.0)
    return math.sqrt(1.0 / (2.0 * info_bits_per_use * ebn0))


def make_channel(modulation: str, snr_db: float, code_rate: float,
                 symbol_bits: int, labeling: str = "gray",
                 labeling_samples: int = 200_000,
                 labeling_seed: int = 0) -> ChannelConfig:
    """Build a channel for a code over GF(2^symbol_bits).

    BPSK sends each codeword symbol as symbol_bits antipodal uses; QAM
    requires the field order to match the constellation size and supports
    labeling "gray", "lac" (ascending subchannel capacities) or "ldc".
    """
    if modulation == "bpsk":
        sigma = noise_sigma(snr_db, code_rate)
        return ChannelConfig(snr_db=snr_db, modulation="bpsk",
                             bits_per_symbol=1, sigma=sigma)
    if modulation != "qam":
        raise ValueError(f"unknown modulation {modulation!r}")
    sigma = noise_sigma(snr_db, code_rate * symbol_bits)
    points = gray_qam_points(symbol_bits)
    if labeling == "gray":
        perm = tuple(range(symbol_bits))
    elif labeling in ("lac", "ldc"):
        perm = capacity_ordering(points, sigma, samples=labeling_samples,
                                 seed=labeling_seed)
        if labeling == "ldc":
            perm = tuple(reversed(perm))
    else:
        raise ValueError(f"unknown labeling {labeling!r}")
    label_of_symbol = _compose_labels(symbol_bits, perm)
    return ChannelConfig(snr_db=snr_db, modulation="qam",
                         bits_per_symbol=symbol_bits, sigma=sigma,
                         points=points, label_of_symbol=label_of_symbol,
                         labeling=labeling)


def _compose_labels(m: int, perm: tuple[int, ...]) -> np.ndarray:
    """label_of_symbol[v]: symbol bit j lands at label position perm[j]."""
    q = 1 << m
    table = np.zeros(q, dtype=np.int64)
    for v in range(q):
        label = 0
        for j in range(m):
            label |= ((v >> j) & 1) << perm[j]
        table[v] = label
    return table


def transmit(cfg: ChannelConfig, codeword: np.ndarray,
             rng: np.random.Generator) -> np.ndarray:
    """Map codeword symbols and add AWGN; returns real samples for BPSK
    (m per symbol) or complex samples for QAM (one per symbol)."""
    codeword = np.asarray(codeword, dtype=np.int64)
    if cfg.modulation == "bpsk":
        m = _infer_symbol_bits(cfg, codeword)
        bits = ((codeword[:, None] >> np.arange(m)) & 1).reshape(-1)
        clean = 1.0 - 2.0 * bits
        if cfg.noiseless:
            return clean
        return clean + rng.normal(0.0, cfg.sigma, size=clean.shape)
    clean = cfg.points[cfg.label_of_symbol[codeword]]
    if cfg.noiseless:
        return clean
    noise = rng.normal(0.0, cfg.sigma, size=(clean.size, 2))
    return clean + noise[:, 0] + 1j * noise[:, 1]


def demap(cfg: ChannelConfig, samples: np.ndarray, symbol_bits: int) -> np.ndarray:
    """Per-symbol conditional probability rows p(y_i | v), normalized.

    For BPSK the row factors over the m per-bit posteriors; for QAM it is
    the Gaussian likelihood of each constellation point.
    """
    q = 1 << symbol_bits
    if cfg.modulation == "bpsk":
        y = np.asarray(samples, dtype=np.float64).reshape(-1, symbol_bits)
        if cfg.noiseless:
            bits = (y < 0).astype(np.int64)
        else:
            # log p(y|bit): -(y -+ 1)^2 / (2 sigma^2); constants cancel per row
            ll = np.stack([-(y - 1.0) ** 2, -(y + 1.0) ** 2], axis=-1)
            ll /= 2.0 * cfg.sigma ** 2
            vbits = (np.arange(q)[:, None] >> np.arange(symbol_bits)) & 1
            rows = np.zeros((y.shape[0], q))
            for j in range(symbol_bits):
                rows += ll[:, j, :][:, vbits[:, j]]
            rows -= rows.max(axis=1, keepdims=True)
            rows = np.exp(rows)
            return rows / rows.sum(axis=1, keepdims=True)
        symbols = bits @ (1 << np.arange(symbol_bits, dtype=np.int64))
        rows = np.zeros((y.shape[0], q))
        rows[np.arange(y.shape[0]), symbols] = 1.0
        return rows
    y = np.asarray(samples)
    pts = cfg.points[cfg.label_of_symbol]
    if cfg.noiseless:
        rows = (np.abs(y[:, None] - pts[None, :]) < 1e-12).astype(np.float64)
        return rows / rows.sum(axis=1, keepdims=True)
    ll = -np.abs(y[:, None] - pts[None, :]) ** 2 / (2.0 * cfg.sigma ** 2)
    ll -= ll.max(axis=1, keepdims=True)
    rows = np.exp(ll)
    return rows / rows.sum(axis=1, keepdims=True)


def _infer_symbol_bits(cfg: ChannelConfig, codeword: np.ndarray) -> int:
    hi = int(codeword.max(initial=0))
    m = max(1, hi.bit_length())
    return m


# ---------------------------------------------------------------------------
# equivalent-subchannel capacities (chain rule over label bits)
# ---------------------------------------------------------------------------

def bit_level_densities(points: np.ndarray, sigma: float, y: np.ndarray,
                        prefix_bits: int) -> np.ndarray:
    """p(y | c^(1..prefix_bits)) up to a common constant, for every prefix.

    Returns shape (len(y), 2^prefix_bits): the mean Gaussian likelihood over
    all labels sharing each prefix (label bits LSB-first).
    """
    lik = np.exp(-np.abs(y[:, None] - points[None, :]) ** 2 / (2.0 * sigma ** 2))
    npts = len(points)
    mask = (1 << prefix_bits) - 1
    groups = np.arange(npts) & mask
    out = np.zeros((len(y), 1 << prefix_bits))
    for g in range(1 << prefix_bits):
        out[:, g] = lik[:, groups == g].mean(axis=1)
    return out


def subchannel_capacities(points: np.ndarray, sigma: float,
                          samples: int = 1_000_000, seed: int = 0,
                          chunk: int = 100_000) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo estimate of the per-label-bit capacities C_i (bits) under
    successive conditioning c^(1), ..., c^(m'), plus standard errors.

    The chain rule makes sum(C_i) the full constellation-constrained mutual
    information, which the conservation tests exploit.
    """
    m = int(round(math.log2(len(points))))
    rng = np.random.default_rng(seed)
    sums = np.zeros(m)
    sqsums = np.zeros(m)
    done = 0
    while done < samples:
        c = min(chunk, samples - done)
        labels = rng.integers(0, len(points), size=c)
        noise = rng.normal(0.0, sigma, size=(c, 2))
        y = points[labels] + noise[:, 0] + 1j * noise[:, 1]
        prev = None
        for i in range(m + 1):
            dens = bit_level_densities(points, sigma, y, i)
            cur = dens[np.arange(c), labels & ((1 << i) - 1)]
            if i > 0:
                term = np.log2(cur / prev)
                sums[i - 1] += term.sum()
                sqsums[i - 1] += (term ** 2).sum()
            prev = cur
        done += c
    means = sums / samples
    var = sqsums / samples - means ** 2
    return means, np.sqrt(np.maximum(var, 0.0) / samples)


def capacity_ordering(points: np.ndarray, sigma: float,
                      samples: int = 200_000, seed: int = 0) -> tuple[int, ...]:
    """Label-bit positions sorted by marginal (unconditioned) capacity.

    Returned as a permutation perm with perm[j] = base label position of the
    j-th code bit, so the composed labeling has ascending capacities.
    """
    m = int(round(math.log2(len(points))))
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, len(points), size=samples)
    noise = rng.normal(0.0, sigma, size=(samples, 2))
    y = points[labels] + noise[:, 0] + 1j * noise[:, 1]
    lik = np.exp(-np.abs(y[:, None] - points[None, :]) ** 2 / (2.0 * sigma ** 2))
    total = lik.mean(axis=1)
    caps = np.zeros(m)
    for k in range(m):
        bit = (np.arange(len(points)) >> k) & 1
        cond = np.where((labels >> k) & 1 == 1,
                        lik[:, bit == 1].mean(axis=1),
                        lik[:, bit == 0].mean(axis=1))
        caps[k] = np.mean(np.log2(cond / total))
    order = np.argsort(caps, kind="stable")
    perm = np.zeros(m, dtype=np.int64)
    perm[np.arange(m)] = order
    return tuple(int(p) for p in order)


def bpsk_capacity_quadrature(sigma: float) -> float:
    """Binary-input AWGN capacity by 1-D numerical integration (oracle)."""
    from scipy.integrate import quad

    def integrand(y):
        p0 = math.exp(-(y - 1.0) ** 2 / (2 * sigma ** 2))
        p1 = math.exp(-(y + 1.0) ** 2 / (2 * sigma ** 2))
        if p0 == 0.0:
            return 0.0
        return (p0 / math.sqrt(2 * math.pi * sigma ** 2)
                * math.log2(2 * p0 / (p0 + p1)))

    lo, hi = -1 - 12 * sigma, 1 + 12 * sigma
    val, _ = quad(integrand, lo, hi, limit=200)
    return val


def bpsk_points() -> np.ndarray:
    """BPSK as a 1-point-per-bit 'constellation' on the real line, shaped
    complex for the capacity estimators."""
    return np.array([1.0 + 0j, -1.0 + 0j])
