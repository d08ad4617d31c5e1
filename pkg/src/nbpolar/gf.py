"""GF(2^m) arithmetic with binary-vector and matrix views of field elements.

Elements are integers whose bits are the coefficients of the polynomial
representation: bit j-1 of the integer is b_j in (b_1, ..., b_m), i.e. the
element equals sum_j b_j * alpha^(j-1).  Addition is XOR; multiplication and
inversion go through exp/log tables built from a primitive polynomial.

Each element also has an m x m binary matrix representation (a power of the
companion matrix of the primitive polynomial), so that multiplying by
alpha^i becomes bit-row-vector times binary matrix.  An invertible m x m
binary matrix H additionally defines the per-symbol linear transformation
used by the two-stage encoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Minimal-weight primitive polynomials, keyed by extension degree.
# Mask bit k is the coefficient of x^k, e.g. 0b10011 = x^4 + x + 1.
DEFAULT_PRIMITIVE_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}


class FieldError(ValueError):
    """Invalid field parameters (bad degree, non-primitive polynomial, ...)."""


def _bidiagonal(m: int) -> np.ndarray:
    """Rows e_1, e_1+e_2, ..., e_{m-1}+e_m; no column permutation of this
    matrix is upper triangular for m >= 2 (the last row needs two column
    slots at position >= m but only one exists)."""
    h = np.eye(m, dtype=np.uint8)
    for i in range(1, m):
        h[i, i - 1] = 1
    return h


# Binary polarization matrices for the per-symbol transformation.  The
# m in {2, 3, 4} entries are fixed by the code design; other degrees fall
# back to the bidiagonal member of the same family.
POLARIZATION_MATRIX = {
    1: np.array([[1]], dtype=np.uint8),
    2: np.array([[1, 0],
                 [1, 1]], dtype=np.uint8),
    3: np.array([[1, 0, 0],
                 [1, 1, 0],
                 [0, 1, 1]], dtype=np.uint8),
    4: np.array([[1, 0, 0, 0],
                 [1, 0, 1, 0],
                 [1, 1, 0, 0],
                 [1, 1, 1, 1]], dtype=np.uint8),
    6: _bidiagonal(6),
}


def gf2_inverse(mat: np.ndarray) -> np.ndarray:
    """Invert a binary matrix over GF(2) by Gauss-Jordan elimination."""
    m = mat.shape[0]
    a = np.concatenate([mat.astype(np.uint8) % 2, np.eye(m, dtype=np.uint8)], axis=1)
    row = 0
    for col in range(m):
        pivots = np.nonzero(a[row:, col])[0]
        if pivots.size == 0:
            raise FieldError("matrix is singular over GF(2)")
        p = row + pivots[0]
        if p != row:
            a[[row, p]] = a[[p, row]]
        hit = np.nonzero(a[:, col])[0]
        hit = hit[hit != row]
        a[hit] ^= a[row]
        row += 1
    return a[:, m:].copy()


def is_polarizing(h: np.ndarray) -> bool:
    """True when no column permutation of ``h`` is upper triangular.

    Equivalent formulation: there is no system of distinct column slots
    assigning every row i support only to positions >= i.  Checked by a
    greedy matching over the m! <= 40320 permutations for the small m used
    here (exhaustive, m <= 8).
    """
    from itertools import permutations

    m = h.shape[0]
    cols = [set(np.nonzero(h[:, j])[0]) for j in range(m)]
    for perm in permutations(range(m)):
        # column perm[j] lands at slot j; upper triangular needs all
        # nonzero rows of that column to be <= j
        if all(max(cols[perm[j]], default=0) <= j for j in range(m)):
            return False
    return True


@dataclass(frozen=True, eq=False)
class Field:
    """Arithmetic tables for GF(2^m), p = 2.

    Attributes
    ----------
    m : extension degree.
    q : field size 2^m.
    poly_mask : primitive polynomial as a bit mask (bit k = coeff of x^k).
    exp : (q-1,) int array, exp[i] = alpha^i.
    log : (q,) int array, log[exp[i]] = i; log[0] = -1 sentinel.
    companion_powers : (q-1, m, m) uint8, powers A^i of the companion matrix.
    mul_table : (q, q) int array of products.
    inv_table : (q,) int array; inv_table[0] = 0 sentinel, never valid input.
    """

    m: int
    q: int
    poly_mask: int
    exp: np.ndarray
    log: np.ndarray
    companion_powers: np.ndarray
    mul_table: np.ndarray
    inv_table: np.ndarray

    @property
    def alpha(self) -> int:
        return int(self.exp[1]) if self.q > 2 else 1

    @property
    def poly_coeffs(self) -> np.ndarray:
        """(f_0, ..., f_{m-1}, 1) over GF(2)."""
        return np.array([(self.poly_mask >> k) & 1 for k in range(self.m + 1)],
                        dtype=np.uint8)

    def add(self, a, b):
        return np.bitwise_xor(a, b)

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        return int(self.inv_table[a])

    def pow_alpha(self, i: int) -> int:
        """alpha^i with the exponent reduced mod q-1."""
        return int(self.exp[i % (self.q - 1)])

    def to_bits(self, a: int) -> np.ndarray:
        """(b_1, ..., b_m) with the element equal to sum b_j alpha^(j-1)."""
        return np.array([(a >> j) & 1 for j in range(self.m)], dtype=np.uint8)

    def from_bits(self, bits) -> int:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape[-1] != self.m:
            raise ValueError(f"expected {self.m} bits, got {bits.shape[-1]}")
        return int(np.sum(bits * (1 << np.arange(self.m)), dtype=np.int64))

    def elements(self) -> range:
        return range(self.q)


def _raw_mul(a: int, b: int, m: int, poly_mask: int) -> int:
    """Carry-less multiply mod the primitive polynomial (table-free)."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        if a & (1 << m):
            a ^= poly_mask
        b >>= 1
    return acc


def build_field(m: int, poly: int | None = None) -> Field:
    """Construct the arithmetic tables for GF(2^m).

    Parameters
    ----------
    m : extension degree, 1 <= m <= 8.
    poly : optional primitive polynomial bit mask of degree m.  When
        omitted the conventional minimal-weight primitive is used.

    Raises
    ------
    FieldError : if the polynomial has the wrong degree or alpha fails to
        have multiplicative order q-1 (non-primitive polynomial).
    """
    if not 1 <= m <= 8:
        raise FieldError(f"extension degree m={m} outside supported range 1..8")
    poly_mask = DEFAULT_PRIMITIVE_POLY[m] if poly is None else int(poly)
    if poly_mask.bit_length() != m + 1:
        raise FieldError(
            f"polynomial mask {poly_mask:#b} does not have degree {m}")
    q = 1 << m
    alpha = 2 if m > 1 else 1

    exp = np.zeros(q - 1, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        if log[x] != -1:
            raise FieldError(
                f"polynomial {poly_mask:#b} is not primitive: alpha has order {i}")
        exp[i] = x
        log[x] = i
        x = _raw_mul(x, alpha, m, poly_mask)
    if x != 1:
        raise FieldError(f"polynomial {poly_mask:#b} is not primitive")

    mul_table = np.zeros((q, q), dtype=np.int64)
    idx = (log[1:, None] + log[None, 1:]) % (q - 1)
    mul_table[1:, 1:] = exp[idx]

    inv_table = np.zeros(q, dtype=np.int64)
    inv_table[1:] = exp[(-log[1:]) % (q - 1)]

    # Companion matrix of f(x): shifted identity over the first m-1 rows,
    # last row carries (f_0, ..., f_{m-1}).
    a_mat = np.zeros((m, m), dtype=np.uint8)
    for i in range(m - 1):
        a_mat[i, i + 1] = 1
    a_mat[m - 1] = [(poly_mask >> k) & 1 for k in range(m)]
    powers = np.zeros((q - 1, m, m), dtype=np.uint8)
    powers[0] = np.eye(m, dtype=np.uint8)
    for i in range(1, q - 1):
        powers[i] = (powers[i - 1] @ a_mat) % 2

    fld = Field(m=m, q=q, poly_mask=poly_mask, exp=exp, log=log,
                companion_powers=powers, mul_table=mul_table,
                inv_table=inv_table)
    fld.exp.setflags(write=False)
    fld.log.setflags(write=False)
    fld.companion_powers.setflags(write=False)
    fld.mul_table.setflags(write=False)
    fld.inv_table.setflags(write=False)
    return fld


@dataclass(frozen=True, eq=False)
class LinearTransform:
    """Invertible binary m x m matrix applied per symbol before encoding.

    ``forward_table[u]`` is the element whose bit row-vector equals
    b(u) @ H mod 2; ``inverse_table`` undoes it.
    """

    m: int
    matrix: np.ndarray
    inverse: np.ndarray
    forward_table: np.ndarray = field(repr=False, default=None)
    inverse_table: np.ndarray = field(repr=False, default=None)

    def apply(self, u):
        """Element(s) after the transformation (scalar or ndarray)."""
        return self.forward_table[u]

    def invert(self, v):
        return self.inverse_table[v]


def _bit_matrix_table(h: np.ndarray) -> np.ndarray:
    """table[x] = integer whose bits are bits(x) @ h mod 2."""
    m = h.shape[0]
    q = 1 << m
    table = np.zeros(q, dtype=np.int64)
    weights = 1 << np.arange(m)
    for x in range(q):
        bits = (x >> np.arange(m)) & 1
        table[x] = int(np.dot(bits @ h % 2, weights))
    return table


def make_transform(m: int, matrix: np.ndarray | None = None) -> LinearTransform:
    """Build the per-symbol transformation for degree m.

    Uses the built-in polarization matrix for the degree when ``matrix`` is
    omitted (bidiagonal fallback for degrees without a fixed entry).
    """
    if matrix is None:
        h = POLARIZATION_MATRIX.get(m)
        if h is None:
            h = _bidiagonal(m)
    else:
        h = np.asarray(matrix, dtype=np.uint8) % 2
        if h.shape != (m, m):
            raise ValueError(f"expected a {m}x{m} matrix, got {h.shape}")
    h_inv = gf2_inverse(h)
    lt = LinearTransform(m=m, matrix=h, inverse=h_inv,
                         forward_table=_bit_matrix_table(h),
                         inverse_table=_bit_matrix_table(h_inv))
    lt.matrix.setflags(write=False)
    lt.inverse.setflags(write=False)
    lt.forward_table.setflags(write=False)
    lt.inverse_table.setflags(write=False)
    return lt
