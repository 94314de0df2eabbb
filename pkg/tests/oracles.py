"""Independent brute-force oracles used by the test suite.

Everything here is written definition-first (nested loops, no transforms,
no shared code paths with the package) so the fast implementations are
checked against genuinely independent computations.
"""

from fractions import Fraction

import numpy as np


def naive_fourier_scaled(values) -> list:
    """sum_x f(x) chi_S(x) for every mask S, by the double loop."""
    values = list(int(v) for v in values)
    size = len(values)
    out = []
    for s in range(size):
        total = 0
        for x in range(size):
            sign = -1 if bin(s & x).count("1") % 2 else 1
            total += values[x] * sign
        out.append(total)
    return out


def naive_fourier_scaled_matrix(values) -> np.ndarray:
    """Same transform via an explicit Walsh matrix product (float-exact)."""
    values = np.asarray(values, dtype=np.int64)
    size = values.size
    s = np.arange(size)
    walsh = 1 - 2 * (np.array([[bin(i & j).count("1") & 1 for j in s] for i in s]))
    return walsh.astype(np.int64) @ values


def xor_matrix_loops(values) -> np.ndarray:
    size = len(values)
    out = np.zeros((size, size), dtype=np.int64)
    for x in range(size):
        for y in range(size):
            out[x, y] = values[x ^ y]
    return out


def rectangle_discrepancy(matrix, masses) -> Fraction:
    """Max |sum over S x T of M * lambda| over all rectangles, brute force."""
    rows, cols = len(matrix), len(matrix[0])
    best = Fraction(0)
    for smask in range(1 << rows):
        for tmask in range(1 << cols):
            total = Fraction(0)
            for x in range(rows):
                if not smask >> x & 1:
                    continue
                for y in range(cols):
                    if tmask >> y & 1:
                        total += matrix[x][y] * masses[x][y]
            best = max(best, abs(total))
    return best


def poly_value_loops(n, terms, index) -> Fraction:
    """Evaluate sum c_S chi_S at one packed index by definition."""
    total = Fraction(0)
    for mask, coef in terms:
        sign = -1 if bin(mask & index).count("1") % 2 else 1
        total += Fraction(coef) * sign
    return total


def kp_lift_loops(f_values, n) -> list:
    """Selector lift by nested loops: u_i = x_i if z_i = -1 else y_i.

    Index packing of the result: x block in bits 0..n-1, y block in bits
    n..2n-1, z block in bits 2n..3n-1 (bit set means the variable is -1).
    """
    out = []
    for idx in range(1 << (3 * n)):
        u = 0
        for i in range(n):
            z_neg = idx >> (2 * n + i) & 1
            if z_neg:
                u |= (idx >> i & 1) << i
            else:
                u |= (idx >> (n + i) & 1) << i
        out.append(f_values[u])
    return out


def hamming(index: int) -> int:
    return bin(index).count("1")
