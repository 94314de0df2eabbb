"""Boolean functions on the +/-1 hypercube, exact Fourier analysis, and
sparse multilinear polynomials.

Encoding conventions, fixed across the whole package:

* An input point on n variables is packed into an integer index i:
  bit j-1 of i is 1 exactly when variable j takes the value -1
  (little-endian, variable 1 is the least significant bit).
* A function is a bit-packed table: table bit 1 at index i means f(i) = -1,
  bit 0 means +1.
* The Hamming weight of an index is its popcount, i.e. the number of
  variables set to -1.
* Fourier data is stored as the exact integers scaled(S) = 2^n * fhat(S),
  indexed by subset masks S under the same bit convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

import numpy as np

MAX_TABLE_N = 24
MAX_MATRIX_N = 12


class CapacityError(Exception):
    """An input exceeds a documented size cap."""


class SpecParseError(ValueError):
    """A function-spec string failed to parse; carries the bad position."""

    def __init__(self, spec: str, pos: int, message: str):
        super().__init__(f"bad function spec {spec!r} at position {pos}: {message}")
        self.spec = spec
        self.pos = pos


_POP16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.int64)


def popcount(idx: np.ndarray) -> np.ndarray:
    """Per-element popcount for index arrays up to 32 bits."""
    idx = np.asarray(idx, dtype=np.int64)
    return _POP16[idx & 0xFFFF] + _POP16[(idx >> 16) & 0xFFFF]


def index_weights(n: int) -> np.ndarray:
    """Hamming weight (number of -1 coordinates) of every index 0..2^n-1."""
    return popcount(np.arange(1 << n, dtype=np.int64))


@dataclass(frozen=True)
class BooleanFunction:
    """A +/-1-valued function on n variables as a bit-packed truth table."""

    n: int
    bits: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_TABLE_N:
            raise CapacityError(f"arity {self.n} outside [1, {MAX_TABLE_N}]")
        if not 0 <= self.bits < (1 << (1 << self.n)):
            raise ValueError("table does not fit 2^n bits")

    @property
    def size(self) -> int:
        return 1 << self.n

    def value(self, index: int) -> int:
        """The sign at one packed input index."""
        return -1 if (self.bits >> index) & 1 else 1

    def values(self) -> np.ndarray:
        """The full table as an int64 array of +/-1, entry i = f(i)."""
        raw = self.bits.to_bytes((self.size + 7) // 8, "little")
        flags = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return 1 - 2 * flags[: self.size].astype(np.int64)

    @classmethod
    def from_values(cls, vals) -> "BooleanFunction":
        arr = np.asarray(vals, dtype=np.int64)
        size = arr.size
        n = size.bit_length() - 1
        if size != 1 << n:
            raise ValueError("table length must be a power of two")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("table entries must be +/-1")
        packed = np.packbits((arr < 0).astype(np.uint8), bitorder="little")
        return cls(n, int.from_bytes(packed.tobytes(), "little"))

    def negate(self) -> "BooleanFunction":
        return BooleanFunction(self.n, self.bits ^ ((1 << self.size) - 1))

    def is_symmetric(self) -> bool:
        vals = self.values()
        w = index_weights(self.n)
        # first index of weight k is the block of k low bits
        rep = vals[(1 << np.arange(self.n + 1)) - 1]
        return bool(np.all(vals == rep[w]))

    def to_predicate(self) -> "SymmetricPredicate":
        if not self.is_symmetric():
            raise ValueError("function is not symmetric")
        vals = self.values()
        return SymmetricPredicate(tuple(int(vals[(1 << k) - 1]) for k in range(self.n + 1)))


@dataclass(frozen=True)
class SymmetricPredicate:
    """Signs D(0..n) indexed by Hamming weight; defines a symmetric function."""

    signs: tuple

    def __post_init__(self):
        if len(self.signs) < 2:
            raise ValueError("predicate needs at least two levels (arity >= 1)")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("predicate entries must be +/-1")

    @property
    def n(self) -> int:
        return len(self.signs) - 1

    def __getitem__(self, w: int) -> int:
        return self.signs[w]

    @classmethod
    def from_string(cls, s: str) -> "SymmetricPredicate":
        if not s or any(c not in "+-" for c in s):
            raise ValueError(f"predicate string must be nonempty over +/-: {s!r}")
        return cls(tuple(1 if c == "+" else -1 for c in s))

    def to_string(self) -> str:
        return "".join("+" if s == 1 else "-" for s in self.signs)


def from_predicate(pred: SymmetricPredicate) -> BooleanFunction:
    """Materialize the symmetric function x -> D(|x|)."""
    if pred.n > MAX_TABLE_N:
        raise CapacityError(f"arity {pred.n} exceeds table cap {MAX_TABLE_N}")
    table = np.asarray(pred.signs, dtype=np.int64)[index_weights(pred.n)]
    return BooleanFunction.from_values(table)


def restrict(f: BooleanFunction, assignment: dict) -> BooleanFunction:
    """Fix some variables (1-based) to signs; remaining variables keep order."""
    for var, sign in assignment.items():
        if not 1 <= var <= f.n:
            raise ValueError(f"variable {var} out of range 1..{f.n}")
        if sign not in (-1, 1):
            raise ValueError(f"assigned sign must be +/-1, got {sign}")
    if len(assignment) == f.n:
        raise ValueError("restriction must leave at least one free variable")
    remaining = [v for v in range(1, f.n + 1) if v not in assignment]
    m = len(remaining)
    new = np.arange(1 << m, dtype=np.int64)
    idx = np.zeros(1 << m, dtype=np.int64)
    for pos, var in enumerate(remaining):
        idx |= ((new >> pos) & 1) << (var - 1)
    base = sum(1 << (var - 1) for var, sign in assignment.items() if sign == -1)
    return BooleanFunction.from_values(f.values()[idx | base])


# ---------------------------------------------------------------------------
# Fourier transform
# ---------------------------------------------------------------------------


def fwht(vec) -> np.ndarray:
    """In-place-style Walsh-Hadamard transform: W[S] = sum_x v[x] * chi_S(x).

    Exact over int64; the caller must keep 2^n * max|v| below 2^62.
    """
    a = np.array(vec, dtype=np.int64)
    size = a.size
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    if size * int(np.max(np.abs(a), initial=0)) >= 1 << 62:
        raise CapacityError("transform would overflow int64")
    h = 1
    while h < size:
        a = a.reshape(-1, 2 * h)
        left = a[:, :h].copy()
        a[:, :h] = left + a[:, h:]
        a[:, h:] = left - a[:, h:]
        a = a.reshape(-1)
        h *= 2
    return a


@dataclass(frozen=True, eq=False)
class FourierTable:
    """Exact scaled Fourier coefficients: scaled[S] = 2^n * fhat(S)."""

    n: int
    scaled: np.ndarray

    def __post_init__(self):
        self.scaled.setflags(write=False)

    def coefficient(self, mask: int) -> Fraction:
        return Fraction(int(self.scaled[mask]), 1 << self.n)

    def max_abs_scaled(self) -> int:
        return int(np.max(np.abs(self.scaled)))

    def inverse_values(self) -> np.ndarray:
        """Recover 2^n * f(x) / 2^n = f(x) for integer-valued tables."""
        back = fwht(self.scaled)
        if np.any(back % (1 << self.n)):
            raise ValueError("table is not the transform of an integer-valued function")
        return back // (1 << self.n)


def fourier(f: BooleanFunction) -> FourierTable:
    return FourierTable(f.n, fwht(f.values()))


def spectral_norm_xor(f: BooleanFunction) -> Fraction:
    """Operator norm of the XOR communication matrix of f (an exact integer)."""
    return Fraction(fourier(f).max_abs_scaled())


# ---------------------------------------------------------------------------
# Sparse multilinear polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparsePolynomial:
    """sum_S c_S * chi_S with exact rational c_S; masks are subset bitmasks."""

    n: int
    coeffs: tuple  # sorted ((mask, Fraction), ...), no zero coefficients

    @classmethod
    def from_dict(cls, n: int, terms: dict) -> "SparsePolynomial":
        items = []
        for mask, c in terms.items():
            c = Fraction(c)
            if not 0 <= mask < (1 << n):
                raise ValueError(f"mask {mask} out of range for arity {n}")
            if c:
                items.append((mask, c))
        return cls(n, tuple(sorted(items)))

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def evaluate(self, index: int) -> Fraction:
        total = Fraction(0)
        for mask, c in self.coeffs:
            total += -c if (mask & index).bit_count() & 1 else c
        return total

    def evaluate_all(self):
        """Values at every index, as (numerators, common denominator)."""
        den = 1
        for _, c in self.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        size = 1 << self.n
        idx = np.arange(size, dtype=np.int64)
        nums = np.zeros(size, dtype=object)
        for mask, c in self.coeffs:
            signs = 1 - 2 * (popcount(idx & mask) & 1)
            nums = nums + int(c * den) * signs
        return nums, den


def weight(p: SparsePolynomial) -> Fraction:
    return sum((abs(c) for _, c in p.coeffs), Fraction(0))


def poly_add(*ps: SparsePolynomial) -> SparsePolynomial:
    n = ps[0].n
    if any(p.n != n for p in ps):
        raise ValueError("arity mismatch")
    acc = {}
    for p in ps:
        for mask, c in p.coeffs:
            acc[mask] = acc.get(mask, Fraction(0)) + c
    return SparsePolynomial.from_dict(n, acc)


def poly_mul(p: SparsePolynomial, q: SparsePolynomial) -> SparsePolynomial:
    # chi_S * chi_T = chi_{S xor T}: squares vanish on the +/-1 cube
    if p.n != q.n:
        raise ValueError("arity mismatch")
    acc = {}
    for m1, c1 in p.coeffs:
        for m2, c2 in q.coeffs:
            m = m1 ^ m2
            acc[m] = acc.get(m, Fraction(0)) + c1 * c2
    return SparsePolynomial.from_dict(p.n, acc)


def poly_scale(p: SparsePolynomial, c) -> SparsePolynomial:
    c = Fraction(c)
    return SparsePolynomial.from_dict(p.n, {m: c * v for m, v in p.coeffs})


def poly_arith(op: str, *operands):
    if op == "add":
        return poly_add(*operands)
    if op == "multiply":
        p, q = operands
        return poly_mul(p, q)
    if op == "scale":
        p, c = operands
        return poly_scale(p, c)
    raise ValueError(f"unknown polynomial operation {op!r}")


def chi(mask: int, n: int) -> SparsePolynomial:
    return SparsePolynomial.from_dict(n, {mask: Fraction(1)})


def expansion(f: BooleanFunction) -> SparsePolynomial:
    """The exact multilinear expansion of f (its Fourier polynomial)."""
    table = fourier(f)
    den = 1 << f.n
    return SparsePolynomial.from_dict(
        f.n, {s: Fraction(int(v), den) for s, v in enumerate(table.scaled) if v}
    )


# ---------------------------------------------------------------------------
# Communication matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CommMatrix:
    """A +/-1 sign matrix with power-of-two dimensions."""

    entries: np.ndarray

    def __post_init__(self):
        if self.entries.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        if not np.all(np.abs(self.entries) == 1):
            raise ValueError("entries must be +/-1")
        self.entries.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


def xor_compose(f: BooleanFunction) -> CommMatrix:
    """The matrix M[x, y] = f(x xor y), both sides indexed like f's table."""
    if f.n > MAX_MATRIX_N:
        raise CapacityError(f"arity {f.n} exceeds matrix cap {MAX_MATRIX_N}")
    idx = np.arange(f.size, dtype=np.int64)
    return CommMatrix(f.values()[idx[:, None] ^ idx[None, :]].astype(np.int8))


# ---------------------------------------------------------------------------
# Named function families and the spec mini-language
# ---------------------------------------------------------------------------


def mod_predicate(m: int, residues, n: int) -> SymmetricPredicate:
    """D(w) = -1 exactly when w mod m lies in the accepting residue set."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    rset = set(residues)
    if any(not 0 <= r < m for r in rset):
        raise ValueError("residues must lie in [0, m)")
    return SymmetricPredicate(tuple(-1 if w % m in rset else 1 for w in range(n + 1)))


def majority_function(n: int) -> BooleanFunction:
    if n % 2 == 0:
        raise ValueError("majority needs odd arity")
    return from_predicate(SymmetricPredicate(tuple(1 if 2 * w < n else -1 for w in range(n + 1))))


def parity_function(n: int) -> BooleanFunction:
    return from_predicate(SymmetricPredicate(tuple(1 - 2 * (w & 1) for w in range(n + 1))))


def cq_function(n: int) -> BooleanFunction:
    return from_predicate(mod_predicate(4, (0, 1), n))


def ltf_function(weights, offset) -> BooleanFunction:
    """sgn(offset + sum w_j x_j) over +/-1 inputs; raises on any zero sum."""
    weights = [Fraction(w) for w in weights]
    offset = Fraction(offset)
    n = len(weights)
    if not 1 <= n <= MAX_TABLE_N:
        raise CapacityError(f"arity {n} outside [1, {MAX_TABLE_N}]")
    den = 1
    for v in weights + [offset]:
        den = den * v.denominator // gcd(den, v.denominator)
    sums = np.array([int(offset * den)], dtype=np.int64)
    for w in weights:
        wi = int(w * den)
        sums = np.concatenate([sums + wi, sums - wi])
    if np.any(sums == 0):
        tie = int(np.flatnonzero(sums == 0)[0])
        raise ValueError(f"affine form ties (sum zero) at input index {tie}")
    return BooleanFunction.from_values(np.where(sums > 0, 1, -1))


def universal_threshold_weights(l: int, k: int):
    """Weight vector and offset of the l-per-power threshold function.

    Variables are grouped power-major: the first l variables carry weight 2,
    the next l carry 4, up to 2^k; the affine offset 1/2 rules out ties.
    """
    if l < 1 or k < 1:
        raise ValueError("l and k must be positive")
    if l * k > MAX_TABLE_N:
        raise CapacityError(f"arity {l * k} exceeds table cap {MAX_TABLE_N}")
    weights = [Fraction(1 << (1 + t // l)) for t in range(l * k)]
    return weights, Fraction(1, 2)


_SPEC_RES = {
    "tt": re.compile(r"tt:([0-9a-f]+);(\d+)$"),
    "pred": re.compile(r"pred:([+-]+)$"),
    "parity": re.compile(r"parity:(\d+)$"),
    "maj": re.compile(r"maj:(\d+)$"),
    "cq": re.compile(r"cq:(\d+)$"),
    "mod": re.compile(r"mod:(\d+),\{(\d+(?:,\d+)*)\};(\d+)$"),
    "uthr": re.compile(r"uthr:(\d+),(\d+)$"),
    "ltf": re.compile(r"ltf:(-?[0-9/.]+(?:,-?[0-9/.]+)*);(-?[0-9/.]+)$"),
}


def build_function(spec: str) -> BooleanFunction:
    """Parse the function mini-language (case-insensitive keywords)."""
    text = spec.strip().lower()
    head = text.split(":", 1)[0]
    pattern = _SPEC_RES.get(head)
    if pattern is None:
        raise SpecParseError(spec, 0, f"unknown family {head!r}")
    m = pattern.match(text)
    if m is None:
        raise SpecParseError(spec, len(head) + 1, f"malformed {head!r} arguments")
    try:
        if head == "tt":
            table, n = int(m.group(1), 16), int(m.group(2))
            if not 1 <= n <= MAX_TABLE_N:
                raise CapacityError(f"arity {n} outside [1, {MAX_TABLE_N}]")
            if table >= 1 << (1 << n):
                raise ValueError(f"table value needs more than 2^{n} bits")
            return BooleanFunction(n, table)
        if head == "pred":
            return from_predicate(SymmetricPredicate.from_string(m.group(1)))
        if head == "parity":
            return parity_function(int(m.group(1)))
        if head == "maj":
            return majority_function(int(m.group(1)))
        if head == "cq":
            return cq_function(int(m.group(1)))
        if head == "mod":
            mm = int(m.group(1))
            residues = [int(r) for r in m.group(2).split(",")]
            return from_predicate(mod_predicate(mm, residues, int(m.group(3))))
        if head == "uthr":
            weights, offset = universal_threshold_weights(int(m.group(1)), int(m.group(2)))
            return ltf_function(weights, offset)
        weights = [Fraction(w) for w in m.group(1).split(",")]
        return ltf_function(weights, Fraction(m.group(2)))
    except CapacityError:
        raise
    except ValueError as exc:
        raise SpecParseError(spec, len(head) + 1, str(exc)) from exc


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def rational_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def poly_to_json(p: SparsePolynomial) -> dict:
    return {
        "n": p.n,
        "terms": [
            {"mask": mask, "num": str(c.numerator), "den": str(c.denominator)}
            for mask, c in p.coeffs
        ],
    }


def poly_from_json(data: dict) -> SparsePolynomial:
    terms = {}
    for t in data["terms"]:
        terms[int(t["mask"])] = terms.get(int(t["mask"]), 0) + Fraction(
            int(t["num"]), int(t["den"])
        )
    return SparsePolynomial.from_dict(int(data["n"]), terms)


def binomial(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0
