"""Selector lifts, monomial projections, and symmetric lift witnesses.

The selector lift routes each position i of a base function to one of
two candidate inputs: variable blocks are laid out as x (bits 0..n-1),
y (bits n..2n-1), z (bits 2n..3n-1), and z_i = -1 selects x_i while
z_i = +1 selects y_i. A monomial projection substitutes a signed
character for each input of a function. Symmetric and threshold lifts
realize the selector lift of a symmetric or threshold base inside a
larger symmetric/threshold function, and the witness extractor builds
the shrinking family of stripe restrictions used to certify hardness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    BooleanFunction,
    CapacityError,
    MAX_TABLE_N,
    SymmetricPredicate,
    from_predicate,
    ltf_function,
)
from .measures import odd_even_degree, sign_degree

_CHUNK = 1 << 20


@dataclass(frozen=True)
class MonomialList:
    """One signed character per source variable, over m target variables."""

    m: int
    monomials: tuple  # ((mask, negated), ...)

    def __post_init__(self):
        for mask, neg in self.monomials:
            if not 0 <= mask < (1 << self.m):
                raise ValueError(f"mask {mask} out of range for arity {self.m}")
            if not isinstance(neg, bool):
                raise ValueError("monomial sign flag must be a bool")


def monomial_list_to_json(ml: MonomialList) -> dict:
    return {
        "m": ml.m,
        "monomials": [{"mask": mask, "neg": neg} for mask, neg in ml.monomials],
    }


def monomial_list_from_json(data: dict) -> MonomialList:
    return MonomialList(
        data["m"], tuple((t["mask"], bool(t["neg"])) for t in data["monomials"])
    )


def identity_monomials(n: int) -> MonomialList:
    return MonomialList(n, tuple((1 << i, False) for i in range(n)))


@dataclass(frozen=True)
class LiftWitness:
    """Record of a lift identity and whether it was checked pointwise."""

    base: str
    source_arity: int
    lifted_arity: int
    pointwise_checked: bool


# ---------------------------------------------------------------------------
# The selector lift and projections
# ---------------------------------------------------------------------------


def kp_lift(f: BooleanFunction) -> BooleanFunction:
    """The 3n-variable selector lift: position i reads x_i when z_i = -1."""
    n = f.n
    if 3 * n > MAX_TABLE_N:
        raise CapacityError(f"lift arity 3*{n} exceeds table cap {MAX_TABLE_N}")
    base = f.values()
    mask = (1 << n) - 1
    total = 1 << (3 * n)
    packed = bytearray()
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        xb = idx & mask
        yb = (idx >> n) & mask
        zb = (idx >> (2 * n)) & mask
        u = (xb & zb) | (yb & ~zb & mask)
        flags = (base[u] < 0).astype(np.uint8)
        packed += np.packbits(flags, bitorder="little").tobytes()
    return BooleanFunction(3 * n, int.from_bytes(bytes(packed), "little"))


def relevance_probability(mask: int, n: int) -> Fraction:
    """Probability over uniform selectors that every x/y variable in mask
    is the selected one; zero when some position needs both."""
    if not 0 <= mask < (1 << (2 * n)):
        raise ValueError(f"mask {mask} out of range for {2 * n} selection subjects")
    xpart = mask & ((1 << n) - 1)
    ypart = mask >> n
    if xpart & ypart:
        return Fraction(0)
    return Fraction(1, 1 << (xpart | ypart).bit_count())


def monomial_project(f: BooleanFunction, ml: MonomialList) -> BooleanFunction:
    """g(x) = f(M_1(x), ..., M_n(x)) for signed characters M_i."""
    n = f.n
    if len(ml.monomials) != n:
        raise ValueError(
            f"need {n} monomials to feed an arity-{n} function, got {len(ml.monomials)}"
        )
    m = ml.m
    if m > MAX_TABLE_N:
        raise CapacityError(f"projection arity {m} exceeds table cap {MAX_TABLE_N}")
    base = f.values()
    total = 1 << m
    packed = bytearray()
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        u = np.zeros(idx.shape, dtype=np.int64)
        for i, (mask, neg) in enumerate(ml.monomials):
            ones = _parity(idx & mask)
            if neg:
                ones ^= 1
            u |= ones << i
        flags = (base[u] < 0).astype(np.uint8)
        packed += np.packbits(flags, bitorder="little").tobytes()
    return BooleanFunction(m, int.from_bytes(bytes(packed), "little"))


def _parity(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    for shift in (16, 8, 4, 2, 1):
        out ^= out >> shift
    return out & 1


# ---------------------------------------------------------------------------
# Symmetric and threshold realizations of the lift
# ---------------------------------------------------------------------------


def _selector_monomials(n: int, third_block_negated: bool) -> MonomialList:
    """Monomials feeding a 4n-variable function from the 3n lift variables:
    blocks x_i, y_i, (+-)x_i z_i, y_i z_i."""
    mono = []
    for i in range(n):
        mono.append((1 << i, False))
    for i in range(n):
        mono.append((1 << (n + i), False))
    for i in range(n):
        mono.append(((1 << i) | (1 << (2 * n + i)), third_block_negated))
    for i in range(n):
        mono.append(((1 << (n + i)) | (1 << (2 * n + i)), False))
    return MonomialList(3 * n, tuple(mono))


def symm_lift_decompose(F: SymmetricPredicate):
    """Split a symmetric predicate on 4n into (base predicate on n,
    monomial list, witness): feeding the blocks x, y, -xz, yz into F
    computes the selector lift of the stripe restriction D_F(2b + n)."""
    N = F.n
    if N % 4:
        raise ValueError(f"arity {N} is not divisible by 4")
    if N > MAX_TABLE_N:
        raise CapacityError(f"arity {N} exceeds table cap {MAX_TABLE_N}")
    n = N // 4
    base = SymmetricPredicate(tuple(F[2 * b + n] for b in range(n + 1)))
    ml = _selector_monomials(n, third_block_negated=True)
    lifted = kp_lift(from_predicate(base))
    projected = monomial_project(from_predicate(F), ml)
    if lifted != projected:
        raise AssertionError("stripe decomposition failed its pointwise check")
    witness = LiftWitness(
        base=base.to_string(),
        source_arity=n,
        lifted_arity=3 * n,
        pointwise_checked=True,
    )
    return base, ml, witness


def thr_lift(weights, offset):
    """Lift a tie-free threshold function to 4n variables: weights repeat
    as (w, w, -w, w) across the blocks and the offset doubles, so feeding
    (x, y, xz, yz) computes the selector lift."""
    weights = tuple(Fraction(w) for w in weights)
    offset = Fraction(offset)
    n = len(weights)
    lifted_weights = weights + weights + tuple(-w for w in weights) + weights
    lifted_offset = 2 * offset
    f = ltf_function(weights, offset)
    checked = False
    if 4 * n <= MAX_TABLE_N and 3 * n <= MAX_TABLE_N:
        f4 = ltf_function(lifted_weights, lifted_offset)
        ml = _selector_monomials(n, third_block_negated=False)
        if kp_lift(f) != monomial_project(f4, ml):
            raise AssertionError("threshold lift failed its pointwise check")
        checked = True
    else:
        # still reject ties in the lifted form before reporting it
        ltf_function(lifted_weights, lifted_offset)
    witness = LiftWitness(
        base=f"ltf:{','.join(str(w) for w in weights)};{offset}",
        source_arity=n,
        lifted_arity=4 * n,
        pointwise_checked=checked,
    )
    return lifted_weights, lifted_offset, witness


def lifsym_extend(pred: SymmetricPredicate) -> SymmetricPredicate:
    """Embed a predicate on n into one on 4n along the stripe 2b + n,
    filling unconstrained levels with +1."""
    n = pred.n
    if 4 * n > MAX_TABLE_N:
        raise CapacityError(f"extension arity 4*{n} exceeds table cap {MAX_TABLE_N}")
    signs = [1] * (4 * n + 1)
    for b in range(n + 1):
        signs[2 * b + n] = pred[b]
    return SymmetricPredicate(tuple(signs))


# ---------------------------------------------------------------------------
# Witness family extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    level: int
    arity: int
    orientation: str  # "low" | "high"
    predicate: SymmetricPredicate
    sign_deg: int


@dataclass(frozen=True)
class LiftFamilyReport:
    odd_even_degree: int
    fired_orientation: str
    parity_fixed: bool
    members: tuple
    max_sign_degree: int
    witness: FamilyMember | None


def _stripe_member(F: SymmetricPredicate, nu: int, orientation: str) -> SymmetricPredicate:
    N = F.n
    if orientation == "low":
        return SymmetricPredicate(tuple(F[2 * b + nu] for b in range(nu + 1)))
    return SymmetricPredicate(tuple(F[N - 2 * b - nu] for b in range(nu + 1)))


def liftsym_witness(F: SymmetricPredicate) -> LiftFamilyReport:
    """Build the shrinking family of stripe restrictions f_i (arity
    floor(N/3^i), both orientations), report each member's exact sign
    degree, and flag the proof branch the change distribution selects.

    Changes concentrated low (within [0, 3N/4]) fire the low orientation,
    otherwise the high one; when the fired window's changes sit mostly at
    odd levels, one variable is fixed to -1 first (shifting every level
    by one) so the stripes sample the majority parity class.
    """
    N = F.n
    if N % 4:
        raise ValueError(f"arity {N} is not divisible by 4")
    if N > MAX_TABLE_N:
        raise CapacityError(f"arity {N} exceeds table cap {MAX_TABLE_N}")
    n = N // 4
    k = odd_even_degree(F)

    changes = [i for i in range(N - 1) if F[i] != F[i + 2]]
    low = [i for i in changes if i <= 3 * n - 2]
    high = [i for i in changes if i >= n]
    fired = "low" if len(low) >= len(high) else "high"
    window = low if fired == "low" else high
    evens = sum(1 for i in window if i % 2 == 0)
    parity_fixed = evens < len(window) - evens
    work = (
        SymmetricPredicate(tuple(F[w + 1] for w in range(N)))
        if parity_fixed
        else F
    )

    members = []
    level = 1
    while True:
        nu = work.n // 3**level
        if nu < 1:
            break
        for orientation in ("low", "high"):
            pred = _stripe_member(work, nu, orientation)
            deg = sign_degree(from_predicate(pred))
            members.append(FamilyMember(level, nu, orientation, pred, deg))
        level += 1

    best = max(members, key=lambda mb: mb.sign_deg, default=None)
    max_deg = best.sign_deg if best else 0
    return LiftFamilyReport(
        odd_even_degree=k,
        fired_orientation=fired,
        parity_fixed=parity_fixed,
        members=tuple(members),
        max_sign_degree=max_deg,
        witness=best if max_deg > 0 else None,
    )
