"""Modular-weight functions and sign-rank bounds for their XOR lifts.

mod_m^A(x) = -1 exactly when the Hamming weight of x falls in the residue
classes A modulo m. These functions have closed-form Fourier spectra, and
for odd m every non-trivial coefficient is exponentially small, which
feeds the spectral sign-rank machinery. Even moduli reduce to odd ones or
to modulus 4 through shift-and-multiply identities; reduction chains
record those steps together with the arity they consume, and the composed
reports turn a chain into an unbounded-error communication bound.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .comm import BoundReport, ProvenanceStep, Verdict
from .core import (
    BooleanFunction,
    CapacityError,
    FourierTable,
    fourier,
    from_predicate,
    fwht,
    mod_predicate,
    rational_str,
)

MAX_SPECTRUM_N = 20
MAX_VERIFY_N = 14
SIGN_CHECK_N = 12

_CQ_TRANSLATES = (
    frozenset({0, 1}),
    frozenset({1, 2}),
    frozenset({2, 3}),
    frozenset({0, 3}),
)


class CaseExhaustionError(RuntimeError):
    """A reduction reached a sub-case the analysis rules out."""


@dataclass(frozen=True)
class ModSpec:
    """A modular-weight function: modulus, accepting residues, arity."""

    m: int
    accepted: frozenset
    n: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError("modulus must be an integer of at least 2")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("arity must be a positive integer")
        acc = frozenset(int(r) for r in self.accepted)
        if any(not 0 <= r < self.m for r in acc):
            raise ValueError("accepted residues must lie in [0, m)")
        object.__setattr__(self, "accepted", acc)


@dataclass(frozen=True)
class Simplicity:
    """Whether the induced weight predicate collapses, and why."""

    simple: bool
    reason: str  # "constant" | "parity" | "non-simple"


@dataclass(frozen=True)
class ShiftXorIdentity:
    """Product of a modular function with its residue-shifted copy.

    The product depends only on the symmetric difference of the two
    accepting sets; modulus is the minimal period of that pattern.
    """

    modulus: int
    accepted: frozenset
    verified: bool
    kind: str  # "simple" | "smaller-modulus" | "cq-translate" | "not-a-mod-reduction"


@dataclass(frozen=True)
class ReductionStep:
    """One modulus reduction: a shift product or a pure pattern rewrite."""

    kind: str  # "shift-xor" | "rewrite"
    source: ModSpec
    target: ModSpec
    shift: object  # residue shift for products, None for rewrites
    arity_loss: int
    verified: bool


@dataclass(frozen=True)
class ReductionChain:
    """Verified steps from a modular function down to a bounded base case."""

    steps: tuple
    base: str  # "odd" | "mod-4" | "cq-translate"
    base_spec: ModSpec
    verification_arity: int
    structurally_sufficient: bool


def mod_function(spec: ModSpec) -> BooleanFunction:
    return from_predicate(mod_predicate(spec.m, spec.accepted, spec.n))


def is_simple(spec: ModSpec) -> Simplicity:
    """Classify the weight predicate the spec induces at its own arity."""
    hits = [(w % spec.m) in spec.accepted for w in range(spec.n + 1)]
    if len(set(hits)) == 1:
        return Simplicity(True, "constant")
    if all(hits[w] != hits[w + 1] for w in range(spec.n)):
        return Simplicity(True, "parity")
    return Simplicity(False, "non-simple")


# ---------------------------------------------------------------------------
# Residue patterns
# ---------------------------------------------------------------------------


def _pattern(m, accepted):
    return tuple(1 if r in accepted else 0 for r in range(m))

def _accepted_of(pattern):
    return frozenset(r for r, bit in enumerate(pattern) if bit)

def _shifted(pattern, i):
    m = len(pattern)
    return tuple(pattern[(r - i) % m] for r in range(m))

def _xor(p, q):
    return tuple(a ^ b for a, b in zip(p, q))

def _alternating(pattern):
    m = len(pattern)
    return m % 2 == 0 and all(pattern[r] != pattern[(r + 1) % m] for r in range(m))

def _pattern_simple(pattern):
    # constant and parity-like patterns induce constant or parity functions
    return len(set(pattern)) == 1 or _alternating(pattern)

def _tiled(pattern, m):
    return pattern * (m // len(pattern))


# ---------------------------------------------------------------------------
# Closed-form spectrum
# ---------------------------------------------------------------------------


def mod_fourier_closed_form(spec: ModSpec, s: int) -> complex:
    """Level-s Fourier coefficient from the exponential-sum expansion.

    Extended-precision accumulation; the imaginary part is numerical
    residue and stays far below the 1e-9 comparison tolerance at the
    supported scales.
    """
    if not 0 <= s <= spec.n:
        raise ValueError(f"level {s} out of range 0..{spec.n}")
    m = spec.m
    angles = 2 * np.longdouble(math.pi) * np.arange(m, dtype=np.longdouble) / m
    omega = np.cos(angles) + np.clongdouble(1j) * np.sin(angles)
    acc = np.clongdouble(0)
    for k in sorted(spec.accepted):
        for a in range(m):
            wa = omega[a]
            # omega^(-a k) looked up by residue to avoid power drift
            acc += omega[(-a * k) % m] * ((1 - wa) / 2) ** s * ((1 + wa) / 2) ** (spec.n - s)
    value = (1.0 if s == 0 else 0.0) - (2.0 / m) * acc
    return complex(value)


def claim_bound_audit(spec: ModSpec) -> Verdict:
    """Compare the exact spectrum of an odd-modulus function against the
    principal and non-principal coefficient ceilings."""
    if spec.m % 2 == 0 or spec.m < 3:
        raise ValueError("coefficient ceilings require an odd modulus of at least 3")
    if not spec.accepted or len(spec.accepted) == spec.m:
        raise ValueError("accepting set must be neither empty nor everything")
    if spec.n > MAX_SPECTRUM_N:
        raise CapacityError(f"arity {spec.n} exceeds the spectrum cap {MAX_SPECTRUM_N}")
    scaled = fourier(mod_function(spec)).scaled
    scale = 1 << spec.n
    principal = abs(int(scaled[0])) / scale
    rest = np.abs(scaled[1:])
    cn = math.cos(math.pi / (2 * spec.m)) ** spec.n
    principal_bound = abs(1 - 2 * len(spec.accepted) / spec.m) + 2 * spec.m * cn
    nonprincipal_bound = 2 * spec.m * cn
    slack_principal = principal_bound - principal
    slack_tight = nonprincipal_bound - int(rest.max()) / scale
    slack_loose = nonprincipal_bound - int(rest.min()) / scale
    min_slack = min(slack_principal, slack_tight)
    max_slack = max(slack_principal, slack_loose)
    return Verdict(
        check="mod-odd-coefficient-bounds",
        passed=min_slack >= -1e-12,
        values={
            "m": spec.m,
            "n": spec.n,
            "principal": principal,
            "principal_bound": principal_bound,
            "max_nonprincipal": int(rest.max()) / scale,
            "nonprincipal_bound": nonprincipal_bound,
            "min_slack": min_slack,
            "max_slack": max_slack,
        },
    )


# ---------------------------------------------------------------------------
# Spectral sign-rank bounds
# ---------------------------------------------------------------------------


def _as_table(f) -> FourierTable:
    return f if isinstance(f, FourierTable) else fourier(f)


def forster_xor_bound(f, minval=Fraction(1)) -> BoundReport:
    """Sign-rank of the XOR matrix from the spectral-norm ratio.

    For a sign function the matrix entries have unit magnitude; minval
    generalizes to matrices whose entries are merely bounded away from 0.
    """
    table = _as_table(f)
    minval = Fraction(minval)
    if minval <= 0:
        raise ValueError("entry magnitudes must be bounded away from zero")
    top = table.max_abs_scaled()
    if top == 0:
        raise ValueError("the zero table has no spectral ratio")
    value = minval * (1 << table.n) / top
    chain = (
        ProvenanceStep(
            "forster-spectral-norm",
            "sr(M) >= min|M_ij| * size / ||M||",
            {"min_entry": rational_str(minval), "size_log2": table.n},
        ),
        ProvenanceStep(
            "xor-spectral-ratio",
            "||M_f|| equals 2^n times the largest coefficient magnitude",
            {"n": table.n, "max_scaled": top},
        ),
    )
    return BoundReport("sign-rank", value, False, chain, 0, vacuous=value <= 1)


def sufficient_bound(f, policy="greedy") -> BoundReport:
    """Sign-rank bound that drops a heavy set of coefficients first.

    Removing a set S of coefficients with total mass 1 - delta leaves a
    matrix that still sign-agrees with the original and whose entries
    have magnitude at least delta, so sr >= delta / max remaining
    coefficient. policy is "greedy" (drop largest-first while the ratio
    improves) or an explicit iterable of masks to drop.
    """
    table = _as_table(f)
    n, size = table.n, 1 << table.n
    if n > MAX_SPECTRUM_N:
        raise CapacityError(f"arity {n} exceeds the spectrum cap {MAX_SPECTRUM_N}")
    scaled = table.scaled
    mags = np.abs(scaled)
    if int(mags.max()) == 0:
        raise ValueError("the zero table has no spectral ratio")

    if isinstance(policy, str):
        if policy != "greedy":
            raise ValueError(f"unknown policy {policy!r}")
        order = np.lexsort((np.arange(size), -mags))
        best_num = best_den = None
        best_t, presum = 0, 0
        for t in range(size):
            delta = size - presum
            if delta <= 0:
                break
            c = int(mags[order[t]])
            if c == 0:
                break
            # strict improvement keeps ties on the smaller dropped set
            if best_num is None or delta * best_den > best_num * c:
                best_num, best_den, best_t = delta, c, t
            presum += c
        dropped = [int(order[i]) for i in range(best_t)]
        policy_name = "greedy"
    else:
        dropped = sorted({int(s) for s in policy})
        if any(not 0 <= s < size for s in dropped):
            raise ValueError("dropped masks must lie in [0, 2^n)")
        idx = np.asarray(dropped, dtype=np.int64)
        presum = int(mags[idx].sum())
        best_num = size - presum
        if best_num <= 0:
            raise ValueError("dropped coefficients exhaust the sign margin")
        keep = np.ones(size, dtype=bool)
        keep[idx] = False
        best_den = int(mags[keep].max())
        policy_name = "explicit"
    # a positive margin forces some remaining coefficient mass
    assert best_den > 0

    if dropped and n <= SIGN_CHECK_N:
        values = f.values() if isinstance(f, BooleanFunction) else table.inverse_values()
        if np.any(np.abs(values) != 1):
            raise ValueError("sign agreement is only defined for sign functions")
        part = np.zeros(size, dtype=np.int64)
        part[dropped] = scaled[dropped]
        residual = size * values - fwht(part)
        if np.any(residual == 0) or np.any(np.sign(residual) != values):
            raise ArithmeticError("dropped coefficients break sign agreement")

    value = Fraction(best_num, best_den)
    chain = (
        ProvenanceStep(
            "sufficient-coefficient-drop",
            "sr(M_f) >= delta / max remaining coefficient",
            {
                "policy": policy_name,
                "dropped_count": len(dropped),
                "dropped": ",".join(str(s) for s in dropped),
                "delta": rational_str(Fraction(best_num, size)),
                "max_remaining": rational_str(Fraction(best_den, size)),
                "sign_verified": bool(dropped) and n <= SIGN_CHECK_N,
            },
        ),
    )
    return BoundReport("sign-rank", value, False, chain, 0, vacuous=value <= 1)


def _odd_gap(m: int, n: int):
    """Sign-rank bound 1/(m^2 cos(pi/2m)^n) - 1 and its log2 when positive."""
    cos_half = math.cos(math.pi / (2 * m))
    cn = cos_half**n
    if cn > 0.0:
        sr = 1.0 / (m * m * cn) - 1.0
    else:
        sr = math.inf
    if sr == math.inf:
        log2_sr = -2.0 * math.log2(m) - n * math.log2(cos_half)
    elif sr > 0:
        log2_sr = math.log2(sr)
    else:
        log2_sr = None
    return sr, log2_sr


def odd_m_signrank_bound(m: int, n: int) -> BoundReport:
    """Sign-rank of the XOR lift of any non-trivial odd-modulus function.

    Dropping the principal coefficient costs at most 1 - 2/m of the sign
    margin while every surviving coefficient is exponentially small.
    """
    if m % 2 == 0 or m < 3:
        raise ValueError("the spectral gap requires an odd modulus of at least 3")
    if n < 1:
        raise ValueError("arity must be positive")
    sr, log2_sr = _odd_gap(m, n)
    cn = math.cos(math.pi / (2 * m)) ** n
    inputs = {
        "m": m,
        "n": n,
        "principal_margin": 2.0 / m - 2.0 * m * cn,
        "spectral_ceiling": 2.0 * m * cn,
        "signrank_bound": sr,
    }
    if log2_sr is not None:
        inputs["log2_bound"] = log2_sr
    chain = (
        ProvenanceStep(
            "odd-spectral-gap",
            "sr >= (2/m - 2m cos(pi/2m)^n) / (2m cos(pi/2m)^n)",
            inputs,
        ),
        ProvenanceStep(
            "asymptotic-form",
            "log2 sr grows as n/m^2 up to the 2 log2 m offset",
            {"m": m, "n": n},
        ),
    )
    return BoundReport("sign-rank", sr, False, chain, 1, vacuous=sr <= 1)


# ---------------------------------------------------------------------------
# Shift products and reduction chains
# ---------------------------------------------------------------------------


def _min_period(pattern):
    m = len(pattern)
    for d in range(1, m + 1):
        if m % d == 0 and pattern == _tiled(pattern[:d], m):
            return d
    return m


def shift_xor_identity(m: int, accepted, shift: int, n: int) -> ShiftXorIdentity:
    """Multiply a modular function by its shifted copy and name the result.

    The product accepts the symmetric difference of the residue sets; its
    minimal period decides whether the identity reduces the modulus.
    Verified pointwise at arity n.
    """
    base = ModSpec(m, accepted, max(n, 1))
    if n > MAX_VERIFY_N:
        raise CapacityError(f"arity {n} exceeds the verification cap {MAX_VERIFY_N}")
    if n < 1:
        raise ValueError("arity must be positive")
    shift %= m
    moved = frozenset((a + shift) % m for a in base.accepted)
    pattern = _pattern(m, base.accepted ^ moved)
    p = _min_period(pattern)
    reduced = _accepted_of(pattern[:p])
    if p <= 2:
        kind = "simple"
    elif p < m:
        kind = "smaller-modulus"
    elif p == 4 and reduced in _CQ_TRANSLATES:
        kind = "cq-translate"
    else:
        kind = "not-a-mod-reduction"
    left = (
        mod_function(ModSpec(m, base.accepted, n)).values()
        * mod_function(ModSpec(m, moved, n)).values()
    )
    if p == 1:
        right = np.full(1 << n, -1 if 0 in reduced else 1, dtype=np.int64)
    else:
        right = mod_function(ModSpec(p, reduced, n)).values()
    verified = bool(np.array_equal(left, right))
    return ShiftXorIdentity(p, reduced, verified, kind)


def _next_reduction(m, pattern):
    """One move of the even-modulus case analysis.

    Returns (kind, shift, target pattern, forced base tag). Sub-cases the
    analysis excludes raise instead of guessing.
    """
    k = m // 2
    halves = _xor(pattern[:k], pattern[k:])
    if len(set(halves)) > 1 and not _alternating(halves):
        return "shift-xor", k, halves, None
    if not any(halves):
        # the two halves agree, so the pattern already has period k
        if _pattern_simple(pattern[:k]):
            raise CaseExhaustionError("periodic pattern collapsed to a simple one")
        return "rewrite", None, pattern[:k], None
    if all(halves):
        diff = _xor(pattern, _shifted(pattern, 1))[:k]
        if len(set(diff)) == 1:
            raise CaseExhaustionError("antiperiodic pattern with constant unit step")
        if _alternating(diff):
            head = pattern[:4]
            if m % 4 == 0 and _tiled(head, m) == pattern and _accepted_of(head) in _CQ_TRANSLATES:
                return "rewrite", None, head, "cq-translate"
            raise CaseExhaustionError("alternating unit step off the period-4 track")
        return "shift-xor", 1, diff, None
    # halves differ by the parity pattern; step by two residues instead
    diff = _xor(pattern, _shifted(pattern, 2))[:k]
    if len(set(diff)) == 1:
        raise CaseExhaustionError("period-two structure slipped past simplicity")
    if _alternating(diff):
        head = pattern[:4]
        if m % 4 == 0 and _tiled(head, m) == pattern and not _pattern_simple(head):
            return "rewrite", None, head, None
        raise CaseExhaustionError("alternating double step off the period-4 track")
    return "shift-xor", 2, diff, None


def _verify_step(kind, src_m, src_pattern, shift, dst_pattern, arity):
    """Pointwise check of one reduction identity at the given arity."""
    dst_m = len(dst_pattern)
    if kind == "shift-xor":
        if _tiled(dst_pattern, src_m) != _xor(src_pattern, _shifted(src_pattern, shift)):
            raise CaseExhaustionError("derived pattern disagrees with the shift product")
        src = _accepted_of(src_pattern)
        moved = frozenset((a + shift) % src_m for a in src)
        left = (
            mod_function(ModSpec(src_m, src, arity)).values()
            * mod_function(ModSpec(src_m, moved, arity)).values()
        )
    else:
        if _tiled(dst_pattern, src_m) != src_pattern:
            raise CaseExhaustionError("rewrite target does not tile the source pattern")
        left = mod_function(ModSpec(src_m, _accepted_of(src_pattern), arity)).values()
    right = mod_function(ModSpec(dst_m, _accepted_of(dst_pattern), arity)).values()
    return bool(np.array_equal(left, right))


def reduction_chain(m: int, accepted, verification_arity: int = 12) -> ReductionChain:
    """Reduce an even modulus to an odd one or to 4 by verified steps.

    Shift products halve the modulus and consume m variables each; pure
    rewrites rename a periodic pattern at no cost. The chain ends at an
    odd modulus, at modulus 4, or at a recognized translate of the
    period-4 two-run pattern.
    """
    spec = ModSpec(m, accepted, max(verification_arity, 1))
    if verification_arity > MAX_VERIFY_N:
        raise CapacityError(
            f"arity {verification_arity} exceeds the verification cap {MAX_VERIFY_N}"
        )
    if verification_arity < 1:
        raise ValueError("verification arity must be positive")
    pattern = _pattern(spec.m, spec.accepted)
    if _pattern_simple(pattern):
        raise ValueError("constant and parity-like patterns have no reduction chain")
    steps = []
    cur_m, cur_pattern = spec.m, pattern
    forced = None
    while cur_m % 2 == 0 and cur_m != 4:
        kind, shift, nxt, tag = _next_reduction(cur_m, cur_pattern)
        verified = _verify_step(kind, cur_m, cur_pattern, shift, nxt, verification_arity)
        if not verified:
            raise CaseExhaustionError("reduction identity failed its pointwise check")
        steps.append(
            ReductionStep(
                kind=kind,
                source=ModSpec(cur_m, _accepted_of(cur_pattern), verification_arity),
                target=ModSpec(len(nxt), _accepted_of(nxt), verification_arity),
                shift=shift,
                arity_loss=cur_m if kind == "shift-xor" else 0,
                verified=verified,
            )
        )
        cur_m, cur_pattern = len(nxt), nxt
        if tag is not None:
            forced = tag
            break
    base = forced if forced else ("odd" if cur_m % 2 else "mod-4")
    return ReductionChain(
        steps=tuple(steps),
        base=base,
        base_spec=ModSpec(cur_m, _accepted_of(cur_pattern), verification_arity),
        verification_arity=verification_arity,
        structurally_sufficient=verification_arity >= 2 * spec.m,
    )


# ---------------------------------------------------------------------------
# Composed communication reports
# ---------------------------------------------------------------------------


def _mod4_value(accepted, arity):
    if accepted == frozenset({0, 1}):
        return arity / 2
    if accepted in _CQ_TRANSLATES:
        return (arity - 4) / 2
    # singleton or three-residue classes modulo 4
    return (arity - 12) / 4


def upp_bound_report(spec: ModSpec) -> BoundReport:
    """Unbounded-error communication bound for the XOR lift of a modular
    function, composed through its reduction chain.

    Every shift product halves the bound and burns m variables; the base
    is either the odd-modulus spectral gap or the modulus-4 case table.
    """
    chain = reduction_chain(spec.m, spec.accepted)
    arity = spec.n
    prov = []
    halvings = 0
    for step in chain.steps:
        arity -= step.arity_loss
        if step.kind == "shift-xor":
            halvings += 1
            prov.append(
                ProvenanceStep(
                    "modulus-halving",
                    "U(f) >= U(f * shifted f) / 2 at m fewer variables",
                    {
                        "modulus": step.source.m,
                        "target_modulus": step.target.m,
                        "shift": step.shift,
                        "arity_after": arity,
                    },
                )
            )
        else:
            prov.append(
                ProvenanceStep(
                    "pattern-rewrite",
                    "identical functions share every communication measure",
                    {
                        "modulus": step.source.m,
                        "target_modulus": step.target.m,
                        "arity_after": arity,
                    },
                )
            )
    if arity < 1:
        base_value = None
        prov.append(
            ProvenanceStep(
                "arity-exhausted",
                "the chain consumes every variable before the base case",
                {"arity_after": arity},
            )
        )
    elif chain.base == "odd":
        j = chain.base_spec.m
        _, base_value = _odd_gap(j, arity)
        prov.append(
            ProvenanceStep(
                "odd-spectral-gap",
                "U >= log2 of the odd-modulus sign-rank bound",
                {"modulus": j, "arity": arity, "log2_bound": base_value},
            )
        )
    else:
        accepted4 = chain.base_spec.accepted
        base_value = _mod4_value(accepted4, arity)
        prov.append(
            ProvenanceStep(
                "mod4-threshold-gap",
                "U is linear in the arity for every hard residue class mod 4",
                {"accepted": sorted(accepted4), "arity": arity, "bound": base_value},
            )
        )
    prov.append(
        ProvenanceStep(
            "upp-signrank-equivalence",
            "unbounded-error cost matches log2 sign rank within one bit",
            {},
        )
    )
    value = None if base_value is None else base_value / (1 << halvings)
    vacuous = value is None or value <= 0
    return BoundReport("UPP", value, True, tuple(prov), 1, vacuous=vacuous)


def circuit_size_bound(spec: ModSpec, c: int) -> BoundReport:
    """Size bound for threshold-of-cost-c circuits computing the XOR lift.

    A circuit of s gates whose output gate sees sign-rank cost c per gate
    yields a sign-rank ceiling of s*c, so s is at least sign-rank / c.
    """
    if not isinstance(c, int) or c < 1:
        raise ValueError("per-gate cost must be a positive integer")
    upp = upp_bound_report(spec)
    if upp.value is None:
        value = None
    else:
        value = float(2.0**upp.value) / c if upp.value < 1024 else math.inf
    chain = upp.chain + (
        ProvenanceStep(
            "rank-additivity",
            "s gates of sign-rank cost c bound the output sign rank by s*c",
            {"per_gate_cost": c},
        ),
    )
    vacuous = value is None or value <= 1
    return BoundReport("size", value, False, chain, upp.slack, vacuous=vacuous)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def mod_spec_to_json(spec: ModSpec) -> dict:
    return {"m": spec.m, "accepted": sorted(spec.accepted), "n": spec.n}


def reduction_chain_to_json(chain: ReductionChain) -> dict:
    return {
        "steps": [
            {
                "kind": s.kind,
                "from": mod_spec_to_json(s.source),
                "to": mod_spec_to_json(s.target),
                "shift": s.shift,
                "arity_loss": s.arity_loss,
                "verified": s.verified,
            }
            for s in chain.steps
        ],
        "base": chain.base,
        "base_spec": mod_spec_to_json(chain.base_spec),
        "verification_arity": chain.verification_arity,
        "structurally_sufficient": chain.structurally_sufficient,
    }
