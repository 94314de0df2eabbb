"""Communication bounds for sign matrices and lifted Boolean functions.

Discrepancy is the minimax rectangle correlation of a sign matrix: for a
joint distribution on the entries, the largest absolute mass-weighted sum
over a combinatorial rectangle, minimized over distributions. Everything
here is exact: distributions are rational grids, the minimization is a
cutting-plane loop over an exact simplex, and every reported inequality
either carries the rational quantities it was computed from or is flagged
as holding up to unstated constant factors (the slack count).

Matrix construction covers two lifts of a Boolean function: the xor lift
M[x, y] = f(x xor y) and the pattern lift, where Alice holds two bits per
input position and Bob's column selects one bit of each pair and then
optionally flips it. Lower-bound pipelines (generalized discrepancy and
the approximate-weight route to bounded-error cost) end in a BoundReport
whose provenance chain records each inequality with its inputs, so a
report can be re-verified without rerunning the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    BooleanFunction,
    CapacityError,
    CommMatrix,
    MAX_TABLE_N,
    binomial,
    ltf_function,
    rational_str,
    universal_threshold_weights,
    xor_compose,
)
from .lifting import MonomialList
from .measures import (
    NoSignRepresentation,
    approx_weight,
    degree_bounded_threshold_weight,
    krawtchouk,
    margin,
)
from . import lp

MAX_DISC_DIM = 8  # rectangle enumeration is 2^rows * 2^cols
MAX_SANDWICH_N = 3  # needs disc_exact on a 2^n x 2^n matrix
MAX_PATTERN_N = 5  # the pattern lift is 4^n x 4^n
MAX_LIFTED_N = 12  # exact rational transform over 2^n points
MAX_LIFT_POINTS = 1 << 8  # lifted grids materialize 4^n rational masses
MAX_PM_BOUND_N = 10  # one degree-restricted weight program per degree
MAX_BPP_DENSE_N = 4  # dual program over all 2^n characters
MAX_BPP_SYMMETRIC_N = 16  # level-indexed dual program
MAX_EMBED_WEIGHT = 1 << 24
_CUTS_PER_ROUND = 8

THIRD = Fraction(1, 3)


# ---------------------------------------------------------------------------
# Joint distributions on matrix entries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointDistribution:
    """Nonnegative rational masses on a grid, summing to exactly one."""

    masses: tuple

    def __post_init__(self):
        if not self.masses or not self.masses[0]:
            raise ValueError("distribution grid must be nonempty")
        width = len(self.masses[0])
        total = Fraction(0)
        for row in self.masses:
            if len(row) != width:
                raise ValueError("distribution grid must be rectangular")
            for v in row:
                if v < 0:
                    raise ValueError(f"negative mass {v}")
                total += v
        if total != 1:
            raise ValueError(f"masses sum to {total}, not 1")

    @classmethod
    def from_grid(cls, grid) -> "JointDistribution":
        return cls(tuple(tuple(Fraction(v) for v in row) for row in grid))

    @property
    def rows(self) -> int:
        return len(self.masses)

    @property
    def cols(self) -> int:
        return len(self.masses[0])

    def mass(self, x: int, y: int) -> Fraction:
        return self.masses[x][y]


def uniform_distribution(rows: int, cols: int) -> JointDistribution:
    cell = Fraction(1, rows * cols)
    return JointDistribution(tuple(tuple(cell for _ in range(cols)) for _ in range(rows)))


def point_mass(rows: int, cols: int, x: int, y: int) -> JointDistribution:
    if not (0 <= x < rows and 0 <= y < cols):
        raise ValueError(f"cell ({x}, {y}) outside a {rows}x{cols} grid")
    return JointDistribution(
        tuple(
            tuple(Fraction(1) if (i, j) == (x, y) else Fraction(0) for j in range(cols))
            for i in range(rows)
        )
    )


def lifted_distribution(mu) -> JointDistribution:
    """Spread an input distribution over the xor lift: each diagonal class
    {(x, y) : x xor y = z} splits mu(z) evenly among its 2^n cells."""
    mu = [Fraction(v) for v in mu]
    size = len(mu)
    if size == 0 or size & (size - 1):
        raise ValueError(f"need a power-of-two number of masses, got {size}")
    if size > MAX_LIFT_POINTS:
        raise CapacityError(f"{size} input points exceed the lift cap {MAX_LIFT_POINTS}")
    if any(v < 0 for v in mu):
        raise ValueError("masses must be nonnegative")
    if sum(mu) != 1:
        raise ValueError("masses must sum to 1")
    scale = Fraction(1, size)
    return JointDistribution(
        tuple(tuple(mu[x ^ y] * scale for y in range(size)) for x in range(size))
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProvenanceStep:
    """One applied inequality: which result, in which form, on which inputs."""

    theorem: str
    inequality: str
    inputs: dict


@dataclass(frozen=True)
class BoundReport:
    """A communication bound plus the inequality chain that produced it.

    value is a log2 quantity when log2 is set, otherwise a plain bound;
    slack counts chain steps that hide unstated constant factors, so a
    slack of zero means every constant is explicit in the chain. vacuous
    flags bounds that exclude nothing.
    """

    kind: str  # "PP" | "BPP" | "UPP" | "disc" | "sign-rank"
    value: object
    log2: bool
    chain: tuple
    slack: int
    vacuous: bool = False


@dataclass(frozen=True)
class Verdict:
    """Outcome of one mechanically checked inequality on one function."""

    check: str
    passed: bool
    values: dict


def _value_to_json(value):
    if value is None:
        return None
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, bool) or isinstance(value, int):
        return value
    return float(value)


def bound_report_to_json(report: BoundReport) -> dict:
    return {
        "kind": report.kind,
        "value": _value_to_json(report.value),
        "log2": report.log2,
        "slack": report.slack,
        "vacuous": report.vacuous,
        "chain": [
            {"theorem": s.theorem, "inequality": s.inequality, "inputs": s.inputs}
            for s in report.chain
        ],
    }


def verdict_to_json(verdict: Verdict) -> dict:
    return {
        "check": verdict.check,
        "passed": verdict.passed,
        "values": {k: _value_to_json(v) for k, v in verdict.values.items()},
    }


def joint_to_json(dist: JointDistribution) -> dict:
    return {
        "rows": dist.rows,
        "cols": dist.cols,
        "masses": [[rational_str(v) for v in row] for row in dist.masses],
    }


# ---------------------------------------------------------------------------
# Discrepancy
# ---------------------------------------------------------------------------


def _check_disc_shape(matrix: CommMatrix, lam: JointDistribution) -> None:
    if (lam.rows, lam.cols) != (matrix.rows, matrix.cols):
        raise ValueError(
            f"distribution is {lam.rows}x{lam.cols}, matrix is {matrix.rows}x{matrix.cols}"
        )
    if max(matrix.rows, matrix.cols) > MAX_DISC_DIM:
        raise CapacityError(
            f"{matrix.rows}x{matrix.cols} exceeds the rectangle cap {MAX_DISC_DIM}"
        )


def _signed_cells(matrix: CommMatrix, lam: JointDistribution) -> list:
    ent = matrix.entries
    return [
        [lam.masses[x][y] * int(ent[x, y]) for y in range(matrix.cols)]
        for x in range(matrix.rows)
    ]


def _extreme_rectangles(weighted):
    """For each nonempty column set, the row sets with the most positive and
    most negative rectangle mass; yields (|sum|, row mask, column mask, sign).
    Column sets extend by one column at a time, so the row sums are shared."""
    rows = len(weighted)
    cols = len(weighted[0])
    zero = Fraction(0)
    sums = [None] * (1 << cols)
    sums[0] = [zero] * rows
    for tmask in range(1, 1 << cols):
        low = tmask & -tmask
        y = low.bit_length() - 1
        prev = sums[tmask ^ low]
        cur = [p + w[y] for p, w in zip(prev, weighted)]
        sums[tmask] = cur
        pos = neg = zero
        pos_rows = neg_rows = 0
        for x, v in enumerate(cur):
            if v > 0:
                pos += v
                pos_rows |= 1 << x
            elif v < 0:
                neg -= v
                neg_rows |= 1 << x
        yield pos, pos_rows, tmask, 1
        yield neg, neg_rows, tmask, -1


def corr_under(left: CommMatrix, right: CommMatrix, lam: JointDistribution) -> Fraction:
    """Mass-weighted agreement sum(lam(x, y) L[x, y] R[x, y]), exactly."""
    if (left.rows, left.cols) != (right.rows, right.cols):
        raise ValueError("matrix shapes differ")
    if (lam.rows, lam.cols) != (left.rows, left.cols):
        raise ValueError("distribution shape does not match the matrices")
    le, re = left.entries, right.entries
    total = Fraction(0)
    for x in range(left.rows):
        row = lam.masses[x]
        for y in range(left.cols):
            if row[y]:
                total += row[y] * int(le[x, y]) * int(re[x, y])
    return total


def disc_under(matrix: CommMatrix, lam: JointDistribution) -> Fraction:
    """Largest |rectangle mass| of the matrix weighted by lam, exactly."""
    _check_disc_shape(matrix, lam)
    best = Fraction(0)
    for value, _, _, _ in _extreme_rectangles(_signed_cells(matrix, lam)):
        if value > best:
            best = value
    return best


def disc_exact(matrix: CommMatrix):
    """Discrepancy minimized over all distributions, with the witness.

    Cutting-plane loop: minimize a bound variable over distributions
    subject to the rectangle constraints found so far, then search all
    rectangles for one the current distribution violates. At termination
    the distribution satisfies every rectangle, so its worst rectangle
    equals the optimum of the relaxation and both equal the true value;
    returns (value, distribution) after re-checking that equality.

    A matrix of the form M[x, y] = g(x xor y) is minimized over diagonal
    distributions mu(x xor y) / size only: the matrix and the rectangle
    family are invariant under translating both sides by any a, and the
    worst rectangle mass is convex in the distribution, so averaging a
    minimizer over all translations reaches the same value.
    """
    rows_n, cols_n = matrix.rows, matrix.cols
    if max(rows_n, cols_n) > MAX_DISC_DIM:
        raise CapacityError(f"{rows_n}x{cols_n} exceeds the rectangle cap {MAX_DISC_DIM}")
    table = _xor_table(matrix)
    if table is not None:
        return _disc_exact_lifted(matrix, table)
    return _disc_exact_dense(matrix)


def _xor_table(matrix: CommMatrix):
    """The diagonal table g with M[x, y] = g(x xor y), or None."""
    size = matrix.rows
    if matrix.cols != size or size & (size - 1):
        return None
    ent = matrix.entries
    base = [int(v) for v in ent[0]]
    for x in range(1, size):
        row = ent[x]
        for y in range(size):
            if int(row[y]) != base[x ^ y]:
                return None
    return base


def _cut_loop(cp, nvars, make_distribution, weighted_cells, make_cut, matrix):
    """Shared separation loop: solve, search rectangles, batch the worst."""
    while True:
        if cp.status != "optimal":
            raise AssertionError(f"discrepancy program became {cp.status}")
        sol = cp.solution()
        point = sol.primal[:nvars]
        eps = sol.value
        violated = [
            cell
            for cell in _extreme_rectangles(weighted_cells(point))
            if cell[0] > eps
        ]
        if not violated:
            dist = make_distribution(point)
            assert disc_under(matrix, dist) == eps
            return eps, dist
        violated.sort(key=lambda c: (-c[0], c[3], c[2], c[1]))
        cp.add_le_rows(
            [make_cut(smask, tmask, sign) for _, smask, tmask, sign in violated[:_CUTS_PER_ROUND]]
        )


def _disc_exact_dense(matrix: CommMatrix):
    rows_n, cols_n = matrix.rows, matrix.cols
    ent = [[int(v) for v in row] for row in matrix.entries]
    rc = rows_n * cols_n
    # one mass variable per cell, then the bound variable
    objective = [Fraction(0)] * rc + [Fraction(1)]
    full = [ent[x][y] for x in range(rows_n) for y in range(cols_n)]
    base_rows = [
        ([1] * rc + [0], "=", 1),
        (full + [-1], "<=", 0),
        ([-v for v in full] + [-1], "<=", 0),
    ]
    cp = lp.CuttingPlane(
        lp.LinearProgram.build("min", objective, base_rows, ["nonneg"] * (rc + 1))
    )

    def weighted_cells(lam):
        return [
            [lam[x * cols_n + y] * ent[x][y] for y in range(cols_n)]
            for x in range(rows_n)
        ]

    def make_distribution(lam):
        return JointDistribution(
            tuple(tuple(lam[x * cols_n + y] for y in range(cols_n)) for x in range(rows_n))
        )

    def make_cut(smask, tmask, sign):
        coeffs = [Fraction(0)] * (rc + 1)
        for x in range(rows_n):
            if not smask >> x & 1:
                continue
            for y in range(cols_n):
                if tmask >> y & 1:
                    coeffs[x * cols_n + y] = Fraction(sign * ent[x][y])
        coeffs[rc] = Fraction(-1)
        return coeffs, 0

    return _cut_loop(cp, rc, make_distribution, weighted_cells, make_cut, matrix)


def _disc_exact_lifted(matrix: CommMatrix, table: list):
    size = len(table)
    scale = Fraction(1, size)
    # one mass variable per diagonal value, then the bound variable
    objective = [Fraction(0)] * size + [Fraction(1)]
    base_rows = [
        ([1] * size + [0], "=", 1),
        (list(table) + [-1], "<=", 0),
        ([-v for v in table] + [-1], "<=", 0),
    ]
    cp = lp.CuttingPlane(
        lp.LinearProgram.build("min", objective, base_rows, ["nonneg"] * (size + 1))
    )

    def weighted_cells(mu):
        diag = [mu[z] * table[z] * scale for z in range(size)]
        return [[diag[x ^ y] for y in range(size)] for x in range(size)]

    def make_distribution(mu):
        return JointDistribution(
            tuple(tuple(mu[x ^ y] * scale for y in range(size)) for x in range(size))
        )

    def make_cut(smask, tmask, sign):
        counts = [0] * size
        for x in range(size):
            if not smask >> x & 1:
                continue
            for y in range(size):
                if tmask >> y & 1:
                    counts[x ^ y] += 1
        coeffs = [sign * table[z] * counts[z] * scale for z in range(size)]
        coeffs.append(Fraction(-1))
        return coeffs, 0

    return _cut_loop(cp, size, make_distribution, weighted_cells, make_cut, matrix)


def _fwht_exact(values: list) -> list:
    """Unnormalized character sums sum_x v[x] chi_S(x) for every mask S.
    Exact over rationals; the array transform in core is an int64 fast path."""
    out = list(values)
    h = 1
    while h < len(out):
        for start in range(0, len(out), 2 * h):
            for i in range(start, start + h):
                a, b = out[i], out[i + h]
                out[i] = a + b
                out[i + h] = a - b
        h *= 2
    return out


def disc_lifted_bound(f: BooleanFunction, mu) -> Fraction:
    """Spectral bound on disc of the xor lift under the lifted mu: the
    largest |sum_x mu(x) f(x) chi_S(x)| over all masks S, exactly."""
    if f.n > MAX_LIFTED_N:
        raise CapacityError(f"arity {f.n} exceeds the lifted-bound cap {MAX_LIFTED_N}")
    mu = [Fraction(v) for v in mu]
    if len(mu) != f.size:
        raise ValueError(f"need {f.size} masses, got {len(mu)}")
    if any(v < 0 for v in mu):
        raise ValueError("masses must be nonnegative")
    if sum(mu) != 1:
        raise ValueError("masses must sum to 1")
    signed = [m * f.value(x) for x, m in enumerate(mu)]
    return max(abs(v) for v in _fwht_exact(signed))


def sandwich_check(f: BooleanFunction) -> Verdict:
    """disc(f xor) <= margin(f) <= 4 disc(f xor), both sides exact."""
    if f.n > MAX_SANDWICH_N:
        raise CapacityError(f"arity {f.n} exceeds the sandwich cap {MAX_SANDWICH_N}")
    margin_value = margin(f).value
    disc_value, _ = disc_exact(xor_compose(f))
    passed = disc_value <= margin_value <= 4 * disc_value
    return Verdict(
        "margin-discrepancy-sandwich",
        passed,
        {"margin": margin_value, "disc": disc_value},
    )


# ---------------------------------------------------------------------------
# Pattern matrices
# ---------------------------------------------------------------------------


def pattern_compose(f: BooleanFunction) -> CommMatrix:
    """The pattern lift of f: Alice holds bit pairs (x_{i,1}, x_{i,2}) packed
    little-endian at positions 2(i-1) and 2(i-1)+1, Bob holds selectors z
    (positions 0..n-1) and flips w (positions n..2n-1), and the entry is
    f applied to the selected, flipped bits."""
    n = f.n
    if n > MAX_PATTERN_N:
        raise CapacityError(f"arity {n} exceeds the pattern cap {MAX_PATTERN_N}")
    dim = 1 << (2 * n)
    b = np.arange(dim, dtype=np.int64)
    z = [(b >> i) & 1 for i in range(n)]
    w = [(b >> (n + i)) & 1 for i in range(n)]
    table = f.values()
    entries = np.empty((dim, dim), dtype=np.int8)
    for a in range(dim):
        u = np.zeros(dim, dtype=np.int64)
        for i in range(n):
            x1 = a >> (2 * i) & 1
            x2 = a >> (2 * i + 1) & 1
            selected = np.where(z[i] == 1, x2, x1)
            u |= (selected ^ w[i]) << i
        entries[a] = table[u]
    return CommMatrix(entries)


def pm_disc_bound(f: BooleanFunction) -> BoundReport:
    """Discrepancy bound for the pattern lift: for every split degree d,
    disc is at most max(sqrt(n / W(f, d-1)), 2^(-d/2)); takes the best d,
    comparing the exact squared terms before any rounding. A missing
    bounded-degree sign representation kills the first term entirely."""
    n = f.n
    if n > MAX_PM_BOUND_N:
        raise CapacityError(f"arity {n} exceeds the pattern-bound cap {MAX_PM_BOUND_N}")
    best_sq = None
    best_d = None
    for d in range(1, n + 1):
        try:
            low_weight = degree_bounded_threshold_weight(f, d - 1).value
            term_sq = Fraction(n) / low_weight
        except NoSignRepresentation:
            term_sq = Fraction(0)
        candidate = max(term_sq, Fraction(1, 1 << d))
        if best_sq is None or candidate < best_sq:
            best_sq = candidate
            best_d = d
    step = ProvenanceStep(
        "pattern-matrix-discrepancy",
        "disc(pattern lift) <= max(sqrt(n / W(f, d-1)), 2^(-d/2)) for every d",
        {"d": best_d, "arity": n, "value_squared": rational_str(best_sq)},
    )
    return BoundReport(
        kind="disc",
        value=math.sqrt(best_sq),
        log2=False,
        chain=(step,),
        slack=0,
        vacuous=best_sq >= 1,
    )


def xorand_check(f: BooleanFunction) -> Verdict:
    """Exact-scale form of the xor-to-pattern discrepancy transfer:
    disc(pattern lift)^2 <= 4n disc(xor lift)."""
    if f.n != 1:
        raise CapacityError("the transfer check is sized for arity 1")
    xor_disc, _ = disc_exact(xor_compose(f))
    pm_disc, _ = disc_exact(pattern_compose(f))
    passed = pm_disc * pm_disc <= 4 * f.n * xor_disc
    return Verdict(
        "xor-pattern-discrepancy-transfer",
        passed,
        {"xor_disc": xor_disc, "pm_disc": pm_disc},
    )


# ---------------------------------------------------------------------------
# Lower-bound pipelines
# ---------------------------------------------------------------------------


_GEN_DISC_INEQ = "R_eps(F) >= log2((corr - 1 + 2 eps) / disc) under any distribution"


def gen_disc_lower_bound(
    left: CommMatrix,
    right: CommMatrix,
    nu: JointDistribution,
    eps,
    disc_bound=None,
) -> BoundReport:
    """Generalized discrepancy: a protocol for left that errs with
    probability eps correlates with right, so its cost pays for right's
    discrepancy under nu. disc_bound substitutes for the exact rectangle
    search when the matrices exceed the enumeration cap."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError(f"error rate must lie in (0, 1/2), got {eps}")
    if (left.rows, left.cols) != (right.rows, right.cols):
        raise ValueError("matrix shapes differ")
    if (nu.rows, nu.cols) != (left.rows, left.cols):
        raise ValueError("distribution shape does not match the matrices")
    if disc_bound is not None:
        disc_bound = Fraction(disc_bound)
        if not 0 < disc_bound <= 1:
            raise ValueError(f"discrepancy bound must lie in (0, 1], got {disc_bound}")
    corr = corr_under(left, right, nu)
    advantage = corr - 1 + 2 * eps
    inputs = {"correlation": rational_str(corr), "eps": rational_str(eps)}
    if advantage <= 0:
        step = ProvenanceStep(
            "generalized-discrepancy",
            _GEN_DISC_INEQ,
            dict(inputs, advantage=rational_str(advantage)),
        )
        return BoundReport(
            kind="BPP", value=None, log2=True, chain=(step,), slack=0, vacuous=True
        )
    if disc_bound is None:
        disc = disc_under(right, nu)
        source = "computed"
    else:
        disc = disc_bound
        source = "supplied"
    ratio = advantage / disc
    step = ProvenanceStep(
        "generalized-discrepancy",
        _GEN_DISC_INEQ,
        dict(
            inputs,
            disc=rational_str(disc),
            disc_source=source,
            ratio=rational_str(ratio),
        ),
    )
    return BoundReport(
        kind="BPP",
        value=math.log2(ratio),
        log2=True,
        chain=(step,),
        slack=0,
        vacuous=ratio <= 1,
    )


def _bpp_dense_witness(f: BooleanFunction):
    """Dual of the error-minimization program at the 1/3-approximate weight.

    Minimizing the pointwise error of polynomials with coefficient mass at
    most wt_{1/3}(f) peaks at exactly 1/3, and the row prices recover a
    signed measure mu with sum |mu| in [1/3, 1] whose normalization nu, g
    satisfies the correlation and spectral guarantees checked downstream.
    """
    size = f.size
    wprime = approx_weight(f, THIRD).value
    objective = [1] + [0] * (2 * size)
    rows = []
    for x in range(size):
        fx = f.value(x)
        upper = [Fraction(-1)] + [Fraction(0)] * (2 * size)
        lower = [Fraction(1)] + [Fraction(0)] * (2 * size)
        for s in range(size):
            c = -1 if bin(s & x).count("1") % 2 else 1
            upper[1 + 2 * s] = -c
            upper[2 + 2 * s] = c
            lower[1 + 2 * s] = -c
            lower[2 + 2 * s] = c
        rows.append((upper, "<=", fx))
        rows.append((lower, ">=", fx))
    rows.append(([0] + [1] * (2 * size), "<=", wprime))
    sol = lp.solve(lp.LinearProgram.build("min", objective, rows, ["nonneg"] * (1 + 2 * size)))
    if sol.status != "optimal" or sol.value != THIRD:
        raise AssertionError("error minimization at the 1/3-weight must peak at 1/3")
    mu = [sol.dual[2 * x] + sol.dual[2 * x + 1] for x in range(size)]
    total = sum(abs(m) for m in mu)
    if not (-sol.dual[-1] >= 0 and THIRD <= total <= 1):
        raise AssertionError("dual prices violate their structural bounds")
    mu = [m / total for m in mu]
    corr = sum(m * f.value(x) for x, m in enumerate(mu))
    bound = max(abs(v) for v in _fwht_exact(mu))
    pairs = [[x, rational_str(m)] for x, m in enumerate(mu) if m]
    return wprime, "mu", pairs, corr, bound


def _bpp_level_witness(f: BooleanFunction):
    """Level-indexed variant of the dense witness for symmetric functions:
    one constraint pair per Hamming weight, mass counted per level."""
    pred = f.to_predicate()
    n = pred.n
    wprime = approx_weight(f, THIRD).value
    objective = [1] + [0] * (2 * (n + 1))
    rows = []
    for w in range(n + 1):
        upper = [Fraction(-1)] + [Fraction(0)] * (2 * (n + 1))
        lower = [Fraction(1)] + [Fraction(0)] * (2 * (n + 1))
        for s in range(n + 1):
            c = krawtchouk(n, w, s)
            upper[1 + 2 * s] = -c
            upper[2 + 2 * s] = c
            lower[1 + 2 * s] = -c
            lower[2 + 2 * s] = c
        rows.append((upper, "<=", pred[w]))
        rows.append((lower, ">=", pred[w]))
    mass = [0] * (1 + 2 * (n + 1))
    for s in range(n + 1):
        mass[1 + 2 * s] = mass[2 + 2 * s] = binomial(n, s)
    rows.append((mass, "<=", wprime))
    sol = lp.solve(
        lp.LinearProgram.build("min", objective, rows, ["nonneg"] * (1 + 2 * (n + 1)))
    )
    if sol.status != "optimal" or sol.value != THIRD:
        raise AssertionError("error minimization at the 1/3-weight must peak at 1/3")
    mu = [sol.dual[2 * w] + sol.dual[2 * w + 1] for w in range(n + 1)]
    total = sum(abs(m) for m in mu)
    if not (-sol.dual[-1] >= 0 and THIRD <= total <= 1):
        raise AssertionError("dual prices violate their structural bounds")
    mu = [m / total for m in mu]
    corr = sum(m * pred[w] for w, m in enumerate(mu))
    bound = max(
        abs(
            sum(
                m * Fraction(krawtchouk(n, s, w), binomial(n, w))
                for w, m in enumerate(mu)
            )
        )
        for s in range(n + 1)
    )
    pairs = [[w, rational_str(m)] for w, m in enumerate(mu) if m]
    return wprime, "level_mu", pairs, corr, bound


def bpp_lower_bound(f: BooleanFunction) -> BoundReport:
    """Bounded-error cost of the xor lift from the 1/3-approximate weight:
    R_{7/15}(f xor) >= log2(wt_{1/3}(f)) - 4, every constant explicit.

    The chain: the weight program's dual yields nu, g with correlation at
    least 1/3 against f and all character sums of g nu at most 3 / weight;
    the character sums bound the lifted discrepancy of g's xor matrix; and
    generalized discrepancy at error 7/15 turns the gap into cost. Witness
    inequalities are re-checked exactly before the report is issued.
    """
    if f.is_symmetric() and f.n <= MAX_BPP_SYMMETRIC_N:
        wprime, key, pairs, corr, bound = _bpp_level_witness(f)
    elif f.n <= MAX_BPP_DENSE_N:
        wprime, key, pairs, corr, bound = _bpp_dense_witness(f)
    else:
        raise CapacityError(
            f"needs a symmetric function of arity <= {MAX_BPP_SYMMETRIC_N} "
            f"or any function of arity <= {MAX_BPP_DENSE_N}"
        )
    cap = 3 / wprime
    if corr < THIRD or bound > cap:
        raise AssertionError("dual witness violates its guarantees")
    value = math.log2(wprime) - 4
    chain = (
        ProvenanceStep(
            "approx-weight-duality",
            "corr_nu(f, g) >= 1/3 and max_S |sum_x nu(x) g(x) chi_S(x)| <= 3 / weight",
            {
                "weight": rational_str(wprime),
                key: pairs,
                "correlation": rational_str(corr),
                "spectral_bound": rational_str(bound),
            },
        ),
        ProvenanceStep(
            "xor-lift-discrepancy",
            "disc of the xor lift of g under lifted nu <= max_S |sum_x nu(x) g(x) chi_S(x)|",
            {"disc_bound": rational_str(bound), "cap": rational_str(cap)},
        ),
        ProvenanceStep(
            "generalized-discrepancy",
            _GEN_DISC_INEQ,
            {"eps": "7/15", "advantage_floor": "4/15", "bound": value},
        ),
    )
    return BoundReport(
        kind="BPP",
        value=value,
        log2=True,
        chain=chain,
        slack=0,
        vacuous=wprime <= 16,
    )


# ---------------------------------------------------------------------------
# Universal threshold functions and embeddings
# ---------------------------------------------------------------------------


def universal_threshold(l: int, k: int):
    """Weights and offset of the canonical threshold function: l variables
    at each weight 2, 4, ..., 2^k, offset 1/2 so no input ever ties."""
    weights, offset = universal_threshold_weights(l, k)
    return list(weights), offset


def ghr_matrix(l: int, k: int) -> CommMatrix:
    """Xor lift of the canonical threshold function on l*k inputs."""
    weights, offset = universal_threshold_weights(l, k)
    return xor_compose(ltf_function(weights, offset))


def _balanced_pad(free):
    """Per-power pad imbalances net with |net_j| <= free[j], matching
    free[j]'s parity, and sum net_j 2^(j+1) = 0; None when impossible.
    Searched high power to low, carrying the required remainder down."""
    k = len(free)
    reach = [0] * k  # largest |sum| the powers up to j can produce
    acc = 0
    for j in range(k):
        acc += free[j] << (j + 1)
        reach[j] = acc
    memo = {}

    def descend(j, need):
        # remaining levels j..0 must sum to need * 2^(j+1)
        if j < 0:
            return [] if need == 0 else None
        if abs(need) << (j + 1) > reach[j]:
            return None
        key = (j, need)
        if key in memo:
            return memo[key]
        result = None
        for net in sorted(range(-free[j], free[j] + 1), key=abs):
            if (net - free[j]) % 2:
                continue
            rest = descend(j - 1, 2 * (need - net))
            if rest is not None:
                result = rest + [net]
                break
        memo[key] = result
        return result

    return descend(k - 1, 0)


def embed_ltf(weights):
    """Embed an integer-weight threshold sgn(sum w_i x_i) into a canonical
    threshold function by variable substitution.

    Doubling every weight makes the linear form even while the offset 1/2
    stays below it, so feeding x_i (negated for w_i < 0) into one slot per
    set bit of 2|w_i| reproduces the sign pointwise, provided the unused
    slots get constants that cancel exactly. Returns (l, k, substitution)
    for the smallest slot count l that admits such a cancellation.
    """
    ws = list(weights)
    if not ws:
        raise ValueError("need at least one weight")
    ints = []
    for w in ws:
        q = Fraction(w)
        if q.denominator != 1:
            raise ValueError(f"weights must be integers, got {w}")
        ints.append(int(q))
    if max(abs(w) for w in ints) > MAX_EMBED_WEIGHT:
        raise CapacityError(f"weights exceed the embedding cap {MAX_EMBED_WEIGHT}")
    ltf_function(ints, 0)  # rejects ties, including the all-zero form
    n = len(ints)
    doubled = [2 * abs(w) for w in ints]
    k = max(v.bit_length() - 1 for v in doubled if v)
    counts = [0] * (k + 1)
    for v in doubled:
        for t in range(1, k + 1):
            if v >> t & 1:
                counts[t] += 1
    l = max(1, max(counts))
    while True:
        if l * k > MAX_TABLE_N:
            raise CapacityError(
                f"embedding needs more than {MAX_TABLE_N} slots for these weights"
            )
        nets = _balanced_pad([l - counts[t] for t in range(1, k + 1)])
        if nets is not None:
            break
        l += 1
    monomials = []
    for t in range(1, k + 1):
        slots = [
            (1 << i, ints[i] < 0) for i, v in enumerate(doubled) if v >> t & 1
        ]
        spare = l - len(slots)
        plus = (spare + nets[t - 1]) // 2
        slots += [(0, False)] * plus + [(0, True)] * (spare - plus)
        monomials.extend(slots)
    return l, k, MonomialList(n, tuple(monomials))


# ---------------------------------------------------------------------------
# Model bridges
# ---------------------------------------------------------------------------


def pp_report_from_disc(disc) -> BoundReport:
    """Small-bias cost from discrepancy; equal up to constants both ways,
    so the report carries one slack step."""
    disc = Fraction(disc)
    if not 0 < disc <= 1:
        raise ValueError(f"discrepancy must lie in (0, 1], got {disc}")
    step = ProvenanceStep(
        "pp-discrepancy-equivalence",
        "small-bias cost = Theta(log2(1 / disc))",
        {"disc": rational_str(disc)},
    )
    return BoundReport(
        kind="PP",
        value=-math.log2(disc),
        log2=True,
        chain=(step,),
        slack=1,
        vacuous=disc == 1,
    )


def upp_report_from_signrank(rank) -> BoundReport:
    """Unbounded-error cost from sign rank; equal up to constants both
    ways, so the report carries one slack step."""
    rank = Fraction(rank)
    if rank < 1:
        raise ValueError(f"sign rank is at least 1, got {rank}")
    step = ProvenanceStep(
        "upp-signrank-equivalence",
        "unbounded-error cost = Theta(log2(sign rank))",
        {"signrank": rational_str(rank)},
    )
    return BoundReport(
        kind="UPP",
        value=math.log2(rank),
        log2=True,
        chain=(step,),
        slack=1,
        vacuous=rank == 1,
    )
