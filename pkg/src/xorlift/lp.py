"""Exact-rational linear programming with certificates.

The solver is a dense two-phase simplex over fractions.Fraction using
Bland's anti-cycling rule, so every run terminates and identical inputs
produce identical pivots, vertices, and certificates. Optimal solutions
carry exact primal and dual vectors (zero duality gap); infeasible ones
carry a Farkas vector. A tableau can also grow by one constraint at a
time with dual-simplex reoptimization, which the cutting-plane
discrepancy solver relies on.

Conventions for the public LinearProgram:
* every variable is either "nonneg" (x >= 0) or "free";
* rows are (coefficients, relation, rhs) with relation in {"<=", "=", ">="};
* for sense "max", a dual vector y satisfies y_i >= 0 on "<=" rows,
  y_i <= 0 on ">=" rows, is free on "=" rows, and A^T y majorizes the
  objective (equality on free variables); for "min" all of it flips.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import CapacityError

ZERO = Fraction(0)
ONE = Fraction(1)

MAX_ROW_ENTRIES = 200_000


@dataclass(frozen=True)
class LinearProgram:
    sense: str
    objective: tuple
    rows: tuple  # ((coeffs...), relation, rhs)
    kinds: tuple  # "nonneg" | "free" per variable

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be max or min, got {self.sense!r}")
        nvars = len(self.objective)
        if len(self.kinds) != nvars:
            raise ValueError("kinds length must match objective length")
        if any(k not in ("nonneg", "free") for k in self.kinds):
            raise ValueError("variable kinds must be nonneg or free")
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != nvars:
                raise ValueError("constraint row length must match objective length")
            if rel not in ("<=", "=", ">="):
                raise ValueError(f"unknown relation {rel!r}")

    @classmethod
    def build(cls, sense, objective, rows, kinds) -> "LinearProgram":
        return cls(
            sense,
            tuple(Fraction(c) for c in objective),
            tuple((tuple(Fraction(a) for a in row), rel, Fraction(b)) for row, rel, b in rows),
            tuple(kinds),
        )


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    primal: tuple | None = None
    dual: tuple | None = None
    farkas: tuple | None = None


@dataclass(frozen=True)
class DualityVerdict:
    ok: bool
    detail: str = ""


class Tableau:
    """Dense simplex tableau over exact rationals.

    Internal form: min c x over x >= 0 with equality rows and rhs >= 0.
    Built from inequality rows by adding one slack per row; rows whose
    slack cannot seed the basis get an artificial column instead. The
    initial identity column of each row is remembered so dual values can
    be read off the final reduced-cost row.
    """

    def __init__(self, ncols_struct: int):
        self.nstruct = ncols_struct
        self.cols = ncols_struct  # total columns so far
        self.col_is_artificial = [False] * ncols_struct
        self.allowed = [True] * ncols_struct
        self.rows: list[list[Fraction]] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.anchor: list[int] = []  # initial identity column per row
        self.row_negated: list[bool] = []
        self.obj: list[Fraction] = []
        self.objval = ZERO
        self.costs: list[Fraction] = []

    # -- construction -------------------------------------------------

    def _new_column(self, artificial: bool) -> int:
        col = self.cols
        self.cols += 1
        self.col_is_artificial.append(artificial)
        self.allowed.append(not artificial)
        for row in self.rows:
            row.append(ZERO)
        if self.obj:
            self.obj.append(ZERO)
        if self.costs:
            self.costs.append(ZERO)
        return col

    def add_row(self, coeffs, rel: str, rhs) -> int:
        """Append one constraint over the structural columns; returns row id.

        Rows with negative rhs are negated so phase 1 can start from an
        identity basis; the flip is remembered for dual extraction.
        """
        rhs = Fraction(rhs)
        negate = rhs < 0
        sign = -1 if negate else 1
        row = [sign * Fraction(c) for c in coeffs]
        row += [ZERO] * (self.cols - len(row))
        self.rows.append(row)
        self.rhs.append(sign * rhs)
        self.row_negated.append(negate)
        basic = None
        if rel in ("<=", ">="):
            col = self._new_column(artificial=False)
            coeff = sign if rel == "<=" else -sign
            row[col] = Fraction(coeff)
            if coeff == 1:
                basic = col
        if basic is None:
            basic = self._new_column(artificial=True)
            row[basic] = ONE
        self.basis.append(basic)
        self.anchor.append(basic)
        return len(self.rows) - 1

    def add_cut(self, coeffs, rhs) -> int:
        """Append a <= row to an already-solved tableau, rewriting it in the
        current basis coordinates; follow with dual_simplex()."""
        row = [Fraction(c) for c in coeffs]
        row += [ZERO] * (self.cols - len(row))
        self.rows.append(row)
        self.rhs.append(Fraction(rhs))
        self.row_negated.append(False)
        col = self._new_column(artificial=False)
        row[col] = ONE
        self.basis.append(col)
        self.anchor.append(col)
        last = len(self.rows) - 1
        for k in range(last):
            factor = row[self.basis[k]]
            if factor:
                brow = self.rows[k]
                self.rows[last] = row = [a - factor * t for a, t in zip(row, brow)]
                self.rhs[last] -= factor * self.rhs[k]
        return last

    # -- pivoting core ------------------------------------------------

    def _pivot(self, i: int, j: int) -> None:
        row = self.rows[i]
        inv = ONE / row[j]
        if inv != ONE:
            self.rows[i] = row = [v * inv for v in row]
            self.rhs[i] *= inv
        for k, other in enumerate(self.rows):
            if k == i:
                continue
            factor = other[j]
            if factor:
                self.rows[k] = [a - factor * b for a, b in zip(other, row)]
                self.rhs[k] -= factor * self.rhs[i]
        factor = self.obj[j]
        if factor:
            self.obj = [a - factor * b for a, b in zip(self.obj, row)]
            self.objval += factor * self.rhs[i]
        self.basis[i] = j

    def set_objective(self, costs) -> None:
        """Install min-costs and price out the current basis."""
        self.costs = [Fraction(c) for c in costs] + [ZERO] * (self.cols - len(costs))
        obj = list(self.costs)
        val = ZERO
        for i, b in enumerate(self.basis):
            cb = self.costs[b]
            if cb:
                row = self.rows[i]
                obj = [a - cb * t for a, t in zip(obj, row)]
                val += cb * self.rhs[i]
        self.obj = obj
        self.objval = val

    def primal_simplex(self) -> str:
        """Bland's rule; returns "optimal" or "unbounded"."""
        while True:
            enter = -1
            for j in range(self.cols):
                if self.allowed[j] and self.obj[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            self._pivot(leave, enter)

    def dual_simplex(self) -> str:
        """Restore primal feasibility after new rows; returns "optimal" or
        "infeasible". Requires the current reduced costs to be nonnegative."""
        while True:
            leave = -1
            for i in range(len(self.rows)):
                if self.rhs[i] < 0 and (
                    leave < 0 or self.basis[i] < self.basis[leave]
                ):
                    leave = i
            if leave < 0:
                return "optimal"
            row = self.rows[leave]
            enter = -1
            best = None
            for j in range(self.cols):
                if not self.allowed[j] or row[j] >= 0:
                    continue
                ratio = self.obj[j] / -row[j]
                if best is None or ratio < best or (ratio == best and j < enter):
                    best = ratio
                    enter = j
            if enter < 0:
                return "infeasible"
            self._pivot(leave, enter)

    # -- two-phase driver ----------------------------------------------

    def run_two_phase(self, costs) -> str:
        art_costs = [ONE if self.col_is_artificial[j] else ZERO for j in range(self.cols)]
        if any(self.col_is_artificial[b] for b in self.basis):
            for j in range(self.cols):
                self.allowed[j] = True
            self.set_objective(art_costs)
            self.primal_simplex()
            if self.objval > 0:
                return "infeasible"
            self._expel_artificials()
        for j in range(self.cols):
            self.allowed[j] = not self.col_is_artificial[j]
        self.set_objective(costs)
        return self.primal_simplex()

    def _expel_artificials(self) -> None:
        # pivot basic artificials out on any nonzero real column; an all-zero
        # row is redundant and keeps its artificial basic at value zero
        for i, b in enumerate(self.basis):
            if not self.col_is_artificial[b]:
                continue
            for j in range(self.cols):
                if not self.col_is_artificial[j] and self.rows[i][j] != 0:
                    self._pivot(i, j)
                    break

    # -- certificate readers -------------------------------------------

    def primal_values(self, nstruct: int) -> list:
        vals = [ZERO] * nstruct
        for i, b in enumerate(self.basis):
            if b < nstruct:
                vals[b] = self.rhs[i]
        return vals

    def dual_values(self) -> list:
        """Multiplier per row of the internal equality system."""
        out = []
        for i, col in enumerate(self.anchor):
            y = self.costs[col] - self.obj[col]
            out.append(-y if self.row_negated[i] else y)
        return out


def _split_columns(lp: LinearProgram):
    """Map user variables to internal nonneg columns (free -> plus/minus)."""
    mapping = []  # per user var: (plus_col, minus_col or -1)
    col = 0
    for kind in lp.kinds:
        if kind == "free":
            mapping.append((col, col + 1))
            col += 2
        else:
            mapping.append((col, -1))
            col += 1
    return mapping, col


def _internal_row(mapping, nstruct: int, coeffs) -> list:
    row = [ZERO] * nstruct
    for v, (plus, minus) in enumerate(mapping):
        c = coeffs[v]
        if c:
            row[plus] = Fraction(c)
            if minus >= 0:
                row[minus] = -Fraction(c)
    return row


class CuttingPlane:
    """An LP that can be tightened one "<=" row at a time after solving.

    Construction solves the initial program; add_le_row appends a new
    constraint and reoptimizes with the dual simplex, so a separation
    loop pays one warm-started reoptimization per violated row instead
    of a fresh solve. solution() re-verifies the certificates against
    the grown program before returning them.
    """

    def __init__(self, lp: LinearProgram, max_row_entries: int = MAX_ROW_ENTRIES):
        self.sense = lp.sense
        self.objective = lp.objective
        self.kinds = lp.kinds
        self._rows = list(lp.rows)
        self._max_row_entries = max_row_entries
        self._check_capacity()
        self._mapping, nstruct = _split_columns(lp)
        self._tab = Tableau(nstruct)
        for coeffs, rel, rhs in lp.rows:
            self._tab.add_row(_internal_row(self._mapping, nstruct, coeffs), rel, rhs)
        sign = -1 if lp.sense == "max" else 1
        costs = [ZERO] * nstruct
        for v, (plus, minus) in enumerate(self._mapping):
            costs[plus] = sign * lp.objective[v]
            if minus >= 0:
                costs[minus] = -sign * lp.objective[v]
        self.status = self._tab.run_two_phase(costs)

    def _check_capacity(self) -> None:
        entries = len(self._rows) * max(len(self.objective), 1)
        if entries > self._max_row_entries:
            raise CapacityError(
                f"{entries} constraint-row entries exceed the cap {self._max_row_entries}"
            )

    def program(self) -> LinearProgram:
        """The program as currently tightened."""
        return LinearProgram(self.sense, self.objective, tuple(self._rows), self.kinds)

    def add_le_row(self, coeffs, rhs) -> str:
        """Append coeffs . x <= rhs and reoptimize; returns the new status."""
        if self.status != "optimal":
            raise ValueError(f"cannot cut a tableau in status {self.status!r}")
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != len(self.objective):
            raise ValueError("cut length must match objective length")
        rhs = Fraction(rhs)
        self._rows.append((coeffs, "<=", rhs))
        self._check_capacity()
        self._tab.add_cut(_internal_row(self._mapping, self._tab.nstruct, coeffs), rhs)
        self.status = self._tab.dual_simplex()
        return self.status

    def add_le_rows(self, cuts) -> str:
        """Append several (coeffs, rhs) "<=" rows, then reoptimize once.

        Equivalent to a chain of add_le_row calls but pays a single dual
        simplex run for the whole batch: every appended row enters on its
        own slack, which keeps the reduced costs untouched.
        """
        if self.status != "optimal":
            raise ValueError(f"cannot cut a tableau in status {self.status!r}")
        cuts = [(tuple(Fraction(c) for c in coeffs), Fraction(rhs)) for coeffs, rhs in cuts]
        for coeffs, _ in cuts:
            if len(coeffs) != len(self.objective):
                raise ValueError("cut length must match objective length")
        for coeffs, rhs in cuts:
            self._rows.append((coeffs, "<=", rhs))
        self._check_capacity()
        for coeffs, rhs in cuts:
            self._tab.add_cut(_internal_row(self._mapping, self._tab.nstruct, coeffs), rhs)
        if cuts:
            self.status = self._tab.dual_simplex()
        return self.status

    def farkas_solution(self) -> LPSolution:
        sol = LPSolution(status="infeasible", farkas=tuple(self._tab.dual_values()))
        verdict = check_duality(self.program(), sol)
        if not verdict.ok:
            raise AssertionError(f"solver produced a bad Farkas vector: {verdict.detail}")
        return sol

    def solution(self) -> LPSolution:
        if self.status != "optimal":
            raise ValueError(f"no optimal solution in status {self.status!r}")
        tab = self._tab
        internal = tab.primal_values(tab.nstruct)
        primal = []
        for plus, minus in self._mapping:
            primal.append(internal[plus] - (internal[minus] if minus >= 0 else ZERO))
        duals = tab.dual_values()
        if self.sense == "max":
            value = -tab.objval
            dual = tuple(-y for y in duals)
        else:
            value = tab.objval
            dual = tuple(duals)
        sol = LPSolution(status="optimal", value=value, primal=tuple(primal), dual=dual)
        verdict = check_duality(self.program(), sol)
        if not verdict.ok:
            raise AssertionError(f"solver produced bad certificates: {verdict.detail}")
        return sol


def solve(lp: LinearProgram, max_row_entries: int = MAX_ROW_ENTRIES) -> LPSolution:
    """Exact optimum with certificates; statuses are values, not errors."""
    cp = CuttingPlane(lp, max_row_entries)
    if cp.status == "infeasible":
        return cp.farkas_solution()
    if cp.status == "unbounded":
        return LPSolution(status="unbounded")
    return cp.solution()


def check_duality(lp: LinearProgram, sol: LPSolution) -> DualityVerdict:
    """Re-verify certificates from scratch: feasibility of both sides and an
    exactly zero gap (or a valid Farkas vector for infeasible status)."""
    nvars = len(lp.objective)
    if sol.status == "unbounded":
        return DualityVerdict(True, "unbounded accepted without certificate")
    if sol.status == "infeasible":
        y = sol.farkas
        if y is None or len(y) != len(lp.rows):
            return DualityVerdict(False, "missing or misshapen Farkas vector")
        for i, (_, rel, _) in enumerate(lp.rows):
            if rel == ">=" and y[i] < 0:
                return DualityVerdict(False, f"farkas sign on >= row {i}")
            if rel == "<=" and y[i] > 0:
                return DualityVerdict(False, f"farkas sign on <= row {i}")
        for v in range(nvars):
            combo = sum(y[i] * lp.rows[i][0][v] for i in range(len(lp.rows)))
            if lp.kinds[v] == "free":
                if combo != 0:
                    return DualityVerdict(False, f"farkas combination nonzero on free var {v}")
            elif combo > 0:
                return DualityVerdict(False, f"farkas combination positive on var {v}")
        total = sum(y[i] * lp.rows[i][2] for i in range(len(lp.rows)))
        if total <= 0:
            return DualityVerdict(False, "farkas combination does not witness infeasibility")
        return DualityVerdict(True)

    x, y = sol.primal, sol.dual
    if x is None or len(x) != nvars or y is None or len(y) != len(lp.rows):
        return DualityVerdict(False, "missing or misshapen certificates")
    for v in range(nvars):
        if lp.kinds[v] == "nonneg" and x[v] < 0:
            return DualityVerdict(False, f"primal variable {v} negative")
    for i, (coeffs, rel, rhs) in enumerate(lp.rows):
        lhs = sum(c * xv for c, xv in zip(coeffs, x))
        if rel == "<=" and lhs > rhs:
            return DualityVerdict(False, f"primal violates <= row {i}")
        if rel == ">=" and lhs < rhs:
            return DualityVerdict(False, f"primal violates >= row {i}")
        if rel == "=" and lhs != rhs:
            return DualityVerdict(False, f"primal violates = row {i}")
    hi = 1 if lp.sense == "max" else -1
    for i, (_, rel, _) in enumerate(lp.rows):
        if rel == "<=" and hi * y[i] < 0:
            return DualityVerdict(False, f"dual sign on <= row {i}")
        if rel == ">=" and hi * y[i] > 0:
            return DualityVerdict(False, f"dual sign on >= row {i}")
    for v in range(nvars):
        combo = sum(y[i] * lp.rows[i][0][v] for i in range(len(lp.rows)))
        slackness = combo - lp.objective[v]
        if lp.kinds[v] == "free":
            if slackness != 0:
                return DualityVerdict(False, f"dual constraint not tight on free var {v}")
        elif hi * slackness < 0:
            return DualityVerdict(False, f"dual infeasible on var {v}")
    dual_value = sum(y[i] * lp.rows[i][2] for i in range(len(lp.rows)))
    primal_value = sum(c * xv for c, xv in zip(lp.objective, x))
    if primal_value != sol.value:
        return DualityVerdict(False, "reported value differs from the primal objective")
    if dual_value != primal_value:
        return DualityVerdict(False, "nonzero duality gap")
    return DualityVerdict(True)


def lp_to_text(lp: LinearProgram) -> str:
    """Line-oriented debug dump; rationals as p/q."""

    def frac(q):
        return f"{q.numerator}/{q.denominator}"

    lines = [f"{lp.sense} " + " ".join(frac(c) for c in lp.objective)]
    lines.append("kinds " + " ".join(lp.kinds))
    for coeffs, rel, rhs in lp.rows:
        lines.append(" ".join(frac(c) for c in coeffs) + f" {rel} {frac(rhs)}")
    return "\n".join(lines) + "\n"


def lp_from_text(text: str) -> LinearProgram:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    sense, objective = head[0], [Fraction(t) for t in head[1:]]
    kinds = lines[1].split()[1:]
    rows = []
    for ln in lines[2:]:
        toks = ln.split()
        rel_pos = next(i for i, t in enumerate(toks) if t in ("<=", "=", ">="))
        rows.append(([Fraction(t) for t in toks[:rel_pos]], toks[rel_pos], Fraction(toks[rel_pos + 1])))
    return LinearProgram.build(sense, objective, rows, kinds)
