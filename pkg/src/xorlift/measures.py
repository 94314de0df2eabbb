"""Complexity measures of Boolean functions.

Combinatorial measures read a symmetric predicate directly (sign-change
counts and positions). Analytic measures (margin, threshold weight,
approximate weight, approximation error at bounded degree) are exact
linear programs over the characters chi_S; symmetric inputs use a
program with one variable per coefficient level |S| and one constraint
per Hamming weight, which an averaging argument makes equivalent to the
full program. Reports carry certificates that re-verify the value.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import (
    BooleanFunction,
    CapacityError,
    SparsePolynomial,
    SymmetricPredicate,
    binomial,
    chi,
    poly_add,
    poly_from_json,
    poly_mul,
    poly_scale,
    poly_to_json,
    rational_str,
    parse_rational,
    weight,
)
from .lp import LinearProgram, solve

MAX_DENSE_LP_N = 6  # full programs over all 2^n characters
MAX_DEGREE_LP_N = 12  # degree-restricted programs
MAX_SYMMETRIC_LP_N = 24  # level-indexed programs
MAX_SUPPORT_ENUM_N = 4  # monomial-support enumeration


class NoSignRepresentation(ValueError):
    """No polynomial under the requested degree bound sign-represents f."""


@dataclass(frozen=True)
class MeasureReport:
    """One measured quantity plus whatever certifies it."""

    measure: str
    params: dict
    value: Fraction | int
    certificate: dict | None
    wall_time_ms: float


def report_to_json(report: MeasureReport) -> dict:
    v = Fraction(report.value)
    return {
        "measure": report.measure,
        "params": report.params,
        "value": {"num": v.numerator, "den": v.denominator},
        "certificate": report.certificate,
        "wall_time_ms": report.wall_time_ms,
    }


# ---------------------------------------------------------------------------
# Combinatorial measures of symmetric predicates
# ---------------------------------------------------------------------------


def odd_even_degree(pred: SymmetricPredicate) -> int:
    """Number of levels i with D(i) != D(i+2)."""
    return sum(1 for i in range(pred.n - 1) if pred[i] != pred[i + 2])


def r_value(pred: SymmetricPredicate):
    """Smallest (r0, r1, max) such that D is 2-periodic on [r0, n - r1).

    Both cutoffs are capped at n/2; returns None when the change set
    cannot be cleared within the cap (odd n with a change at the middle).
    """
    n = pred.n
    changes = {i for i in range(n - 1) if pred[i] != pred[i + 2]}
    half_lo = n // 2
    half_hi = (n + 1) // 2
    r0 = None
    for a in range(half_lo + 1):
        if not changes & set(range(a, half_hi)):
            r0 = a
            break
    r1 = None
    for b in range(half_lo + 1):
        if not changes & set(range(half_lo, n - b)):
            r1 = b
            break
    if r0 is None or r1 is None:
        return None
    return r0, r1, max(r0, r1)


def gamma_value(pred: SymmetricPredicate):
    """min |2k - n + 1| over adjacent sign changes; None for constants."""
    n = pred.n
    gaps = [abs(2 * k - n + 1) for k in range(n) if pred[k] != pred[k + 1]]
    return min(gaps) if gaps else None


# ---------------------------------------------------------------------------
# Shared LP scaffolding
# ---------------------------------------------------------------------------


def krawtchouk(n: int, a: int, b: int) -> int:
    """sum over subsets T of size b of chi_T(x) for any fixed x of weight a
    (equivalently, with a and b swapped, the level sum of characters)."""
    return sum(
        (-1) ** j * binomial(a, j) * binomial(n - a, b - j)
        for j in range(max(0, a + b - n), min(a, b) + 1)
    )


def _char_sign(mask: int, index: int) -> int:
    return -1 if (mask & index).bit_count() & 1 else 1


def _degree_masks(n: int, d: int) -> list:
    return [m for m in range(1 << n) if m.bit_count() <= d]


def _poly_from_pairs(n: int, masks, coeffs) -> SparsePolynomial:
    return SparsePolynomial.from_dict(n, dict(zip(masks, coeffs)))


def _level_values(n: int, levels: dict) -> list:
    """Value at each Hamming weight of sum_s beta_s * (level-s character sum)."""
    return [
        sum((beta * krawtchouk(n, w, s) for s, beta in levels.items()), Fraction(0))
        for w in range(n + 1)
    ]


def _level_certificate(n: int, levels: dict) -> dict:
    return {
        "n": n,
        "levels": [[s, rational_str(c)] for s, c in sorted(levels.items()) if c],
    }


def _levels_from_certificate(data: dict) -> dict:
    return {s: parse_rational(c) for s, c in data["levels"]}


def _split_pairs(primal):
    """Recreate signed coefficients from adjacent (minus, plus) LP variables."""
    return [primal[i + 1] - primal[i] for i in range(0, len(primal), 2)]


# ---------------------------------------------------------------------------
# Margin and threshold weight
# ---------------------------------------------------------------------------


def _margin_dense(f: BooleanFunction):
    n = f.n
    size = 1 << n
    nvars = 1 + 2 * size  # delta, then (minus, plus) per character
    objective = [0] * nvars
    objective[0] = 1
    kinds = ["free"] + ["nonneg"] * (nvars - 1)
    rows = []
    for x in range(size):
        row = [0] * nvars
        row[0] = -1
        fx = f.value(x)
        for s in range(size):
            c = fx * _char_sign(s, x)
            row[1 + 2 * s] = -c
            row[2 + 2 * s] = c
        rows.append((row, ">=", 0))
    rows.append(([0] + [1] * (nvars - 1), "<=", 1))
    sol = solve(LinearProgram.build("max", objective, rows, kinds))
    coeffs = _split_pairs(sol.primal[1:])
    poly = _poly_from_pairs(n, range(size), coeffs)
    mu = [-y for y in sol.dual[:size]]
    certificate = {
        "polynomial": poly_to_json(poly),
        "mu": [[x, rational_str(m)] for x, m in enumerate(mu) if m],
        "epsilon": rational_str(sol.value),
    }
    return sol.value, certificate


def _margin_symmetric(pred: SymmetricPredicate):
    n = pred.n
    nvars = 1 + 2 * (n + 1)
    objective = [0] * nvars
    objective[0] = 1
    kinds = ["free"] + ["nonneg"] * (nvars - 1)
    rows = []
    for w in range(n + 1):
        row = [0] * nvars
        row[0] = -1
        for s in range(n + 1):
            c = pred[w] * krawtchouk(n, w, s)
            row[1 + 2 * s] = -c
            row[2 + 2 * s] = c
        rows.append((row, ">=", 0))
    mass = [0] * nvars
    for s in range(n + 1):
        mass[1 + 2 * s] = mass[2 + 2 * s] = binomial(n, s)
    rows.append((mass, "<=", 1))
    sol = solve(LinearProgram.build("max", objective, rows, kinds))
    levels = dict(enumerate(_split_pairs(sol.primal[1:])))
    mu = [-y for y in sol.dual[: n + 1]]
    certificate = {
        "level_polynomial": _level_certificate(n, levels),
        "level_mu": [[w, rational_str(m)] for w, m in enumerate(mu) if m],
        "epsilon": rational_str(sol.value),
    }
    return sol.value, certificate


def margin(f: BooleanFunction) -> MeasureReport:
    """Largest worst-case f(x)p(x) over polynomials of coefficient mass <= 1."""
    t0 = time.perf_counter()
    if f.is_symmetric() and f.n <= MAX_SYMMETRIC_LP_N:
        value, certificate = _margin_symmetric(f.to_predicate())
    elif f.n <= MAX_DENSE_LP_N:
        value, certificate = _margin_dense(f)
    else:
        raise CapacityError(
            f"margin needs arity <= {MAX_DENSE_LP_N} or a symmetric function"
        )
    return MeasureReport(
        "margin", {}, value, certificate, (time.perf_counter() - t0) * 1000.0
    )


def _weight_lp_dense(f: BooleanFunction, d: int | None, eps: Fraction | None):
    """min coefficient mass subject to sign representation (eps None) or
    pointwise eps-approximation, over characters of degree <= d."""
    n = f.n
    masks = _degree_masks(n, n if d is None else d)
    nvars = 2 * len(masks)
    kinds = ["nonneg"] * nvars
    rows = []
    for x in range(1 << n):
        fx = f.value(x)
        if eps is None:
            row = [0] * nvars
            for k, s in enumerate(masks):
                c = fx * _char_sign(s, x)
                row[2 * k] = -c
                row[2 * k + 1] = c
            rows.append((row, ">=", 1))
        else:
            row = [0] * nvars
            for k, s in enumerate(masks):
                c = _char_sign(s, x)
                row[2 * k] = -c
                row[2 * k + 1] = c
            rows.append((row, "<=", fx + eps))
            rows.append((row, ">=", fx - eps))
    sol = solve(LinearProgram.build("min", [1] * nvars, rows, kinds))
    if sol.status != "optimal":
        return sol.status, None, None
    poly = _poly_from_pairs(n, masks, _split_pairs(sol.primal))
    return "optimal", sol.value, {"polynomial": poly_to_json(poly)}


def _weight_lp_symmetric(pred: SymmetricPredicate, d: int | None, eps: Fraction | None):
    n = pred.n
    top = n if d is None else d
    levels = list(range(top + 1))
    nvars = 2 * len(levels)
    kinds = ["nonneg"] * nvars
    objective = []
    for s in levels:
        objective += [binomial(n, s)] * 2
    rows = []
    for w in range(n + 1):
        if eps is None:
            row = [0] * nvars
            for k, s in enumerate(levels):
                c = pred[w] * krawtchouk(n, w, s)
                row[2 * k] = -c
                row[2 * k + 1] = c
            rows.append((row, ">=", 1))
        else:
            row = [0] * nvars
            for k, s in enumerate(levels):
                c = krawtchouk(n, w, s)
                row[2 * k] = -c
                row[2 * k + 1] = c
            rows.append((row, "<=", pred[w] + eps))
            rows.append((row, ">=", pred[w] - eps))
    sol = solve(LinearProgram.build("min", objective, rows, kinds))
    if sol.status != "optimal":
        return sol.status, None, None
    coeffs = dict(zip(levels, _split_pairs(sol.primal)))
    return "optimal", sol.value, {"level_polynomial": _level_certificate(n, coeffs)}


def _weight_lp(f: BooleanFunction, d: int | None, eps: Fraction | None, dense_cap: int):
    if f.is_symmetric() and f.n <= MAX_SYMMETRIC_LP_N:
        return _weight_lp_symmetric(f.to_predicate(), d, eps)
    if f.n <= dense_cap:
        return _weight_lp_dense(f, d, eps)
    raise CapacityError(f"needs arity <= {dense_cap} or a symmetric function")


def threshold_weight(f: BooleanFunction) -> MeasureReport:
    """Least coefficient mass of p with f(x)p(x) >= 1 everywhere."""
    t0 = time.perf_counter()
    status, value, certificate = _weight_lp(f, None, None, MAX_DENSE_LP_N)
    if status != "optimal":
        raise AssertionError("unrestricted sign representation cannot fail")
    return MeasureReport(
        "threshold-weight", {}, value, certificate, (time.perf_counter() - t0) * 1000.0
    )


def degree_bounded_threshold_weight(f: BooleanFunction, d: int) -> MeasureReport:
    """Least coefficient mass among degree <= d sign representations (the
    rational relaxation of the integer-weight quantity it bounds below)."""
    t0 = time.perf_counter()
    if not 0 <= d <= f.n:
        raise ValueError(f"degree bound {d} outside [0, {f.n}]")
    status, value, certificate = _weight_lp(f, d, None, MAX_DEGREE_LP_N)
    if status != "optimal":
        raise NoSignRepresentation(
            f"no degree <= {d} polynomial sign-represents this function"
        )
    return MeasureReport(
        "degree-bounded-threshold-weight",
        {"degree": d},
        value,
        certificate,
        (time.perf_counter() - t0) * 1000.0,
    )


def approx_weight(f: BooleanFunction, eps) -> MeasureReport:
    """Least coefficient mass of p with |p(x) - f(x)| <= eps everywhere
    (closed constraint; the strict variant has the same infimum)."""
    t0 = time.perf_counter()
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"error bound must lie in (0, 1), got {eps}")
    status, value, certificate = _weight_lp(f, None, eps, MAX_DENSE_LP_N)
    if status != "optimal":
        raise AssertionError("approximation at full degree cannot fail")
    return MeasureReport(
        "approx-weight",
        {"epsilon": rational_str(eps)},
        value,
        certificate,
        (time.perf_counter() - t0) * 1000.0,
    )


# ---------------------------------------------------------------------------
# Degree measures
# ---------------------------------------------------------------------------


def epsilon_d(f: BooleanFunction, d: int) -> Fraction:
    """Least worst-case |p(x) - f(x)| over polynomials of degree <= d."""
    if not 0 <= d <= f.n:
        raise ValueError(f"degree bound {d} outside [0, {f.n}]")
    if f.is_symmetric() and f.n <= MAX_SYMMETRIC_LP_N:
        pred = f.to_predicate()
        n = pred.n
        nvars = 1 + (d + 1)  # error, then one free coefficient per level
        kinds = ["nonneg"] + ["free"] * (d + 1)
        rows = []
        for w in range(n + 1):
            row = [0] * nvars
            for s in range(d + 1):
                row[1 + s] = krawtchouk(n, w, s)
            hi = list(row)
            hi[0] = -1
            rows.append((hi, "<=", pred[w]))
            lo = list(row)
            lo[0] = 1
            rows.append((lo, ">=", pred[w]))
        sol = solve(LinearProgram.build("min", [1] + [0] * (d + 1), rows, kinds))
    elif f.n <= MAX_DEGREE_LP_N:
        n = f.n
        masks = _degree_masks(n, d)
        nvars = 1 + len(masks)
        kinds = ["nonneg"] + ["free"] * len(masks)
        rows = []
        for x in range(1 << n):
            row = [0] * nvars
            for k, s in enumerate(masks):
                row[1 + k] = _char_sign(s, x)
            hi = list(row)
            hi[0] = -1
            rows.append((hi, "<=", f.value(x)))
            lo = list(row)
            lo[0] = 1
            rows.append((lo, ">=", f.value(x)))
        sol = solve(LinearProgram.build("min", [1] + [0] * len(masks), rows, kinds))
    else:
        raise CapacityError(
            f"needs arity <= {MAX_DEGREE_LP_N} or a symmetric function"
        )
    if sol.status != "optimal":
        raise AssertionError("uniform approximation LP is always solvable")
    return sol.value


def approx_degree(f: BooleanFunction, eps) -> int:
    """Least degree whose best uniform approximation error is <= eps."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"error bound must lie in (0, 1), got {eps}")
    for d in range(f.n + 1):
        if epsilon_d(f, d) <= eps:
            return d
    raise AssertionError("degree n is exact, so the scan cannot fall through")


def sign_degree(f: BooleanFunction) -> int:
    """Least degree admitting a sign representation."""
    for d in range(f.n + 1):
        try:
            degree_bounded_threshold_weight(f, d)
            return d
        except NoSignRepresentation:
            continue
    raise AssertionError("the exact expansion sign-represents f at degree n")


def signed_monomial_complexity(f: BooleanFunction) -> int:
    """Fewest characters whose span contains a sign representation of f."""
    n = f.n
    if n > MAX_SUPPORT_ENUM_N:
        raise CapacityError(
            f"support enumeration needs arity <= {MAX_SUPPORT_ENUM_N}"
        )
    size = 1 << n
    all_masks = range(size)
    for k in range(1, size + 1):
        for support in combinations(all_masks, k):
            nvars = 2 * k
            rows = []
            for x in range(size):
                fx = f.value(x)
                row = [0] * nvars
                for j, s in enumerate(support):
                    c = fx * _char_sign(s, x)
                    row[2 * j] = -c
                    row[2 * j + 1] = c
                rows.append((row, ">=", 1))
            sol = solve(
                LinearProgram.build("min", [1] * nvars, rows, ["nonneg"] * nvars)
            )
            if sol.status == "optimal":
                return k
    raise AssertionError("the full character basis sign-represents f")


# ---------------------------------------------------------------------------
# Explicit low-weight sign representation for symmetric predicates
# ---------------------------------------------------------------------------


def pp_upper_poly(pred: SymmetricPredicate) -> SparsePolynomial:
    """An integer polynomial of weight <= 4(2n)^k sign-representing D, where
    k counts levels with D(i) != D(i+2).

    Over inputs of Hamming weight w the linear factor anchored at level i
    has value sum_j x_j - n + 2i + 1 = 2(i - w) + 1, so a product over
    change levels of one parity class flips sign exactly when the class
    prescribes; the even and odd classes are then recombined through the
    parity character.
    """
    n = pred.n
    if n % 2:
        raise ValueError(f"construction needs even arity, got {n}")
    coordinate_sum = SparsePolynomial.from_dict(
        n, {1 << j: Fraction(1) for j in range(n)}
    )

    def anchored_factor(i: int) -> SparsePolynomial:
        return poly_add(
            coordinate_sum, SparsePolynomial.from_dict(n, {0: Fraction(2 * i + 1 - n)})
        )

    def class_product(start: int, base_sign: int) -> SparsePolynomial:
        prod = SparsePolynomial.from_dict(n, {0: Fraction(base_sign)})
        for i in range(start, n - 1, 2):
            if pred[i] != pred[i + 2]:
                prod = poly_mul(prod, anchored_factor(i))
        return prod

    p_even = class_product(0, pred[0])
    p_odd = class_product(1, pred[1])
    parity = chi((1 << n) - 1, n)
    return poly_add(p_even, p_odd, poly_mul(parity, poly_add(p_even, poly_scale(p_odd, -1))))


# ---------------------------------------------------------------------------
# Certificate re-verification
# ---------------------------------------------------------------------------


def _dense_primal(certificate: dict):
    """(target values, coefficient mass, degree) of a dense certificate,
    where targets[x] is the polynomial value at input x."""
    p = poly_from_json(certificate["polynomial"])
    deg = max((m.bit_count() for m, _ in p.coeffs), default=0)
    targets = [p.evaluate(x) for x in range(1 << p.n)]
    return targets, weight(p), deg


def _level_primal(n: int, certificate: dict):
    """(per-weight values, coefficient mass, degree) of a level certificate."""
    levels = _levels_from_certificate(certificate["level_polynomial"])
    vals = _level_values(n, levels)
    mass = sum((abs(c) * binomial(n, s) for s, c in levels.items()), Fraction(0))
    deg = max((s for s, c in levels.items() if c), default=0)
    return vals, mass, deg


def _margin_certificate_holds(f: BooleanFunction, value, certificate) -> bool:
    if "polynomial" in certificate:
        targets, mass, _ = _dense_primal(certificate)
        if mass > 1:
            return False
        if min(f.value(x) * t for x, t in enumerate(targets)) != value:
            return False
        mu = {x: parse_rational(s) for x, s in certificate["mu"]}
        if any(m < 0 for m in mu.values()) or sum(mu.values()) != 1:
            return False
        for s in range(f.size):
            corr = sum(m * f.value(x) * _char_sign(s, x) for x, m in mu.items())
            if abs(corr) > value:
                return False
        return True
    pred = f.to_predicate()
    n = pred.n
    vals, mass, _ = _level_primal(n, certificate)
    if mass > 1:
        return False
    if min(pred[w] * vals[w] for w in range(n + 1)) != value:
        return False
    mu = {w: parse_rational(s) for w, s in certificate["level_mu"]}
    if any(m < 0 for m in mu.values()) or sum(mu.values()) != 1:
        return False
    # per-input dual feasibility reduces to the level form through the
    # double-counting identity C(n,s) K(s,w) = C(n,w) K(w,s)
    for s in range(n + 1):
        corr = sum(
            (m * pred[w] * Fraction(krawtchouk(n, w, s), binomial(n, s))
             for w, m in mu.items()),
            Fraction(0),
        )
        if abs(corr) > value:
            return False
    return True


def certificate_holds(f: BooleanFunction, report: MeasureReport) -> bool:
    """Re-verify a report's certificate against the function from scratch."""
    cert = report.certificate
    if cert is None:
        return False
    if report.measure == "margin":
        return _margin_certificate_holds(f, report.value, cert)

    if "polynomial" in cert:
        targets, mass, deg = _dense_primal(cert)
        signs = [f.value(x) for x in range(f.size)]
    else:
        pred = f.to_predicate()
        targets, mass, deg = _level_primal(pred.n, cert)
        signs = list(pred.signs)

    if report.measure in ("threshold-weight", "degree-bounded-threshold-weight"):
        if mass != report.value:
            return False
        if report.measure == "degree-bounded-threshold-weight" and deg > report.params["degree"]:
            return False
        return all(s * t >= 1 for s, t in zip(signs, targets))
    if report.measure == "approx-weight":
        eps = parse_rational(report.params["epsilon"])
        if mass != report.value:
            return False
        return all(abs(t - s) <= eps for s, t in zip(signs, targets))
    raise ValueError(f"no certificate check for measure {report.measure!r}")
