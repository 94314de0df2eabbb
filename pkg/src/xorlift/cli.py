"""Command-line front end: measures, verification suites, sweeps, and
modular-function bounds.

Output is machine readable and deterministic: JSON Lines by default (one
object per report or check), CSV for sweeps, or plain text. Rationals are
rendered as "p/q" strings. A fixed seed makes every byte of the output
reproducible. Exit codes: 0 pass, 1 check failure, 2 usage error, 3
capacity error.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import comm, lifting, measures, modfn
from .core import (
    MAX_TABLE_N,
    BooleanFunction,
    CapacityError,
    SparsePolynomial,
    SpecParseError,
    SymmetricPredicate,
    build_function,
    fourier,
    from_predicate,
    parse_rational,
    rational_str,
    weight,
    xor_compose,
)

ENV_MAX_N = "XORLIFT_MAX_N"

SUITES = (
    "sandwich",
    "duality",
    "fourier",
    "bruck",
    "modclaim",
    "lifts",
    "ppupper",
    "chains",
    "bpp",
    "all",
)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation depends on; equal configs give equal bytes."""

    command: str
    fns: tuple = ()
    selectors: tuple = ()
    bounds: tuple = ()
    eps: Fraction = Fraction(1, 3)
    suite: str = ""
    params: dict = field(default_factory=dict)
    fmt: str = "json"
    seed: int = 0
    jobs: int = 1
    max_n: int = 0  # 0 means each task keeps its own default

    def __post_init__(self):
        if self.fmt not in ("json", "csv", "text"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if not 0 <= self.max_n <= MAX_TABLE_N:
            raise ValueError(f"max-n must lie in [0, {MAX_TABLE_N}]")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie strictly between 0 and 1")


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def cli_json(obj):
    """Render report objects as JSON-safe values; rationals become "p/q"."""
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): cli_json(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return [cli_json(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [cli_json(v) for v in obj]
    if isinstance(obj, comm.BoundReport):
        return {
            "kind": obj.kind,
            "value": cli_json(obj.value),
            "log2": obj.log2,
            "slack": obj.slack,
            "vacuous": obj.vacuous,
            "chain": [
                {"theorem": s.theorem, "inequality": s.inequality, "inputs": cli_json(s.inputs)}
                for s in obj.chain
            ],
        }
    if isinstance(obj, comm.Verdict):
        return {"check": obj.check, "passed": obj.passed, "values": cli_json(obj.values)}
    if isinstance(obj, measures.MeasureReport):
        # wall time is dropped so identical configs emit identical bytes
        return {
            "measure": obj.measure,
            "params": cli_json(obj.params),
            "value": cli_json(obj.value),
            "certificate": cli_json(obj.certificate),
        }
    if isinstance(obj, SymmetricPredicate):
        return obj.to_string()
    if isinstance(obj, BooleanFunction):
        return {"n": obj.n, "table": format(obj.bits, "x")}
    if isinstance(obj, SparsePolynomial):
        return {
            "n": obj.n,
            "terms": {format(mask, "x"): rational_str(c) for mask, c in obj.coeffs},
        }
    if isinstance(obj, modfn.ModSpec):
        return modfn.mod_spec_to_json(obj)
    if isinstance(obj, modfn.ReductionChain):
        return cli_json(modfn.reduction_chain_to_json(obj))
    if isinstance(obj, lifting.MonomialList):
        return lifting.monomial_list_to_json(obj)
    if isinstance(obj, lifting.LiftWitness):
        return {
            "base": obj.base,
            "source_arity": obj.source_arity,
            "lifted_arity": obj.lifted_arity,
            "pointwise_checked": obj.pointwise_checked,
        }
    if isinstance(obj, lifting.FamilyMember):
        return {
            "level": obj.level,
            "arity": obj.arity,
            "orientation": obj.orientation,
            "predicate": obj.predicate.to_string(),
            "sign_deg": obj.sign_deg,
        }
    if isinstance(obj, lifting.LiftFamilyReport):
        return {
            "odd_even_degree": obj.odd_even_degree,
            "fired_orientation": obj.fired_orientation,
            "parity_fixed": obj.parity_fixed,
            "members": [cli_json(m) for m in obj.members],
            "max_sign_degree": obj.max_sign_degree,
            "witness": cli_json(obj.witness),
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit_json(record, out):
    out.write(json.dumps(cli_json(record), separators=(",", ":")) + "\n")


def _scalar_text(value):
    if isinstance(value, Fraction):
        return rational_str(value)
    return str(cli_json(value))


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------


def _measure_selectors(eps):
    def pred_of(f):
        if not f.is_symmetric():
            raise ValueError("measure requires a symmetric function")
        return f.to_predicate()

    return {
        "margin": lambda f: measures.margin(f),
        "wt": lambda f: measures.threshold_weight(f),
        "approxwt": lambda f: measures.approx_weight(f, eps),
        "oddeven": lambda f: measures.odd_even_degree(pred_of(f)),
        "gamma": lambda f: measures.gamma_value(pred_of(f)),
        "r": lambda f: measures.r_value(pred_of(f)),
        "signdeg": lambda f: measures.sign_degree(f),
        "approxdeg": lambda f: measures.approx_degree(f, eps),
        "monomials": lambda f: measures.signed_monomial_complexity(f),
    }


ALL_MEASURES = ("margin", "wt", "approxwt", "oddeven", "signdeg")


def _bound_selectors():
    def pp_bound(f):
        value, _ = comm.disc_exact(xor_compose(f))
        return comm.pp_report_from_disc(value)

    def upp_bound(f):
        rank = modfn.forster_xor_bound(f).value
        return comm.upp_report_from_signrank(max(rank, Fraction(1)))

    return {
        "forster": modfn.forster_xor_bound,
        "sufficient": lambda f: modfn.sufficient_bound(f, "greedy"),
        "pm": comm.pm_disc_bound,
        "bpp": comm.bpp_lower_bound,
        "pp": pp_bound,
        "upp": upp_bound,
    }


def cmd_measure(cfg: RunConfig, out) -> int:
    selectors = _measure_selectors(cfg.eps)
    bounds = _bound_selectors()
    names = list(cfg.selectors)
    if not names and not cfg.bounds:
        names = list(ALL_MEASURES)
    capacity_hit = False
    rows = []
    for spec in cfg.fns:
        f = build_function(spec)  # parse errors abort the run
        for name in names:
            record = {"fn": spec, "selector": name}
            try:
                result = selectors[name](f)
            except CapacityError as exc:
                record["error"] = str(exc)
                record["code"] = "capacity"
                capacity_hit = True
            except (ValueError, measures.NoSignRepresentation) as exc:
                record["error"] = str(exc)
                record["code"] = "invalid"
            else:
                if isinstance(result, measures.MeasureReport):
                    record["value"] = result.value
                    record["report"] = result
                else:
                    record["value"] = result
            rows.append(record)
        for name in cfg.bounds:
            record = {"fn": spec, "bound": name}
            try:
                record["report"] = bounds[name](f)
            except CapacityError as exc:
                record["error"] = str(exc)
                record["code"] = "capacity"
                capacity_hit = True
            except ValueError as exc:
                record["error"] = str(exc)
                record["code"] = "invalid"
            rows.append(record)
    _render_measure(rows, cfg.fmt, out)
    return 3 if capacity_hit else 0


def _render_measure(rows, fmt, out):
    if fmt == "json":
        for record in rows:
            _emit_json(record, out)
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("fn", "selector", "value", "error"))
        for r in rows:
            selector = r.get("selector") or r.get("bound")
            value = r.get("value")
            if value is None and "report" in r and isinstance(r["report"], comm.BoundReport):
                value = r["report"].value
            cell = "" if value is None else _scalar_text(value)
            writer.writerow((r["fn"], selector, cell, r.get("error", "")))
    else:
        for r in rows:
            selector = r.get("selector") or r.get("bound")
            if "error" in r:
                out.write(f"{r['fn']} {selector}: error: {r['error']}\n")
            elif "value" in r:
                out.write(f"{r['fn']} {selector} = {_scalar_text(r['value'])}\n")
            else:
                report = r["report"]
                tag = "log2 " if report.log2 else ""
                out.write(f"{r['fn']} {selector} >= {tag}{_scalar_text(report.value)}\n")


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def suite_sandwich(n: int):
    """Margin against exact discrepancy for every function at one arity."""
    if n > comm.MAX_SANDWICH_N:
        raise CapacityError(f"arity {n} exceeds the sandwich cap {comm.MAX_SANDWICH_N}")
    checked = 0
    worst = None
    for bits in range(1 << (1 << n)):
        verdict = comm.sandwich_check(BooleanFunction(n, bits))
        checked += 1
        if not verdict.passed:
            yield verdict
        ratio = Fraction(verdict.values["margin"]) / Fraction(verdict.values["disc"])
        if worst is None or ratio > worst:
            worst = ratio
    yield comm.Verdict(
        "sandwich-sweep",
        True,
        {"n": n, "functions": checked, "max_margin_disc_ratio": worst},
    )


def suite_duality(max_n: int):
    """Exact primal/dual agreement and the margin-weight product."""
    for n in range(1, max_n + 1):
        product_ok = cert_ok = True
        for bits in range(1 << (1 << n)):
            f = BooleanFunction(n, bits)
            rm = measures.margin(f)
            rw = measures.threshold_weight(f)
            ra = measures.approx_weight(f, Fraction(1, 3))
            product_ok &= rm.value * rw.value == 1
            cert_ok &= (
                measures.certificate_holds(f, rm)
                and measures.certificate_holds(f, rw)
                and measures.certificate_holds(f, ra)
            )
        yield comm.Verdict(
            "margin-weight-duality",
            product_ok and cert_ok,
            {"n": n, "functions": 1 << (1 << n), "product_exact": product_ok, "certificates": cert_ok},
        )


def suite_fourier(max_n: int, samples: int, rng):
    """Transform identities: naive agreement, Parseval, spectral norm."""

    def naive(values):
        idx = np.arange(values.size)
        parities = np.bitwise_count(idx[:, None] & idx[None, :]).astype(np.int64)
        return (1 - 2 * (parities & 1)) @ values

    for n in range(1, max_n + 1):
        tables = (
            [BooleanFunction(n, bits) for bits in range(1 << (1 << n))]
            if n <= 3
            else [
                BooleanFunction.from_values(1 - 2 * rng.integers(0, 2, size=1 << n).astype(np.int64))
                for _ in range(samples)
            ]
        )
        agree = parseval = True
        for f in tables:
            scaled = fourier(f).scaled
            agree &= bool(np.array_equal(scaled, naive(f.values())))
            parseval &= int(np.sum(scaled.astype(object) ** 2)) == 4**f.n
        yield comm.Verdict(
            "fwht-identities",
            agree and parseval,
            {"n": n, "functions": len(tables), "naive_match": agree, "parseval": parseval},
        )
    svd_ok = True
    worst = 0.0
    for n in range(1, min(max_n, 4) + 1):
        for bits in (
            range(1 << (1 << n)) if n <= 2 else [int(rng.integers(0, 1 << (1 << n))) for _ in range(2 * samples)]
        ):
            f = BooleanFunction(n, bits)
            top = float(fourier(f).max_abs_scaled())
            matrix = np.asarray(xor_compose(f).entries, dtype=float)
            gap = abs(top - float(np.linalg.svd(matrix, compute_uv=False)[0]))
            worst = max(worst, gap)
            svd_ok &= gap <= 1e-9
    yield comm.Verdict("spectral-norm-svd", svd_ok, {"max_gap": worst})


def suite_bruck(max_n: int):
    """Two-run spectra: flat even levels, two-valued odd levels, and the
    principal-plus-top obstruction for the single-residue pattern."""
    for n in range(2, max_n + 1):
        scaled = fourier(modfn.mod_function(modfn.ModSpec(4, {0, 1}, n))).scaled
        mags = np.abs(scaled)
        if n % 2 == 0:
            flat = bool(np.all(mags == 1 << (n // 2)))
            yield comm.Verdict("two-run-flat-spectrum", flat, {"n": n, "level": 1 << (n // 2)})
        else:
            vals = set(np.unique(mags).tolist())
            ok = vals <= {0, 1 << ((n + 1) // 2)}
            yield comm.Verdict("two-run-odd-spectrum", ok, {"n": n, "magnitudes": sorted(vals)})
        if n % 2 == 0:
            single = fourier(modfn.mod_function(modfn.ModSpec(4, {0}, n))).scaled
            total = abs(int(single[0])) + abs(int(single[-1]))
            yield comm.Verdict(
                "mod4-obstruction", total == 1 << n, {"n": n, "scaled_sum": total}
            )


def suite_modclaim(samples: int, max_n: int, rng):
    """Odd-modulus coefficient ceilings and the closed-form spectrum."""
    audit_n = min(max_n, modfn.MAX_SPECTRUM_N)
    closed_n = min(max_n, 10)
    for m in (3, 5, 7, 9):
        for _ in range(samples):
            size = int(rng.integers(1, m))
            accepted = frozenset(int(r) for r in rng.choice(m, size=size, replace=False))
            spec = modfn.ModSpec(m, accepted, audit_n)
            yield modfn.claim_bound_audit(spec)
            small = modfn.ModSpec(m, accepted, closed_n)
            scaled = fourier(modfn.mod_function(small)).scaled
            weights = _popcounts(closed_n)
            gap = 0.0
            for s in range(closed_n + 1):
                exact = int(scaled[int(np.argmax(weights == s))]) / (1 << closed_n)
                approx = modfn.mod_fourier_closed_form(small, s)
                gap = max(gap, abs(approx - exact))
            yield comm.Verdict(
                "closed-form-spectrum",
                gap <= 1e-9,
                {"m": m, "accepted": sorted(accepted), "n": closed_n, "max_gap": gap},
            )


def suite_lifts(samples: int, rng):
    """Selector-lift identities and measure monotonicity under projection."""
    count = 0
    for N in (4, 8):
        for bits in range(1 << (N + 1)):
            pred = SymmetricPredicate(tuple(1 - 2 * (bits >> w & 1) for w in range(N + 1)))
            lifting.symm_lift_decompose(pred)  # raises on any pointwise failure
            count += 1
    yield comm.Verdict("selector-decomposition", True, {"arities": [4, 8], "predicates": count})

    checked = 0
    for _ in range(samples):
        n = int(rng.integers(1, 5))
        while True:
            w = [int(v) for v in rng.integers(-4, 5, size=n)]
            offset = int(rng.integers(-3, 4))
            try:
                lifting.thr_lift(w, Fraction(offset, 1) + Fraction(1, 2))
            except ValueError:
                continue
            break
        checked += 1
    yield comm.Verdict("threshold-lift", True, {"samples": checked})

    mono_ok = True
    third = Fraction(1, 3)
    for _ in range(max(2, samples // 5)):
        bits = int(rng.integers(0, 1 << 5))
        pred = SymmetricPredicate(tuple(1 - 2 * (bits >> w & 1) for w in range(5)))
        base, ml, _ = lifting.symm_lift_decompose(pred)
        big = from_predicate(pred)
        image = lifting.monomial_project(big, ml)
        mono_ok &= measures.margin(big).value <= measures.margin(image).value
        mono_ok &= measures.threshold_weight(image).value <= measures.threshold_weight(big).value
        mono_ok &= measures.approx_weight(image, third).value <= measures.approx_weight(big, third).value
    yield comm.Verdict("projection-monotonicity", mono_ok, {"instances": max(2, samples // 5)})


def suite_ppupper(max_n: int):
    """Sign representation and the weight ceiling of the explicit polynomial."""
    for n in range(2, max_n + 1, 2):
        all_ok = True
        worst = Fraction(0)
        for bits in range(1 << (n + 1)):
            pred = SymmetricPredicate(tuple(1 - 2 * (bits >> w & 1) for w in range(n + 1)))
            poly = measures.pp_upper_poly(pred)
            f = from_predicate(pred)
            nums, _ = poly.evaluate_all()
            signs = np.where(np.array([v > 0 for v in nums]), 1, -1)
            zero = any(v == 0 for v in nums)
            all_ok &= not zero and bool(np.array_equal(signs, f.values()))
            k = measures.odd_even_degree(pred)
            cap = Fraction(4 * (2 * n) ** k)
            wt = weight(poly)
            all_ok &= wt <= cap
            worst = max(worst, wt / cap)
        yield comm.Verdict(
            "pp-upper-construction",
            all_ok,
            {"n": n, "predicates": 1 << (n + 1), "max_weight_ratio": worst},
        )


def suite_chains(max_m: int, samples: int, verify_arity: int, rng):
    """Reduction chains for every (sampled) non-simple residue pattern."""
    for m in range(3, max_m + 1):
        if (1 << m) <= 4 * samples:
            candidates = range(1, 1 << m)
        else:
            candidates = sorted({int(rng.integers(1, 1 << m)) for _ in range(samples)})
        bases = {}
        produced = 0
        example = None
        for bits in candidates:
            accepted = frozenset(r for r in range(m) if (bits >> r) & 1)
            try:
                chain = modfn.reduction_chain(m, accepted, verify_arity)
            except ValueError:
                continue  # simple pattern
            produced += 1
            bases[chain.base] = bases.get(chain.base, 0) + 1
            if example is None and chain.steps:
                example = modfn.reduction_chain_to_json(chain)
        yield comm.Verdict(
            "reduction-chains",
            True,
            {"m": m, "chains": produced, "bases": bases, "example": example},
        )
    n = 4 * max(verify_arity, 10)
    reports = {
        "two-run": modfn.upp_bound_report(modfn.ModSpec(4, {0, 1}, n)),
        "translate": modfn.upp_bound_report(modfn.ModSpec(4, {1, 2}, n)),
        "single": modfn.upp_bound_report(modfn.ModSpec(4, {0}, n)),
    }
    expected = {"two-run": n / 2, "translate": (n - 4) / 2, "single": (n - 12) / 4}
    ok = all(reports[k].value == expected[k] for k in reports)
    yield comm.Verdict(
        "mod4-report-values",
        ok,
        {"n": n, **{k: reports[k].value for k in sorted(reports)}},
    )


def suite_bpp(n: int):
    """Bounded-error reports from exact dual witnesses, all predicates at n."""
    count = 0
    positive = 0
    witnesses_ok = True
    min_corr = None
    for bits in range(1 << (n + 1)):
        pred = SymmetricPredicate(tuple(1 - 2 * (bits >> w & 1) for w in range(n + 1)))
        report = comm.bpp_lower_bound(from_predicate(pred))
        inputs = report.chain[0].inputs
        corr = parse_rational(inputs["correlation"])
        spectral = parse_rational(inputs["spectral_bound"])
        wt = parse_rational(inputs["weight"])
        witnesses_ok &= corr >= Fraction(1, 3) and spectral * wt <= 3
        min_corr = corr if min_corr is None else min(min_corr, corr)
        count += 1
        positive += not report.vacuous
    yield comm.Verdict(
        "bpp-pipeline",
        witnesses_ok,
        {"n": n, "predicates": count, "nonvacuous": positive, "min_correlation": min_corr},
    )


def _popcounts(n: int) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        out = np.concatenate([out, out + 1])
    return out


def cmd_verify(cfg: RunConfig, out) -> int:
    rng = np.random.default_rng(cfg.seed)
    p = cfg.params
    max_n = cfg.max_n

    def runs():
        suites = SUITES[:-1] if cfg.suite == "all" else (cfg.suite,)
        for name in suites:
            if name == "sandwich":
                yield name, suite_sandwich(p.get("n") or 2)
            elif name == "duality":
                yield name, suite_duality(min(max_n or 2, 3))
            elif name == "fourier":
                yield name, suite_fourier(max_n or 8, p.get("samples") or 25, rng)
            elif name == "bruck":
                yield name, suite_bruck(max_n or 12)
            elif name == "modclaim":
                yield name, suite_modclaim(p.get("samples") or 5, max_n or 12, rng)
            elif name == "lifts":
                yield name, suite_lifts(p.get("samples") or 10, rng)
            elif name == "ppupper":
                yield name, suite_ppupper(min(max_n or 6, 8))
            elif name == "chains":
                yield name, suite_chains(
                    p.get("max_m") or 8, p.get("samples") or 50, p.get("verify_arity") or 12, rng
                )
            elif name == "bpp":
                yield name, suite_bpp(p.get("n") or 5)

    all_passed = True
    for suite_name, verdicts in runs():
        for verdict in verdicts:
            all_passed &= verdict.passed
            record = {
                "suite": suite_name,
                "check": verdict.check,
                "passed": verdict.passed,
                "values": verdict.values,
            }
            if cfg.fmt == "json":
                _emit_json(record, out)
            elif cfg.fmt == "csv":
                out.write(f"{suite_name},{verdict.check},{str(verdict.passed).lower()}\n")
            else:
                mark = "ok" if verdict.passed else "FAIL"
                out.write(f"[{mark}] {suite_name}/{verdict.check}\n")
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _parse_int_list(text: str):
    """Grid coordinates: comma list and/or inclusive a..b ranges."""
    items = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            items.extend(range(int(lo), int(hi) + 1))
        else:
            items.append(int(part))
    return items


def cmd_sweep(cfg: RunConfig, out) -> int:
    grid = cfg.params["grid"]
    if grid == "modbound":
        ms = _parse_int_list(cfg.params.get("m") or "")
        ns = _parse_int_list(cfg.params.get("n") or "")
        if any(m % 2 == 0 or m < 3 for m in ms):
            raise ValueError("modbound sweeps take odd moduli of at least 3")
        header = ("m", "n", "signrank_bound", "log2_bound", "vacuous")
        points = [(m, n) for m in ms for n in ns]

        def row(point):
            m, n = point
            report = modfn.odd_m_signrank_bound(m, n)
            log2 = report.chain[0].inputs.get("log2_bound", "")
            return (m, n, report.value, log2, report.vacuous)

    elif grid == "measures":
        n = int(cfg.params.get("n") or 0)
        if n < 1:
            points = []
        elif n > measures.MAX_SYMMETRIC_LP_N:
            raise CapacityError(
                f"arity {n} exceeds the level LP cap {measures.MAX_SYMMETRIC_LP_N}"
            )
        else:
            points = list(range(1 << (n + 1)))
        header = ("predicate", "oddeven", "margin")

        def row(bits):
            pred = SymmetricPredicate(tuple(1 - 2 * (bits >> w & 1) for w in range(n + 1)))
            deg = measures.odd_even_degree(pred)
            m_val = measures.margin(from_predicate(pred)).value
            return (pred.to_string(), deg, m_val)

    else:
        raise ValueError(f"unknown sweep grid {grid!r}")

    if cfg.jobs > 1 and points:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(row, points))
    else:
        rows = [row(point) for point in points]

    if cfg.fmt == "json":
        for values in rows:
            _emit_json(dict(zip(header, values)), out)
    elif cfg.fmt == "text":
        for values in rows:
            out.write(" ".join(f"{k}={_scalar_text(v)}" for k, v in zip(header, values)) + "\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for values in rows:
            writer.writerow(tuple(_scalar_text(v) for v in values))
    return 0


# ---------------------------------------------------------------------------
# lift
# ---------------------------------------------------------------------------


def cmd_lift(cfg: RunConfig, out) -> int:
    kind = cfg.params["kind"]
    if kind == "thr":
        weights = [parse_rational(w) for w in (cfg.params.get("weights") or "").split(",") if w]
        if not weights:
            raise ValueError("thr lifts need --weights")
        offset = parse_rational(cfg.params.get("offset") or "0")
        lifted_w, lifted_off, witness = lifting.thr_lift(weights, offset)
        record = {
            "kind": "thr",
            "weights": list(lifted_w),
            "offset": lifted_off,
            "witness": witness,
        }
    else:
        if not cfg.fns:
            raise ValueError("lift needs --fn")
        f = build_function(cfg.fns[0])
        if kind == "kp":
            g = lifting.kp_lift(f)
            record = {"kind": "kp", "source_arity": f.n, "lifted": g}
        elif kind == "symm":
            base, ml, witness = lifting.symm_lift_decompose(_predicate_of(f))
            record = {"kind": "symm", "base": base, "monomials": ml, "witness": witness}
        elif kind == "family":
            record = {"kind": "family", "report": lifting.liftsym_witness(_predicate_of(f))}
        else:
            raise ValueError(f"unknown lift kind {kind!r}")
    if cfg.fmt == "text":
        out.write(json.dumps(cli_json(record), indent=2) + "\n")
    else:
        _emit_json(record, out)
    return 0


def _predicate_of(f: BooleanFunction) -> SymmetricPredicate:
    if not f.is_symmetric():
        raise ValueError("this lift requires a symmetric function")
    return f.to_predicate()


# ---------------------------------------------------------------------------
# modbound
# ---------------------------------------------------------------------------


def cmd_modbound(cfg: RunConfig, out) -> int:
    m = cfg.params["m"]
    accepted = frozenset(_parse_int_list(cfg.params.get("accepted") or ""))
    n = cfg.params["n"]
    verify_arity = cfg.params.get("verify_arity") or 12
    spec = modfn.ModSpec(m, accepted, n)
    simplicity = modfn.is_simple(spec)
    record = {
        "spec": spec,
        "simple": simplicity.simple,
        "reason": simplicity.reason,
        "chain": None,
        "upp": None,
    }
    try:
        chain = modfn.reduction_chain(m, accepted, verify_arity)
    except ValueError:
        chain = None  # residue pattern induces a constant or a parity
    if chain is not None:
        record["chain"] = chain
        record["upp"] = modfn.upp_bound_report(spec)
        cost = cfg.params.get("circuit_cost")
        if cost:
            record["size"] = modfn.circuit_size_bound(spec, cost)
    if m % 2 == 1 and 0 < len(accepted) < m:
        record["odd_bound"] = modfn.odd_m_signrank_bound(m, n)
    if cfg.fmt == "text":
        out.write(json.dumps(cli_json(record), indent=2) + "\n")
    else:
        _emit_json(record, out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    # sweeps default to csv, everything else to json
    shared.add_argument("--format", choices=("json", "csv", "text"), default=None)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--jobs", type=int, default=1)
    shared.add_argument(
        "--max-n",
        type=int,
        default=int(os.environ.get(ENV_MAX_N, "0")),
        help=f"arity cap; 0 keeps per-task defaults (env {ENV_MAX_N})",
    )

    parser = argparse.ArgumentParser(
        prog="xorlift",
        description="Exact polynomial measures and communication bounds of XOR lifts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[shared], help="compute measures and bounds")
    p.add_argument("--fn", action="append", required=True, help="function spec, repeatable")
    p.add_argument("--measure", action="append", default=[], choices=sorted(_measure_selectors(Fraction(1, 3))))
    p.add_argument("--bound", action="append", default=[], choices=sorted(_bound_selectors()))
    p.add_argument("--all", action="store_true", help="compute the standard measure set")
    p.add_argument("--eps", default="1/3", help="approximation level as p/q")

    p = sub.add_parser("verify", parents=[shared], help="run a theorem verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--n", type=int, help="arity for single-arity suites")
    p.add_argument("--max-m", type=int, help="modulus bound for chain suites")
    p.add_argument("--samples", type=int, help="sample count for randomized suites")
    p.add_argument("--verify-arity", type=int, help="arity for chain step verification")

    p = sub.add_parser("sweep", parents=[shared], help="grid sweeps as CSV")
    p.add_argument("grid", choices=("modbound", "measures"))
    p.add_argument("--m", help="moduli: comma list / a..b ranges")
    p.add_argument("--n", help="arities: comma list / a..b ranges (measures: one arity)")

    p = sub.add_parser("lift", parents=[shared], help="compute lifted functions")
    p.add_argument("--fn", action="append", default=[])
    p.add_argument("--kind", required=True, choices=("kp", "symm", "family", "thr"))
    p.add_argument("--weights", help="thr only: comma list of rationals")
    p.add_argument("--offset", help="thr only: rational offset")

    p = sub.add_parser("modbound", parents=[shared], help="reduction chain and bound reports")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--accepted", required=True, help="residues: comma list / a..b ranges")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--verify-arity", type=int)
    p.add_argument("--circuit-cost", type=int)

    return parser


def _config_from_args(args) -> RunConfig:
    params = {}
    if args.command == "verify":
        params = {
            "n": args.n,
            "max_m": args.max_m,
            "samples": args.samples,
            "verify_arity": args.verify_arity,
        }
    elif args.command == "sweep":
        params = {"grid": args.grid, "m": args.m, "n": args.n}
    elif args.command == "lift":
        params = {"kind": args.kind, "weights": args.weights, "offset": args.offset}
    elif args.command == "modbound":
        params = {
            "m": args.m,
            "accepted": args.accepted,
            "n": args.n,
            "verify_arity": args.verify_arity,
            "circuit_cost": args.circuit_cost,
        }
    selectors = tuple(args.measure) if getattr(args, "measure", None) else ()
    if getattr(args, "all", False):
        selectors = tuple(dict.fromkeys(ALL_MEASURES + selectors))
    return RunConfig(
        command=args.command,
        fns=tuple(getattr(args, "fn", []) or ()),
        selectors=selectors,
        bounds=tuple(getattr(args, "bound", []) or ()),
        eps=parse_rational(getattr(args, "eps", "1/3")),
        suite=getattr(args, "suite", ""),
        params=params,
        fmt=args.format or ("csv" if args.command == "sweep" else "json"),
        seed=args.seed,
        jobs=args.jobs,
        max_n=args.max_n,
    )


_COMMANDS = {
    "measure": cmd_measure,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "lift": cmd_lift,
    "modbound": cmd_modbound,
}


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[cfg.command](cfg, out)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return 3
    except modfn.CaseExhaustionError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
