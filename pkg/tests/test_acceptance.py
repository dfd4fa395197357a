"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines.
"""

import itertools
import time
from fractions import Fraction as F

import numpy as np

from exactrepair.codes import build_concrete, reconstruct
from exactrepair.exactmath import hypergeom_support, hypergeom_weight
from exactrepair.records import OutputRecord, parse_csv, render_csv
from exactrepair.simulate import mk_oracle, sweep_repairs
from exactrepair.tradeoff import (
    ParameterError,
    Provenance,
    SystemParams,
    baseline_point,
    baseline_region,
    construction1_nonempty_gamma,
    construction1_point,
    construction2_file_size,
    construction2_point,
    functional_capacity,
    inner_bound_region,
    match_small_code,
    mbr_point,
    min_functional_gamma,
    msr_point,
    repair_degree_distribution,
    space_sharing_curve,
    theorem2_region,
)


def report(number, title, failures):
    status = "PASS" if not failures else "FAIL"
    print(f"\ncriterion {number}: {status} {title}")
    for f in failures[:5]:
        print(f"    {f}")
    if len(failures) > 5:
        print(f"    ... {len(failures) - 5} more")
    assert not failures, f"criterion {number}: {failures[:5]}"


P533 = SystemParams(5, 3, 3)


def test_criterion_1():
    got = construction1_point(P533, 2).coords
    failures = [] if got == (F(2, 5), F(3, 4)) else [f"construction1_point(k_hat=2) = {got}"]
    report(1, "(5,3,3) construction 1 at k_hat=2 is (2/5, 3/4)", failures)


def test_criterion_2():
    expected = {
        "msr": (msr_point(P533).coords, (F(1, 3), F(1))),
        "mbr": (mbr_point(P533).coords, (F(1, 2), F(1, 2))),
        "functional at 2/5": (min_functional_gamma(P533, F(2, 5)), F(3, 5)),
        "baseline k_hat=2": (baseline_point(P533, 2).coords, (F(2, 5), F(4, 5))),
    }
    failures = [f"{name}: got {g}, want {w}" for name, (g, w) in expected.items() if g != w]
    report(2, "(5,3,3) MSR, MBR, functional and baseline reference points", failures)


def test_criterion_3():
    failures = []
    analytic = construction1_nonempty_gamma(P533, 2)
    if analytic != F(15, 16):
        failures.append(f"analytic gamma_1 = {analytic}")
    ledger = sweep_repairs(build_concrete(P533, 2, seed=7), 3)
    if ledger.nonempty_gamma != F(15, 16):
        failures.append(f"measured non-empty gamma = {ledger.nonempty_gamma}")
    report(3, "per-node bandwidth 15/16, analytic and measured", failures)


def test_criterion_4():
    start = time.perf_counter()
    failures = []
    code = build_concrete(P533, 2, seed=7)
    ledger = sweep_repairs(code, 3)  # raises on any inexact repair
    if len(ledger.pair_bandwidth) != 5 * 4:
        failures.append(f"{len(ledger.pair_bandwidth)} failure/helper pairs swept")
    if code.copies != 120:
        failures.append(f"{code.copies} copies")
    if (ledger.alpha, ledger.gamma) != (F(2, 5), F(3, 4)):
        failures.append(f"measured (alpha, gamma) = {(ledger.alpha, ledger.gamma)}")
    subsets = list(itertools.combinations(range(5), 3))
    bad = [s for s in subsets if not np.array_equal(reconstruct(code, s), code.files)]
    if len(subsets) != 10 or bad:
        failures.append(f"reconstruction failed for {bad}")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        failures.append(f"took {elapsed:.1f}s")
    report(4, f"concrete (5,3,3) sweep, 20 pairs x 120 copies, 10 reconstructions ({elapsed:.2f}s)", failures)


def test_criterion_5():
    failures = []
    for n in range(2, 11):
        p = SystemParams(n, n - 1, n - 1)
        for kh in range(1, n):
            c1, base = construction1_point(p, kh).coords, baseline_point(p, kh).coords
            if c1 != base:
                failures.append(f"{p.n, p.k, p.d} k_hat={kh}: c1 {c1} != baseline {base}")
    for n in range(3, 11):
        for k in range(1, n - 1):
            p = SystemParams(n, k, k)
            gains = [kh for kh in range(1, k + 1)
                     if construction1_point(p, kh).gamma < baseline_point(p, kh).gamma]
            if not gains:
                failures.append(f"{n, k, k}: no k_hat gives a strict gamma improvement")
    report(5, "coincidence at (n,n-1,n-1) and strict improvement for d=k<n-1", failures)


def test_criterion_6():
    failures = []
    for n in range(2, 13):
        for k in range(1, n):
            p = SystemParams(n, k, k)
            for kh in range(1, k + 1):
                a, b = construction2_point(p, kh).coords, construction1_point(p, kh).coords
                if a != b:
                    failures.append(f"{n, k, k} k_hat={kh}: {a} != {b}")
    report(6, "construction 2 equals construction 1 when d=k, n<=12", failures)


def test_criterion_7():
    failures = []
    count = 0
    for n in range(2, 13):
        for k in range(1, n):
            for d in range(k, n):
                p = SystemParams(n, k, d)
                for kh in range(1, d + 1):
                    count += 1
                    o = mk_oracle(p, kh)
                    c = construction2_file_size(p, match_small_code(p, kh, "repair"))
                    if o != c:
                        failures.append(f"{n, k, d} k_hat={kh}: oracle {o} != closed form {c}")
    report(7, f"mk_oracle equals the closed form on {count} instances, n<=12", failures)


def test_criterion_8():
    start = time.perf_counter()
    p = SystemParams(61, 55, 59)
    failures = []
    c1 = [construction1_point(p, kh) for kh in range(1, p.k + 1)]
    c2 = [construction2_point(p, kh) for kh in range(1, p.d + 1)]
    for pt in c1 + c2:
        if functional_capacity(p, pt.alpha, pt.gamma) < p.file_size:
            failures.append(f"{pt.label} k_hat={pt.k_hat} violates the functional bound")
    # (b) each family has a point the other family does not dominate, and both reach the hull
    if all(any(q.dominates(x) for q in c2) for x in c1):
        failures.append("construction 2 dominates every construction 1 point")
    if all(any(q.dominates(x) for q in c1) for x in c2):
        failures.append("construction 1 dominates every construction 2 point")
    hull = theorem2_region(p).hull_vertices()
    sources = {v.provenance for v in hull}
    for prov in (Provenance.CONSTRUCTION1, Provenance.CONSTRUCTION2):
        if prov not in sources:
            failures.append(f"no {prov.value} vertex on the hull")
    # (c)
    share = space_sharing_curve(p)
    if not any(v.gamma < share.min_gamma(v.alpha) for v in hull):
        failures.append("hull never beats space sharing")
    elapsed = time.perf_counter() - start
    if elapsed >= 1:
        failures.append(f"took {elapsed:.2f}s")
    report(8, f"(61,55,59) bound, mutual non-dominance, gain over space sharing ({elapsed:.3f}s)", failures)


def _slopes(vertices):
    return [(b.gamma - a.gamma) / (b.alpha - a.alpha) for a, b in zip(vertices, vertices[1:])]


def test_criterion_9():
    failures = []
    for n in range(2, 13):
        for k in range(1, n):
            for d in range(k, n):
                p = SystemParams(n, k, d)
                rules = [("repair", d), ("reconstruction", k)]
                for rule, top in rules:
                    for kh in range(1, top + 1):
                        small = match_small_code(p, kh, rule)
                        try:
                            dist = repair_degree_distribution(n, d, small)
                        except ParameterError as e:
                            if rule == "repair":
                                failures.append(f"{n, k, d} k_hat={kh} {rule}: {e}")
                            continue
                        direct = sum(hypergeom_weight(n - 1, small.n_hat - 1, d, x)
                                     for x in hypergeom_support(n - 1, small.n_hat - 1, d))
                        if sum(dist.values()) != 1 or direct != 1:
                            failures.append(f"{n, k, d} k_hat={kh} {rule}: weights sum to {direct}")
                for region in (inner_bound_region(p), baseline_region(p)):
                    s = _slopes(region.hull_vertices())
                    if any(b <= a for a, b in zip(s, s[1:])):
                        failures.append(f"{n, k, d}: hull slopes not strictly increasing {s}")
                rec = OutputRecord(p, "hull", inner_bound_region(p).hull_vertices())
                back = [(a, g) for _, _, a, g in parse_csv(render_csv([rec]))]
                if back != [v.coords for v in rec.points]:
                    failures.append(f"{n, k, d}: CSV round trip changed the hull")
    report(9, "weights sum to 1, hull slopes strictly increase, CSV round trip", failures)
