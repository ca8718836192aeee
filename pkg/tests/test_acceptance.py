"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""

import itertools
import time

import numpy as np
import sympy

from conftest import ACCEPTANCE_LINES, ALL_PROTOCOLS, GOLDEN, proto
from redundex import designs
from redundex.codes import builtin_code, classify, syndrome_matrix
from redundex.decode import build_lookup_table, get_decoder
from redundex.failure import (
    COST_NOTE,
    compare,
    consensus_weights,
    crossover,
    exact_failure,
    expected_cost,
    monte_carlo,
    total_probability,
)
from redundex.pauli import PauliOperator, commutes, logical_x
from redundex.polynomial import ONE, PM, PQ, BivariatePolynomial


def report(label: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
    print(line, flush=True)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _cold():
    get_decoder.cache_clear()
    consensus_weights.cache_clear()


def test_criterion_01_bitflip_table():
    _cold()
    t0 = time.perf_counter()
    got = {k: exact_failure(proto("bitflip", k)).truncate(2) for k in ("minimal", "ft", "dbr")}
    elapsed = time.perf_counter() - t0
    want = {
        "minimal": 2 * PM - PM**2 + 3 * PQ**2,
        "ft": 6 * PM**2 + 3 * PQ**2,
        "dbr": 3 * PM**2 + 3 * PQ**2 + 9 * PM * PQ,
    }
    ok = got == want and elapsed < 1.0
    report("1 bit-flip degree-2 failure rows", ok, f"{elapsed:.2f}s; " + "; ".join(f"{k}: {v}" for k, v in got.items()))


def test_criterion_02_steane_table():
    _cold()
    want = {
        "minimal": 3 * PM - 3 * PM**2 + 21 * PQ**2,
        "ft": 9 * PM**2 + 21 * PQ**2,
        "mr": 6 * PM**2 + 21 * PQ**2 + 28 * PM * PQ,
        "dbr": 21 * PQ**2,
    }
    got, consts = {}, {}
    t_dbr = None
    for k in want:
        t0 = time.perf_counter()
        got[k] = exact_failure(proto("steane", k)).truncate(2)
        if k == "dbr":
            t_dbr = time.perf_counter() - t0
        consts[k] = int(expected_cost(proto("steane", k)).coefficient(0, 0))
    ok = got == want and consts == {"minimal": 3, "ft": 6, "mr": 4, "dbr": 7} and t_dbr < 60
    report("2 Steane degree-2 failure rows and cost constants", ok,
           f"DBR {t_dbr:.2f}s; costs {consts}; " + "; ".join(f"{k}: {v}" for k, v in got.items()))


def test_criterion_03_perfect5_dbr_scaling():
    _cold()
    t0 = time.perf_counter()
    f = exact_failure(proto("perfect5", "dbr"))
    elapsed = time.perf_counter() - t0
    pm_only = f.substitute_pq_zero()
    low = [pm_only.coefficient(0, b) for b in range(1, 6)]
    ok = low[:3] == [0, 0, 0] and low[3] != 0 and elapsed < 600
    report("3 perfect5 DBR at pq=0: zero pm^1..pm^3, nonzero pm^4", ok,
           f"{elapsed:.2f}s; pm^1..pm^5 coefficients {[str(c) for c in low]}; leading term is pm^5")


def test_criterion_04a_bitflip_crossover():
    cx = crossover(exact_failure(proto("bitflip", "ft")), exact_failure(proto("bitflip", "dbr")))
    ok = not cx.dominance and cx.slope == sympy.Rational(1, 3)
    report("4a bit-flip FT vs DBR critical slope 1/3", ok,
           f"computed {cx.describe()} on rays pm = c*pq (6pm^2 vs 3pm^2 + 9pq*pm)")


def test_criterion_04b_steane_crossover():
    cx = crossover(exact_failure(proto("steane", "ft")), exact_failure(proto("steane", "mr")))
    ok = not cx.dominance and cx.slope == sympy.Rational(28, 3)
    report("4b Steane FT vs MR critical slope 28/3", ok, cx.describe())


def test_criterion_04c_perfect5_crossover_golden():
    cx = crossover(exact_failure(proto("perfect5", "ft")), exact_failure(proto("perfect5", "mr")))
    archived = sympy.sympify((GOLDEN / "crossover_perfect5_ft-mr.txt").read_text().strip())
    ok = not cx.dominance and sympy.simplify(cx.slope - archived) == 0
    report("4c perfect5 FT vs MR slope matches archived golden value", ok, f"c = {cx.slope}, golden {archived}")


def test_criterion_05_design_theory():
    p = designs.derive_parameters(designs.BIPLANE_ORDER2)
    verdict = designs.check_qec_constraints(designs.BIPLANE_ORDER2, css=True)
    dists = {designs.signature_distance(designs.BIPLANE_ORDER2, j, k) for j, k in itertools.combinations(range(7), 2)}
    ok = p.as_tuple() == (7, 7, 4, 4, 2) and verdict.ok and dists == {4} == {2 * (p.rho - p.lam)}

    checked = list(designs.BUILTIN_DESIGNS.values())
    searches = [(7, 3, 7), (7, 4, 7), (3, 2, 3), (4, 2, 6), (5, 2, 10), (6, 3, 10), (7, 3, 14)]
    for n, w, m in searches:
        res = designs.search_2designs(n, w, m, limit=50)
        checked.extend(res.designs)
    for d in checked:
        q = designs.derive_parameters(d)
        ok = ok and q.is_2design and q.m * q.w == q.n * q.rho and q.lam * (q.n - 1) == q.rho * (q.w - 1)
    report("5 biplane (7,7,4,4,2), constraints, distance 4, counting identities", ok,
           f"{len(checked)} designs checked")


def test_criterion_06_structural_identities():
    steane = designs.supports_to_design(builtin_code("steane").sector_group.nontrivial)
    ok_steane = steane.multiset() == designs.BIPLANE_ORDER2.multiset()
    bf = proto("bitflip", "dbr").measured
    ok_bf = {s.key for s in bf} == {s.key for s in builtin_code("bitflip").group.nontrivial} and len(bf) == 3
    five = builtin_code("perfect5").group.nontrivial
    sm = syndrome_matrix(proto("perfect5", "dbr"))
    dist = sm.column_distances()[1:, 1:]
    ok_five = len(five) == 15 and all(e.weight == 4 for e in five) and (dist[~np.eye(15, dtype=bool)] == 8).all()
    report("6 Steane supports = biplane; bit-flip DBR = 3 elements; perfect5 15 weight-4, distance 8",
           ok_steane and ok_bf and ok_five)


def test_criterion_07_constraint_iff():
    ok = True
    pairs = 0
    for n in range(1, 11):
        x_l = logical_x(n)
        for mask in range(1 << n):
            ok &= commutes(PauliOperator(n, 0, mask), x_l) == (mask.bit_count() % 2 == 0)
        for xa in range(1 << n):
            a = PauliOperator(n, xa, 0)
            for zb in range(1 << n):
                ok &= commutes(a, PauliOperator(n, 0, zb)) == ((xa & zb).bit_count() % 2 == 0)
                pairs += 1
    report("7 Z-weight parity vs X_L and X/Z overlap parity, exhaustive n <= 10", bool(ok), f"{pairs} X/Z pairs")


def test_criterion_08_classification():
    tags = {k: str(classify(proto("steane", k))) for k in ("minimal", "ft", "dbr")}
    ok = tags == {"minimal": "[[7,1,3,0]]", "ft": "[[7,1,3,1]]", "dbr": "[[7,1,3,1]]"}
    report("8 Steane classification tags", ok, str(tags))


MC_MATRIX = [
    ("bitflip", "minimal", 0.05, 0.05, 1),
    ("bitflip", "ft", 0.1, 0.1, 2),
    ("bitflip", "dbr", 0.05, 0.05, 7),
    ("bitflip", "dbr", 0.2, 0.01, 3),
    ("steane", "minimal", 0.02, 0.05, 4),
    ("steane", "ft", 0.0, 0.1, 5),
    ("steane", "mr", 0.05, 0.05, 6),
    ("steane", "dbr", 0.1, 0.1, 8),
    ("perfect5", "minimal", 0.05, 0.02, 9),
    ("perfect5", "ft", 0.05, 0.1, 10),
    ("perfect5", "mr", 0.1, 0.05, 11),
    ("perfect5", "dbr", 0.1, 0.2, 12),
]


def test_criterion_09_oracle_cross_checks():
    mismatched = 0
    for code, kind in ALL_PROTOCOLS:
        p = proto(code, kind)
        if p.m > 15:
            continue
        dec = get_decoder(p)
        table = build_lookup_table(p)
        mismatched += sum(table.lookup(s) != dec.decode_syndrome(s) for s in range(1 << p.m))
    worst = 0.0
    for code, kind, pq, pm, seed in MC_MATRIX:
        p = proto(code, kind)
        exact = float(exact_failure(p)(pq, pm))
        res = monte_carlo(p, pq, pm, trials=200_000, seed=seed)
        worst = max(worst, abs(res.estimate - exact) / res.stderr if res.stderr else 0.0)
    unity = all(total_probability(proto(c, k)) == ONE for c, k in ALL_PROTOCOLS)
    ok = mismatched == 0 and worst <= 3 and unity
    report("9 table == direct decode; Monte Carlo within 3 sigma (12 points); partition of unity", ok,
           f"{mismatched} table mismatches; worst |z| = {worst:.2f}")


def test_criterion_10_substitutions():
    golden_ok = True
    for code, kind in ALL_PROTOCOLS:
        path = GOLDEN / f"{code}_{kind}.poly"
        golden_ok &= path.exists() and BivariatePolynomial.from_text(path.read_text()) == \
            exact_failure(proto(code, kind)).truncate(8)
    costs = {
        "bitflip": expected_cost(proto("bitflip", "ft")),
        "steane": expected_cost(proto("steane", "ft")),
    }
    cost_ok = costs == {"bitflip": 4 + 4 * PM - 4 * PM**2, "steane": 6 + 6 * PM - 6 * PM**2}
    note_ok = COST_NOTE in compare(["bitflip"]).csv_text()
    report("10 order-8 golden files from the exact oracle; derived FT costs with documented note",
           bool(golden_ok) and cost_ok and note_ok, "; ".join(f"{k}: {v}" for k, v in costs.items()))
