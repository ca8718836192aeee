"""Exact failure-rate and cost polynomials, Monte Carlo checks, comparisons.

Failure is summed over events (error pattern, flip record). Decoding only sees
the per-stabilizer consensus of the flips, so flip records are grouped by
their consensus vector; each group carries the exact probability of all
records that collapse onto it. Error patterns are grouped by (ideal syndrome,
coset, weight), which leaves the success factor unchanged.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import sympy

from .codes import Protocol, RepeatMajority, SingleRound, all_protocols, builtin_code, classify, Kind
from .decode import DecodePolicy, get_decoder
from .events import consensus, iter_error_patterns, iter_flip_records, iter_low_weight_errors
from .pauli import coset_representative, syndrome_int
from .polynomial import ONE, PM, PQ, BivariatePolynomial

log = logging.getLogger(__name__)

DEFAULT_EVENT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ErrorModel:
    """Independent errors: each qubit errs with probability ``pq`` (split
    evenly over X, Y, Z for the depolarizing alphabet) and each performed
    measurement is flipped with probability ``pm``."""

    alphabet: str = "x"

    @property
    def share(self) -> Fraction:
        return Fraction(1) if self.alphabet == "x" else Fraction(1, 3)

    @property
    def kinds(self) -> int:
        return 1 if self.alphabet == "x" else 3

    def pattern_probability(self, n: int, a: int) -> BivariatePolynomial:
        """Probability of one specific error pattern with ``a`` non-identity factors."""
        return (PQ * self.share) ** a * (ONE - PQ) ** (n - a)

    @classmethod
    def for_protocol(cls, protocol: Protocol) -> ErrorModel:
        return cls(protocol.alphabet)


def _check_model(protocol: Protocol, model: ErrorModel | None) -> ErrorModel:
    model = model or ErrorModel.for_protocol(protocol)
    if model.alphabet != protocol.alphabet:
        raise ValueError(
            f"error model alphabet {model.alphabet!r} differs from the protocol's {protocol.alphabet!r}"
        )
    return model


def _flip_weight(k: int, length: int) -> BivariatePolynomial:
    return PM**k * (ONE - PM) ** (length - k)


@lru_cache(maxsize=32)
def consensus_weights(protocol: Protocol) -> tuple[BivariatePolynomial, ...]:
    """``W[b]``: probability of one particular consensus-flip vector of weight ``b``.

    Derived by enumerating every flip record of the schedule; records with
    different consensus vectors of equal weight must give the same total.
    """
    m = protocol.m
    if isinstance(protocol.schedule, SingleRound):
        return tuple(_flip_weight(b, m) for b in range(m + 1))
    tally: dict[int, Counter] = defaultdict(Counter)
    for rec in iter_flip_records(protocol):
        tally[consensus(protocol, rec)][(sum(rec), len(rec))] += 1
    per_vector = {
        c: sum((_flip_weight(k, L) * cnt for (k, L), cnt in counts.items()), BivariatePolynomial())
        for c, counts in tally.items()
    }
    weights = []
    for b in range(m + 1):
        polys = {per_vector[c] for c in per_vector if c.bit_count() == b}
        if len(polys) != 1:
            raise AssertionError("consensus probability depends on more than the flip count")
        weights.append(polys.pop())
    return tuple(weights)


def _min_degree(poly: BivariatePolynomial) -> int:
    d = poly.lowest_degree
    return math.inf if d is None else d


def _error_classes(protocol: Protocol, errors) -> Counter:
    """Count error patterns by (ideal syndrome, coset key, weight)."""
    group = protocol.code.group
    out = Counter()
    for e in errors:
        out[(syndrome_int(e, protocol.measured), coset_representative(e, group), e.weight)] += 1
    return out


def _class_fail_counts(coset_ids: np.ndarray, flip_masks: np.ndarray, flip_wts: np.ndarray,
                       m: int, syn: int, cid: int) -> np.ndarray:
    fail = coset_ids[flip_masks ^ syn] != cid
    return np.bincount(flip_wts[fail], minlength=m + 1)


def failure_counts(protocol: Protocol, policy: DecodePolicy = DecodePolicy(),
                   max_degree: int | None = None, workers: int = 1) -> dict[tuple[int, int], int]:
    """``N[(a, b)]``: failing events with a weight-``a`` error pattern and a
    weight-``b`` consensus flip vector.

    With ``max_degree`` only events that can contribute at or below that total
    degree are enumerated.
    """
    m, n = protocol.m, protocol.n_qubits
    table = get_decoder(protocol, policy).table
    weights = consensus_weights(protocol)
    mindeg = [_min_degree(w) for w in weights]

    if max_degree is None:
        errors = iter_error_patterns(n, protocol.alphabet)
        flip_masks = np.arange(1 << m, dtype=np.int64)
    else:
        errors = iter_low_weight_errors(n, protocol.alphabet, max_degree)
        bmax = max((b for b in range(m + 1) if mindeg[b] <= max_degree), default=-1)
        flip_masks = np.array(
            [sum(1 << i for i in c) for b in range(bmax + 1) for c in itertools.combinations(range(m), b)],
            dtype=np.int64,
        )
    flip_wts = np.bitwise_count(flip_masks).astype(np.int64)
    classes = sorted(_error_classes(protocol, errors).items())

    args = [(table.coset_ids, flip_masks, flip_wts, m, syn, cid) for (syn, cid, _a), _cnt in classes]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_class = list(pool.map(_class_fail_counts, *zip(*args)))
    else:
        per_class = [_class_fail_counts(*x) for x in args]

    counts: dict[tuple[int, int], int] = defaultdict(int)
    for ((syn, cid, a), cnt), fails in zip(classes, per_class):
        for b, f in enumerate(fails.tolist()):
            if f and (max_degree is None or a + mindeg[b] <= max_degree):
                counts[(a, b)] += cnt * f
    return dict(counts)


def event_count(protocol: Protocol) -> int:
    n_err = (1 << protocol.n_qubits) if protocol.alphabet == "x" else 4**protocol.n_qubits
    return n_err * sum(1 for _ in iter_flip_records(protocol)) if not isinstance(
        protocol.schedule, SingleRound) else n_err * (1 << protocol.m)


def _assemble(protocol: Protocol, model: ErrorModel, counts, max_degree=None) -> BivariatePolynomial:
    n = protocol.n_qubits
    weights = consensus_weights(protocol)
    by_a: dict[int, BivariatePolynomial] = defaultdict(BivariatePolynomial)
    for (a, b), cnt in counts.items():
        by_a[a] = by_a[a] + weights[b] * cnt
    total = BivariatePolynomial()
    for a in sorted(by_a):
        total = total + model.pattern_probability(n, a).mul(by_a[a], max_degree)
    return total if max_degree is None else total.truncate(max_degree)


def exact_failure(protocol: Protocol, model: ErrorModel | None = None,
                  policy: DecodePolicy = DecodePolicy(), workers: int = 1,
                  budget: int = DEFAULT_EVENT_BUDGET) -> BivariatePolynomial:
    """F = 1 - sum_e P(e) s(e), as an exact polynomial.

    A policy other than the balanced one fixes the decoder at its own
    (p_q, p_m); the polynomial is then exact for that fixed decoder only.
    """
    model = _check_model(protocol, model)
    events = event_count(protocol)
    if events > budget:
        raise BudgetExceeded(
            f"{protocol.name}: {events} events exceed the budget of {budget}; use truncated_failure"
        )
    log.debug("enumerating %d events for %s", events, protocol.name)
    return _assemble(protocol, model, failure_counts(protocol, policy, workers=workers))


def truncated_failure(protocol: Protocol, max_total_degree: int, model: ErrorModel | None = None,
                      policy: DecodePolicy = DecodePolicy(), workers: int = 1) -> BivariatePolynomial:
    """Failure polynomial exact in every term of total degree <= ``max_total_degree``."""
    model = _check_model(protocol, model)
    if max_total_degree < 1:
        return BivariatePolynomial()
    counts = failure_counts(protocol, policy, max_degree=max_total_degree, workers=workers)
    return _assemble(protocol, model, counts, max_total_degree)


def total_probability(protocol: Protocol, model: ErrorModel | None = None) -> BivariatePolynomial:
    """Sum of P(e) over every event, straight from the raw flip records."""
    model = _check_model(protocol, model)
    n = protocol.n_qubits
    errors = Counter(e.weight for e in iter_error_patterns(n, model.alphabet))
    p_err = sum((model.pattern_probability(n, a) * c for a, c in errors.items()), BivariatePolynomial())
    recs = Counter((sum(r), len(r)) for r in iter_flip_records(protocol))
    p_rec = sum((_flip_weight(k, L) * c for (k, L), c in recs.items()), BivariatePolynomial())
    return p_err * p_rec


def expected_cost(protocol: Protocol, model: ErrorModel | None = None) -> BivariatePolynomial:
    """Expected number of stabilizer measurements per correction cycle."""
    _check_model(protocol, model)
    if isinstance(protocol.schedule, SingleRound):
        return BivariatePolynomial.constant(protocol.m)
    recs = Counter((sum(r), len(r)) for r in iter_flip_records(protocol))
    return sum((_flip_weight(k, L) * (c * L) for (k, L), c in recs.items()), BivariatePolynomial())


def both_sectors(sector_failure: BivariatePolynomial, sector_cost: BivariatePolynomial):
    """Failure and cost when both CSS sectors are corrected independently."""
    return ONE - (ONE - sector_failure) ** 2, sector_cost * 2


# -- crossover ------------------------------------------------------------------


@dataclass(frozen=True)
class Crossover:
    """Where ``A - B`` changes sign along rays ``pm = c * pq`` near the origin.

    ``slopes`` are the exact critical values of ``c``; ``signs`` has one more
    entry than ``slopes``, giving the sign of ``A - B`` on each interval of
    ``c`` from 0 to infinity. A single sign means one protocol dominates.
    """

    difference: BivariatePolynomial
    quadratic: BivariatePolynomial
    slopes: tuple
    signs: tuple[int, ...]

    @property
    def slope(self):
        if len(self.slopes) != 1:
            raise ValueError(f"expected one critical slope, found {len(self.slopes)}")
        return self.slopes[0]

    @property
    def dominance(self) -> bool:
        return not self.slopes

    def describe(self) -> str:
        if self.dominance:
            return f"no crossover; sign(A-B) = {self.signs[0]:+d} on every ray"
        return "; ".join(f"c = {sympy.sstr(c)}" for c in self.slopes) + f" (signs {self.signs})"


def crossover(poly_a: BivariatePolynomial, poly_b: BivariatePolynomial) -> Crossover:
    diff = poly_a - poly_b
    low = diff.lowest_degree
    if low is None:
        return Crossover(diff, diff, (), (0,))
    if low < 2:
        raise ValueError(f"A - B has a degree-{low} term; crossover needs leading degree 2")
    quad = diff.homogeneous_part(2)
    alpha, beta, gamma = (sympy.Rational(quad.coefficient(2 - j, j).numerator, quad.coefficient(2 - j, j).denominator)
                          for j in range(3))
    c = sympy.Symbol("c", positive=True)
    f = alpha + beta * c + gamma * c**2
    if f == 0:
        raise ValueError("degree-2 part of A - B vanishes; crossover is decided at higher order")
    roots = sorted({r for r in sympy.roots(sympy.Poly(f, c)).keys() if r.is_real and r > 0},
                   key=lambda r: float(r))
    # keep only roots where the sign actually flips
    probes = [sympy.Rational(0)] + list(roots)
    signs = []
    slopes = []
    for i in range(len(probes)):
        lo = probes[i]
        hi = probes[i + 1] if i + 1 < len(probes) else lo + 1
        mid = (lo + hi) / 2
        s = int(sympy.sign(f.subs(c, mid)))
        if signs and s == signs[-1]:
            continue
        if signs:
            slopes.append(sympy.nsimplify(lo))
        signs.append(s)
    return Crossover(diff, quad, tuple(sympy.radsimp(s) for s in slopes), tuple(signs))


def crossover_curve(diff: BivariatePolynomial, pq_values: Sequence[float]) -> list[float | None]:
    """For each ``pq``, the ``pm`` in (0, 1] where ``diff`` changes sign, if any."""
    from scipy.optimize import brentq

    coeffs = {k: float(v) for k, v in diff.terms.items()}

    def g(pq, pm):
        return sum(v * pq**a * pm**b for (a, b), v in coeffs.items())

    grid = np.linspace(1e-9, 1.0, 2001)
    out = []
    for pq in pq_values:
        vals = [g(pq, x) for x in grid]
        root = None
        for x0, x1, v0, v1 in zip(grid, grid[1:], vals, vals[1:]):
            if v0 == 0:
                root = float(x0)
                break
            if v0 * v1 < 0:
                root = brentq(lambda x: g(pq, x), x0, x1)
                break
        out.append(root)
    return out


# -- Monte Carlo ----------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloResult:
    estimate: float
    stderr: float
    failures: int
    trials: int


def _mc_chunk(protocol: Protocol, policy: DecodePolicy, p_q: float, p_m: float,
              trials: int, seed_seq: np.random.SeedSequence, batch: int = 200_000) -> int:
    rng = np.random.default_rng(seed_seq)
    dec = get_decoder(protocol, policy)
    n, m = protocol.n_qubits, protocol.m
    n_keys = 1 << (2 * n)
    syn_of = np.zeros(n_keys, dtype=np.int64)
    cid_of = np.zeros(n_keys, dtype=np.int64)
    for e, s, cid in zip(dec.candidates, dec.syndromes, dec.cosets):
        syn_of[e.key] = s
        cid_of[e.key] = cid
    table = dec.table.coset_ids
    bits = 1 << np.arange(m, dtype=np.int64)
    qbits = 1 << np.arange(n, dtype=np.int64)
    sched = protocol.schedule
    failures = 0
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        hit = rng.random((size, n)) < p_q
        if protocol.alphabet == "x":
            key = (hit * qbits).sum(axis=1)
        else:
            kind = rng.integers(0, 3, size=(size, n))  # 0: X, 1: Y, 2: Z
            xb = hit & (kind <= 1)
            zb = hit & (kind >= 1)
            key = (xb * qbits).sum(axis=1) | ((zb * qbits).sum(axis=1) << n)
        if isinstance(sched, RepeatMajority):
            r = sched.base_rounds
            votes = (rng.random((size, r, m)) < p_m).sum(axis=1)
            total = np.full((size, m), r)
            if sched.adaptive_third:
                tied = 2 * votes == r
                votes = votes + (tied & (rng.random((size, m)) < p_m))
                total = total + tied
            flips = 2 * votes > total
        else:
            flips = rng.random((size, m)) < p_m
        cflip = (flips * bits).sum(axis=1)
        obs = syn_of[key] ^ cflip
        failures += int(np.count_nonzero(table[obs] != cid_of[key]))
        done += size
    return failures


def monte_carlo(protocol: Protocol, p_q: float, p_m: float, trials: int, seed: int,
                policy: DecodePolicy = DecodePolicy(), workers: int = 1) -> MonteCarloResult:
    """Sampled failure frequency with its binomial standard error.

    The trials are split into ``workers`` chunks (the first ``trials % workers``
    chunks get one extra); chunk ``i`` draws from child ``i`` of
    ``SeedSequence(seed)``. Results depend only on (seed, trials, workers).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    for p in (p_q, p_m):
        if not 0 <= p <= 1:
            raise ValueError(f"probability {p} outside [0, 1]")
    workers = max(1, workers)
    sizes = [trials // workers + (1 if i < trials % workers else 0) for i in range(workers)]
    seeds = np.random.SeedSequence(seed).spawn(workers)
    args = [(protocol, policy, p_q, p_m, t, s) for t, s in zip(sizes, seeds) if t]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fails = sum(pool.map(_mc_chunk, *zip(*args)))
    else:
        fails = sum(_mc_chunk(*a) for a in args)
    est = fails / trials
    return MonteCarloResult(est, math.sqrt(est * (1 - est) / trials), fails, trials)


# -- comparison -----------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    pq: tuple[float, float, int]
    pm: tuple[float, float, int]

    @classmethod
    def parse(cls, text: str) -> GridSpec:
        """``pq0:pq1:steps,pm0:pm1:steps``."""
        try:
            parts = [p.split(":") for p in text.split(",")]
            (a0, a1, an), (b0, b1, bn) = parts
            spec = cls((float(a0), float(a1), int(an)), (float(b0), float(b1), int(bn)))
        except ValueError:
            raise ValueError(f"grid must look like pq0:pq1:steps,pm0:pm1:steps, got {text!r}") from None
        spec.validate()
        return spec

    def validate(self) -> None:
        for lo, hi, steps in (self.pq, self.pm):
            if not (0 <= lo <= hi <= 1):
                raise ValueError("grid bounds must satisfy 0 <= lo <= hi <= 1")
            if steps < 1:
                raise ValueError("grid needs at least one step per axis")

    @staticmethod
    def _axis(lo, hi, steps):
        if steps == 1:
            return [Fraction(str(lo))]
        lo, hi = Fraction(str(lo)), Fraction(str(hi))
        return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]

    def points(self):
        return [(q, m) for q in self._axis(*self.pq) for m in self._axis(*self.pm)]


@dataclass
class ComparisonReport:
    protocols: list[Protocol]
    failures: dict[str, BivariatePolynomial]
    costs: dict[str, BivariatePolynomial]
    tags: dict[str, str]
    differences: dict[str, BivariatePolynomial]
    crossovers: dict[str, Crossover]
    rows: list[list] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = [p.name for p in self.protocols]
        w.writerow(["pq", "pm"] + names + [f"diff_{d}" for d in self.differences])
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        for key, cx in self.crossovers.items():
            buf.write(f"# crossover {key}: {cx.describe()}\n")
        for note in self.notes:
            buf.write(f"# {note}\n")
        return buf.getvalue()


def _fmt(v) -> str:
    return format(float(v), ".12g")


COST_NOTE = (
    "repeated-schedule cost is 2m + 2m*pm*(1-pm) (two rounds plus a tie-break measurement "
    "per disagreeing stabilizer); this differs from a linear m*pm term"
)


def compare(code_names: Sequence[str], grid: GridSpec | None = None, degree: int | None = None,
            policy: DecodePolicy = DecodePolicy(), workers: int = 1,
            sectors: str = "one") -> ComparisonReport:
    """Exact polynomials for every protocol of the given codes, their
    differences against the repeated-measurement baseline, and a grid."""
    if not code_names:
        raise ValueError("empty code selection")
    protocols: list[Protocol] = []
    for name in code_names:
        protocols.extend(all_protocols(builtin_code(name)))
    fails, costs, tags = {}, {}, {}
    for p in protocols:
        if degree is None:
            f = exact_failure(p, policy=policy, workers=workers)
        else:
            f = truncated_failure(p, degree, policy=policy, workers=workers)
        c = expected_cost(p)
        if sectors == "both" and p.code.sector.value == "css-sector":
            f, c = both_sectors(f, c)
        fails[p.name], costs[p.name] = f, c
        tags[p.name] = str(classify(p, policy))
    diffs, cross = {}, {}
    for name in code_names:
        base = f"{name}_{Kind.FT.value}"
        for other in (Kind.MR, Kind.DBR):
            key = f"{name}_{other.value}"
            if key not in fails:
                continue
            label = f"{name}_ft-{other.value}"
            diffs[label] = fails[base] - fails[key]
            cross[label] = crossover(fails[base], fails[key])
    report = ComparisonReport(protocols, fails, costs, tags, diffs, cross, notes=[COST_NOTE])
    if grid is not None:
        grid.validate()
        for pq, pm in grid.points():
            vals = [fails[p.name].evaluate(pq, pm) for p in protocols]
            dvals = [d.evaluate(pq, pm) for d in diffs.values()]
            report.rows.append([pq, pm] + vals + dvals)
    return report
