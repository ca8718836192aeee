"""Brute-force reference computations, independent of the grouped numpy engine.

Everything here walks raw events one at a time: every error pattern and
every full flip record, decoded with the direct explanation scan and judged
by explicit stabilizer membership of the residual.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

from redundex.decode import AMBIGUOUS, DecodePolicy, get_decoder
from redundex.events import consensus, iter_error_patterns, iter_flip_records, observed_record
from redundex.pauli import PauliOperator, is_trivial_residual, multiply
from redundex.polynomial import ONE, PM, PQ, BivariatePolynomial


def event_success(protocol, error, flips, policy=DecodePolicy(), memo=None):
    obs = observed_record(protocol, error, flips)
    syn = consensus(protocol, obs)
    if memo is not None and syn in memo:
        corr = memo[syn]
    else:
        corr = get_decoder(protocol, policy).decode_syndrome(syn)
        if memo is not None:
            memo[syn] = corr
    if corr is AMBIGUOUS:
        return 0
    return int(is_trivial_residual(multiply(corr, error), protocol.code.group))


def _event_probability(n, share, a, k, length):
    return (PQ * share) ** a * (ONE - PQ) ** (n - a) * PM**k * (ONE - PM) ** (length - k)


def brute_force_failure(protocol, policy=DecodePolicy(), max_event_degree=None):
    """Sum P(e) over failing events, one event at a time.

    With ``max_event_degree`` only events with (qubit errors + flips) at most
    that are visited; the result is then exact up to that total degree.
    """
    n = protocol.n_qubits
    share = Fraction(1) if protocol.alphabet == "x" else Fraction(1, 3)
    memo = {}
    tally = Counter()
    records = list(iter_flip_records(protocol))
    for e in iter_error_patterns(n, protocol.alphabet):
        a = e.weight
        if max_event_degree is not None and a > max_event_degree:
            continue
        for rec in records:
            k = sum(rec)
            if max_event_degree is not None and a + k > max_event_degree:
                continue
            if not event_success(protocol, e, rec, policy, memo):
                tally[(a, k, len(rec))] += 1
    total = BivariatePolynomial()
    for (a, k, length), cnt in tally.items():
        total = total + _event_probability(n, share, a, k, length) * cnt
    if max_event_degree is not None:
        total = total.truncate(max_event_degree)
    return total


def low_weight_flip_records(m, max_weight):
    for b in range(max_weight + 1):
        for idx in itertools.combinations(range(m), b):
            yield tuple(1 if i in idx else 0 for i in range(m))


def brute_force_failure_single_round(protocol, max_event_degree, policy=DecodePolicy()):
    """Degree-limited brute force that never materialises high-weight records."""
    n, m = protocol.n_qubits, protocol.m
    share = Fraction(1) if protocol.alphabet == "x" else Fraction(1, 3)
    memo = {}
    tally = Counter()
    for e in iter_error_patterns(n, protocol.alphabet):
        a = e.weight
        if a > max_event_degree:
            continue
        for rec in low_weight_flip_records(m, max_event_degree - a):
            if not event_success(protocol, e, rec, policy, memo):
                tally[(a, sum(rec))] += 1
    total = BivariatePolynomial()
    for (a, k), cnt in tally.items():
        total = total + _event_probability(n, share, a, k, m) * cnt
    return total.truncate(max_event_degree)


def brute_force_group(generators):
    """All subset products, deduplicated, via explicit Pauli strings."""
    n = generators[0].n_qubits
    seen = {}
    for r in range(len(generators) + 1):
        for subset in itertools.combinations(generators, r):
            op = PauliOperator.identity(n)
            for g in subset:
                op = multiply(op, g)
            seen[str(op)] = op
    return seen


def pauli_string_commute(a: str, b: str) -> bool:
    """Character-level commutation: count positions with distinct non-identity factors."""
    clashes = sum(1 for p, q in zip(a, b) if p != "I" and q != "I" and p != q)
    return clashes % 2 == 0
