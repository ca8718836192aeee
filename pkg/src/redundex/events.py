"""Event space: physical error patterns and measurement-flip records.

A flip record lists one bit per measurement actually performed. For a
single round that is one bit per measured stabilizer. For a repeated
schedule it is ``base_rounds`` blocks of ``m`` bits (round-major), followed
by one bit for each stabilizer whose base-round results were tied, in
stabilizer order. The same layout is used for observed outcome records.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

from .codes import Protocol, RepeatMajority
from .pauli import PauliOperator, syndrome_int


def iter_error_patterns(n: int, alphabet: str) -> Iterator[PauliOperator]:
    """Every error pattern over the alphabet, in increasing key order."""
    if alphabet == "x":
        for x in range(1 << n):
            yield PauliOperator(n, x, 0)
    elif alphabet == "depolarizing":
        for key in range(1 << (2 * n)):
            yield PauliOperator.from_key(n, key)
    else:
        raise ValueError(f"unknown alphabet {alphabet!r}")


def iter_low_weight_errors(n: int, alphabet: str, max_weight: int) -> Iterator[PauliOperator]:
    kinds = ("X",) if alphabet == "x" else ("X", "Y", "Z")
    for a in range(min(max_weight, n) + 1):
        for qubits in itertools.combinations(range(n), a):
            for paulis in itertools.product(kinds, repeat=a):
                op = PauliOperator.identity(n)
                for q, k in zip(qubits, paulis):
                    op = op * PauliOperator.single(n, q, k)
                yield op


def _tied(values: Sequence[int]) -> bool:
    return 2 * sum(values) == len(values)


def tied_stabilizers(schedule: RepeatMajority, m: int, base: Sequence[int]) -> list[int]:
    """Indices whose base-round bits split evenly (these get one more measurement)."""
    if not schedule.adaptive_third:
        return []
    r = schedule.base_rounds
    return [i for i in range(m) if _tied([base[k * m + i] for k in range(r)])]


def record_length(protocol: Protocol, base: Sequence[int]) -> int:
    sched = protocol.schedule
    if not isinstance(sched, RepeatMajority):
        return protocol.m
    return sched.base_rounds * protocol.m + len(tied_stabilizers(sched, protocol.m, base))


def iter_flip_records(protocol: Protocol) -> Iterator[tuple[int, ...]]:
    m = protocol.m
    sched = protocol.schedule
    if not isinstance(sched, RepeatMajority):
        yield from itertools.product((0, 1), repeat=m)
        return
    for base in itertools.product((0, 1), repeat=sched.base_rounds * m):
        extra = len(tied_stabilizers(sched, m, base))
        for tail in itertools.product((0, 1), repeat=extra):
            yield base + tail


def consensus(protocol: Protocol, record: Sequence[int]) -> int:
    """Per-stabilizer majority of a record, packed with stabilizer ``i`` at bit ``i``.

    Works on flip records and on observed outcome records alike, since the
    majority of ``s ^ f_k`` is ``s ^ majority(f_k)``.
    """
    m = protocol.m
    sched = protocol.schedule
    if not isinstance(sched, RepeatMajority):
        if len(record) != m:
            raise ValueError(f"record has {len(record)} bits, expected {m}")
        return sum(bit << i for i, bit in enumerate(record))
    r = sched.base_rounds
    base = record[: r * m]
    if len(base) < r * m:
        raise ValueError(f"record has {len(record)} bits, expected at least {r * m}")
    ties = tied_stabilizers(sched, m, base)
    if len(record) != r * m + len(ties):
        raise ValueError(f"record has {len(record)} bits, expected {r * m + len(ties)}")
    extra = dict(zip(ties, record[r * m:]))
    out = 0
    for i in range(m):
        votes = [base[k * m + i] for k in range(r)]
        if i in extra:
            votes.append(extra[i])
        if 2 * sum(votes) > len(votes):
            out |= 1 << i
    return out


def ideal_record(protocol: Protocol, error: PauliOperator, base_flips: Sequence[int] | None = None) -> tuple[int, ...]:
    """Noise-free outcomes for ``error``.

    For a repeated schedule the set of extra measurements depends on the base
    flips, so those must be supplied.
    """
    m = protocol.m
    syn = syndrome_int(error, protocol.measured)
    bits = tuple(syn >> i & 1 for i in range(m))
    sched = protocol.schedule
    if not isinstance(sched, RepeatMajority):
        return bits
    if base_flips is None:
        raise ValueError("repeated schedules need the base-round flips")
    ties = tied_stabilizers(sched, m, base_flips)
    return bits * sched.base_rounds + tuple(bits[i] for i in ties)


def observed_record(protocol: Protocol, error: PauliOperator, flips: Sequence[int]) -> tuple[int, ...]:
    base = flips[: protocol.m * getattr(protocol.schedule, "base_rounds", 1)]
    ideal = ideal_record(protocol, error, base)
    if len(ideal) != len(flips):
        raise ValueError(f"flip record has {len(flips)} bits, schedule performs {len(ideal)}")
    return tuple(i ^ f for i, f in zip(ideal, flips))
