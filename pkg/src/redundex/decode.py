"""Maximum-likelihood decoding of (possibly corrupted) syndrome records.

An explanation of an observed syndrome is a candidate physical error together
with the measurement flips it implies. Explanations are ranked by their
qubit-error weight ``a`` and flip count ``b``; the best-ranked ones decide the
correction, and a tie between corrections that differ by more than a
stabilizer is ambiguous.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .codes import Protocol
from .events import consensus, iter_error_patterns, observed_record
from .pauli import PauliOperator, coset_representative, is_trivial_residual, multiply, syndrome_int


class _Ambiguous:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AMBIGUOUS"

    def __bool__(self):
        return False


AMBIGUOUS = _Ambiguous()

MAX_TABLE_BITS = 24


@dataclass(frozen=True)
class DecodePolicy:
    """How explanations are ordered and what a residual tie means.

    ``ranking="balanced"`` orders by ``a + b`` and then by fewer flips.
    ``ranking="likelihood"`` orders by ``a*ln(pq') + b*ln(pm')`` (higher is
    better) with ``p' = p / (1 - p)`` at the given probabilities.
    ``tie_outcome="ambiguous"`` makes unresolved ties decoding failures;
    ``"first"`` takes the first tied candidate in key order.
    """

    ranking: str = "balanced"
    p_q: float | None = None
    p_m: float | None = None
    tie_outcome: str = "ambiguous"

    def __post_init__(self):
        if self.ranking not in ("balanced", "likelihood"):
            raise ValueError(f"unknown ranking {self.ranking!r}")
        if self.tie_outcome not in ("ambiguous", "first"):
            raise ValueError(f"unknown tie outcome {self.tie_outcome!r}")
        if self.ranking == "likelihood":
            if self.p_q is None or self.p_m is None:
                raise ValueError("likelihood ranking needs p_q and p_m")
            for p in (self.p_q, self.p_m):
                if not 0 <= p < 1:
                    raise ValueError("likelihood ranking needs probabilities in [0, 1)")

    @classmethod
    def likelihood_at(cls, p_q: float, p_m: float, tie_outcome: str = "ambiguous") -> DecodePolicy:
        return cls("likelihood", p_q, p_m, tie_outcome)

    @property
    def is_balanced(self) -> bool:
        return self.ranking == "balanced"

    def _costs(self) -> tuple[float, float]:
        def cost(p):
            return math.inf if p == 0 else -math.log(p / (1 - p))

        return cost(self.p_q), cost(self.p_m)

    def rank(self, a: int, b: int):
        """Sort key; smaller is a better explanation."""
        if self.is_balanced:
            return (a + b, b)
        cq, cm = self._costs()
        total = (a * cq if a else 0.0) + (b * cm if b else 0.0)
        return round(total, 9)


@dataclass(frozen=True)
class Explanation:
    error: PauliOperator
    flips: int  # bitmask over consensus positions
    a: int
    b: int


class Decoder:
    """Per-protocol decoding data: every candidate error with its syndrome."""

    def __init__(self, protocol: Protocol, policy: DecodePolicy):
        self.protocol = protocol
        self.policy = policy
        self.group = protocol.code.group
        n = protocol.n_qubits
        self.candidates = list(iter_error_patterns(n, protocol.alphabet))
        self.weights = [e.weight for e in self.candidates]
        self.syndromes = [syndrome_int(e, protocol.measured) for e in self.candidates]
        self.cosets = [coset_representative(e, self.group) for e in self.candidates]
        self._table: LookupTable | None = None
        # candidates sharing (weight, syndrome) rank identically
        groups: dict[tuple[int, int], list] = {}
        for i, (a, syn, cid) in enumerate(zip(self.weights, self.syndromes, self.cosets)):
            g = groups.setdefault((a, syn), [i, set()])
            g[1].add(cid)
        self._groups = [(a, syn, first, cosets) for (a, syn), (first, cosets) in groups.items()]

    # direct route

    def explanations(self, syn: int) -> list[Explanation]:
        out = [
            Explanation(e, s ^ syn, a, (s ^ syn).bit_count())
            for e, a, s in zip(self.candidates, self.weights, self.syndromes)
        ]
        out.sort(key=lambda ex: self.policy.rank(ex.a, ex.b))
        return out

    def decode_syndrome(self, syn: int):
        """Best correction for a consensus syndrome, by direct scan of explanations."""
        best = None
        tied: list[tuple[int, set[int]]] = []
        rank = self.policy.rank
        for a, s, first, cosets in self._groups:
            key = rank(a, (s ^ syn).bit_count())
            if best is None or key < best:
                best, tied = key, [(first, cosets)]
            elif key == best:
                tied.append((first, cosets))
        first = min(i for i, _ in tied)
        if self.policy.tie_outcome == "ambiguous":
            if len(set().union(*(c for _, c in tied))) > 1:
                return AMBIGUOUS
        return self.candidates[first]

    # table route

    @property
    def table(self) -> LookupTable:
        if self._table is None:
            self._table = _build_table(self)
        return self._table

    def success(self, error: PauliOperator, flips: Sequence[int]) -> int:
        """s(e) for the event (``error``, ``flips``); decodes via the lookup table."""
        obs = observed_record(self.protocol, error, flips)
        syn = consensus(self.protocol, obs)
        if self.protocol.m <= MAX_TABLE_BITS:
            cid = self.table.coset_ids[syn]
            if cid < 0:
                return 0
            return int(cid == coset_representative(error, self.group))
        correction = self.decode_syndrome(syn)
        if correction is AMBIGUOUS:
            return 0
        return int(is_trivial_residual(multiply(correction, error), self.group))


@lru_cache(maxsize=64)
def get_decoder(protocol: Protocol, policy: DecodePolicy = DecodePolicy()) -> Decoder:
    return Decoder(protocol, policy)


def decode(observed: Sequence[int], protocol: Protocol, policy: DecodePolicy = DecodePolicy()):
    """Correction for an observed outcome record, or :data:`AMBIGUOUS`.

    For repeated schedules each stabilizer is first majority-voted and the
    explanations are ranked against the consensus syndrome.
    """
    syn = consensus(protocol, observed)
    return get_decoder(protocol, policy).decode_syndrome(syn)


def success(error: PauliOperator, flips: Sequence[int], protocol: Protocol,
            policy: DecodePolicy = DecodePolicy()) -> int:
    return get_decoder(protocol, policy).success(error, flips)


# -- lookup tables --------------------------------------------------------------


@dataclass(frozen=True)
class LookupTable:
    """Decoder output for every consensus syndrome.

    ``corrections[s]`` is the candidate index chosen for syndrome ``s`` (−1 for
    ambiguous); ``coset_ids[s]`` is its coset representative key (−1 likewise).
    """

    protocol: Protocol
    candidates: tuple[PauliOperator, ...]
    corrections: np.ndarray
    coset_ids: np.ndarray

    def __len__(self) -> int:
        return len(self.corrections)

    def lookup(self, syn: int):
        idx = int(self.corrections[syn])
        return AMBIGUOUS if idx < 0 else self.candidates[idx]

    def as_dict(self) -> dict[int, object]:
        return {s: self.lookup(s) for s in range(len(self))}

    def to_csv(self, path: str | Path) -> None:
        m = self.protocol.m
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["syndrome", "correction"])
            for s in range(len(self)):
                bits = "".join(str(s >> i & 1) for i in range(m))
                corr = self.lookup(s)
                w.writerow([bits, "AMBIG" if corr is AMBIGUOUS else str(corr)])


def _build_table(dec: Decoder) -> LookupTable:
    m = dec.protocol.m
    if m > MAX_TABLE_BITS:
        raise ValueError(f"lookup table over {m} measurements exceeds the 2^{MAX_TABLE_BITS} budget")
    size = 1 << m
    obs = np.arange(size, dtype=np.int64)
    policy = dec.policy
    if policy.is_balanced:
        best = np.full(size, np.iinfo(np.int64).max, dtype=np.int64)
    else:
        best = np.full(size, np.inf)
        cq, cm = policy._costs()
    best_idx = np.full(size, -1, dtype=np.int64)
    best_cid = np.full(size, -1, dtype=np.int64)
    ambiguous = np.zeros(size, dtype=bool)
    for i, (a, s, cid) in enumerate(zip(dec.weights, dec.syndromes, dec.cosets)):
        b = np.bitwise_count(obs ^ s).astype(np.int64)
        if policy.is_balanced:
            key = (a + b) * (m + 1) + b
        else:
            key = (a * cq if a else 0.0) + np.where(b > 0, b * cm, 0.0)
            key = np.round(key, 9)
        better = key < best
        equal = key == best
        ambiguous &= ~better
        ambiguous |= equal & (best_cid != cid)
        best = np.where(better, key, best)
        best_idx = np.where(better, i, best_idx)
        best_cid = np.where(better, cid, best_cid)
    if policy.tie_outcome == "ambiguous":
        best_idx = np.where(ambiguous, -1, best_idx)
        best_cid = np.where(ambiguous, -1, best_cid)
    return LookupTable(dec.protocol, tuple(dec.candidates), best_idx, best_cid)


def build_lookup_table(protocol: Protocol, policy: DecodePolicy = DecodePolicy()) -> LookupTable:
    return get_decoder(protocol, policy).table
