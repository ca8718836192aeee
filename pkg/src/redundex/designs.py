"""Block designs (BIBDs): parameters, QEC admissibility, and small searches.

Blocks are bitmasks over the point set, point ``j`` at bit ``j`` (0-based).
Text files use 1-based points.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .pauli import PauliOperator


@dataclass(frozen=True)
class BlockDesign:
    n_points: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be positive")
        full = (1 << self.n_points) - 1
        for i, b in enumerate(self.blocks):
            if b == 0:
                raise ValueError(f"block {i} is empty")
            if b & ~full:
                raise ValueError(f"block {i} uses points outside 1..{self.n_points}")

    @classmethod
    def from_sets(cls, n_points: int, blocks: Iterable[Iterable[int]], one_based: bool = True) -> BlockDesign:
        off = 1 if one_based else 0
        masks = []
        for blk in blocks:
            mask = 0
            for p in blk:
                q = p - off
                if not 0 <= q < n_points:
                    raise ValueError(f"point {p} out of range for n={n_points}")
                mask |= 1 << q
            masks.append(mask)
        return cls(n_points, tuple(masks))

    @property
    def m(self) -> int:
        return len(self.blocks)

    def block_sets(self, one_based: bool = True) -> list[tuple[int, ...]]:
        off = 1 if one_based else 0
        return [tuple(j + off for j in range(self.n_points) if b >> j & 1) for b in self.blocks]

    def multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.blocks))

    def incidence(self, point: int) -> int:
        """Incidence column of ``point`` as a bitmask over block indices."""
        col = 0
        for i, b in enumerate(self.blocks):
            if b >> point & 1:
                col |= 1 << i
        return col


@dataclass(frozen=True)
class DesignParameters:
    n: int
    m: int
    w: int | None
    rho: int | None
    lam: int | None
    is_2design: bool
    is_symmetric: bool
    violation: str | None = None

    def relations_hold(self) -> bool:
        if None in (self.w, self.rho, self.lam):
            return False
        return self.m * self.w == self.n * self.rho and self.lam * (self.n - 1) == self.rho * (self.w - 1)

    def as_tuple(self) -> tuple:
        return (self.n, self.m, self.w, self.rho, self.lam)


def derive_parameters(d: BlockDesign) -> DesignParameters:
    n, m = d.n_points, d.m
    sizes = {b.bit_count() for b in d.blocks}
    w = sizes.pop() if len(sizes) == 1 else None
    reps = {d.incidence(j).bit_count() for j in range(n)}
    rho = reps.pop() if len(reps) == 1 else None
    pair_counts = set()
    for j, k in itertools.combinations(range(n), 2):
        pair = (1 << j) | (1 << k)
        pair_counts.add(sum(1 for b in d.blocks if b & pair == pair))
    lam = pair_counts.pop() if len(pair_counts) == 1 else None

    violation = None
    if w is None:
        violation = "condition 1: blocks have different sizes"
    elif rho is None:
        violation = "condition 2: points lie in different numbers of blocks"
    elif n < 2 or lam is None:
        violation = "condition 3: point pairs lie in different numbers of blocks"
    elif lam == 0:
        violation = "condition 3: no pair of points shares a block (lambda = 0)"
    elif w >= n:
        violation = "blocks contain every point (design is not incomplete)"
    return DesignParameters(n, m, w, rho, lam, violation is None, m == n, violation)


@dataclass(frozen=True)
class ConstraintVerdict:
    constraint1_ok: bool
    constraint2_ok: bool | None  # None when not evaluated (non-CSS use)

    @property
    def ok(self) -> bool:
        return self.constraint1_ok and self.constraint2_ok is not False


def check_qec_constraints(d: BlockDesign, css: bool) -> ConstraintVerdict:
    """Stabilizer admissibility of a design used as measurement supports.

    Constraint 1: every block has even size, so each measured operator
    commutes with the all-X and all-Z logicals.
    Constraint 2 (CSS use only): every pair of blocks, a block with itself
    included, meets in an even number of points, so the X-type and Z-type
    copies commute. Checked directly rather than through the parity of
    lambda, which only decides it for symmetric designs.
    """
    params = derive_parameters(d)
    if not params.is_2design:
        raise ValueError(f"not a 2-design: {params.violation}")
    c1 = params.w % 2 == 0
    c2 = None
    if css:
        c2 = all((a & b).bit_count() % 2 == 0 for a in d.blocks for b in d.blocks)
    return ConstraintVerdict(c1, c2)


def signature_distance(d: BlockDesign, j: int, k: int) -> int:
    """Number of blocks containing exactly one of points ``j`` and ``k``.

    These are the syndrome bits that tell a flip on qubit ``j`` apart from a
    flip on qubit ``k``; for a 2-design it is 2(rho - lambda) for every pair.
    """
    if j == k:
        raise ValueError("signature distance needs two distinct points")
    for p in (j, k):
        if not 0 <= p < d.n_points:
            raise ValueError(f"point {p} out of range")
    return (d.incidence(j) ^ d.incidence(k)).bit_count()


def block_distance(d: BlockDesign, i: int, k: int) -> int:
    """Hamming distance between two blocks (rows of the syndrome matrix).

    Equals 2(w - lambda) for symmetric designs.
    """
    return (d.blocks[i] ^ d.blocks[k]).bit_count()


def complement(d: BlockDesign) -> BlockDesign:
    full = (1 << d.n_points) - 1
    for i, b in enumerate(d.blocks):
        if b == full:
            raise ValueError(f"block {i} contains every point; its complement is empty")
    return BlockDesign(d.n_points, tuple(full ^ b for b in d.blocks))


def supports_to_design(stabilizers: Sequence[PauliOperator]) -> BlockDesign:
    if not stabilizers:
        raise ValueError("no stabilizers given")
    n = stabilizers[0].n_qubits
    blocks = []
    for i, s in enumerate(stabilizers):
        if s.n_qubits != n:
            raise ValueError("stabilizers act on different numbers of qubits")
        if s.is_identity:
            raise ValueError(f"stabilizer {i} is the identity (empty support)")
        blocks.append(s.x | s.z)
    return BlockDesign(n, tuple(blocks))


# -- text format -------------------------------------------------------------


class DesignParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_design(text: str) -> BlockDesign:
    n = None
    blocks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            if not line.startswith("n="):
                raise DesignParseError(lineno, "expected 'n=<points>' header")
            try:
                n = int(line[2:])
            except ValueError:
                raise DesignParseError(lineno, f"bad point count {line[2:]!r}") from None
            if n < 1:
                raise DesignParseError(lineno, "point count must be positive")
            continue
        try:
            points = [int(tok) for tok in line.split()]
        except ValueError:
            raise DesignParseError(lineno, f"non-integer point in {line!r}") from None
        mask = 0
        for p in points:
            if not 1 <= p <= n:
                raise DesignParseError(lineno, f"point {p} outside 1..{n}")
            if mask >> (p - 1) & 1:
                raise DesignParseError(lineno, f"point {p} repeated in block")
            mask |= 1 << (p - 1)
        blocks.append(mask)
    if n is None:
        raise DesignParseError(1, "missing 'n=<points>' header")
    if not blocks:
        raise DesignParseError(1, "design has no blocks")
    return BlockDesign(n, tuple(blocks))


def format_design(d: BlockDesign) -> str:
    lines = [f"n={d.n_points}"]
    lines += [" ".join(map(str, blk)) for blk in d.block_sets()]
    return "\n".join(lines) + "\n"


def load_design(path: str | Path) -> BlockDesign:
    return parse_design(Path(path).read_text())


# -- built-ins ----------------------------------------------------------------

BIPLANE_ORDER2 = BlockDesign.from_sets(
    7, [(1, 5, 6, 7), (2, 4, 6, 7), (3, 4, 5, 7), (1, 2, 4, 5), (1, 3, 4, 6), (2, 3, 5, 6), (1, 2, 3, 7)]
)
FANO_PLANE = BlockDesign.from_sets(
    7, [(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)]
)
# translates of the quadratic residues {1, 3, 4, 5, 9} mod 11
BIPLANE_ORDER3 = BlockDesign.from_sets(
    11, [[(r + t) % 11 for r in (1, 3, 4, 5, 9)] for t in range(11)], one_based=False
)
BITFLIP_TRIANGLE = BlockDesign.from_sets(3, [(1, 2), (2, 3), (1, 3)])

BUILTIN_DESIGNS = {
    "biplane2": BIPLANE_ORDER2,
    "fano": FANO_PLANE,
    "biplane3": BIPLANE_ORDER3,
    "bitflip": BITFLIP_TRIANGLE,
}


# -- exhaustive search --------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    designs: tuple[BlockDesign, ...]
    truncated: bool
    nodes: int


def _search_branch(n, w, m, rho, lam, candidates, first, budget):
    """Backtrack over non-decreasing block index sequences starting at ``first``."""
    point_count = [0] * n
    pair_count = {}
    chosen: list[int] = []
    found = []
    nodes = 0
    truncated = False

    def pairs_of(mask):
        pts = [j for j in range(n) if mask >> j & 1]
        return list(itertools.combinations(pts, 2))

    cand_pairs = [pairs_of(c) for c in candidates]
    cand_points = [[j for j in range(n) if c >> j & 1] for c in candidates]

    def fits(idx):
        return all(point_count[j] < rho for j in cand_points[idx]) and all(
            pair_count.get(p, 0) < lam for p in cand_pairs[idx]
        )

    def place(idx, sign):
        for j in cand_points[idx]:
            point_count[j] += sign
        for p in cand_pairs[idx]:
            pair_count[p] = pair_count.get(p, 0) + sign

    def rec(start):
        nonlocal nodes, truncated
        if truncated:
            return
        if len(chosen) == m:
            found.append(tuple(candidates[i] for i in chosen))
            return
        for idx in range(start, len(candidates)):
            nodes += 1
            if nodes > budget:
                truncated = True
                return
            if not fits(idx):
                continue
            chosen.append(idx)
            place(idx, 1)
            rec(idx)
            place(idx, -1)
            chosen.pop()
            if truncated:
                return

    if fits(first):
        chosen.append(first)
        place(first, 1)
        rec(first)
    return found, truncated, nodes


def search_2designs(
    n: int,
    w: int,
    m: int,
    constraint1: bool = False,
    constraint2: bool = False,
    limit: int | None = None,
    budget: int = 200_000,
    workers: int = 1,
) -> SearchResult:
    """All labeled 2-designs with ``m`` blocks of size ``w`` on ``n`` points.

    Blocks are chosen as multisets of ``w``-subsets in lexicographic index
    order. The node budget applies to each first-block branch separately so
    the result does not depend on ``workers``.
    """
    if n > 12:
        raise ValueError("search is limited to n <= 12")
    if not (1 <= w <= n and m >= 1):
        raise ValueError("need 1 <= w <= n and m >= 1")
    empty = SearchResult((), False, 0)
    if (m * w) % n or n < 2:
        return empty
    rho = m * w // n
    if (rho * (w - 1)) % (n - 1):
        return empty
    lam = rho * (w - 1) // (n - 1)
    if lam == 0:
        return empty

    candidates = [sum(1 << j for j in c) for c in itertools.combinations(range(n), w)]
    args = [(n, w, m, rho, lam, candidates, first, budget) for first in range(len(candidates))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            branches = list(pool.map(_search_branch, *zip(*args)))
    else:
        branches = [_search_branch(*a) for a in args]

    designs = []
    seen = set()
    truncated = False
    nodes = 0
    for found, trunc, cnt in branches:
        truncated |= trunc
        nodes += cnt
        for blocks in found:
            d = BlockDesign(n, blocks)
            if d.multiset() in seen:
                continue
            if not derive_parameters(d).is_2design:
                continue
            if constraint1 or constraint2:
                verdict = check_qec_constraints(d, css=constraint2)
                if constraint1 and not verdict.constraint1_ok:
                    continue
                if constraint2 and not verdict.constraint2_ok:
                    continue
            seen.add(d.multiset())
            designs.append(d)
            if limit is not None and len(designs) >= limit:
                return SearchResult(tuple(designs), truncated, nodes)
    return SearchResult(tuple(designs), truncated, nodes)


def relabel(d: BlockDesign, perm: Sequence[int]) -> BlockDesign:
    """Apply the point permutation ``j -> perm[j]``."""
    out = []
    for b in d.blocks:
        mask = 0
        for j in range(d.n_points):
            if b >> j & 1:
                mask |= 1 << perm[j]
        out.append(mask)
    return BlockDesign(d.n_points, tuple(out))


def canonical_form(d: BlockDesign) -> tuple[int, ...]:
    """Lexicographically least sorted block multiset over all relabelings.

    Brute force over n! permutations; fine for n <= 8.
    """
    if d.n_points > 8:
        raise ValueError("canonical_form is brute force; n <= 8 only")
    best = None
    for perm in itertools.permutations(range(d.n_points)):
        form = relabel(d, perm).multiset()
        if best is None or form < best:
            best = form
    return best

