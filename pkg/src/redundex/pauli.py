"""Phase-free Pauli operators in binary symplectic form.

An operator on ``n`` qubits is stored as two ``n``-bit integers: bit ``j`` of
``x`` is set when the factor on qubit ``j`` contains X, bit ``j`` of ``z`` when
it contains Z (so Y sets both). Qubit ``j`` is character ``j`` of the text form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_CHAR = {bits: ch for ch, bits in _CHAR_TO_BITS.items()}


@dataclass(frozen=True, order=True)
class PauliOperator:
    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"bit vectors do not fit in {self.n_qubits} qubits")

    @classmethod
    def from_str(cls, text: str) -> PauliOperator:
        text = text.strip().upper()
        if not text:
            raise ValueError("empty Pauli string")
        x = z = 0
        for j, ch in enumerate(text):
            try:
                xb, zb = _CHAR_TO_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r} in {text!r}") from None
            x |= xb << j
            z |= zb << j
        return cls(len(text), x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliOperator:
        return cls(n_qubits)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> PauliOperator:
        """The operator acting as ``kind`` (one of X, Y, Z) on ``qubit`` only."""
        xb, zb = _CHAR_TO_BITS[kind.upper()]
        return cls(n_qubits, xb << qubit, zb << qubit)

    @classmethod
    def from_support(cls, n_qubits: int, support: Iterable[int], kind: str) -> PauliOperator:
        """All-``kind`` operator (e.g. Z_{i1} ... Z_{iw}) on the given 0-based qubits."""
        mask = 0
        for q in support:
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for n={n_qubits}")
            mask |= 1 << q
        xb, zb = _CHAR_TO_BITS[kind.upper()]
        return cls(n_qubits, mask if xb else 0, mask if zb else 0)

    @classmethod
    def from_key(cls, n_qubits: int, key: int) -> PauliOperator:
        mask = (1 << n_qubits) - 1
        return cls(n_qubits, key & mask, key >> n_qubits)

    @property
    def key(self) -> int:
        """Single-integer encoding ``x | z << n``; used as an array index."""
        return self.x | (self.z << self.n_qubits)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> frozenset[int]:
        mask = self.x | self.z
        return frozenset(j for j in range(self.n_qubits) if mask >> j & 1)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        return "".join(
            _BITS_TO_CHAR[(self.x >> j & 1, self.z >> j & 1)] for j in range(self.n_qubits)
        )

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)


def _check_sizes(a: PauliOperator, b: PauliOperator) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"size mismatch: {a.n_qubits} vs {b.n_qubits} qubits")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Phase-free product."""
    _check_sizes(a, b)
    return PauliOperator(a.n_qubits, a.x ^ b.x, a.z ^ b.z)


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    _check_sizes(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0


def syndrome(error: PauliOperator, measured: Sequence[PauliOperator]) -> tuple[int, ...]:
    """Bit ``i`` is 1 when ``measured[i]`` would read -1 on ``error``."""
    return tuple(symplectic_product(error, s) for s in measured)


def syndrome_int(error: PauliOperator, measured: Sequence[PauliOperator]) -> int:
    """Same as :func:`syndrome`, packed with measurement ``i`` at bit ``i``."""
    out = 0
    for i, s in enumerate(measured):
        out |= symplectic_product(error, s) << i
    return out


def gf2_rank(ops: Sequence[PauliOperator]) -> int:
    """Rank of the symplectic vectors (x|z) over GF(2)."""
    basis: list[int] = []
    for op in ops:
        v = op.key
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


class NonCommutingError(ValueError):
    def __init__(self, i: int, j: int, a: PauliOperator, b: PauliOperator):
        super().__init__(f"generators {i} ({a}) and {j} ({b}) anticommute")
        self.pair = (i, j)


@dataclass(frozen=True)
class StabilizerGroup:
    n_qubits: int
    generators: tuple[PauliOperator, ...]
    elements: tuple[PauliOperator, ...]
    _keys: frozenset[int] = field(default=frozenset(), repr=False, compare=False)

    def __contains__(self, op: PauliOperator) -> bool:
        return op.n_qubits == self.n_qubits and op.key in self._keys

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def nontrivial(self) -> tuple[PauliOperator, ...]:
        return self.elements[1:]

    @property
    def element_keys(self) -> frozenset[int]:
        return self._keys


def enumerate_group(generators: Sequence[PauliOperator]) -> StabilizerGroup:
    """All distinct products of generator subsets, ordered by subset bitmask.

    Dependent generators are tolerated; a product already produced by a
    smaller mask is skipped, so the identity always comes first.
    """
    generators = tuple(generators)
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].n_qubits
    for i, a in enumerate(generators):
        _check_sizes(generators[0], a)
        for j in range(i + 1, len(generators)):
            if not commutes(a, generators[j]):
                raise NonCommutingError(i, j, a, generators[j])

    seen: set[int] = set()
    elements = []
    for mask in range(1 << len(generators)):
        x = z = 0
        for i, g in enumerate(generators):
            if mask >> i & 1:
                x ^= g.x
                z ^= g.z
        op = PauliOperator(n, x, z)
        if op.key not in seen:
            seen.add(op.key)
            elements.append(op)
    return StabilizerGroup(n, generators, tuple(elements), frozenset(seen))


def is_trivial_residual(residual: PauliOperator, group: StabilizerGroup) -> bool:
    """True when ``residual`` acts as identity on the code space."""
    if residual.n_qubits != group.n_qubits:
        raise ValueError(f"size mismatch: {residual.n_qubits} vs {group.n_qubits} qubits")
    return residual in group


def coset_representative(op: PauliOperator, group: StabilizerGroup) -> int:
    """Smallest key in ``op * group``; equal for operators equivalent modulo the group."""
    k = op.key
    return min(k ^ g for g in group.element_keys)


def logical_x(n_qubits: int) -> PauliOperator:
    full = (1 << n_qubits) - 1
    return PauliOperator(n_qubits, full, 0)


def logical_z(n_qubits: int) -> PauliOperator:
    full = (1 << n_qubits) - 1
    return PauliOperator(n_qubits, 0, full)
