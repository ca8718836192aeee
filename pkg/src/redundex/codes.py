"""Built-in codes, extraction protocols and syndrome matrices."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import pauli
from .designs import BlockDesign
from .pauli import PauliOperator, StabilizerGroup, enumerate_group


class Sector(str, enum.Enum):
    BITFLIP = "single-sector-bitflip"
    CSS = "css-sector"
    NON_CSS = "non-css"


class Kind(str, enum.Enum):
    MINIMAL = "minimal"
    FT = "ft"
    MR = "mr"
    DBR = "dbr"
    CUSTOM = "custom"


ALPHABETS = ("x", "depolarizing")


@dataclass(frozen=True)
class Code:
    name: str
    n_qubits: int
    sector: Sector
    generators: tuple[PauliOperator, ...]
    group: StabilizerGroup
    logicals: tuple[PauliOperator, PauliOperator]
    distance: int
    default_alphabet: str
    # generators of the analysed sector (the Z-type half for CSS codes)
    sector_generators: tuple[PauliOperator, ...] = ()

    @property
    def k(self) -> int:
        return 1

    @cached_property
    def sector_group(self) -> StabilizerGroup:
        return enumerate_group(self.sector_generators or self.generators)


def _make_code(name, sector, gens, sector_gens, alphabet):
    gens = tuple(PauliOperator.from_str(g) for g in gens)
    n = gens[0].n_qubits
    sector_gens = tuple(PauliOperator.from_str(g) for g in sector_gens) if sector_gens else gens
    return Code(
        name=name,
        n_qubits=n,
        sector=sector,
        generators=gens,
        group=enumerate_group(gens),
        logicals=(pauli.logical_x(n), pauli.logical_z(n)),
        distance=3,
        default_alphabet=alphabet,
        sector_generators=sector_gens,
    )


# Steane generators: order-2 biplane blocks {1,5,6,7}, {2,4,6,7}, {3,4,5,7};
# their product is the block {1,2,3,7}.
_STEANE_Z = ("ZIIIZZZ", "IZIZIZZ", "IIZZZIZ")
_STEANE_X = tuple(s.replace("Z", "X") for s in _STEANE_Z)

_BUILTINS = {
    "bitflip": lambda: _make_code("bitflip", Sector.BITFLIP, ("ZZI", "IZZ"), None, "x"),
    "perfect5": lambda: _make_code(
        "perfect5", Sector.NON_CSS, ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"), None, "depolarizing"
    ),
    "steane": lambda: _make_code("steane", Sector.CSS, _STEANE_X + _STEANE_Z, _STEANE_Z, "x"),
}

CODE_NAMES = tuple(_BUILTINS)

_code_cache: dict[str, Code] = {}


def builtin_code(name: str) -> Code:
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown code {name!r}; choose from {', '.join(CODE_NAMES)}") from None
    if name not in _code_cache:
        _code_cache[name] = factory()
    return _code_cache[name]


# -- schedules ----------------------------------------------------------------


@dataclass(frozen=True)
class SingleRound:
    def rounds_label(self) -> str:
        return "single"


@dataclass(frozen=True)
class RepeatMajority:
    """Repeat the whole measurement list; majority-vote each stabilizer.

    With ``adaptive_third`` a stabilizer whose base-round results are tied is
    measured once more. Without it, ``base_rounds`` must be odd.
    """

    base_rounds: int = 2
    adaptive_third: bool = True

    def __post_init__(self):
        if self.base_rounds < 1:
            raise ValueError("base_rounds must be positive")
        if not self.adaptive_third and self.base_rounds % 2 == 0:
            raise ValueError("an even number of rounds needs the adaptive tie-break measurement")

    def rounds_label(self) -> str:
        extra = "+adaptive" if self.adaptive_third else ""
        return f"repeat{self.base_rounds}{extra}"


Schedule = SingleRound | RepeatMajority


@dataclass(frozen=True)
class Protocol:
    code: Code
    kind: Kind
    measured: tuple[PauliOperator, ...]
    schedule: Schedule = field(default_factory=SingleRound)
    alphabet: str = "x"

    def __post_init__(self):
        if not self.measured:
            raise ValueError("protocol measures nothing")
        if self.alphabet not in ALPHABETS:
            raise ValueError(f"unknown alphabet {self.alphabet!r}")
        if self.code.sector is not Sector.NON_CSS and self.alphabet != "x":
            raise ValueError(f"{self.code.name} is analysed per sector with X-only errors")
        for s in self.measured:
            if s not in self.code.group:
                raise ValueError(f"{s} is not an element of the {self.code.name} stabilizer group")

    @property
    def m(self) -> int:
        return len(self.measured)

    @property
    def name(self) -> str:
        return f"{self.code.name}_{self.kind.value}"

    @property
    def n_qubits(self) -> int:
        return self.code.n_qubits

    def to_text(self) -> str:
        lines = [f"code={self.code.name}", f"kind={self.kind.value}", f"schedule={self.schedule.rounds_label()}",
                 f"alphabet={self.alphabet}"]
        lines += [str(s) for s in self.measured]
        return "\n".join(lines) + "\n"


def _parse_schedule(label: str) -> Schedule:
    if label == "single":
        return SingleRound()
    if label.startswith("repeat"):
        body = label[len("repeat"):]
        adaptive = body.endswith("+adaptive")
        body = body.removesuffix("+adaptive")
        return RepeatMajority(int(body), adaptive)
    raise ValueError(f"unknown schedule {label!r}")


def parse_protocol(text: str) -> Protocol:
    header: dict[str, str] = {}
    measured = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
        else:
            try:
                measured.append(PauliOperator.from_str(line))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    for key in ("code", "kind"):
        if key not in header:
            raise ValueError(f"protocol text lacks '{key}='")
    code = builtin_code(header["code"])
    return Protocol(
        code=code,
        kind=Kind(header["kind"]),
        measured=tuple(measured),
        schedule=_parse_schedule(header.get("schedule", "single")),
        alphabet=header.get("alphabet", code.default_alphabet),
    )


def _product(ops: Sequence[PauliOperator]) -> PauliOperator:
    out = PauliOperator.identity(ops[0].n_qubits)
    for op in ops:
        out = out * op
    return out


def build_protocol(code: Code, kind: Kind | str, alphabet: str | None = None) -> Protocol:
    """One of the four extraction protocols, analysed on the code's sector."""
    kind = Kind(kind)
    gens = code.sector_generators
    alphabet = alphabet or code.default_alphabet
    if kind is Kind.MINIMAL:
        return Protocol(code, kind, gens, SingleRound(), alphabet)
    if kind is Kind.FT:
        return Protocol(code, kind, gens, RepeatMajority(), alphabet)
    if kind is Kind.MR:
        if code.sector is Sector.BITFLIP:
            raise ValueError("MR is not defined for the bit-flip code (it coincides with DBR)")
        return Protocol(code, kind, gens + (_product(gens),), SingleRound(), alphabet)
    if kind is Kind.DBR:
        return Protocol(code, kind, code.sector_group.nontrivial, SingleRound(), alphabet)
    raise ValueError(f"protocol kind {kind.value!r} cannot be built from a code alone")


def protocol_from_design(code: Code, design: BlockDesign) -> Protocol:
    """Single-round protocol measuring Z-type operators on the design's blocks."""
    if design.n_points != code.n_qubits:
        raise ValueError(f"design has {design.n_points} points, code has {code.n_qubits} qubits")
    measured = tuple(PauliOperator(code.n_qubits, 0, b) for b in design.blocks)
    return Protocol(code, Kind.CUSTOM, measured, SingleRound(), "x")


def all_protocols(code: Code) -> list[Protocol]:
    kinds = [Kind.MINIMAL, Kind.FT, Kind.MR, Kind.DBR]
    if code.sector is Sector.BITFLIP:
        kinds.remove(Kind.MR)
    return [build_protocol(code, k) for k in kinds]


# -- syndrome matrix ----------------------------------------------------------


def single_qubit_errors(n: int, alphabet: str) -> list[PauliOperator]:
    kinds = "X" if alphabet == "x" else "XYZ"
    return [PauliOperator.single(n, j, k) for j in range(n) for k in kinds]


@dataclass(frozen=True)
class SyndromeMatrix:
    """Rows: measured stabilizers. Columns: no error, then each single-qubit error."""

    measured: tuple[PauliOperator, ...]
    errors: tuple[PauliOperator, ...]
    entries: np.ndarray  # uint8, shape (rows, columns)

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def column_distances(self) -> np.ndarray:
        cols = self.entries.T.astype(np.int64)
        return (cols[:, None, :] != cols[None, :, :]).sum(axis=2)

    def columns_distinct(self) -> bool:
        cols = {tuple(c) for c in self.entries.T}
        return len(cols) == self.entries.shape[1]


def syndrome_matrix(p: Protocol, alphabet: str | None = None) -> SyndromeMatrix:
    alphabet = alphabet or p.alphabet
    if alphabet not in ALPHABETS:
        raise ValueError(f"unknown alphabet {alphabet!r}")
    if p.code.sector is not Sector.NON_CSS and alphabet != "x":
        raise ValueError(f"alphabet {alphabet!r} is inconsistent with sector analysis of {p.code.name}")
    errors = [PauliOperator.identity(p.n_qubits)] + single_qubit_errors(p.n_qubits, alphabet)
    entries = np.array([[pauli.symplectic_product(e, s) for e in errors] for s in p.measured], dtype=np.uint8)
    return SyndromeMatrix(p.measured, tuple(errors), entries)


# -- [[n,k,d,s]] classification -----------------------------------------------


@dataclass(frozen=True)
class CodeTag:
    n: int
    k: int
    d: int
    s: int

    def __str__(self) -> str:
        return f"[[{self.n},{self.k},{self.d},{self.s}]]"


def classify(p: Protocol, policy=None) -> CodeTag:
    """Largest ``s`` such that every event with at most (d-1)//2 qubit errors and
    at most ``s`` measurement flips (anywhere in the schedule) is corrected."""
    from .decode import DecodePolicy, get_decoder
    from .events import iter_error_patterns, iter_flip_records

    policy = policy or DecodePolicy()
    dec = get_decoder(p, policy)
    t = (p.code.distance - 1) // 2
    errors = [e for e in iter_error_patterns(p.n_qubits, p.alphabet) if e.weight <= t]
    by_weight: dict[int, list] = {}
    for rec in iter_flip_records(p):
        by_weight.setdefault(sum(rec), []).append(rec)
    s = -1
    for b in sorted(by_weight):
        if not all(dec.success(e, rec) for e in errors for rec in by_weight[b]):
            break
        s = b
    return CodeTag(p.n_qubits, p.code.k, p.code.distance, max(s, 0))
