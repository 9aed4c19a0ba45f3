"""Register layout of a periodic string of SU(2) plaquettes.

With top and bottom links identified the registers run around the ring as
``[j_1, q_1, j_2, q_2, ..., j_L, q_L]``; rung ``q_i`` joins top links ``j_i``
and ``j_{i+1}``. Without identification each plaquette contributes
``[jt_i, jb_i, q_i]``. Register ``0`` is the most significant digit of the
basis index, and register value ``j`` is stored as the integer code ``2j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .angular import HalfInt, _twice, triangle_ok

__all__ = [
    "SizeBoundError",
    "LatticeSpec",
    "BasisState",
    "enumerate_basis",
    "state_index",
    "is_physical",
    "physical_indices",
    "physical_projector",
]

DEFAULT_MAX_DIMENSION = 2**16


class SizeBoundError(ValueError):
    """Raised when a Hilbert space would exceed the configured size bound."""


@dataclass(frozen=True)
class LatticeSpec:
    num_plaquettes: int
    truncation: HalfInt = HalfInt(1)
    periodic: bool = True
    identify_top_bottom: bool = True
    max_dimension: int = DEFAULT_MAX_DIMENSION

    def __post_init__(self):
        if not isinstance(self.truncation, HalfInt):
            object.__setattr__(self, "truncation", HalfInt.of(self.truncation))
        if self.num_plaquettes < 1:
            raise ValueError("num_plaquettes must be >= 1")
        if self.truncation.twice_value < 1:
            raise ValueError("truncation must be at least 1/2")
        if not self.periodic:
            raise ValueError("only periodic plaquette strings are supported")

    @property
    def registers_per_plaquette(self) -> int:
        return 2 if self.identify_top_bottom else 3

    @property
    def num_registers(self) -> int:
        return self.registers_per_plaquette * self.num_plaquettes

    @property
    def register_dim(self) -> int:
        """Number of allowed values ``0, 1/2, ..., truncation`` per register."""
        return self.truncation.twice_value + 1

    @property
    def qubits_per_register(self) -> int:
        return max(1, math.ceil(math.log2(self.register_dim)))

    @property
    def num_qubits(self) -> int:
        return self.qubits_per_register * self.num_registers

    @property
    def dimension(self) -> int:
        return self.register_dim**self.num_registers

    @property
    def embedded_dimension(self) -> int:
        return 2**self.num_qubits

    def register_names(self) -> list[str]:
        names = []
        for i in range(1, self.num_plaquettes + 1):
            if self.identify_top_bottom:
                names += [f"j{i}", f"q{i}"]
            else:
                names += [f"jt{i}", f"jb{i}", f"q{i}"]
        return names

    # register positions
    def top(self, i: int) -> int:
        """Register of top link ``i`` (0-based, taken modulo the ring length)."""
        return self.registers_per_plaquette * (i % self.num_plaquettes)

    def bottom(self, i: int) -> int:
        if self.identify_top_bottom:
            return self.top(i)
        return self.top(i) + 1

    def rung(self, i: int) -> int:
        """Register of rung ``i``, which joins top links ``i`` and ``i + 1``."""
        return self.top(i) + self.registers_per_plaquette - 1

    def link_weights(self) -> np.ndarray:
        """How many physical links each register stands for."""
        w = np.ones(self.num_registers, dtype=int)
        if self.identify_top_bottom:
            for i in range(self.num_plaquettes):
                w[self.top(i)] = 2
        return w

    def to_dict(self) -> dict:
        return {
            "num_plaquettes": self.num_plaquettes,
            "truncation": str(self.truncation),
            "periodic": self.periodic,
            "identify_top_bottom": self.identify_top_bottom,
            "max_dimension": self.max_dimension,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeSpec":
        trunc = data.get("truncation", "1/2")
        if isinstance(trunc, str):
            if "/" in trunc:
                num, den = trunc.split("/")
                if int(den) != 2:
                    raise ValueError(f"truncation {trunc!r} is not a half-integer")
                trunc = HalfInt(int(num))
            else:
                trunc = HalfInt.of(int(trunc))
        return cls(
            num_plaquettes=int(data["num_plaquettes"]),
            truncation=HalfInt.of(trunc),
            periodic=bool(data.get("periodic", True)),
            identify_top_bottom=bool(data.get("identify_top_bottom", True)),
            max_dimension=int(data.get("max_dimension", DEFAULT_MAX_DIMENSION)),
        )


@dataclass(frozen=True)
class BasisState:
    """Register values of one plaquette-string configuration."""

    register_values: tuple[HalfInt, ...]
    index: int = field(default=-1, compare=False)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(v.twice_value for v in self.register_values)

    def label(self) -> str:
        return " ".join(str(v) for v in self.register_values)

    def __len__(self):
        return len(self.register_values)

    def __getitem__(self, k):
        return self.register_values[k]


def _check_size(spec: LatticeSpec, embedded: bool):
    size = spec.embedded_dimension if embedded else spec.dimension
    if size > spec.max_dimension:
        raise SizeBoundError(
            f"Hilbert space of dimension {size} exceeds bound {spec.max_dimension}"
        )


def _radix(spec: LatticeSpec, embedded: bool) -> int:
    return 2**spec.qubits_per_register if embedded else spec.register_dim


def state_index(codes, spec: LatticeSpec, embedded: bool = False) -> int:
    """Basis index of a register-code tuple; register 0 is most significant."""
    base = _radix(spec, embedded)
    idx = 0
    for c in codes:
        c = c.twice_value if isinstance(c, HalfInt) else int(c)
        if not 0 <= c < base:
            raise ValueError(f"register code {c} outside [0, {base})")
        idx = idx * base + c
    return idx


def _codes_of(index: int, spec: LatticeSpec, embedded: bool) -> tuple[int, ...]:
    base = _radix(spec, embedded)
    out = []
    for _ in range(spec.num_registers):
        index, c = divmod(index, base)
        out.append(c)
    return tuple(reversed(out))


def _iter_codes(spec: LatticeSpec, embedded: bool) -> Iterator[tuple[int, ...]]:
    n = spec.embedded_dimension if embedded else spec.dimension
    for i in range(n):
        yield _codes_of(i, spec, embedded)


def enumerate_basis(spec: LatticeSpec, embedded: bool = False) -> list[BasisState]:
    """All configurations in index order.

    With ``embedded=True`` the device basis of ``2**num_qubits`` states is
    returned, including register codes beyond the truncation.
    """
    _check_size(spec, embedded)
    return [
        BasisState(tuple(HalfInt(c) for c in codes), index=i)
        for i, codes in enumerate(_iter_codes(spec, embedded))
    ]


def _vertex_triads(codes: tuple[int, ...], spec: LatticeSpec):
    L = spec.num_plaquettes
    for i in range(L):
        q = codes[spec.rung(i)]
        yield codes[spec.top(i)], codes[spec.top(i + 1)], q
        if not spec.identify_top_bottom:
            yield codes[spec.bottom(i)], codes[spec.bottom(i + 1)], q


def _physical_codes(codes: tuple[int, ...], spec: LatticeSpec) -> bool:
    lam = spec.truncation.twice_value
    if any(c > lam for c in codes):
        return False
    return all(triangle_ok(HalfInt(a), HalfInt(b), HalfInt(c)) for a, b, c in _vertex_triads(codes, spec))


def is_physical(state, spec: LatticeSpec) -> bool:
    """Gauss's law: every vertex triad couples to a singlet."""
    if isinstance(state, BasisState):
        codes = state.codes
    else:
        codes = tuple(_twice(v) for v in state)
    if len(codes) != spec.num_registers:
        raise ValueError(f"expected {spec.num_registers} registers, got {len(codes)}")
    return _physical_codes(codes, spec)


def physical_indices(spec: LatticeSpec, embedded: bool = False) -> np.ndarray:
    _check_size(spec, embedded)
    return np.array(
        [i for i, codes in enumerate(_iter_codes(spec, embedded)) if _physical_codes(codes, spec)],
        dtype=int,
    )


def physical_projector(spec: LatticeSpec, embedded: bool = False):
    """Diagonal 0/1 projector onto the gauge-invariant subspace."""
    from .operators import OperatorMatrix

    n = spec.embedded_dimension if embedded else spec.dimension
    diag = np.zeros(n)
    diag[physical_indices(spec, embedded)] = 1.0
    return OperatorMatrix(np.diag(diag), spec, label="P_phys", embedded=embedded)
