"""Gate-level circuits for truncation-1/2 plaquette strings.

Qubit 0 is the most significant bit, matching the register order of
:mod:`su2lgt.lattice`. ``RZ(theta) = exp(-i theta Z / 2)``, so a factor
``exp(-i beta Z t)`` is ``RZ(2 beta t)``.

CNOTs that belong to one compute/uncompute mirror pair share a ``tag``;
:func:`insert_cnot_pairs` folds one member of every tagged group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .lattice import LatticeSpec
from .operators import _plaquette_registers, _require_half_identified, plaquette_beta

__all__ = [
    "Gate",
    "Circuit",
    "apply_gate",
    "build_plaquette_circuit_5q",
    "build_plaquette_circuit_2p",
    "build_electric_circuit",
    "build_trotter_circuit",
    "insert_cnot_pairs",
]

_ARITY = {"H": 1, "X": 1, "RZ": 1, "CNOT": 2}
_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    tag: str | None = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unsupported gate {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("gate qubits must be distinct")
        if (self.kind == "RZ") != (self.angle is not None):
            raise ValueError("only RZ carries an angle")
        if self.tag is not None and any(c.isspace() for c in self.tag):
            raise ValueError("tags may not contain whitespace")

    def matrix(self) -> np.ndarray:
        if self.kind == "H":
            return _H
        if self.kind == "X":
            return _X
        if self.kind == "RZ":
            h = 0.5 * self.angle
            return np.diag([np.exp(-1j * h), np.exp(1j * h)])
        cx = np.eye(4)
        cx[2:, 2:] = _X
        return cx

    def inverse(self) -> "Gate":
        if self.kind == "RZ":
            return replace(self, angle=-self.angle)
        return self

    def to_line(self) -> str:
        parts = [self.kind, *map(str, self.qubits)]
        if self.angle is not None:
            parts.append(repr(float(self.angle)))
        if self.tag is not None:
            parts.append("@" + self.tag)
        return " ".join(parts)

    @classmethod
    def from_line(cls, line: str) -> "Gate":
        tokens = line.split()
        tag = None
        if tokens[-1].startswith("@"):
            tag = tokens.pop()[1:]
        kind = tokens[0]
        if kind not in _ARITY:
            raise ValueError(f"unsupported gate {kind!r}")
        n = _ARITY[kind]
        qubits = tuple(int(x) for x in tokens[1 : 1 + n])
        rest = tokens[1 + n :]
        angle = float(rest[0]) if rest else None
        if len(rest) > 1:
            raise ValueError(f"trailing tokens in {line!r}")
        return cls(kind, qubits, angle, tag)


def apply_gate(psi: np.ndarray, gate: Gate, width: int) -> np.ndarray:
    """Apply ``gate`` to the leading axes of a ``(2,)*width + batch`` tensor.

    ``psi`` may carry trailing axes (e.g. the columns of a unitary).
    """
    u = gate.matrix()
    k = len(gate.qubits)
    u = u.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), list(gate.qubits)))
    return np.moveaxis(out, list(range(k)), list(gate.qubits))


@dataclass
class Circuit:
    width: int
    gates: list[Gate] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate):
        if any(not 0 <= q < self.width for q in gate.qubits):
            raise ValueError(f"gate {gate.to_line()} outside width {self.width}")

    def append(self, kind: str, *qubits: int, angle: float | None = None, tag: str | None = None):
        gate = Gate(kind, qubits, angle, tag)
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]):
        for g in gates:
            self._check(g)
            self.gates.append(g)
        return self

    def __len__(self):
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    @property
    def global_phase(self) -> float:
        """Angle ``phi`` such that the ideal operation is ``exp(i phi) U``."""
        return float(self.metadata.get("global_phase", 0.0))

    def compose(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError("width mismatch")
        meta = dict(self.metadata)
        meta["global_phase"] = self.global_phase + other.global_phase
        return Circuit(self.width, self.gates + other.gates, meta)

    def inverse(self) -> "Circuit":
        meta = dict(self.metadata)
        meta["global_phase"] = -self.global_phase
        return Circuit(self.width, [g.inverse() for g in reversed(self.gates)], meta)

    def unitary(self, include_global_phase: bool = False) -> np.ndarray:
        n = 2**self.width
        u = np.eye(n, dtype=complex).reshape((2,) * self.width + (n,))
        for g in self.gates:
            u = apply_gate(u, g, self.width)
        u = u.reshape(n, n)
        if include_global_phase:
            u = u * np.exp(1j * self.global_phase)
        return u

    def to_text(self) -> str:
        lines = [f"# width {self.width}"]
        for key in sorted(self.metadata):
            lines.append(f"# meta {key} {self.metadata[key]!r}")
        lines += [g.to_line() for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        width = None
        meta: dict = {}
        gates = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("# width"):
                width = int(line.split()[2])
            elif line.startswith("# meta"):
                _, _, key, value = line.split(maxsplit=3)
                meta[key] = _parse_meta(value)
            elif line.startswith("#"):
                continue
            else:
                gates.append(Gate.from_line(line))
        if width is None:
            raise ValueError("missing '# width' header")
        return cls(width, gates, meta)

    def save(self, path):
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "Circuit":
        return cls.from_text(Path(path).read_text())


def _parse_meta(value: str):
    for conv in (int, float):
        try:
            return conv(value)
        except ValueError:
            pass
    return value.strip("'\"")


def _tagged(prefix: str | None, name: str) -> str | None:
    return None if prefix is None else f"{prefix}/{name}"


def build_plaquette_circuit_2p(
    beta_tilde: Sequence[float],
    t: float,
    qubits: Sequence[int] = (0, 1, 2, 3),
    width: int | None = None,
    tag: str | None = "box",
) -> Circuit:
    """``exp(-i (b1 Z_c XXX + b2 XXX) t)`` with control ``qubits[0]``.

    The flipped registers are ``qubits[1:]``. Six CNOTs in three mirror
    groups.
    """
    if len(beta_tilde) != 2:
        raise ValueError("two-plaquette circuit needs two beta entries")
    b1, b2 = map(float, beta_tilde)
    c, a, b, d = qubits
    circ = Circuit(width if width is not None else 1 + max(qubits))
    for q in (a, b, d):
        circ.append("H", q)
    circ.append("CNOT", d, b, tag=_tagged(tag, "g0"))
    circ.append("CNOT", b, a, tag=_tagged(tag, "g1"))
    circ.append("RZ", a, angle=2.0 * b2 * t)
    circ.append("CNOT", a, c, tag=_tagged(tag, "g2"))
    circ.append("RZ", c, angle=2.0 * b1 * t)
    circ.append("CNOT", a, c, tag=_tagged(tag, "g2"))
    circ.append("CNOT", b, a, tag=_tagged(tag, "g1"))
    circ.append("CNOT", d, b, tag=_tagged(tag, "g0"))
    for q in (a, b, d):
        circ.append("H", q)
    return circ


def build_plaquette_circuit_5q(
    beta: Sequence[float],
    t: float,
    qubits: Sequence[int] = (0, 1, 2, 3, 4),
    width: int | None = None,
    tag: str | None = "box",
) -> Circuit:
    """``exp(-i (b1 Z_l + b2 Z_l Z_r + b3 Z_r + b4) XXX t)``.

    ``qubits`` are ``(j_l, q_l, j_a, q_r, j_r)``; XXX acts on the middle
    three. Fourteen CNOTs in seven mirror groups.
    """
    if len(beta) != 4:
        raise ValueError("five-qubit circuit needs four beta entries")
    b1, b2, b3, b4 = map(float, beta)
    l, ql, ja, qr, r = qubits
    circ = Circuit(width if width is not None else 1 + max(qubits))
    g = lambda name: _tagged(tag, name)  # noqa: E731
    for q in (ql, ja, qr):
        circ.append("H", q)
    # parity of (j_l, XXX) onto q_r
    circ.append("CNOT", l, ql, tag=g("g0"))
    circ.append("CNOT", ql, ja, tag=g("g1"))
    circ.append("CNOT", ja, qr, tag=g("g2"))
    circ.append("RZ", qr, angle=2.0 * b1 * t)
    circ.append("CNOT", qr, r, tag=g("g3"))
    circ.append("RZ", r, angle=2.0 * b2 * t)
    circ.append("CNOT", qr, r, tag=g("g3"))
    circ.append("CNOT", ja, qr, tag=g("g2"))
    circ.append("CNOT", ql, ja, tag=g("g1"))
    circ.append("CNOT", l, ql, tag=g("g0"))
    # parity of XXX alone onto q_r
    circ.append("CNOT", ql, ja, tag=g("g4"))
    circ.append("CNOT", ja, qr, tag=g("g5"))
    circ.append("RZ", qr, angle=2.0 * b4 * t)
    circ.append("CNOT", qr, r, tag=g("g6"))
    circ.append("RZ", r, angle=2.0 * b3 * t)
    circ.append("CNOT", qr, r, tag=g("g6"))
    circ.append("CNOT", ja, qr, tag=g("g5"))
    circ.append("CNOT", ql, ja, tag=g("g4"))
    for q in (ql, ja, qr):
        circ.append("H", q)
    return circ


def build_electric_circuit(g_squared: float, t: float, spec: LatticeSpec) -> Circuit:
    """``exp(-i H_E t)`` as one RZ per register; the global phase goes to metadata."""
    if spec.truncation.twice_value != 1:
        raise ValueError("electric circuit requires truncation 1/2")
    weights = 0.5 * g_squared * 0.75 * spec.link_weights()
    circ = Circuit(spec.num_qubits)
    for q, c in enumerate(weights):
        circ.append("RZ", q, angle=-float(c) * t)
    circ.metadata["global_phase"] = -0.5 * float(np.sum(weights)) * t
    return circ


def _plaquette_block(spec: LatticeSpec, p: int, g_squared: float, dt: float, tag: str) -> Circuit:
    # H_B,p = -(1/g^2) box_p, so exp(-i H_B,p dt) = exp(-i box_p (-dt/g^2))
    reg = _plaquette_registers(spec, p)
    beta = plaquette_beta(spec, p)
    targ = -dt / g_squared
    if spec.num_plaquettes == 2:
        qubits = (reg["lt"], reg["ql"], reg["at"], reg["qr"])
        return build_plaquette_circuit_2p(beta, targ, qubits, spec.num_qubits, tag)
    qubits = (reg["lt"], reg["ql"], reg["at"], reg["qr"], reg["rt"])
    return build_plaquette_circuit_5q(beta, targ, qubits, spec.num_qubits, tag)


def build_trotter_circuit(spec: LatticeSpec, g_squared: float, t: float, n_steps: int) -> Circuit:
    """``n_steps`` repetitions of plaquette 0, plaquette 1, ..., electric."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    _require_half_identified(spec)
    dt = t / n_steps
    circ = Circuit(spec.num_qubits, metadata={"n_steps": n_steps, "r": 1, "global_phase": 0.0})
    for s in range(n_steps):
        for p in range(spec.num_plaquettes):
            circ = circ.compose(_plaquette_block(spec, p, g_squared, dt, f"s{s}p{p}"))
        circ = circ.compose(build_electric_circuit(g_squared, dt, spec))
    return circ


def insert_cnot_pairs(circuit: Circuit, r: int, rng_seed=None) -> Circuit:
    """Noise scaling by identity insertion.

    ``r=2`` adds a ``CNOT CNOT`` pair right after one randomly chosen member
    (first or second half) of every tagged mirror group.
    """
    if r not in (1, 2):
        raise ValueError(f"unsupported noise scale r={r}")
    meta = dict(circuit.metadata)
    meta["r"] = r
    if r == 1:
        return Circuit(circuit.width, list(circuit.gates), meta)
    rng = np.random.default_rng(rng_seed)
    groups: dict[str, list[int]] = {}
    for k, g in enumerate(circuit.gates):
        if g.kind == "CNOT" and g.tag is not None:
            groups.setdefault(g.tag, []).append(k)
    chosen = {members[int(rng.integers(len(members)))] for members in groups.values()}
    out: list[Gate] = []
    for k, g in enumerate(circuit.gates):
        out.append(g)
        if k in chosen:
            fold = replace(g, tag=g.tag + "/fold")
            out += [fold, fold]
    return Circuit(circuit.width, out, meta)
