"""Statevector and density-operator simulation with CNOT depolarizing noise.

Noise model: after every CNOT the pair ``(a, b)`` goes through
``rho -> (1 - eps) rho + eps (I/4) (x) tr_ab(rho)``; measurement outcomes
then pass through a column-stochastic readout confusion matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from pathlib import Path

import numpy as np

from .circuit import Circuit, Gate, apply_gate

__all__ = [
    "StateVector",
    "NoiseModel",
    "CountsTable",
    "basis_state",
    "run_noiseless",
    "run_density",
    "run_trajectories",
    "noisy_probabilities",
    "run_noisy",
    "sample_counts",
    "expectation",
]


@dataclass
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        n = self.amplitudes.shape[0]
        if n & (n - 1) or self.amplitudes.ndim != 1:
            raise ValueError("amplitude vector length must be a power of two")

    @property
    def width(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_state(width: int, index: int = 0) -> StateVector:
    amp = np.zeros(2**width, dtype=complex)
    amp[index] = 1.0
    return StateVector(amp)


def _readout_factor(p01: float, p10: float) -> np.ndarray:
    # column = prepared bit, row = observed bit
    return np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])


@dataclass
class NoiseModel:
    """CNOT depolarizing strength plus readout confusion.

    ``readout_flip`` is either one ``(p(1|0), p(0|1))`` pair used on every
    qubit, a sequence of such pairs (one per qubit), or ``None``.
    ``readout_matrix`` overrides it with a full confusion matrix.
    """

    cnot_depolarizing: float = 0.0
    readout_flip: object = None
    readout_matrix: np.ndarray | None = None
    method: str = "density"
    trajectories: int = 256

    def __post_init__(self):
        if not 0.0 <= self.cnot_depolarizing <= 1.0:
            raise ValueError("cnot_depolarizing must lie in [0, 1]")
        if self.method not in ("density", "trajectory"):
            raise ValueError(f"unknown simulation method {self.method!r}")
        if self.readout_matrix is not None:
            m = np.asarray(self.readout_matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError("readout matrix must be square")
            if np.any(m < 0) or np.max(np.abs(m.sum(axis=0) - 1.0)) > 1e-12:
                raise ValueError("readout matrix must be column stochastic")
            self.readout_matrix = m
        for p01, p10 in self._pairs(1):
            if not (0.0 <= p01 <= 1.0 and 0.0 <= p10 <= 1.0):
                raise ValueError("readout flip probabilities must lie in [0, 1]")

    @classmethod
    def symmetric(cls, eps: float, flip: float = 0.0, **kw) -> "NoiseModel":
        return cls(cnot_depolarizing=eps, readout_flip=(flip, flip), **kw)

    def _pairs(self, width: int) -> list[tuple[float, float]]:
        rf = self.readout_flip
        if rf is None:
            return [(0.0, 0.0)] * width
        if isinstance(rf, (int, float)):
            return [(float(rf), float(rf))] * width
        rf = list(rf)
        if len(rf) == 2 and all(isinstance(x, (int, float)) for x in rf):
            return [(float(rf[0]), float(rf[1]))] * width
        pairs = [(float(a), float(b)) for a, b in rf]
        if width > 1 and len(pairs) != width:
            raise ValueError(f"expected {width} readout pairs, got {len(pairs)}")
        return pairs

    def confusion_matrix(self, width: int) -> np.ndarray:
        if self.readout_matrix is not None:
            if self.readout_matrix.shape[0] != 2**width:
                raise ValueError("readout matrix does not match circuit width")
            return self.readout_matrix
        return reduce(np.kron, [_readout_factor(*pq) for pq in self._pairs(width)])

    def to_dict(self) -> dict:
        out = {"cnot_depolarizing": self.cnot_depolarizing, "method": self.method}
        if self.readout_flip is not None:
            rf = self.readout_flip
            out["readout_flip"] = [float(rf), float(rf)] if isinstance(rf, (int, float)) else _listify(rf)
        if self.readout_matrix is not None:
            out["readout_matrix"] = self.readout_matrix.tolist()
        if self.method == "trajectory":
            out["trajectories"] = self.trajectories
        return out


def _listify(x):
    if isinstance(x, (list, tuple)):
        return [_listify(v) for v in x]
    return float(x)


@dataclass
class CountsTable:
    shots: int
    counts: dict[int, int]
    width: int

    def __post_init__(self):
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative count")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")

    def probabilities(self) -> np.ndarray:
        p = np.zeros(2**self.width)
        for k, c in self.counts.items():
            p[k] = c
        return p / self.shots

    @classmethod
    def from_array(cls, counts: np.ndarray, width: int) -> "CountsTable":
        counts = np.asarray(counts, dtype=np.int64)
        return cls(int(counts.sum()), {int(k): int(c) for k, c in enumerate(counts) if c > 0}, width)

    def to_array(self) -> np.ndarray:
        out = np.zeros(2**self.width, dtype=np.int64)
        for k, c in self.counts.items():
            out[k] = c
        return out

    def to_text(self) -> str:
        lines = [f"{k:0{self.width}b} {self.counts[k]}" for k in sorted(self.counts)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CountsTable":
        counts = {}
        width = None
        for line in text.splitlines():
            if not line.strip():
                continue
            bits, c = line.split()
            width = len(bits) if width is None else width
            if len(bits) != width:
                raise ValueError("inconsistent bitstring widths")
            counts[int(bits, 2)] = counts.get(int(bits, 2), 0) + int(c)
        if width is None:
            raise ValueError("empty counts table")
        return cls(sum(counts.values()), counts, width)

    def save(self, path):
        Path(path).write_text(self.to_text())


def _initial_vector(initial, width: int) -> np.ndarray:
    amp = initial.amplitudes if isinstance(initial, StateVector) else np.asarray(initial, dtype=complex)
    if amp.shape != (2**width,):
        raise ValueError(f"state of length {amp.shape[0]} does not match width {width}")
    return amp


def run_noiseless(circuit: Circuit, initial) -> StateVector:
    """Apply the gates in order (global phase from metadata included)."""
    w = circuit.width
    psi = _initial_vector(initial, w).reshape((2,) * w)
    for g in circuit.gates:
        psi = apply_gate(psi, g, w)
    return StateVector(psi.reshape(-1) * np.exp(1j * circuit.global_phase))


def _depolarize(rho: np.ndarray, qubits: tuple[int, int], eps: float, width: int) -> np.ndarray:
    a, b = qubits
    rows = [a, b] + [q for q in range(width) if q not in qubits]
    perm = rows + [width + q for q in rows]
    t = np.transpose(rho, perm).reshape(4, 2 ** (width - 2), 4, 2 ** (width - 2))
    reduced = np.einsum("ixiy->xy", t)
    mixed = np.einsum("ij,xy->ixjy", np.eye(4) / 4.0, reduced)
    t = (1.0 - eps) * t + eps * mixed
    t = t.reshape((2,) * (2 * width))
    return np.transpose(t, np.argsort(perm))


def run_density(circuit: Circuit, initial, eps: float) -> np.ndarray:
    """Exact density-operator evolution; returns the ``2^w x 2^w`` matrix."""
    w = circuit.width
    if isinstance(initial, np.ndarray) and initial.ndim == 2:
        rho = np.asarray(initial, dtype=complex)
    else:
        psi = _initial_vector(initial, w)
        rho = np.outer(psi, psi.conj())
    rho = rho.reshape((2,) * (2 * w))
    for g in circuit.gates:
        rho = apply_gate(rho, g, w)
        # column side: rho U^dagger, via conj of U acting on the column axes
        rho = np.conj(apply_gate(np.conj(rho), _shift_gate(g, w), 2 * w))
        if g.kind == "CNOT" and eps > 0.0:
            rho = _depolarize(rho, g.qubits, eps, w)
    return rho.reshape(2**w, 2**w)


def _shift_gate(g: Gate, w: int) -> Gate:
    return Gate(g.kind, tuple(q + w for q in g.qubits), g.angle)


_PAULIS_1Q = [
    np.eye(2),
    np.array([[0.0, 1.0], [1.0, 0.0]]),
    np.array([[0.0, -1j], [1j, 0.0]]),
    np.diag([1.0, -1.0]),
]


def _apply_pauli_pair(psi: np.ndarray, qubits, k: int) -> np.ndarray:
    for q, idx in zip(qubits, divmod(k, 4)):
        if idx:
            psi = np.moveaxis(np.tensordot(_PAULIS_1Q[idx], psi, axes=([1], [q])), 0, q)
    return psi


def run_trajectories(circuit: Circuit, initial, eps: float, n_traj: int, rng) -> np.ndarray:
    """Average Born probabilities over Pauli-twirl trajectories.

    With probability ``eps`` a uniformly random two-qubit Pauli (identity
    included) follows each CNOT, which reproduces the depolarizing channel
    on average.
    """
    w = circuit.width
    psi0 = _initial_vector(initial, w).reshape((2,) * w)
    probs = np.zeros(2**w)
    for _ in range(n_traj):
        psi = psi0
        for g in circuit.gates:
            psi = apply_gate(psi, g, w)
            if g.kind == "CNOT" and eps > 0.0 and rng.random() < eps:
                psi = _apply_pauli_pair(psi, g.qubits, int(rng.integers(16)))
        probs += np.abs(psi.reshape(-1)) ** 2
    return probs / n_traj


def noisy_probabilities(circuit: Circuit, initial, noise: NoiseModel, rng=None, readout: bool = True) -> np.ndarray:
    """Outcome distribution before sampling (through readout if requested)."""
    w = circuit.width
    if noise.method == "density" or noise.cnot_depolarizing == 0.0:
        rho = run_density(circuit, initial, noise.cnot_depolarizing)
        p = np.clip(np.real(np.diag(rho)), 0.0, None)
    else:
        rng = np.random.default_rng(rng)
        p = run_trajectories(circuit, initial, noise.cnot_depolarizing, noise.trajectories, rng)
    p = p / p.sum()
    if readout:
        p = noise.confusion_matrix(w) @ p
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return p


def sample_counts(probabilities: np.ndarray, shots: int, rng) -> CountsTable:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng)
    p = np.asarray(probabilities, dtype=float)
    width = p.shape[0].bit_length() - 1
    return CountsTable.from_array(rng.multinomial(shots, p / p.sum()), width)


def run_noisy(circuit: Circuit, initial, noise: NoiseModel, shots: int, rng_seed=None) -> CountsTable:
    """Simulate with noise and sample ``shots`` readout outcomes."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng_seed)
    p = noisy_probabilities(circuit, initial, noise, rng)
    return sample_counts(p, shots, rng)


def _diagonal_of(observable) -> tuple[np.ndarray, bool]:
    m = observable.matrix if hasattr(observable, "matrix") else np.asarray(observable)
    if m.ndim == 1:
        return m, True
    diag = np.diag(m)
    return diag, bool(np.allclose(m, np.diag(diag)))


def expectation(data, observable, shots: int | None = None) -> tuple[float, float]:
    """Expectation value and standard error.

    ``data`` is a :class:`StateVector` (exact, any observable), a
    :class:`CountsTable` or a probability vector (diagonal observables; the
    multinomial standard error needs ``shots`` for a bare vector).
    """
    if isinstance(data, StateVector):
        m = observable.matrix if hasattr(observable, "matrix") else np.asarray(observable)
        if m.ndim == 1:
            m = np.diag(m)
        psi = data.amplitudes
        return float(np.real(np.vdot(psi, m @ psi))), 0.0
    w, diagonal = _diagonal_of(observable)
    if not diagonal:
        raise ValueError("sampled data needs a diagonal observable")
    w = np.real(w)
    if isinstance(data, CountsTable):
        p, n = data.probabilities(), data.shots
    else:
        p, n = np.asarray(data, dtype=float), shots
    if p.shape != w.shape:
        raise ValueError("distribution and observable sizes differ")
    mean = float(p @ w)
    if not n:
        return mean, 0.0
    var = max(float(p @ w**2) - mean**2, 0.0)
    return mean, float(np.sqrt(var / n))
