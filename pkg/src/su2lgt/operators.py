"""Hamiltonian and plaquette operators on the register basis.

Plaquette ``p`` is centred on top link ``j_p``; its rungs are ``q_{p-1}``
(left) and ``q_p`` (right) and its control links are ``j_{p-1}`` and
``j_{p+1}``. On two plaquettes register order is ``|j_l q_l j_a q_r>``, so
plaquette 0 is centred on ``j_l`` and plaquette 1 on ``j_a``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .angular import HalfInt, _twice, dim, wigner_6j, clebsch_gordan, projections
from .lattice import (
    LatticeSpec,
    _codes_of,
    _physical_codes,
    physical_indices,
    state_index,
)

__all__ = [
    "OperatorMatrix",
    "PauliTerm",
    "SECTOR_MATRIX",
    "REDUCED_SECTOR_MATRIX",
    "link_operator_matrix",
    "plaquette_matrix_element",
    "plaquette_transition_element",
    "build_plaquette_operator",
    "gvc_pauli_decomposition",
    "expand_projectors",
    "pauli_terms_to_matrix",
    "sector_values",
    "solve_beta",
    "plaquette_beta",
    "build_electric_hamiltonian",
    "build_magnetic_hamiltonian",
    "build_full_hamiltonian",
    "electric_observable_plaquette",
    "electric_observable_plaquette1",
    "hamiltonian_parts",
    "write_triplets",
    "read_triplets",
]


@dataclass
class OperatorMatrix:
    """Dense operator together with the lattice whose basis indexes it."""

    matrix: np.ndarray
    spec: LatticeSpec | None = None
    label: str = ""
    embedded: bool = False

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def commutator_norm(self, other: "OperatorMatrix | np.ndarray") -> float:
        """Max-norm of ``[self, other]``."""
        b = other.matrix if isinstance(other, OperatorMatrix) else other
        a = self.matrix
        return float(np.max(np.abs(a @ b - b @ a), initial=0.0))

    def restrict(self, indices) -> np.ndarray:
        idx = np.asarray(indices)
        return self.matrix[np.ix_(idx, idx)]

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    def __add__(self, other):
        return OperatorMatrix(self.matrix + _mat(other), self.spec, self.label, self.embedded)

    def __sub__(self, other):
        return OperatorMatrix(self.matrix - _mat(other), self.spec, self.label, self.embedded)

    def __mul__(self, scalar):
        return OperatorMatrix(self.matrix * scalar, self.spec, self.label, self.embedded)

    __rmul__ = __mul__

    def to_triplets(self, tol: float = 0.0) -> list[tuple[int, int, float]]:
        rows, cols = np.nonzero(np.abs(self.matrix) > tol)
        out = []
        for r, c in zip(rows, cols):
            v = self.matrix[r, c]
            if np.iscomplexobj(self.matrix) and abs(v.imag) > 0:
                raise ValueError("triplet export supports real operators only")
            out.append((int(r), int(c), float(np.real(v))))
        return out


def _mat(x):
    return x.matrix if isinstance(x, OperatorMatrix) else np.asarray(x)


def write_triplets(op: OperatorMatrix, path, tol: float = 0.0) -> None:
    """Write ``row column value`` lines, one per nonzero entry."""
    lines = [f"# dimension {op.dimension}"]
    lines += [f"{r} {c} {v!r}" for r, c, v in op.to_triplets(tol)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_triplets(path) -> np.ndarray:
    n = None
    entries = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# dimension"):
            n = int(line.split()[-1])
        elif line.strip() and not line.startswith("#"):
            r, c, v = line.split()
            entries.append((int(r), int(c), float(v)))
    if n is None:
        n = 1 + max(max(r, c) for r, c, _ in entries)
    m = np.zeros((n, n))
    for r, c, v in entries:
        m[r, c] = v
    return m


# ---------------------------------------------------------------------------
# link operator


def link_operator_matrix(j_in, alpha, beta, truncation) -> dict:
    """Action of the spin-1/2 link operator ``U_{alpha beta}`` on ``|j, a, b>``.

    Returns ``{((J, a'), b'), (a, b)): coefficient}`` flattened as
    ``{(J, a2, b2, a, b): value}`` for every ``a, b`` of ``j_in``. Raising
    transitions beyond ``truncation`` are dropped.
    """
    ta, tb = _twice(alpha), _twice(beta)
    if abs(ta) != 1 or abs(tb) != 1:
        raise ValueError("link operator indices must be +-1/2")
    tj, tlam = _twice(j_in), _twice(truncation)
    if tj < 0 or tj > tlam:
        raise ValueError("j_in outside [0, truncation]")
    out = {}
    for tJ in (tj - 1, tj + 1):
        if tJ < 0 or tJ > tlam:
            continue
        J = HalfInt(tJ)
        ratio = np.sqrt(dim(HalfInt(tj)) / dim(J))
        for a in projections(HalfInt(tj)):
            for b in projections(HalfInt(tj)):
                a2, b2 = a + HalfInt(ta), b + HalfInt(tb)
                c = clebsch_gordan(HalfInt(tj), a, HalfInt(1), HalfInt(ta), J, a2) * clebsch_gordan(
                    HalfInt(tj), b, HalfInt(1), HalfInt(tb), J, b2
                )
                if c != 0.0:
                    out[(J, a2, b2, a, b)] = ratio * c
    return out


# ---------------------------------------------------------------------------
# closed-form plaquette matrix element


_HALF = HalfInt(1)


def plaquette_matrix_element(
    j_l_t, j_l_b, j_r_t, j_r_b, j_a_t_i, j_a_t_f, j_a_b_i, j_a_b_f, q_l_i, q_l_f, q_r_i, q_r_f
) -> float:
    """Plaquette matrix element from four 6-j symbols.

    ``j_l``/``j_r`` are the control links (unchanged), ``j_a`` the active top
    and bottom links and ``q_l``/``q_r`` the rungs; ``_i``/``_f`` mark
    initial and final values.
    """
    t = [_twice(x) for x in (j_l_t, j_l_b, j_r_t, j_r_b, j_a_t_i, j_a_t_f, j_a_b_i, j_a_b_f, q_l_i, q_l_f, q_r_i, q_r_f)]
    lt, lb, rt, rb, ati, atf, abi, abf, qli, qlf, qri, qrf = t
    if any(abs(f - i) != 1 for i, f in ((ati, atf), (abi, abf), (qli, qlf), (qri, qrf))):
        return 0.0
    h = HalfInt
    sixj = (
        wigner_6j(h(lt), h(ati), h(qli), _HALF, h(qlf), h(atf))
        * wigner_6j(h(lb), h(abi), h(qli), _HALF, h(qlf), h(abf))
        * wigner_6j(h(rt), h(ati), h(qri), _HALF, h(qrf), h(atf))
        * wigner_6j(h(rb), h(abi), h(qri), _HALF, h(qrf), h(abf))
    )
    if sixj == 0.0:
        return 0.0
    dims = (ati + 1) * (atf + 1) * (abi + 1) * (abf + 1) * (qli + 1) * (qlf + 1) * (qri + 1) * (qrf + 1)
    e2 = lt + lb + rt + rb + 2 * (atf + abf - qli - qri)
    # e2 is even whenever the four triads above are admissible
    sign = -1.0 if (e2 // 2) % 2 else 1.0
    return sign * np.sqrt(dims) * sixj


def _plaquette_registers(spec: LatticeSpec, p: int) -> dict:
    return {
        "lt": spec.top(p - 1),
        "lb": spec.bottom(p - 1),
        "rt": spec.top(p + 1),
        "rb": spec.bottom(p + 1),
        "at": spec.top(p),
        "ab": spec.bottom(p),
        "ql": spec.rung(p - 1),
        "qr": spec.rung(p),
    }


def _require_even_ring(spec: LatticeSpec):
    if spec.num_plaquettes < 2 or spec.num_plaquettes % 2:
        raise ValueError("plaquette operators need an even number (>= 2) of plaquettes")


def _code(v) -> int:
    return v.twice_value if isinstance(v, HalfInt) else int(v)


def plaquette_transition_element(spec: LatticeSpec, p: int, final, initial) -> float:
    """``<final| box_p |initial>``.

    States are tuples of integer codes ``2j`` or of :class:`HalfInt` values.
    """
    reg = _plaquette_registers(spec, p)
    fi = [_code(v) for v in final]
    ii = [_code(v) for v in initial]
    touched = {reg["at"], reg["ab"], reg["ql"], reg["qr"]}
    if any(fi[k] != ii[k] for k in range(len(fi)) if k not in touched):
        return 0.0
    if not (_physical_codes(tuple(fi), spec) and _physical_codes(tuple(ii), spec)):
        return 0.0
    h = HalfInt
    return plaquette_matrix_element(
        h(ii[reg["lt"]]), h(ii[reg["lb"]]), h(ii[reg["rt"]]), h(ii[reg["rb"]]),
        h(ii[reg["at"]]), h(fi[reg["at"]]), h(ii[reg["ab"]]), h(fi[reg["ab"]]),
        h(ii[reg["ql"]]), h(fi[reg["ql"]]), h(ii[reg["qr"]]), h(fi[reg["qr"]]),
    )


def _active_moves(spec: LatticeSpec, p: int):
    """Registers changed by the plaquette and the code offsets they may take."""
    reg = _plaquette_registers(spec, p)
    active = [reg["at"]] if spec.identify_top_bottom else [reg["at"], reg["ab"]]
    active += [reg["ql"], reg["qr"]]
    return active, list(itertools.product((-1, 1), repeat=len(active)))


def build_plaquette_operator(spec: LatticeSpec, p: int, completion: str | None = None) -> OperatorMatrix:
    """Plaquette operator on the register basis of ``spec``.

    Physical-sector elements come from :func:`plaquette_matrix_element`.
    ``completion="gvc"`` (the default for truncation 1/2 with identified
    top/bottom links) fills the unphysical block with the Pauli completion of
    :func:`gvc_pauli_decomposition`; ``completion="none"`` leaves it zero.
    """
    _require_even_ring(spec)
    if not 0 <= p < spec.num_plaquettes:
        raise IndexError(f"plaquette {p} out of range")
    half_identified = spec.truncation.twice_value == 1 and spec.identify_top_bottom
    if spec.identify_top_bottom and not half_identified:
        raise ValueError("top/bottom identification is only valid for truncation 1/2")
    if completion is None:
        completion = "gvc" if half_identified else "none"
    if completion not in ("gvc", "none"):
        raise ValueError(f"unknown completion {completion!r}")
    if completion == "gvc" and not half_identified:
        raise ValueError("the Pauli completion needs truncation 1/2 with identified links")

    n = spec.dimension
    if n > spec.max_dimension:
        from .lattice import SizeBoundError

        raise SizeBoundError(f"dimension {n} exceeds bound {spec.max_dimension}")
    phys = physical_indices(spec)
    mat = np.zeros((n, n))
    active, moves = _active_moves(spec, p)
    lam = spec.truncation.twice_value
    for i in phys:
        codes = _codes_of(int(i), spec, False)
        for move in moves:
            new = list(codes)
            ok = True
            for reg_k, d in zip(active, move):
                new[reg_k] += d
                if not 0 <= new[reg_k] <= lam:
                    ok = False
                    break
            if not ok:
                continue
            new = tuple(new)
            if not _physical_codes(new, spec):
                continue
            val = plaquette_transition_element(spec, p, new, codes)
            if val != 0.0:
                mat[state_index(new, spec), i] = val

    if completion == "gvc":
        full = pauli_terms_to_matrix(gvc_pauli_decomposition(spec, p), spec.num_qubits)
        unphys = np.setdiff1d(np.arange(n), phys)
        mat[np.ix_(unphys, unphys)] = full[np.ix_(unphys, unphys)].real
    return OperatorMatrix(mat, spec, label=f"box_{p}")


# ---------------------------------------------------------------------------
# Pauli form of the truncation-1/2 plaquette


_PAULI = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1j], [1j, 0.0]]),
    "Z": np.diag([1.0, -1.0]),
    "P0": np.diag([1.0, 0.0]),
    "P1": np.diag([0.0, 1.0]),
}


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * prod(letter on qubit)``; P0/P1 are the Z projectors."""

    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        qubits = [q for q, _ in self.factors]
        if len(set(qubits)) != len(qubits):
            raise ValueError("repeated qubit in Pauli term")
        for _, letter in self.factors:
            if letter not in _PAULI:
                raise ValueError(f"unknown factor {letter!r}")

    def matrix(self, n_qubits: int) -> np.ndarray:
        ops = [_PAULI["I"]] * n_qubits
        for q, letter in self.factors:
            ops[q] = _PAULI[letter]
        return self.coefficient * reduce(np.kron, ops)

    def __str__(self):
        body = " ".join(f"{letter}{q}" for q, letter in self.factors)
        return f"{self.coefficient:+g} {body}"


def pauli_terms_to_matrix(terms: Iterable[PauliTerm], n_qubits: int) -> np.ndarray:
    out = np.zeros((2**n_qubits, 2**n_qubits), dtype=complex)
    for term in terms:
        out += term.matrix(n_qubits)
    return out


def expand_projectors(terms: Iterable[PauliTerm], tol: float = 1e-15) -> list[PauliTerm]:
    """Rewrite P0 = (I+Z)/2 and P1 = (I-Z)/2 and collect equal strings."""
    acc: dict[tuple, float] = {}
    for term in terms:
        branches = [((), term.coefficient)]
        for q, letter in term.factors:
            if letter in ("P0", "P1"):
                zsign = 0.5 if letter == "P0" else -0.5
                nxt = []
                for facs, c in branches:
                    nxt.append((facs, 0.5 * c))
                    nxt.append((facs + ((q, "Z"),), zsign * c))
                branches = nxt
            else:
                branches = [(facs + ((q, letter),), c) for facs, c in branches]
        for facs, c in branches:
            key = tuple(sorted((q, l) for q, l in facs if l != "I"))
            acc[key] = acc.get(key, 0.0) + c
    return [PauliTerm(c, k) for k, c in sorted(acc.items()) if abs(c) > tol]


def _require_half_identified(spec: LatticeSpec):
    if spec.truncation.twice_value != 1 or not spec.identify_top_bottom:
        raise ValueError("requires truncation 1/2 with identified top/bottom links")
    _require_even_ring(spec)


def sector_values(spec: LatticeSpec, p: int) -> dict[tuple[int, int], float]:
    """Plaquette element in each control sector ``(j_left, j_right)`` as bits."""
    _require_half_identified(spec)
    reg = _plaquette_registers(spec, p)
    out = {}
    for a, b in itertools.product((0, 1), repeat=2):
        if reg["lt"] == reg["rt"] and a != b:
            continue
        initial = [0] * spec.num_registers
        initial[reg["lt"]] = a
        initial[reg["rt"]] = b
        # physical rungs follow from the triangle rule: q = j_left xor j_active
        initial[reg["ql"]] = a
        initial[reg["qr"]] = b
        if not _physical_codes(tuple(initial), spec):
            # the rest of the ring must also satisfy Gauss's law
            initial = _complete_physical(spec, initial, fixed=set(reg.values()))
        final = list(initial)
        for k in (reg["at"], reg["ql"], reg["qr"]):
            final[k] ^= 1
        out[(a, b)] = plaquette_transition_element(spec, p, final, initial)
    return out


def _complete_physical(spec: LatticeSpec, codes, fixed):
    free = [k for k in range(spec.num_registers) if k not in fixed]
    for combo in itertools.product((0, 1), repeat=len(free)):
        trial = list(codes)
        for k, v in zip(free, combo):
            trial[k] = v
        if _physical_codes(tuple(trial), spec):
            return trial
    raise ValueError("no physical completion exists")


def gvc_pauli_decomposition(spec: LatticeSpec, p: int, local: bool = False) -> list[PauliTerm]:
    """Projector-controlled XXX terms equal to the plaquette on physical states.

    On two plaquettes the left and right controls coincide and only the
    diagonal sectors survive. With ``local=True`` qubits are renumbered in
    circuit order ``(j_left, q_left, j_active, q_right[, j_right])``.
    """
    _require_half_identified(spec)
    reg = dict(_plaquette_registers(spec, p))
    if local:
        order = [reg["lt"], reg["ql"], reg["at"], reg["qr"]]
        if reg["rt"] != reg["lt"]:
            order.append(reg["rt"])
        remap = {r: k for k, r in enumerate(order)}
        reg = {name: remap[r] for name, r in reg.items()}
    flips = tuple((k, "X") for k in (reg["ql"], reg["at"], reg["qr"]))
    terms = []
    for (a, b), v in sector_values(spec, p).items():
        if reg["lt"] == reg["rt"]:
            ctrl = ((reg["lt"], f"P{a}"),)
        else:
            ctrl = ((reg["lt"], f"P{a}"), (reg["rt"], f"P{b}"))
        terms.append(PauliTerm(v, tuple(sorted(ctrl + flips))))
    return terms


# rows: control sectors (j_l, j_r) = 00, 01, 10, 11;
# columns: operators Z_l, Z_l Z_r, Z_r, 1 multiplying XXX
SECTOR_MATRIX = np.array(
    [[1, 1, 1, 1], [1, -1, -1, 1], [-1, -1, 1, 1], [-1, 1, -1, 1]], dtype=float
)
# first and fourth rows/columns: Z_l and 1 when j_l = j_r
REDUCED_SECTOR_MATRIX = SECTOR_MATRIX[np.ix_([0, 3], [0, 3])]


def solve_beta(sector_values, sector_matrix=SECTOR_MATRIX) -> np.ndarray:
    """Rotation coefficients ``beta`` with ``sector_matrix @ beta = sector_values``."""
    m = np.asarray(sector_matrix, dtype=float)
    v = np.asarray(sector_values, dtype=float)
    if m.shape[0] != m.shape[1] or m.shape[0] != v.shape[0]:
        raise ValueError("sector matrix and values have incompatible shapes")
    return np.linalg.solve(m, v)


def plaquette_beta(spec: LatticeSpec, p: int) -> np.ndarray:
    """``beta`` for the plaquette circuit of ``spec`` (4 entries, or 2 on two plaquettes)."""
    vals = sector_values(spec, p)
    if spec.num_plaquettes == 2:
        return solve_beta([vals[(0, 0)], vals[(1, 1)]], REDUCED_SECTOR_MATRIX)
    return solve_beta([vals[(0, 0)], vals[(0, 1)], vals[(1, 0)], vals[(1, 1)]])


# ---------------------------------------------------------------------------
# Hamiltonian pieces


def _casimir_diagonal(spec: LatticeSpec, weights: Sequence[float]) -> np.ndarray:
    n = spec.dimension
    out = np.zeros(n)
    for i in range(n):
        codes = _codes_of(i, spec, False)
        out[i] = sum(w * (c / 2) * (c / 2 + 1) for w, c in zip(weights, codes))
    return out


def build_electric_hamiltonian(spec: LatticeSpec, g_squared: float) -> OperatorMatrix:
    """``(g^2/2) sum_links E^2``; identified j registers count as two links."""
    diag = 0.5 * g_squared * _casimir_diagonal(spec, spec.link_weights())
    return OperatorMatrix(np.diag(diag), spec, label="H_E")


def electric_observable_plaquette(spec: LatticeSpec, g_squared: float, p: int) -> OperatorMatrix:
    """Electric energy of plaquette ``p``: its top and bottom link plus both rungs."""
    reg = _plaquette_registers(spec, p)
    w = np.zeros(spec.num_registers)
    w[reg["at"]] += 1
    w[reg["ab"]] += 1
    w[reg["ql"]] += 1
    w[reg["qr"]] += 1
    diag = 0.5 * g_squared * _casimir_diagonal(spec, w)
    return OperatorMatrix(np.diag(diag), spec, label=f"E2_box{p}")


def electric_observable_plaquette1(spec: LatticeSpec, g_squared: float) -> OperatorMatrix:
    """Electric energy of the first plaquette (centred on register 0)."""
    return electric_observable_plaquette(spec, g_squared, 0)


def build_magnetic_hamiltonian(spec: LatticeSpec, g_squared: float, p: int | None = None) -> OperatorMatrix:
    """``-(1/2g^2)(box + box^dagger)`` summed over plaquettes, or for one ``p``."""
    plaqs = range(spec.num_plaquettes) if p is None else [p]
    total = np.zeros((spec.dimension, spec.dimension))
    for k in plaqs:
        box = build_plaquette_operator(spec, k).matrix
        total += box + box.T
    return OperatorMatrix(-total / (2 * g_squared), spec, label="H_B")


def hamiltonian_parts(spec: LatticeSpec, g_squared: float) -> list[OperatorMatrix]:
    """Trotter order: plaquette 0, plaquette 1, ..., then the electric term."""
    parts = [build_magnetic_hamiltonian(spec, g_squared, p) for p in range(spec.num_plaquettes)]
    parts.append(build_electric_hamiltonian(spec, g_squared))
    return parts


def build_full_hamiltonian(spec: LatticeSpec, g_squared: float) -> OperatorMatrix:
    parts = hamiltonian_parts(spec, g_squared)
    total = sum((op.matrix for op in parts), np.zeros((spec.dimension, spec.dimension)))
    return OperatorMatrix(total, spec, label="H")
