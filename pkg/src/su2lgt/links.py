"""Brute-force plaquette from four explicit link operators.

Each link carries a state ``|j, m, n>`` (projections at its two ends) and the
spin-1/2 link operator ``U_{alpha beta}`` shifts both ends with Clebsch-Gordan
coefficients. Gauge-invariant states of a local patch are built with explicit
m-sums at the four vertices around the plaquette; the plaquette is the traced
loop of top, right rung, inverse bottom and inverse left rung. Slow and only
meant as a reference for :func:`~su2lgt.operators.plaquette_matrix_element`.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .angular import HalfInt, clebsch_gordan, dim, triangle_ok
from .lattice import LatticeSpec, SizeBoundError, _codes_of, _physical_codes, physical_indices, state_index
from .operators import OperatorMatrix, _active_moves, _plaquette_registers

__all__ = ["shift_tensor", "patch_state", "local_plaquette_element", "compose_plaquette_from_links"]

# Largest truncation the oracle accepts; the m-resolved patch grows as dim^12.
MAX_ORACLE_TRUNCATION = HalfInt(3)


def _n(t: int) -> int:
    return t + 1


@lru_cache(maxsize=None)
def shift_tensor(tj: int, tJ: int) -> np.ndarray:
    """``S[s, m', m] = <j m; 1/2 s | J m'>`` with ``s`` in (-1/2, +1/2).

    The link operator of one link is ``sqrt(dim j / dim J) S_alpha (x) S_beta``,
    one factor per link end.
    """
    S = np.zeros((2, _n(tJ), _n(tj)))
    for si, ts in enumerate((-1, 1)):
        for ia, tm in enumerate(range(-tj, tj + 1, 2)):
            for ib, tM in enumerate(range(-tJ, tJ + 1, 2)):
                S[si, ib, ia] = clebsch_gordan(HalfInt(tj), HalfInt(tm), HalfInt(1), HalfInt(ts), HalfInt(tJ), HalfInt(tM))
    return S


@lru_cache(maxsize=None)
def _vertex(tj_in: int, tj_out: int, tq: int, top: bool) -> np.ndarray:
    T = np.zeros((_n(tj_in), _n(tj_out), _n(tq)))
    for a, ta in enumerate(range(-tj_in, tj_in + 1, 2)):
        for b, tb in enumerate(range(-tj_out, tj_out + 1, 2)):
            for c, tc in enumerate(range(-tq, tq + 1, 2)):
                h = HalfInt
                if top:
                    T[a, b, c] = clebsch_gordan(h(tj_out), h(tb), h(tq), h(tc), h(tj_in), h(ta))
                else:
                    T[a, b, c] = clebsch_gordan(h(tj_in), h(ta), h(tq), h(tc), h(tj_out), h(tb))
    return T


# phase making the m-summed states agree with the 6-j convention
def _state_phase(t_at: int, t_ab: int, t_ql: int, t_qr: int) -> complex:
    return 1j ** ((3 * t_at + t_ab + t_ql + t_qr) % 4)


@lru_cache(maxsize=None)
def patch_state(config: tuple[int, ...]) -> np.ndarray:
    """Normalised gauge-invariant patch state.

    ``config`` holds doubled values ``(lt, lb, rt, rb, at, ab, ql, qr)``.
    Output axes: spectator ends (lt, rt, lb, rb), active-link ends
    (at-left, at-right, ab-left, ab-right) and rung ends
    (ql-top, ql-bottom, qr-top, qr-bottom).
    """
    lt, lb, rt, rb, at, ab, ql, qr = config
    TL = _vertex(lt, at, ql, True)
    TR = _vertex(at, rt, qr, True)
    BL = _vertex(lb, ab, ql, False)
    BR = _vertex(ab, rb, qr, False)
    psi = np.einsum("ixp,yjq,kzr,wls->ijklxyzwprqs", TL, TR, BL, BR)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ValueError(f"patch configuration {config} is not gauge invariant")
    return psi / norm


_LOOP_SIGN = np.array([[1.0, -1.0], [-1.0, 1.0]])


def local_plaquette_element(final: tuple[int, ...], initial: tuple[int, ...]) -> float:
    """``<final| Tr(U U U^-1 U^-1) |initial>`` on doubled patch configurations."""
    if final[:4] != initial[:4]:
        return 0.0
    if any(abs(f - i) != 1 for f, i in zip(final[4:], initial[4:])):
        return 0.0
    at_i, ab_i, ql_i, qr_i = initial[4:]
    at_f, ab_f, ql_f, qr_f = final[4:]
    pi, pf = patch_state(tuple(initial)), patch_state(tuple(final))
    St, Sb = shift_tensor(at_i, at_f), shift_tensor(ab_i, ab_f)
    Sl, Sr = shift_tensor(ql_i, ql_f), shift_tensor(qr_i, qr_f)
    # inverse links use U^-1_{gd} = (-1)^{d-g} U_{-d,-g}: reversed spin axis
    raw = np.einsum(
        "ijklxyzwprqs,aXx,bYy,dZz,gWw,aPp,dRr,bQq,gSs,ag,ijklXYZWPRQS->",
        pi, St, St, Sb[::-1], Sb[::-1], Sl[::-1], Sl[::-1], Sr, Sr, _LOOP_SIGN, pf,
        optimize="greedy",
    )
    ratio = np.sqrt(dim(HalfInt(at_i)) * dim(HalfInt(ab_i)) * dim(HalfInt(ql_i)) * dim(HalfInt(qr_i)))
    ratio /= np.sqrt(dim(HalfInt(at_f)) * dim(HalfInt(ab_f)) * dim(HalfInt(ql_f)) * dim(HalfInt(qr_f)))
    phase = np.conj(_state_phase(at_f, ab_f, ql_f, qr_f)) * _state_phase(at_i, ab_i, ql_i, qr_i)
    val = phase * ratio * raw
    if abs(val.imag) > 1e-10:
        raise ArithmeticError(f"complex plaquette element {val} for {final} <- {initial}")
    return float(val.real)


def patch_configurations(truncation) -> list[tuple[int, ...]]:
    """All gauge-invariant doubled patch configurations up to ``truncation``."""
    lam = HalfInt.of(truncation).twice_value
    out = []
    for c in itertools.product(range(lam + 1), repeat=8):
        lt, lb, rt, rb, at, ab, ql, qr = c
        h = HalfInt
        if (
            triangle_ok(h(lt), h(at), h(ql))
            and triangle_ok(h(at), h(rt), h(qr))
            and triangle_ok(h(lb), h(ab), h(ql))
            and triangle_ok(h(ab), h(rb), h(qr))
        ):
            out.append(c)
    return out


def compose_plaquette_from_links(spec: LatticeSpec, p: int) -> OperatorMatrix:
    """Plaquette ``p`` of ``spec`` built from explicit link operators.

    The result lives on the register basis of ``spec``: each physical basis
    state is identified with its m-summed gauge-invariant wavefunction and the
    operator is the resulting matrix on physical states (zero elsewhere).
    """
    if spec.truncation > MAX_ORACLE_TRUNCATION:
        raise SizeBoundError("link-operator oracle limited to small truncations")
    if spec.dimension > spec.max_dimension:
        raise SizeBoundError(f"dimension {spec.dimension} exceeds bound {spec.max_dimension}")
    if spec.num_plaquettes < 2:
        raise ValueError("the local patch needs at least two plaquettes")
    reg = _plaquette_registers(spec, p)
    keys = ("lt", "lb", "rt", "rb", "at", "ab", "ql", "qr")
    active, moves = _active_moves(spec, p)
    lam = spec.truncation.twice_value
    mat = np.zeros((spec.dimension, spec.dimension))
    for i in physical_indices(spec):
        codes = _codes_of(int(i), spec, False)
        for move in moves:
            new = list(codes)
            for k, d in zip(active, move):
                new[k] += d
            if not all(0 <= c <= lam for c in new) or not _physical_codes(tuple(new), spec):
                continue
            f_local = tuple(new[reg[k]] for k in keys)
            i_local = tuple(codes[reg[k]] for k in keys)
            mat[state_index(tuple(new), spec), i] = local_plaquette_element(f_local, i_local)
    return OperatorMatrix(mat, spec, label=f"box_{p}_links")
