"""The closed-form plaquette against explicit products of link operators."""

import time

import numpy as np
import pytest

from su2lgt.angular import HalfInt
from su2lgt.lattice import LatticeSpec, SizeBoundError, physical_indices
from su2lgt.links import compose_plaquette_from_links, local_plaquette_element, shift_tensor
from su2lgt.operators import build_plaquette_operator


@pytest.mark.parametrize(
    "spec, p",
    [
        (LatticeSpec(2), 0),
        (LatticeSpec(2), 1),
        (LatticeSpec(4), 1),
        (LatticeSpec(2, identify_top_bottom=False), 0),
        (LatticeSpec(2, truncation=HalfInt(2), identify_top_bottom=False), 0),
        (LatticeSpec(2, truncation=HalfInt(2), identify_top_bottom=False), 1),
    ],
    ids=["L2p0", "L2p1", "L4p1", "L2-free", "L2-lam1-p0", "L2-lam1-p1"],
)
def test_oracle_equivalence(spec, p):
    oracle = compose_plaquette_from_links(spec, p).matrix
    closed = build_plaquette_operator(spec, p, completion="none").matrix
    phys = physical_indices(spec)
    block = np.ix_(phys, phys)
    assert np.count_nonzero(np.abs(oracle[block]) > 1e-12) > 0
    assert np.max(np.abs(oracle[block] - closed[block])) < 1e-10


def test_table_one_first_and_last_rows():
    # local order (lt, lb, rt, rb, at, ab, ql, qr), codes 2j
    assert local_plaquette_element((0,) * 8, (0, 0, 0, 0, 1, 1, 1, 1)) == pytest.approx(1.0, abs=1e-12)
    assert local_plaquette_element((1, 1, 1, 1, 0, 0, 1, 1), (1, 1, 1, 1, 1, 1, 0, 0)) == pytest.approx(0.25, abs=1e-12)


def test_shift_tensor_orthonormality():
    # summing over the spin-1/2 index recovers the coupling identity for each J
    for tj in range(4):
        for tJ in (tj - 1, tj + 1):
            if tJ < 0:
                continue
            S = shift_tensor(tj, tJ)
            gram = np.einsum("smk,smn->kn", S, S)
            assert np.allclose(gram, gram[0, 0] * np.eye(tj + 1))


def test_oracle_refuses_large_truncation():
    with pytest.raises(SizeBoundError):
        compose_plaquette_from_links(LatticeSpec(2, truncation=HalfInt(4), identify_top_bottom=False), 0)


def test_small_oracle_is_fast():
    start = time.perf_counter()
    compose_plaquette_from_links(LatticeSpec(2), 0)
    assert time.perf_counter() - start < 5.0
