import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su2lgt import golden
from su2lgt.angular import HalfInt
from su2lgt.lattice import LatticeSpec, _codes_of, physical_indices, physical_projector
from su2lgt.operators import (
    REDUCED_SECTOR_MATRIX,
    SECTOR_MATRIX,
    OperatorMatrix,
    PauliTerm,
    build_electric_hamiltonian,
    build_full_hamiltonian,
    build_magnetic_hamiltonian,
    build_plaquette_operator,
    electric_observable_plaquette1,
    expand_projectors,
    gvc_pauli_decomposition,
    link_operator_matrix,
    pauli_terms_to_matrix,
    plaquette_beta,
    plaquette_matrix_element,
    plaquette_transition_element,
    read_triplets,
    sector_values,
    solve_beta,
    write_triplets,
)

from conftest import sym_cg

H = HalfInt(1)
X = np.array([[0, 1], [1, 0]])
P0, P1 = np.diag([1, 0]), np.diag([0, 1])


def _local_phys(i):
    jl, ql, ja, qr, jr = (int(b) for b in format(i, "05b"))
    return (jl + ja + ql) % 2 == 0 and (ja + jr + qr) % 2 == 0


# -- link operator ----------------------------------------------------------


def test_link_operator_from_singlet():
    m = link_operator_matrix(0, H, H, H)
    assert m == {(H, H, H, HalfInt(0), HalfInt(0)): pytest.approx(math.sqrt(0.5))}


def test_link_operator_truncation_drops_raising():
    m = link_operator_matrix(H, H, H, H)
    assert m and {k[0] for k in m} == {HalfInt(0)}
    assert {k[0] for k in link_operator_matrix(H, H, H, HalfInt(2))} == {HalfInt(0), HalfInt(2)}


def test_link_operator_half_entries_match_cg_oracle():
    m = link_operator_matrix(H, H, -H, HalfInt(2))
    assert {k[0] for k in m} == {HalfInt(0), HalfInt(2)}
    for (J, a2, b2, a, b), v in m.items():
        ratio = math.sqrt(2 / (J.twice_value + 1))
        ref = ratio * sym_cg(1, a.twice_value, 1, 1, J.twice_value, a2.twice_value) * sym_cg(
            1, b.twice_value, 1, -1, J.twice_value, b2.twice_value
        )
        assert v == pytest.approx(ref, abs=1e-14)


def test_link_operator_rejects_bad_indices():
    with pytest.raises(ValueError):
        link_operator_matrix(0, HalfInt(3), H, H)


# -- closed-form element --------------------------------------------------


@pytest.mark.parametrize("final, initial, value", golden.PLAQUETTE_TABLE)
def test_table_one_rows(final, initial, value):
    # register order (j_l, q_l, j_a, q_r, j_r) as bits of spin 1/2
    jl, qlf, jaf, qrf, jr = (HalfInt(b) for b in final)
    _, qli, jai, qri, _ = (HalfInt(b) for b in initial)
    got = plaquette_matrix_element(jl, jl, jr, jr, jai, jaf, jai, jaf, qli, qlf, qri, qrf)
    assert got == pytest.approx(float(value), abs=1e-12)


def test_table_one_is_complete_on_four_plaquettes(four_plaquettes):
    box = build_plaquette_operator(four_plaquettes, 1, completion="none").matrix
    phys = physical_indices(four_plaquettes)
    listed = {}
    for fin, ini, v in golden.PLAQUETTE_TABLE:
        listed[(fin, ini)] = float(v)
        listed[(ini, fin)] = float(v)
    for i, f in itertools.product(phys, repeat=2):
        ci, cf = _codes_of(int(i), four_plaquettes, False), _codes_of(int(f), four_plaquettes, False)
        key = (cf[0:5], ci[0:5])
        same_rest = ci[5:] == cf[5:]
        expected = listed.get(key, 0.0) if same_rest else 0.0
        assert box[f, i] == pytest.approx(expected, abs=1e-12)


def test_element_zero_unless_all_active_links_move():
    assert plaquette_matrix_element(0, 0, 0, 0, 0, H, 0, H, 0, 0, 0, H) == 0.0


def test_transition_element_accepts_halfint_states(two_plaquettes):
    a = plaquette_transition_element(two_plaquettes, 1, (0, 1, 1, 1), (0, 0, 0, 0))
    b = plaquette_transition_element(two_plaquettes, 1, (0, H, H, H), (0, 0, 0, 0))
    assert a == b == pytest.approx(1.0)


@pytest.mark.parametrize("lam, p", [(1, 0), (2, 0), (2, 1), (3, 1)])
def test_element_symmetric_in_initial_and_final(lam, p):
    spec = LatticeSpec(2, truncation=HalfInt(lam), identify_top_bottom=False)
    box = build_plaquette_operator(spec, p).matrix
    assert np.count_nonzero(box) > 0
    assert np.allclose(box, box.T, atol=1e-12)


# -- plaquette operator ---------------------------------------------------


def test_two_plaquette_operator_is_controlled_xxx(two_plaquettes):
    # plaquette centred on register 2, controlled by register 0
    ref = np.kron(P0, np.kron(X, np.kron(X, X))) + 0.25 * np.kron(P1, np.kron(X, np.kron(X, X)))
    op = build_plaquette_operator(two_plaquettes, 1).matrix
    assert np.allclose(op, ref, atol=1e-14)


def test_plaquette_symmetric_and_gauge_invariant(four_plaquettes):
    P = physical_projector(four_plaquettes)
    for p in range(4):
        op = build_plaquette_operator(four_plaquettes, p)
        assert np.allclose(op.matrix, op.matrix.T)
        assert op.commutator_norm(P) < 1e-12


def test_incompatible_specs_rejected():
    with pytest.raises(ValueError):
        build_plaquette_operator(LatticeSpec(3), 0)
    with pytest.raises(ValueError):
        build_plaquette_operator(LatticeSpec(2, truncation=HalfInt(2)), 0)
    with pytest.raises(ValueError):
        build_plaquette_operator(LatticeSpec(2, identify_top_bottom=False), 0, completion="gvc")


# -- Pauli form -----------------------------------------------------------


def test_sector_values(four_plaquettes):
    v = sector_values(four_plaquettes, 1)
    assert v == pytest.approx({(0, 0): 1.0, (0, 1): 0.5, (1, 0): 0.5, (1, 1): 0.25})


def test_gvc_has_four_projector_terms(four_plaquettes):
    terms = gvc_pauli_decomposition(four_plaquettes, 1, local=True)
    assert sorted(t.coefficient for t in terms) == pytest.approx([0.25, 0.5, 0.5, 1.0], abs=1e-15)
    for t in terms:
        letters = dict(t.factors)
        assert [letters[k] for k in (1, 2, 3)] == ["X", "X", "X"]
        assert {letters[0], letters[4]} <= {"P0", "P1"}


def test_gvc_coupling_counts(four_plaquettes):
    m = pauli_terms_to_matrix(gvc_pauli_decomposition(four_plaquettes, 1, local=True), 5).real
    nz = np.argwhere(np.abs(m) > 1e-14)
    phys = [_local_phys(int(r)) for r in range(32)]
    unphys_pairs = sum(1 for r, c in nz if not phys[r] and not phys[c])
    mixing = sum(1 for r, c in nz if phys[r] != phys[c])
    assert unphys_pairs == 24
    assert mixing == 0


def test_gvc_matches_physical_block(four_plaquettes):
    full = pauli_terms_to_matrix(gvc_pauli_decomposition(four_plaquettes, 1), 8).real
    box = build_plaquette_operator(four_plaquettes, 1, completion="none").matrix
    phys = physical_indices(four_plaquettes)
    assert np.allclose(full[np.ix_(phys, phys)], box[np.ix_(phys, phys)], atol=1e-14)


def test_projector_expansion_preserves_matrix(four_plaquettes):
    terms = gvc_pauli_decomposition(four_plaquettes, 1, local=True)
    expanded = expand_projectors(terms)
    assert all(l in "XYZI" for t in expanded for _, l in t.factors)
    assert np.allclose(pauli_terms_to_matrix(terms, 5), pauli_terms_to_matrix(expanded, 5))
    # Z_l, Z_l Z_r, Z_r and the bare XXX string
    assert len(expanded) == 4


def test_pauli_term_validation():
    with pytest.raises(ValueError):
        PauliTerm(1.0, ((0, "X"), (0, "Z")))
    with pytest.raises(ValueError):
        PauliTerm(1.0, ((0, "Q"),))


# -- beta -------------------------------------------------------------------


def test_beta_examples():
    assert solve_beta([1, 0.5, 0.5, 0.25]) == pytest.approx([3 / 16, 1 / 16, 3 / 16, 9 / 16], abs=1e-15)
    assert solve_beta([1, 1, 1, 1]) == pytest.approx([0, 0, 0, 1], abs=1e-15)
    assert solve_beta([1, 0.25], REDUCED_SECTOR_MATRIX) == pytest.approx([3 / 8, 5 / 8], abs=1e-15)


def test_beta_from_lattice(two_plaquettes, four_plaquettes):
    assert plaquette_beta(two_plaquettes, 0) == pytest.approx([3 / 8, 5 / 8])
    assert plaquette_beta(four_plaquettes, 2) == pytest.approx([3 / 16, 1 / 16, 3 / 16, 9 / 16])


def test_sector_matrix_is_orthogonal_up_to_four():
    assert np.allclose(SECTOR_MATRIX.T @ SECTOR_MATRIX, 4 * np.eye(4))


def test_singular_sector_matrix():
    with pytest.raises(np.linalg.LinAlgError):
        solve_beta([1, 1], [[1, 1], [1, 1]])


@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_beta_roundtrip(v):
    assert np.allclose(SECTOR_MATRIX @ solve_beta(v), v, atol=1e-14, rtol=0)


# -- Hamiltonian ------------------------------------------------------------


@pytest.mark.parametrize("g2", [golden.G_SQUARED, 1.0, 3.7])
def test_full_hamiltonian_matches_reference(two_plaquettes, g2):
    H_ = build_full_hamiltonian(two_plaquettes, g2).matrix
    assert np.max(np.abs(H_ - golden.reference_hamiltonian(g2))) < 1e-12


def test_hamiltonian_symmetric_and_gauge_invariant(two_plaquettes, four_plaquettes):
    for spec in (two_plaquettes, four_plaquettes):
        H_ = build_full_hamiltonian(spec, 0.7)
        assert H_.is_hermitian()
        assert H_.commutator_norm(physical_projector(spec)) < 1e-12


def test_electric_hamiltonian(two_plaquettes):
    E = build_electric_hamiltonian(two_plaquettes, 0.2).diagonal()
    assert E[0] == 0.0
    phys = set(physical_indices(two_plaquettes))
    assert sum(1 for i in range(16) if i not in phys and E[i] != 0) == 12


def test_plaquette_one_observable(two_plaquettes):
    g2 = 0.2
    d = electric_observable_plaquette1(two_plaquettes, g2).diagonal()
    ref = [float(x) for x in golden.PLAQUETTE1_ELECTRIC_DIAGONAL]
    assert d == pytest.approx([0.5 * g2 * x for x in ref], abs=1e-15)
    assert d[15] == pytest.approx(0.5 * g2 * 3)


def test_magnetic_scaling(two_plaquettes):
    a = build_magnetic_hamiltonian(two_plaquettes, 0.5).matrix
    b = build_magnetic_hamiltonian(two_plaquettes, 1.0).matrix
    assert np.allclose(a, 2 * b)


def test_triplet_roundtrip(tmp_path, two_plaquettes):
    op = build_full_hamiltonian(two_plaquettes, 0.2)
    path = tmp_path / "h.txt"
    write_triplets(op, path)
    assert path.read_text().startswith("# dimension 16")
    assert np.array_equal(read_triplets(path), op.matrix)


def test_triplets_reject_complex():
    with pytest.raises(ValueError):
        OperatorMatrix(np.array([[0, 1j], [-1j, 0]])).to_triplets()
