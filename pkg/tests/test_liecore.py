import numpy as np
import pytest

from sunflows import liecore
from sunflows.errors import DegenerateBasis, InvalidRank, ShapeError


def test_coroot_su2_is_forced():
    datum = liecore.build_root_datum(2)
    assert np.allclose(datum.coroots[0], np.diag([1.0, -1.0]))


def test_coweight_su2_solves_defining_equations():
    # independently: alpha_1(w) = w_1 - w_2 = 1 and w_1 + w_2 = 0 force (1/2, -1/2)
    datum = liecore.build_root_datum(2)
    w = np.real(np.diag(datum.coweights[0]))
    assert abs((w[0] - w[1]) - 1.0) < 1e-15
    assert abs(w.sum()) < 1e-15
    assert np.allclose(w, [0.5, -0.5])


def test_q_matrix_su3_frozen():
    from fractions import Fraction
    datum = liecore.build_root_datum(3)
    assert datum.q_exact == (
        (Fraction(2, 3), Fraction(1, 3)),
        (Fraction(1, 3), Fraction(2, 3)),
    )


@pytest.mark.parametrize("n", range(2, 9))
def test_q_inverts_transposed_cartan_exactly(n):
    datum = liecore.build_root_datum(n)
    r = datum.rank
    for j in range(r):
        for l in range(r):
            s = sum(datum.q_exact[j][k] * int(datum.cartan[k][l]) for k in range(r))
            assert s == (1 if j == l else 0)


@pytest.mark.parametrize("n", range(2, 9))
def test_coweights_dual_to_simple_roots(n):
    datum = liecore.build_root_datum(n)
    for j, w in enumerate(datum.coweights):
        vals = datum.simple_root_values(np.real(np.diag(w)))
        expect = np.eye(datum.rank)[j]
        assert np.array_equal(vals, expect) or np.max(np.abs(vals - expect)) == 0.0


def test_coweights_expand_over_coroots():
    datum = liecore.build_root_datum(4)
    for j, w in enumerate(datum.coweights):
        recon = sum(float(datum.q_exact[j][k]) * datum.coroots[k]
                    for k in range(datum.rank))
        assert np.allclose(recon, w, atol=1e-14)


def test_build_root_datum_rejects_small_rank():
    with pytest.raises(InvalidRank):
        liecore.build_root_datum(1)


def test_trace_pairing_of_coroot():
    datum = liecore.build_root_datum(2)
    assert liecore.pair(datum.coroots[0], datum.coroots[0]) == pytest.approx(2.0)


def test_pairing_symmetry_and_shape_error():
    rng = np.random.default_rng(0)
    x = liecore.random_algebra_element(3, rng)
    y = liecore.random_algebra_element(3, rng)
    assert liecore.pair(x, y) == pytest.approx(liecore.pair(y, x), abs=1e-14)
    with pytest.raises(ShapeError):
        liecore.pair(x, np.eye(2, dtype=complex))


def test_im_pairing_vanishes_on_real_trace():
    # anti-Hermitian arguments have real product trace
    rng = np.random.default_rng(1)
    z = liecore.random_algebra_element(3, rng)
    assert liecore.pair(z, z, liecore.IM_FORM) == pytest.approx(0.0, abs=1e-14)


def test_dual_of_negative_orthonormal_basis_is_negated():
    # su(2) basis scaled so each vector has trace-form square -1
    basis = [b / np.sqrt(abs(liecore.pair(b, b))) for b in liecore.su_basis(2)]
    dual = liecore.dual_basis(basis)
    for b, d in zip(basis, dual):
        assert np.allclose(d, -b, atol=1e-12)


def test_dual_basis_delta_property_all_bases():
    for n, pairing, basis in [
        (2, liecore.TRACE_FORM, liecore.su_basis(2)),
        (3, liecore.TRACE_FORM, liecore.su_basis(3)),
        (2, liecore.IM_FORM, liecore.sl_real_basis(2)),
    ]:
        dual = liecore.dual_basis(basis, pairing)
        for a in range(len(basis)):
            for b in range(len(basis)):
                v = liecore.pair(basis[a], dual[b], pairing)
                assert abs(v - (1.0 if a == b else 0.0)) < 1e-12


def test_realified_duals_reproduce_expansions():
    # an arbitrary realified element is recovered from its im-form coefficients
    rng = np.random.default_rng(2)
    basis = liecore.sl_real_basis(2)
    dual = liecore.dual_basis(basis, liecore.IM_FORM)
    z = sum(rng.standard_normal() * b for b in basis)
    recon = sum(liecore.pair(z, dual[a], liecore.IM_FORM) * basis[a]
                for a in range(len(basis)))
    assert np.linalg.norm(recon - z) < 1e-12


def test_dual_basis_rejects_degenerate_span():
    basis = liecore.su_basis(2)
    with pytest.raises(DegenerateBasis):
        liecore.dual_basis([basis[0], basis[0]])


def test_special_elements_su2_frozen():
    spec = liecore.special_elements(2)
    assert np.allclose(spec.coxeter_rep, np.array([[0.0, -1.0], [1.0, 0.0]]))
    # conjugation flips the coroot direction
    h = np.diag([1.0, -1.0]).astype(complex)
    flipped = spec.coxeter_rep @ h @ spec.coxeter_rep.conj().T
    assert np.allclose(flipped, -h)
    assert np.allclose(spec.principal, np.diag([1j, -1j]))
    assert spec.coxeter_number == 2
    assert np.allclose(spec.rho_coweight, np.diag([0.5, -0.5]))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_special_elements_invariants(n):
    spec = liecore.special_elements(n)
    assert liecore.is_special_unitary(spec.coxeter_rep)
    assert liecore.is_special_unitary(spec.principal)
    assert liecore.is_special_unitary(spec.apposition_conjugator, tol=1e-9)
    # the Coxeter representative normalizes the diagonal torus
    d = np.diag(np.arange(n, dtype=float)) + 0j
    d -= np.trace(d) / n * np.eye(n)
    conj = spec.coxeter_rep @ d @ spec.coxeter_rep.conj().T
    assert np.linalg.norm(conj - np.diag(np.diag(conj))) < 1e-12
    assert np.allclose(np.sort(np.real(np.diag(conj))), np.sort(np.real(np.diag(d))))
    # the principal element is a regular torus element
    phases = np.angle(np.diag(spec.principal))
    assert len(np.unique(np.round(phases, 9))) == n
    # center elements commute with everything
    rng = np.random.default_rng(n)
    g = liecore.random_group_element(n, rng)
    for z in spec.center:
        assert np.linalg.norm(z @ g @ z.conj().T - g) < 1e-13


@pytest.mark.parametrize("n", [2, 3, 4])
def test_torus_algebras_orthogonal(n):
    spec = liecore.special_elements(n)
    for j in range(n - 1):
        d1 = np.zeros(n)
        d1[j], d1[j + 1] = 1.0, -1.0
        for k in range(n - 1):
            d2 = np.zeros(n)
            d2[k], d2[k + 1] = 1.0, -1.0
            t2 = liecore.apposition_algebra_element(d2, spec)
            assert abs(liecore.pair(1j * np.diag(d1), t2)) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_torus_intersection_is_center(n):
    # sampled pairs of torus elements that coincide must be central
    spec = liecore.special_elements(n)
    rng = np.random.default_rng(n * 11)
    for _ in range(200):
        t = liecore.diagonal_torus_element(rng.uniform(0, 2 * np.pi, n))
        tp = liecore.apposition_torus_element(rng.uniform(0, 2 * np.pi, n), spec)
        if np.linalg.norm(t - tp) <= 1e-8:
            assert min(np.linalg.norm(t - z) for z in spec.center) <= 1e-8


def test_center_elements_fix_points_under_conjugation():
    spec = liecore.special_elements(3)
    rng = np.random.default_rng(5)
    g = liecore.random_group_element(3, rng)
    for z in spec.center:
        assert np.linalg.norm(z @ g @ np.linalg.inv(z) - g) < 1e-13


def test_projections_split_realified_algebra():
    rng = np.random.default_rng(4)
    n = 3
    z = np.zeros((n, n), dtype=complex)
    for b in liecore.sl_real_basis(n):
        z += rng.standard_normal() * b
    k_part = liecore.project_compact(z)
    b_part = liecore.project_borel(z)
    assert np.linalg.norm(k_part + b_part - z) < 1e-13
    assert liecore.is_algebra_element(k_part, tol=1e-10)
    assert np.linalg.norm(np.tril(b_part, -1)) < 1e-13
    assert np.linalg.norm(np.imag(np.diag(b_part))) < 1e-13


def test_random_elements_land_in_their_sets():
    rng = np.random.default_rng(6)
    g = liecore.random_group_element(4, rng)
    assert liecore.is_special_unitary(g, tol=1e-9)
    z = liecore.random_algebra_element(4, rng)
    assert liecore.is_algebra_element(z)
    x = liecore.random_sl_element(4, rng)
    assert abs(np.linalg.det(x) - 1.0) < 1e-9


@pytest.mark.parametrize("n", range(2, 9))
def test_exact_coweights_solve_defining_equations(n):
    from fractions import Fraction
    datum = liecore.build_root_datum(n)
    for j, w in enumerate(datum.coweights_exact):
        assert sum(w) == 0
        for k in range(datum.rank):
            assert w[k] - w[k + 1] == (1 if k == j else 0)
        assert np.allclose([float(v) for v in w], np.real(np.diag(datum.coweights[j])))
