import numpy as np
import pytest

from sunflows import decomp, liecore, probes
from sunflows.errors import RegularityViolation, ShapeError, Unsupported
from sunflows.spaces import double_space, moduli_point


def test_conjugation_stabilizer_of_regular_torus_point():
    # the diagonal torus fixes a regular diagonal element: kernel dim = rank
    n = 2
    g = np.diag([np.exp(0.7j), np.exp(-0.7j)])
    x = moduli_point(double_space(n), [(g, g)], [])

    # conjugation action on a single group letter through the fusion wrapper
    action = probes.conjugation_action(x, n)
    rep = probes.stabilizer_dimension(x, action, n, "diag-double")
    assert rep.infinitesimal_dim == 1
    assert rep.center_fixes


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("key", probes.PRINCIPAL_POINT_KEYS)
def test_crafted_points_have_trivial_combined_stabilizer(key, n):
    datum = liecore.build_root_datum(n)
    rng = np.random.default_rng(hash((key, n)) % (2**32))
    pp = probes.principal_test_point(key, n, datum, rng)
    rep = probes.stabilizer_dimension(pp.point, pp.action, n, key)
    assert rep.infinitesimal_dim == 0, (key, rep.singular_values)
    assert rep.center_fixes
    assert rep.singular_values.min() > 1e-3


def test_unknown_crafted_key():
    with pytest.raises(Unsupported):
        probes.principal_test_point("no-such-point", 2, liecore.build_root_datum(2),
                                    np.random.default_rng(0))


def test_commutator_identity_small_cases():
    # rank-one case: the Coxeter element negates, so the preimage is -h/2
    h = np.array([0.8, -0.8])
    assert probes.commutator_identity_residual(h, 2) <= 1e-12
    assert probes.commutator_identity_residual(np.zeros(3), 3) <= 1e-14
    with pytest.raises(ShapeError):
        probes.commutator_identity_residual(np.array([1.0, 1.0]), 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_commutator_identity_random(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        h = rng.uniform(-2.5, 2.5, n)
        h -= h.mean()
        assert probes.commutator_identity_residual(h, n) <= 1e-10


def test_commutator_solve_values():
    # the zero target gives a commuting pair
    a, b = probes.commutator_solve(np.zeros(3), 3)
    assert np.linalg.norm(a @ b - b @ a) <= 1e-12
    # rank one: the diagonal solution is exp(-i xi / 2)
    xi = np.array([0.9, -0.9])
    a, b = probes.commutator_solve(xi, 2)
    assert np.allclose(b, np.diag(np.exp(-1j * xi / 2)))
    comm = a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)
    assert np.linalg.norm(comm - np.diag(np.exp(1j * xi))) <= 1e-10


@pytest.mark.parametrize("n", [2, 4])
def test_commutator_solve_random_targets(n):
    rng = np.random.default_rng(n + 10)
    for _ in range(5):
        xi = probes.alcove_interior(n, rng)
        for a, b in (probes.commutator_solve(xi, n),
                     probes.solve_commutator_in_torus(xi, n)):
            comm = a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)
            assert np.linalg.norm(comm - np.diag(np.exp(1j * xi))) <= 1e-10


def test_alcove_interior_has_margins():
    rng = np.random.default_rng(3)
    for n in (2, 3, 5):
        xi = probes.alcove_interior(n, rng)
        assert abs(xi.sum()) < 1e-12
        assert np.min(xi[:-1] - xi[1:]) >= 0.2
        assert xi[0] - xi[-1] < 2 * np.pi - 0.2


def test_rank_report_at_crafted_points():
    n = 2
    datum = liecore.build_root_datum(n)
    rng = np.random.default_rng(5)
    pp = probes.principal_test_point("double-first-family", n, datum, rng)
    rep = probes.ieq_rank_check(pp, n)
    assert rep.generator_rank == rep.generator_expected == datum.rank
    # symmetry orbit rank at a principal point: dim K minus center (= dim K here)
    assert rep.symmetry_orbit_rank == n * n - 1

    pp = probes.principal_test_point("cotangent-compact-torus", 3,
                                     liecore.build_root_datum(3),
                                     np.random.default_rng(6))
    rep = probes.ieq_rank_check(pp, 3)
    assert rep.generator_rank == 2

    pp = probes.principal_test_point("sphere-adjoint-torus", n, datum, rng)
    rep = probes.ieq_rank_check(pp, n, invariant_probes=[
        lambda p: float(np.trace(p.hole(1)).real),
        lambda p: float(np.trace(p.hole(1) @ p.hole(2)).real),
    ])
    assert rep.generator_rank == rep.generator_expected == datum.rank
    assert rep.differential_rank == datum.rank
    assert rep.invariant_probe_rank >= 1


def test_irregular_argument_raises():
    datum = liecore.build_root_datum(2)
    with pytest.raises(RegularityViolation):
        decomp.grad_alcove_coroot(np.eye(2, dtype=complex), 0, datum)


def test_torus_displacement_at_crafted_points():
    n = 2
    datum = liecore.build_root_datum(n)
    for seed in range(20):
        rng = np.random.default_rng(seed)
        pp = probes.principal_test_point("sphere-adjoint-torus", n, datum, rng)
        tau = rng.uniform(0.1, 2 * np.pi - 0.1, pp.torus_dim)
        torus = probes.ActionSpec("t", pp.action.curves[n * n - 1:], pp.torus_dim)
        moved = torus.curves[0](pp.point, tau[0])
        assert probes.point_distance(moved, pp.point) >= 1e-4
