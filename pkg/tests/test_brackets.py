import numpy as np
import pytest

from sunflows import brackets, liecore, observables as ob
from sunflows.errors import NotClassFunction
from sunflows.spaces import (
    double_space,
    moduli_space,
    random_cotangent_point,
    random_heisenberg_point,
)


def test_class_gradient_vanishes_for_linear_trace_at_identity():
    # tr(Z) = 0 on the algebra, so the gradient of Re tr at e is zero
    fn = ob.PowerTrace(1)
    assert np.linalg.norm(fn.grad(np.eye(2, dtype=complex))) < 1e-14


@pytest.mark.parametrize("k", [1, 2, 3])
def test_power_trace_gradient_matches_fd(k):
    rng = np.random.default_rng(k)
    g = liecore.random_group_element(3, rng)
    fn = ob.PowerTrace(k)
    fd = brackets.group_gradient_fd(fn.value, g)
    assert np.linalg.norm(fn.grad(g) - fd) <= 1e-6


def test_class_gradient_equivariance():
    rng = np.random.default_rng(9)
    g = liecore.random_group_element(3, rng)
    eta = liecore.random_group_element(3, rng)
    datum = liecore.build_root_datum(3)
    for fn in (ob.PowerTrace(2), ob.AlcoveCoroot(0, datum), ob.AlcoveCoweight(1, datum)):
        lhs = fn.grad(eta @ g @ eta.conj().T)
        rhs = eta @ fn.grad(g) @ eta.conj().T
        assert np.linalg.norm(lhs - rhs) <= 1e-8


def test_alcove_gradient_on_torus_matches_paper_normal_form():
    # at a point of the exponentiated alcove the coroot gradient is -i h_j
    datum = liecore.build_root_datum(2)
    a = 0.9
    g = np.diag(np.exp(1j * np.array([a, -a])))
    assert np.linalg.norm(ob.AlcoveCoroot(0, datum).grad(g) + 1j * datum.coroots[0]) < 1e-12


def test_nabla_class_function_rejects_non_class_functions():
    with pytest.raises(NotClassFunction):
        ob.nabla_class_function(lambda g: 0.0, np.eye(2, dtype=complex))


def test_heisenberg_derivatives_constant_and_symmetric():
    x = random_heisenberg_point(2, np.random.default_rng(3))
    df, dpf = brackets.heisenberg_derivatives(lambda p: 1.0, x)
    assert np.linalg.norm(df) < 1e-12 and np.linalg.norm(dpf) < 1e-12
    # F = Re tr(X X^H) at the identity has equal left and right derivatives
    from sunflows.spaces import HeisenbergPoint
    e = HeisenbergPoint(np.eye(2, dtype=complex))
    obs = ob.word_observable(("x", "xh"))
    df, dpf = brackets.heisenberg_derivatives(obs, e)
    assert np.linalg.norm(df - dpf) < 1e-9


def test_heisenberg_derivatives_defining_property():
    # im-pair(Z1, DF) + im-pair(Z2, D'F) = d/dt F(exp(tZ1) X exp(tZ2))
    import scipy.linalg
    rng = np.random.default_rng(5)
    x = random_heisenberg_point(2, rng)
    obs = ob.word_observable(("x", "x", "xh"))
    df, dpf = brackets.heisenberg_derivatives(obs, x)
    for _ in range(3):
        z1 = sum(rng.standard_normal() * b for b in liecore.sl_real_basis(2))
        z2 = sum(rng.standard_normal() * b for b in liecore.sl_real_basis(2))
        lhs = liecore.pair(z1, df, liecore.IM_FORM) + liecore.pair(z2, dpf, liecore.IM_FORM)

        def curve(t):
            from sunflows.spaces import HeisenbergPoint
            return obs(HeisenbergPoint(scipy.linalg.expm(t * z1) @ x.x @ scipy.linalg.expm(t * z2)))

        fd = brackets._central([curve(k * 1e-3) for k in (-2, -1, 1, 2)], 1e-3, "central-4")
        assert abs(lhs - fd) < 1e-7


def test_derivative_linearity():
    rng = np.random.default_rng(6)
    x = random_heisenberg_point(2, rng)
    f1 = ob.word_observable(("x",))
    f2 = ob.word_observable(("x", "xh"))
    combo = lambda p: 2.0 * f1(p) - 0.7 * f2(p)
    d1 = brackets.heisenberg_derivatives(f1, x)
    d2 = brackets.heisenberg_derivatives(f2, x)
    dc = brackets.heisenberg_derivatives(combo, x)
    assert np.linalg.norm(dc[0] - (2.0 * d1[0] - 0.7 * d2[0])) < 1e-9
    assert np.linalg.norm(dc[1] - (2.0 * d1[1] - 0.7 * d2[1])) < 1e-9


def _antisymmetry_and_leibniz(bracket, x, f, g, h):
    assert abs(bracket(f, f, x)) <= 1e-10
    lhs = bracket(f, ob.observable_product(g, h), x)
    rhs = g(x) * bracket(f, h, x) + h(x) * bracket(f, g, x)
    assert abs(lhs - rhs) <= 1e-6
    assert abs(bracket(f, g, x) + bracket(g, f, x)) <= 1e-9


def test_cotangent_bracket_axioms():
    rng = np.random.default_rng(7)
    x = random_cotangent_point(2, rng)
    f = ob.word_observable(("g", "j"))
    g = ob.word_observable(("g",))
    h = ob.word_observable(("j", "j"))
    _antisymmetry_and_leibniz(brackets.cotangent_bracket, x, f, g, h)


def test_heisenberg_bracket_axioms():
    rng = np.random.default_rng(8)
    x = random_heisenberg_point(2, rng)
    f = ob.word_observable(("x", "xh"))
    g = ob.word_observable(("x",))
    h = ob.word_observable(("x", "x", "xh"), part="im")
    _antisymmetry_and_leibniz(brackets.heisenberg_bracket, x, f, g, h)


def test_fusion_bracket_axioms():
    rng = np.random.default_rng(9)
    x = double_space(2).random_point(rng)
    f = ob.word_observable(("a1", "b1"))
    g = ob.word_observable(("a1",))
    h = ob.word_observable(("b1", "a1", "b1"))
    _antisymmetry_and_leibniz(brackets.fusion_bracket, x, f, g, h)


def test_cotangent_fiber_family_is_abelian():
    rng = np.random.default_rng(10)
    datum = liecore.build_root_datum(3)
    worst = 0.0
    for _ in range(3):
        x = random_cotangent_point(3, rng)
        f = lambda p: ob.AlgebraPower(2).value(p.j)
        h = lambda p: ob.AlgebraPower(3).value(p.j)
        worst = max(worst, abs(brackets.cotangent_bracket(f, h, x)))
    assert worst <= 1e-8


def test_double_bracket_equals_flow_derivative_on_word():
    from sunflows import flows
    rng = np.random.default_rng(11)
    x = double_space(2).random_point(rng)
    ham = ob.PowerTrace(2)
    h_obs = lambda p: ham.value(p.pair(1)[0])
    word = ob.word_observable(("b1", "a1", "b1", "a1~"))
    bk = brackets.fusion_bracket(word, h_obs, x)
    d_flow = brackets.directional_derivative(word, lambda t: flows.double_flow(x, ham, t, "first"))
    assert abs(d_flow - bk) <= 1e-6 * (1 + abs(bk))


def test_momentum_condition_identity_map():
    rng = np.random.default_rng(12)
    x = moduli_space(0, 1, 2).random_point(rng)
    f = ob.word_observable(("c1", "c1"))
    for kfn in (lambda g: float(np.trace(g).real),
                lambda g: float(np.trace(g @ g).imag)):
        assert brackets.momentum_condition_residual(f, kfn, x) <= 1e-6
    assert brackets.momentum_condition_residual(f, lambda g: 3.0, x) <= 1e-12


def test_momentum_condition_double():
    rng = np.random.default_rng(13)
    x = double_space(2).random_point(rng)
    f = ob.word_observable(("a1", "b1"))
    kfn = lambda g: float(np.trace(g).real)
    assert brackets.momentum_condition_residual(f, kfn, x) <= 1e-6


def test_invariant_brackets_are_invariant():
    rng = np.random.default_rng(14)
    datum = liecore.build_root_datum(2)
    x = double_space(2).random_point(rng)
    eta = liecore.random_group_element(2, rng)
    f = lambda p: ob.PowerTrace(2).value(p.pair(1)[0])
    h = lambda p: ob.PowerTrace(1).value(p.pair(1)[0] @ p.pair(1)[1])
    v1 = brackets.fusion_bracket(f, h, x)
    v2 = brackets.fusion_bracket(f, h, x.conjugate(eta))
    assert abs(v1 - v2) <= 1e-8


def test_batched_brackets_match_pairwise():
    rng = np.random.default_rng(15)
    x = random_cotangent_point(2, rng)
    obs = [ob.word_observable(("g", "j")), ob.word_observable(("g",))]
    ham = ob.word_observable(("j", "j"))
    batch = brackets.cotangent_brackets_against(obs, ham, x)
    single = [brackets.cotangent_bracket(o, ham, x) for o in obs]
    assert np.allclose(batch, single, atol=1e-12)
    xh = random_heisenberg_point(2, rng)
    obs = [ob.word_observable(("x",)), ob.word_observable(("x", "xh"))]
    ham = ob.word_observable(("x", "x", "xh"))
    batch = brackets.heisenberg_brackets_against(obs, ham, xh)
    single = [brackets.heisenberg_bracket(o, ham, xh) for o in obs]
    assert np.allclose(batch, single, atol=1e-12)


def test_richardson_extrapolation_refines_derivative():
    rng = np.random.default_rng(16)
    x = random_cotangent_point(2, rng)
    obs = ob.word_observable(("g", "j"))
    ham = ob.AlgebraPower(2)
    from sunflows import flows
    curve = lambda t: flows.cotangent_flow(x, ham, t)
    plain = brackets.directional_derivative(obs, curve)
    refined = brackets.directional_derivative(
        obs, curve, brackets.DiffConfig(richardson=True))
    exact = brackets.cotangent_bracket(obs, lambda p: ham.value(p.j), x)
    assert abs(refined - exact) <= abs(plain - exact) + 1e-12
