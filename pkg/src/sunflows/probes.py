"""Numerical probes for the reduction structure.

Infinitesimal stabilizers are measured as kernels of the generator matrix of
an action at a point, crafted points realize the principal-isotropy
constructions (torus pairs in apposition, Coxeter representatives, torus
commutator solutions), and rank checks compare generator spans against the
differentials of the action variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import decomp, flows, liecore, moduli
from .errors import ShapeError, Unsupported
from .liecore import RootDatum, special_elements, su_basis
from .observables import AlcoveCoweight
from .spaces import (
    CotangentPoint,
    FusionPoint,
    FusionSpace,
    HeisenbergPoint,
    double_space,
    moduli_space,
    quasi_adjoint,
    sphere_space,
)

SVD_KERNEL_TOL = 1e-7
_FD_STEP = 1e-3
_FD_WEIGHTS = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))


def point_flat(x) -> np.ndarray:
    if isinstance(x, CotangentPoint):
        return np.concatenate([x.g.real.ravel(), x.g.imag.ravel(),
                               x.j.real.ravel(), x.j.imag.ravel()])
    if isinstance(x, HeisenbergPoint):
        return np.concatenate([x.x.real.ravel(), x.x.imag.ravel()])
    if isinstance(x, FusionPoint):
        return x.flat()
    raise ShapeError(f"cannot flatten {type(x).__name__}")


def point_distance(x, y) -> float:
    return float(np.linalg.norm(point_flat(x) - point_flat(y)))


@dataclass(frozen=True)
class ActionSpec:
    """A group action at probe granularity: named one-parameter curves."""

    name: str
    curves: tuple
    group_dim: int


def conjugation_action(x, n: int) -> ActionSpec:
    """Symmetry-group action appropriate to the point's space."""
    basis = su_basis(n)

    def make(z):
        if isinstance(x, HeisenbergPoint):
            return lambda p, t: quasi_adjoint(scipy.linalg.expm(t * z), p)
        return lambda p, t: p.conjugate(scipy.linalg.expm(t * z))

    return ActionSpec("symmetry", tuple(make(z) for z in basis), len(basis))


def combine(*specs: ActionSpec) -> ActionSpec:
    curves = tuple(c for s in specs for c in s.curves)
    return ActionSpec("+".join(s.name for s in specs), curves, sum(s.group_dim for s in specs))


def generator_matrix(x, action: ActionSpec, h: float = _FD_STEP) -> np.ndarray:
    """Columns are the generating tangent vectors of the action at x."""
    cols = []
    for curve in action.curves:
        acc = np.zeros_like(point_flat(x))
        for k, w in _FD_WEIGHTS:
            acc = acc + w * point_flat(curve(x, k * h))
        cols.append(acc / (12 * h))
    return np.stack(cols, axis=1)


@dataclass
class StabilizerReport:
    point_id: str
    infinitesimal_dim: int
    center_fixes: bool
    singular_values: np.ndarray = field(repr=False)


def stabilizer_dimension(x, action: ActionSpec, n: int, point_id: str = "",
                         tol: float = SVD_KERNEL_TOL) -> StabilizerReport:
    """Kernel dimension of the infinitesimal action at x, plus center check."""
    mat = generator_matrix(x, action)
    svals = np.linalg.svd(mat, compute_uv=False)
    dim = int(np.sum(svals < tol)) + max(0, action.group_dim - len(svals))
    spec = special_elements(n)
    center_ok = True
    for zeta in spec.center:
        if isinstance(x, HeisenbergPoint):
            moved = quasi_adjoint(zeta, x)
        else:
            moved = x.conjugate(zeta)
        if point_distance(x, moved) > 1e-8:
            center_ok = False
    return StabilizerReport(point_id, dim, center_ok, svals)


# ---------------------------------------------------------------------------
# Coxeter commutator identity and torus commutator solutions
# ---------------------------------------------------------------------------

def _shift_matrix(n: int) -> np.ndarray:
    s = np.zeros((n, n))
    for j in range(n):
        s[(j + 1) % n, j] = 1.0
    return s


def _solve_coxeter(h: np.ndarray, sign: int) -> np.ndarray:
    """Traceless solution x of (sign*(w - id)) x = h for the cyclic Coxeter w."""
    n = h.size
    m = sign * (_shift_matrix(n) - np.eye(n))
    x, *_ = np.linalg.lstsq(m, h, rcond=None)
    return x - x.mean()


def periodicity_residual(x, flow_fn, period: float = 2 * np.pi) -> float:
    """Distance between a point and its image after one full flow period."""
    return point_distance(flow_fn(x, period), x)


def commutator_identity_residual(h: np.ndarray, n: int) -> float:
    """Defect of the Coxeter commutator identity on the diagonal torus.

    With g the Coxeter representative and x the preimage of h under
    (coxeter - id), the commutator of g and exp(i diag(x)) must reproduce
    exp(i diag(h)).
    """
    h = np.asarray(h, dtype=float)
    if h.size != n or abs(h.sum()) > 1e-9 * (1 + np.abs(h).max()):
        raise ShapeError("argument must be a traceless real diagonal vector")
    spec = special_elements(n)
    g = spec.coxeter_rep
    x = _solve_coxeter(h, +1)
    b = np.diag(np.exp(1j * x))
    lhs = g @ b @ g.conj().T @ b.conj().T
    return float(np.linalg.norm(lhs - np.diag(np.exp(1j * h))))


def commutator_solve(xi: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(A, B) with [A, B] = exp(i diag(xi)): A the Coxeter representative."""
    xi = np.asarray(xi, dtype=float)
    spec = special_elements(n)
    x = _solve_coxeter(xi, +1)
    return spec.coxeter_rep, np.diag(np.exp(1j * x))


def solve_commutator_in_torus(xi: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(A, B) with [A, B] = exp(i diag(xi)), A in the diagonal torus, B Coxeter."""
    xi = np.asarray(xi, dtype=float)
    spec = special_elements(n)
    x = _solve_coxeter(xi, -1)
    return np.diag(np.exp(1j * x)), spec.coxeter_rep


# ---------------------------------------------------------------------------
# crafted sampling helpers
# ---------------------------------------------------------------------------

def alcove_interior(n: int, rng: np.random.Generator, margin: float = 0.2) -> np.ndarray:
    """Random point of the open alcove with wall margins at least ``margin``."""
    gaps = margin + rng.uniform(0.2, 0.8, size=n - 1)
    total = gaps.sum()
    limit = 2 * np.pi - margin
    if total > limit:
        gaps *= limit / total * 0.95
    xi = np.concatenate([[0.0], -np.cumsum(gaps)])
    return xi - xi.mean()


def alcove_torus_point(n: int, rng: np.random.Generator, margin: float = 0.2) -> np.ndarray:
    return np.diag(np.exp(1j * alcove_interior(n, rng, margin)))


def apposition_regular_group(n: int, rng: np.random.Generator, margin: float = 0.2) -> np.ndarray:
    spec = special_elements(n)
    return liecore.apposition_torus_element(alcove_interior(n, rng, margin), spec)


def regular_torus_commutator_pair(n: int, rng: np.random.Generator):
    """Torus/Coxeter pair (A, B) with [A, B] in the alcove interior, A regular."""
    for _ in range(64):
        xi = alcove_interior(n, rng)
        a, b = solve_commutator_in_torus(xi, n)
        if decomp.is_regular_group(a, 0.05):
            return a, b
    raise Unsupported("could not sample a regular torus commutator pair")


def apposition_regular_algebra(n: int, rng: np.random.Generator) -> np.ndarray:
    spec = special_elements(n)
    d = np.sort(rng.uniform(-1.5, 1.5, size=n))[::-1]
    while np.min(d[:-1] - d[1:]) < 0.2:
        d = np.sort(rng.uniform(-1.5, 1.5, size=n))[::-1]
    return liecore.apposition_algebra_element(d, spec)


# ---------------------------------------------------------------------------
# crafted principal points
# ---------------------------------------------------------------------------

@dataclass
class PrincipalPoint:
    key: str
    point: object
    action: ActionSpec
    torus_dim: int
    family: list = field(default_factory=list)


def _torus_curves_cotangent(datum, family):
    def make(j):
        e = np.zeros(datum.rank)
        e[j] = 1.0
        return lambda p, t: flows.cotangent_torus_action(p, t * e, family, datum)
    return ActionSpec(f"cotangent-{family}", tuple(make(j) for j in range(datum.rank)), datum.rank)


def _torus_curves_heisenberg(datum, family):
    def make(j):
        e = np.zeros(datum.rank)
        e[j] = 1.0
        return lambda p, t: flows.heisenberg_torus_action(p, t * e, family, datum)
    return ActionSpec(f"heisenberg-{family}", tuple(make(j) for j in range(datum.rank)), datum.rank)


def _torus_curves_double(datum, slot):
    def make(j):
        e = np.zeros(datum.rank)
        e[j] = 1.0
        return lambda p, t: flows.double_torus_action(p, t * e, slot, datum)
    return ActionSpec(f"double-{slot}", tuple(make(j) for j in range(datum.rank)), datum.rank)


def torus_curves_family(datum, hams):
    """One curve per block and rank direction of a word-Hamiltonian family."""
    blocks = []
    for h in hams:
        if h.block not in blocks:
            blocks.append(h.block)

    def make(bi, j):
        def curve(p, t):
            taus = np.zeros((len(blocks), datum.rank))
            taus[bi, j] = t
            return moduli.moduli_torus_action(p, taus, hams, datum)
        return curve

    curves = tuple(make(bi, j) for bi in range(len(blocks)) for j in range(datum.rank))
    return ActionSpec("family-torus", curves, len(blocks) * datum.rank)


PRINCIPAL_POINT_KEYS = (
    "cotangent-compact-torus",
    "cotangent-line-action",
    "heisenberg-compact-torus",
    "heisenberg-line-action",
    "double-first-family",
    "sphere-adjoint-torus",
    "genus2-mixed",
    "genus2-double-adjoint",
    "holed-sphere-intervals",
    "one-handle-intervals",
    "one-handle-commutator",
    "two-handles-with-holes",
    "alternating-blocks",
)


def principal_test_point(key: str, n: int, datum: RootDatum,
                         rng: np.random.Generator) -> PrincipalPoint:
    """Crafted point with principal (centre-only) combined stabilizer.

    Every construction follows the same pattern: one argument is placed in
    the interior of the alcove of the diagonal torus, the complementary data
    live in the apposition torus or are Coxeter representatives, and torus
    commutator solutions arrange the required block values.
    """
    spec = special_elements(n)
    fconj = spec.apposition_conjugator

    def conj_by_f(m):
        return fconj @ m @ fconj.conj().T

    if key == "cotangent-compact-torus":
        # regular torus group part, fiber in the regular apposition algebra
        x = CotangentPoint(alcove_torus_point(n, rng), apposition_regular_algebra(n, rng))
        torus = _torus_curves_cotangent(datum, "chamber")
    elif key == "cotangent-line-action":
        x = CotangentPoint(alcove_torus_point(n, rng), apposition_regular_algebra(n, rng))
        torus = _torus_curves_cotangent(datum, "translate")
    elif key in ("heisenberg-compact-torus", "heisenberg-line-action"):
        g_right = alcove_torus_point(n, rng)
        d = np.sort(rng.uniform(-1.2, 1.2, size=n))[::-1]
        while np.min(d[:-1] - d[1:]) < 0.2:
            d = np.sort(rng.uniform(-1.2, 1.2, size=n))[::-1]
        pos_target = conj_by_f(np.diag(np.exp(d - d.mean())))
        gram = g_right.conj().T @ np.linalg.inv(pos_target) @ g_right
        low = np.linalg.cholesky(gram)
        b_left = scipy.linalg.solve_triangular(low.conj().T, np.eye(n))
        x = HeisenbergPoint(b_left @ g_right.conj().T)
        torus = _torus_curves_heisenberg(
            datum, "dress" if key == "heisenberg-compact-torus" else "translate")
    elif key == "double-first-family":
        a = alcove_torus_point(n, rng)
        b = fconj.copy()
        x = FusionPoint(double_space(n), ((a, b),))
        torus = _torus_curves_double(datum, "first")
    elif key == "sphere-adjoint-torus":
        c2 = apposition_regular_group(n, rng)
        c3 = apposition_regular_group(n, rng)
        c1 = alcove_torus_point(n, rng) @ c2.conj().T
        x = FusionPoint(sphere_space(n), (c1, c2, c3))
        fam = moduli.sphere_family()
        hams = moduli.hamiltonian_family(sphere_space(n), fam, datum)
        torus = torus_curves_family(datum, hams)
        return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus),
                              torus.group_dim, hams)
    elif key in ("genus2-mixed", "genus2-double-adjoint"):
        a1, b1 = regular_torus_commutator_pair(n, rng)
        if key == "genus2-mixed":
            a2 = alcove_torus_point(n, rng)
            b2 = fconj.copy()
            fam = moduli.IntervalFamily(single=(2,), commutators=(1,))
        else:
            a2p, b2p = regular_torus_commutator_pair(n, rng)
            a2, b2 = conj_by_f(a2p), conj_by_f(b2p)
            fam = moduli.IntervalFamily(commutators=(1, 2))
        space = moduli_space(2, 0, n)
        x = FusionPoint(space, ((a1, b1), (a2, b2)))
        hams = moduli.hamiltonian_family(space, fam, datum)
        torus = torus_curves_family(datum, hams)
        return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus),
                              torus.group_dim, hams)
    elif key == "holed-sphere-intervals":
        space = moduli_space(0, 4, n)
        fam = moduli.IntervalFamily(intervals=((1, 2),))
        c2 = apposition_regular_group(n, rng)
        c1 = alcove_torus_point(n, rng) @ c2.conj().T
        c3 = apposition_regular_group(n, rng)
        c4 = apposition_regular_group(n, rng)
        x = FusionPoint(space, (c1, c2, c3, c4))
        hams = moduli.hamiltonian_family(space, fam, datum)
        torus = torus_curves_family(datum, hams)
        return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus),
                              torus.group_dim, hams)
    elif key == "one-handle-intervals":
        space = moduli_space(1, 3, n)
        fam = moduli.IntervalFamily(single=(1,), intervals=((2, 3),))
        a = alcove_torus_point(n, rng)
        b = fconj.copy()
        c3 = apposition_regular_group(n, rng)
        c2 = alcove_torus_point(n, rng) @ c3.conj().T
        c1 = apposition_regular_group(n, rng)
        x = FusionPoint(space, ((a, b), c1, c2, c3))
        hams = moduli.hamiltonian_family(space, fam, datum)
        torus = torus_curves_family(datum, hams)
        return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus),
                              torus.group_dim, hams)
    elif key == "one-handle-commutator":
        space = moduli_space(1, 3, n)
        fam = moduli.IntervalFamily(commutators=(1,), intervals=((2, 3),))
        ap, bp = regular_torus_commutator_pair(n, rng)
        a, b = conj_by_f(ap), conj_by_f(bp)
        c3 = apposition_regular_group(n, rng)
        c2 = alcove_torus_point(n, rng) @ c3.conj().T
        c1 = apposition_regular_group(n, rng)
        x = FusionPoint(space, ((a, b), c1, c2, c3))
        hams = moduli.hamiltonian_family(space, fam, datum)
        torus = torus_curves_family(datum, hams)
        return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus),
                              torus.group_dim, hams)
    elif key == "two-handles-with-holes":
        space = moduli_space(2, 2, n)
        fam = moduli.IntervalFamily(single=(1,), commutators=(2,), intervals=((1, 2),))
        a1 = alcove_torus_point(n, rng)
        b1 = fconj.copy()
        a2p, b2p = regular_torus_commutator_pair(n, rng)
        a2, b2 = conj_by_f(a2p), conj_by_f(b2p)
        c2 = apposition_regular_group(n, rng)
        c1 = alcove_torus_point(n, rng) @ c2.conj().T
        x = FusionPoint(space, ((a1, b1), (a2, b2), c1, c2))
        hams = moduli.hamiltonian_family(space, fam, datum)
        torus = torus_curves_family(datum, hams)
        return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus),
                              torus.group_dim, hams)
    elif key == "alternating-blocks":
        space = FusionSpace(n, ("D", "K", "D", "K"))
        u1 = apposition_regular_group(n, rng)
        v1 = alcove_torus_point(n, rng)
        w1 = (u1 @ v1 @ u1.conj().T @ v1.conj().T).conj().T @ alcove_torus_point(n, rng)
        u2 = apposition_regular_group(n, rng)
        v2 = alcove_torus_point(n, rng)
        w2 = (u2 @ v2 @ u2.conj().T @ v2.conj().T).conj().T @ conj_by_f(alcove_torus_point(n, rng))
        x = FusionPoint(space, ((u1, v1), w1, (u2, v2), w2))
        hams = [
            moduli.WordHamiltonian(("span", 0, 1), AlcoveCoweight(j, datum))
            for j in range(datum.rank)
        ]
        hams += [
            moduli.WordHamiltonian(("span", 2, 3), AlcoveCoweight(j, datum))
            for j in range(datum.rank)
        ]
        torus = torus_curves_family(datum, hams)
        return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus),
                              torus.group_dim, hams)
    else:
        raise Unsupported(f"no crafted point for key {key!r}")

    return PrincipalPoint(key, x, combine(conjugation_action(x, n), torus), torus.group_dim)


# ---------------------------------------------------------------------------
# rank checks
# ---------------------------------------------------------------------------

def tangent_basis_curves(x):
    """Curves spanning the tangent space at x (left translations, fiber shifts)."""
    n = x.n if not isinstance(x, CotangentPoint) else x.n
    basis = su_basis(n)
    curves = []
    if isinstance(x, CotangentPoint):
        for z in basis:
            curves.append(lambda p, t, z=z: CotangentPoint(scipy.linalg.expm(t * z) @ p.g, p.j))
        for z in basis:
            curves.append(lambda p, t, z=z: CotangentPoint(p.g, p.j + t * z))
    elif isinstance(x, HeisenbergPoint):
        for z in liecore.sl_real_basis(n):
            curves.append(lambda p, t, z=z: HeisenbergPoint(scipy.linalg.expm(t * z) @ p.x))
    elif isinstance(x, FusionPoint):
        for f, t_ in enumerate(x.space.types):
            comps = (0, 1) if t_ == "D" else (0,)
            for comp in comps:
                for z in basis:
                    def curve(p, t, f=f, comp=comp, z=z):
                        u = scipy.linalg.expm(t * z)
                        fac = p.factors[f]
                        if p.space.types[f] == "D":
                            fac = list(fac)
                            fac[comp] = u @ fac[comp]
                            return p.replace(f, tuple(fac))
                        return p.replace(f, u @ fac)
                    curves.append(curve)
    else:
        raise ShapeError(f"no tangent basis for {type(x).__name__}")
    return curves


@dataclass
class RankReport:
    generator_rank: int
    generator_expected: int
    differential_rank: int
    differential_expected: int
    symmetry_orbit_rank: int
    invariant_probe_rank: int
    singular_values: dict = field(default_factory=dict)


def differential_matrix(x, functions, h: float = _FD_STEP) -> np.ndarray:
    """Rows are the differentials of scalar functions along a tangent basis."""
    curves = tangent_basis_curves(x)
    rows = np.zeros((len(functions), len(curves)))
    for c, curve in enumerate(curves):
        for k, w in _FD_WEIGHTS:
            pt = curve(x, k * h)
            for r, fn in enumerate(functions):
                rows[r, c] += w * fn(pt)
    return rows / (12 * h)


def rank_of(mat: np.ndarray, tol: float = SVD_KERNEL_TOL) -> tuple[int, np.ndarray]:
    svals = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(svals > tol)), svals


def ieq_rank_check(pp: PrincipalPoint, n: int, invariant_probes=None) -> RankReport:
    """Freeness and independence ranks at a crafted principal point."""
    torus = ActionSpec("torus", pp.action.curves[n * n - 1:], pp.torus_dim)
    sym = ActionSpec("symmetry", pp.action.curves[: n * n - 1], n * n - 1)
    g2_rank, g2_sv = rank_of(generator_matrix(pp.point, torus))
    sym_rank, sym_sv = rank_of(generator_matrix(pp.point, sym))
    if pp.family:
        funcs = list(pp.family)
    else:
        funcs = []
    if funcs:
        d_rank, d_sv = rank_of(differential_matrix(pp.point, funcs))
        d_expected = pp.torus_dim
    else:
        d_rank, d_sv = 0, np.array([])
        d_expected = 0
    if invariant_probes:
        p_rank, p_sv = rank_of(differential_matrix(pp.point, invariant_probes))
    else:
        p_rank, p_sv = 0, np.array([])
    return RankReport(
        generator_rank=g2_rank,
        generator_expected=pp.torus_dim,
        differential_rank=d_rank,
        differential_expected=d_expected,
        symmetry_orbit_rank=sym_rank,
        invariant_probe_rank=p_rank,
        singular_values={"torus": g2_sv, "symmetry": sym_sv, "differentials": d_sv,
                         "probes": p_sv},
    )
