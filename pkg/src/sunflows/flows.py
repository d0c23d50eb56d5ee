"""Closed-form integral curves and torus actions on the three doubles.

All flows are exact group-theoretic formulas; no integrator touches the main
paths.  An optional Runge-Kutta integration of the bracket-defined vector
field exists purely as a cross-check oracle.  After each flow step the
unitarity drift of group components is measured and, only if it exceeds the
drift tolerance, the component is re-projected (and the event logged).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import brackets, decomp, liecore
from .errors import ShapeError, UnsupportedBracket
from .liecore import RootDatum
from .observables import AlgebraFunction, BorelFunction, ClassFunction
from .spaces import CotangentPoint, FusionPoint, HeisenbergPoint

logger = logging.getLogger(__name__)

DRIFT_TOL = 1e-9


def _maybe_reproject(u: np.ndarray, label: str) -> np.ndarray:
    drift = liecore.unitarity_defect(u)
    if drift > DRIFT_TOL:
        logger.warning("unitarity drift %.3e on %s; re-projecting", drift, label)
        return liecore.project_special_unitary(u)
    return u


# ---------------------------------------------------------------------------
# torus elements
# ---------------------------------------------------------------------------

def coroot_torus_element(tau: np.ndarray, datum: RootDatum) -> np.ndarray:
    """exp(-i sum tau_j h_j) over the simple coroots."""
    z = sum(t * h for t, h in zip(np.asarray(tau, dtype=float), datum.coroots))
    return scipy.linalg.expm(-1j * z)


def coweight_torus_element(tau: np.ndarray, datum: RootDatum) -> np.ndarray:
    """exp(-i sum tau_j w_j) over the fundamental coweights."""
    z = sum(t * w for t, w in zip(np.asarray(tau, dtype=float), datum.coweights))
    return scipy.linalg.expm(-1j * z)


def coroot_translation(tau: np.ndarray, datum: RootDatum) -> np.ndarray:
    """-i sum tau_j h_j, the algebra-valued version of the torus element."""
    z = sum(t * h for t, h in zip(np.asarray(tau, dtype=float), datum.coroots))
    return -1j * z


# ---------------------------------------------------------------------------
# cotangent flows
# ---------------------------------------------------------------------------

def cotangent_flow(x: CotangentPoint, ham, tau: float) -> CotangentPoint:
    """Exact flow of an invariant Hamiltonian on the cotangent bundle.

    Fiber-invariant Hamiltonians translate the group component by
    exp(tau * grad); base class functions translate the fiber by -tau * grad.
    """
    if isinstance(ham, AlgebraFunction):
        g = scipy.linalg.expm(tau * ham.grad(x.j)) @ x.g
        return CotangentPoint(_maybe_reproject(g, "cotangent group part"), x.j)
    if isinstance(ham, ClassFunction):
        return CotangentPoint(x.g, x.j - tau * ham.grad(x.g))
    raise UnsupportedBracket(f"unsupported cotangent Hamiltonian {ham!r}")


def cotangent_torus_action(x: CotangentPoint, tau: np.ndarray, family: str,
                           datum: RootDatum) -> CotangentPoint:
    """Joint flows of the two commuting families.

    'chamber': compact-torus action twisting the group part through the
    chamber frame of the fiber; 'translate': additive action on the fiber
    through the alcove frame of the group part.
    """
    if family == "chamber":
        frame = decomp.chamber_diagonalize(x.j).frame
        t = frame.conj().T @ coroot_torus_element(tau, datum) @ frame
        return CotangentPoint(_maybe_reproject(t @ x.g, "cotangent torus"), x.j)
    if family == "translate":
        frame = decomp.alcove_diagonalize(x.g).frame
        shift = frame.conj().T @ coroot_translation(tau, datum) @ frame
        return CotangentPoint(x.g, x.j - shift)
    raise ShapeError(f"unknown cotangent torus family {family!r}")


# ---------------------------------------------------------------------------
# Heisenberg flows
# ---------------------------------------------------------------------------

def heisenberg_flow(x: HeisenbergPoint, ham, tau: float) -> HeisenbergPoint:
    """Exact flow on the Heisenberg double.

    Borel-family Hamiltonians right-translate by exp(-tau * dressing
    gradient of the right Borel factor).  Class-function Hamiltonians
    right-multiply by the Borel factor of exp(i tau * grad at the right
    unitary factor), which is positive definite because i*grad is Hermitian.
    """
    f = x.factors()
    if isinstance(ham, BorelFunction):
        return HeisenbergPoint(x.x @ scipy.linalg.expm(-tau * ham.grad(f.b_right)))
    if isinstance(ham, ClassFunction):
        pos = scipy.linalg.expm(1j * tau * ham.grad(f.u_right))
        return HeisenbergPoint(x.x @ decomp.borel_left(pos))
    raise UnsupportedBracket(f"unsupported Heisenberg Hamiltonian {ham!r}")


def heisenberg_flow_unitary_part(x: HeisenbergPoint, ham: ClassFunction, tau: float) -> np.ndarray:
    """The unitary cofactor of the class-function flow (conjugator of u_right)."""
    f = x.factors()
    pos = scipy.linalg.expm(1j * tau * ham.grad(f.u_right))
    iw = decomp.iwasawa_decompose(pos)
    return iw.u_right.conj().T


def positive_factorization(tau: np.ndarray, g: np.ndarray, datum: RootDatum) -> np.ndarray:
    """Borel factor of frame^-1 exp(sum tau_j h_j) frame at the alcove frame of g."""
    frame = decomp.alcove_diagonalize(g).frame
    z = sum(t * h for t, h in zip(np.asarray(tau, dtype=float), datum.coroots))
    pos = frame.conj().T @ scipy.linalg.expm(z) @ frame
    return decomp.borel_left(pos)


def heisenberg_torus_action(x: HeisenbergPoint, tau: np.ndarray, family: str,
                            datum: RootDatum) -> HeisenbergPoint:
    """'dress': compact-torus action through the chamber frame of the
    positive part of the right Borel factor; 'translate': the proper
    noncompact action through the positive factorization at u_right."""
    f = x.factors()
    if family == "dress":
        logp = 1j * scipy.linalg.logm(decomp.posdef_of_borel(f.b_right))
        frame = decomp.chamber_diagonalize(logp).frame
        t = frame.conj().T @ coroot_torus_element(tau, datum) @ frame
        return HeisenbergPoint(x.x @ t)
    if family == "translate":
        return HeisenbergPoint(x.x @ positive_factorization(tau, f.u_right, datum))
    raise ShapeError(f"unknown Heisenberg torus family {family!r}")


# ---------------------------------------------------------------------------
# internally fused double
# ---------------------------------------------------------------------------

def double_flow(x: FusionPoint, ham: ClassFunction, tau: float, slot: str) -> FusionPoint:
    """Flows of the three Hamiltonian families of the fused double.

    slot 'first': H = chi(A) moves B by right translation; slot 'second':
    H = chi(B) moves A; slot 'momentum': H = chi([A, B]) conjugates both.
    """
    a, b = x.pair(1)
    if slot == "first":
        new = (a, _maybe_reproject(b @ scipy.linalg.expm(-tau * ham.grad(a)), "double B"))
    elif slot == "second":
        new = (_maybe_reproject(a @ scipy.linalg.expm(tau * ham.grad(b)), "double A"), b)
    elif slot == "momentum":
        u = scipy.linalg.expm(tau * ham.grad(x.momentum()))
        ui = u.conj().T
        new = (u @ a @ ui, u @ b @ ui)
    else:
        raise ShapeError(f"unknown double slot {slot!r}")
    return x.replace(0, new)


def double_torus_action(x: FusionPoint, tau: np.ndarray, slot: str,
                        datum: RootDatum) -> FusionPoint:
    a, b = x.pair(1)
    if slot == "first":
        frame = decomp.alcove_diagonalize(a).frame
        t = frame.conj().T @ coroot_torus_element(-np.asarray(tau, dtype=float), datum) @ frame
        new = (a, b @ t)
    elif slot == "second":
        frame = decomp.alcove_diagonalize(b).frame
        t = frame.conj().T @ coroot_torus_element(tau, datum) @ frame
        new = (a @ t, b)
    else:
        raise ShapeError(f"unknown double torus slot {slot!r}")
    return x.replace(0, new)


def s_transform(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mapping-class building block (A, B) -> (B^-1, B^-1 A B)."""
    bi = b.conj().T
    return bi, bi @ a @ b


# ---------------------------------------------------------------------------
# dispatchers
# ---------------------------------------------------------------------------

def flow(x, ham, tau: float, slot: str | None = None):
    """Exact flow on any supported phase point.

    ``slot`` selects the Hamiltonian family on the fused double ('first',
    'second' or 'momentum'); word Hamiltonians carry their block themselves.
    """
    from .moduli import WordHamiltonian, moduli_flow
    if isinstance(x, CotangentPoint):
        return cotangent_flow(x, ham, tau)
    if isinstance(x, HeisenbergPoint):
        return heisenberg_flow(x, ham, tau)
    if isinstance(x, FusionPoint):
        if isinstance(ham, WordHamiltonian):
            return moduli_flow(x, ham, tau)
        return double_flow(x, ham, tau, slot or "first")
    raise UnsupportedBracket(f"no flow on points of type {type(x).__name__}")


def torus_action(x, tau, datum: RootDatum, kind: str):
    """Joint torus/line action maps by kind name.

    Kinds: cotangent 'chamber'/'translate', Heisenberg 'dress'/'translate',
    double 'first'/'second'.  Word-Hamiltonian families use the moduli-space
    action directly.
    """
    if isinstance(x, CotangentPoint):
        return cotangent_torus_action(x, tau, kind, datum)
    if isinstance(x, HeisenbergPoint):
        return heisenberg_torus_action(x, tau, kind, datum)
    if isinstance(x, FusionPoint):
        return double_torus_action(x, tau, kind, datum)
    raise UnsupportedBracket(f"no torus action on {type(x).__name__}")


# ---------------------------------------------------------------------------
# trajectories and drift accounting
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    times: list[float]
    points: list
    conserved: dict[str, float] = field(default_factory=dict)


def sample_flow(x, flow_fn, times, conserved_fns=None) -> Trajectory:
    """Evaluate an exact flow on a time grid, tracking conserved-value drift."""
    times = [float(t) for t in times]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ShapeError("times must be strictly increasing")
    points = [flow_fn(x, t) for t in times]
    report = {}
    if conserved_fns and times:
        for name, fn in conserved_fns.items():
            base = fn(points[0])
            report[name] = max(
                float(np.max(np.abs(np.asarray(fn(p)) - np.asarray(base)))) for p in points
            )
    return Trajectory(times=times, points=points, conserved=report)


def rk4_bracket_flow(x: FusionPoint, ham_obs, tau: float, steps: int = 16,
                     cfg: brackets.DiffConfig = brackets.DEFAULT_DIFF) -> FusionPoint:
    """Integrate the bracket-defined vector field; cross-check oracle only.

    The tangent vector at a point is assembled from brackets of the matrix
    entries with the Hamiltonian, then the factors are stepped additively and
    re-projected to the group after the integration.
    """

    def vector(p: FusionPoint):
        entry_obs = []
        shapes = []
        for f, t in enumerate(p.space.types):
            comps = (0, 1) if t == "D" else (0,)
            for comp in comps:
                for i in range(p.n):
                    for j in range(p.n):
                        for part in ("re", "im"):
                            def obs(q, f=f, comp=comp, i=i, j=j, part=part):
                                m = q.factors[f][comp] if q.space.types[f] == "D" else q.factors[f]
                                v = m[i, j]
                                return float(v.real if part == "re" else v.imag)
                            entry_obs.append(obs)
                shapes.append((f, comp))
        tables = brackets.fusion_gradient_tables(entry_obs + [ham_obs], p, cfg)
        th = tables[-1]
        vals = [
            brackets.fusion_bracket_from_tables(tf, th, p) for tf in tables[:-1]
        ]
        out = []
        k = 0
        for f, comp in shapes:
            m = np.zeros((p.n, p.n), dtype=complex)
            for i in range(p.n):
                for j in range(p.n):
                    m[i, j] = vals[k] + 1j * vals[k + 1]
                    k += 2
            out.append(((f, comp), m))
        return out

    def step(p: FusionPoint, dt: float) -> FusionPoint:
        def shifted(p0, vec, scale):
            q = p0
            for (f, comp), m in vec:
                if q.space.types[f] == "D":
                    fac = list(q.factors[f])
                    fac[comp] = fac[comp] + scale * m
                    q = q.replace(f, tuple(fac))
                else:
                    q = q.replace(f, q.factors[f] + scale * m)
            return q

        k1 = vector(p)
        k2 = vector(shifted(p, k1, dt / 2))
        k3 = vector(shifted(p, k2, dt / 2))
        k4 = vector(shifted(p, k3, dt))
        q = p
        for ((f, comp), m1), (_, m2), (_, m3), (_, m4) in zip(k1, k2, k3, k4):
            incr = dt / 6 * (m1 + 2 * m2 + 2 * m3 + m4)
            if q.space.types[f] == "D":
                fac = list(q.factors[f])
                fac[comp] = fac[comp] + incr
                q = q.replace(f, tuple(fac))
            else:
                q = q.replace(f, q.factors[f] + incr)
        return q

    p = x
    dt = tau / steps
    for _ in range(steps):
        p = step(p, dt)
    factors = []
    for t, fac in zip(p.space.types, p.factors):
        if t == "D":
            factors.append(tuple(liecore.project_special_unitary(m) for m in fac))
        else:
            factors.append(liecore.project_special_unitary(fac))
    return FusionPoint(p.space, tuple(factors))
