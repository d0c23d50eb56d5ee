"""Derivative and bracket engines.

Observables are plain callables on phase-space points.  Directional
derivatives are seeded fourth-order central differences; gradients are
assembled against cached dual bases, so no linear solve happens per call.
The three bracket engines cover the canonical cotangent bracket, the
Heisenberg-double bracket built from the two isotropic projections, and the
quasi-Poisson bracket of fusion spaces, where every bivector term reduces to
trace-form pairings of per-letter left/right gradients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import UnsupportedBracket
from .liecore import (
    IM_FORM,
    TRACE_FORM,
    borel_basis,
    dual_basis,
    pair,
    project_borel,
    project_compact,
    sl_real_basis,
    su_basis,
)
from .spaces import CotangentPoint, FusionPoint, HeisenbergPoint


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference step control for all derivative engines."""

    h: float = 1e-3
    scheme: str = "central-4"
    richardson: bool = False

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step must be positive")


DEFAULT_DIFF = DiffConfig()


def _central(values: list[float], h: float, scheme: str) -> float:
    if scheme == "central-2":
        fm, fp = values
        return (fp - fm) / (2 * h)
    fm2, fm1, fp1, fp2 = values
    return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)


def _steps(scheme: str) -> list[int]:
    return [-1, 1] if scheme == "central-2" else [-2, -1, 1, 2]


def directional_derivative(f, curve, cfg: DiffConfig = DEFAULT_DIFF) -> float:
    """d/dt f(curve(t)) at t = 0 by central differences."""
    base = _central([f(curve(k * cfg.h)) for k in _steps(cfg.scheme)], cfg.h, cfg.scheme)
    if not cfg.richardson or cfg.scheme != "central-4":
        return base
    half = DiffConfig(h=cfg.h / 2, scheme=cfg.scheme)
    fine = _central([f(curve(k * half.h)) for k in _steps(half.scheme)], half.h, half.scheme)
    return (16 * fine - base) / 15


# ---------------------------------------------------------------------------
# cached bases
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _su_pair(n: int):
    basis = su_basis(n)
    return basis, dual_basis(basis, TRACE_FORM)

@lru_cache(maxsize=None)
def _sl_pair(n: int):
    basis = sl_real_basis(n)
    return basis, dual_basis(basis, IM_FORM)

@lru_cache(maxsize=None)
def _borel_to_su_inverse(n: int):
    """Inverse of the matrix im-pair(borel_r, su_s), for Borel gradients."""
    bb, kb = borel_basis(n), su_basis(n)
    m = np.array([[pair(z, w, IM_FORM) for w in kb] for z in bb])
    return np.linalg.inv(m)

@lru_cache(maxsize=None)
def _group_steps(n: int, h: float, scheme: str):
    """exp(k h Z) for each su-basis direction Z and each stencil offset k."""
    basis, dual = _su_pair(n)
    table = []
    for z in basis:
        e = scipy.linalg.expm(h * z)
        powers = {1: e, -1: e.conj().T}
        powers[2] = e @ e
        powers[-2] = powers[-1] @ powers[-1]
        table.append([powers[k] for k in _steps(scheme)])
    return basis, dual, table

@lru_cache(maxsize=None)
def _sl_steps(n: int, h: float, scheme: str):
    basis, dual = _sl_pair(n)
    table = []
    for z in basis:
        e = scipy.linalg.expm(h * z)
        em = np.linalg.inv(e)
        powers = {1: e, -1: em, 2: e @ e, -2: em @ em}
        table.append([powers[k] for k in _steps(scheme)])
    return basis, dual, table


def assemble_su_gradient(derivs: np.ndarray, n: int) -> np.ndarray:
    """Algebra element with trace-pairing derivs against the su basis."""
    _, dual = _su_pair(n)
    out = np.zeros((n, n), dtype=complex)
    for d, e in zip(derivs, dual):
        out += d * e
    return out


# ---------------------------------------------------------------------------
# gradient tables on fusion spaces
# ---------------------------------------------------------------------------

def _fusion_letters(point: FusionPoint):
    for f, t in enumerate(point.space.types):
        yield f, (0, 1) if t == "D" else (0,)


def _perturb_fusion(point: FusionPoint, f: int, comp: int, side: str, u: np.ndarray) -> FusionPoint:
    fac = point.factors[f]
    if point.space.types[f] == "D":
        m = fac[comp]
        m = u @ m if side == "lmul" else m @ u
        fac = (m, fac[1]) if comp == 0 else (fac[0], m)
    else:
        fac = u @ fac if side == "lmul" else fac @ u
    return point.replace(f, fac)


def fusion_gradient_tables(obs_list, point: FusionPoint, cfg: DiffConfig = DEFAULT_DIFF):
    """Per-letter translation gradients of each observable.

    Returns one dict per observable keyed by (factor, component, side) where
    side 'lmul' is the left-multiplication derivative (the right-invariant
    frame) and 'rmul' the right-multiplication derivative (the left-invariant
    frame).  Every perturbed point is evaluated once for all observables.
    """
    n = point.n
    basis, dual, table = _group_steps(n, cfg.h, cfg.scheme)
    tables = [dict() for _ in obs_list]
    for f, comps in _fusion_letters(point):
        for comp in comps:
            for side in ("lmul", "rmul"):
                derivs = np.zeros((len(obs_list), len(basis)))
                for a in range(len(basis)):
                    vals = np.array([
                        [obs(_perturb_fusion(point, f, comp, side, u)) for obs in obs_list]
                        for u in table[a]
                    ])
                    for i in range(len(obs_list)):
                        derivs[i, a] = _central(list(vals[:, i]), cfg.h, cfg.scheme)
                for i in range(len(obs_list)):
                    tables[i][(f, comp, side)] = sum(
                        derivs[i, a] * dual[a] for a in range(len(basis))
                    )
    return tables


def conjugation_gradient(table: dict, point: FusionPoint, f: int) -> np.ndarray:
    """Generating-field gradient of the diagonal conjugation on factor f."""
    comps = (0, 1) if point.space.types[f] == "D" else (0,)
    n = point.n
    out = np.zeros((n, n), dtype=complex)
    for comp in comps:
        out = out + table[(f, comp, "lmul")] - table[(f, comp, "rmul")]
    return out


def total_conjugation_gradient(table: dict, point: FusionPoint) -> np.ndarray:
    n = point.n
    out = np.zeros((n, n), dtype=complex)
    for f in range(len(point.factors)):
        out = out + conjugation_gradient(table, point, f)
    return out


def _double_term(tf, th, f) -> float:
    # per-letter gradients: R = right-invariant frame (lmul), L = left-invariant (rmul)
    aRF, aLF = tf[(f, 0, "lmul")], tf[(f, 0, "rmul")]
    bRF, bLF = tf[(f, 1, "lmul")], tf[(f, 1, "rmul")]
    aRH, aLH = th[(f, 0, "lmul")], th[(f, 0, "rmul")]
    bRH, bLH = th[(f, 1, "lmul")], th[(f, 1, "rmul")]
    val = pair(aRF, aLH) - pair(aRH, aLF)
    val -= pair(bRF, bLH) - pair(bRH, bLF)
    val += pair(aLF, bLH + bRH) - pair(aLH, bLF + bRF)
    val += pair(aRF, bLH - bRH) - pair(aRH, bLF - bRF)
    return 0.5 * val


def _conj_term(tf, th, f) -> float:
    return 0.5 * (
        pair(tf[(f, 0, "lmul")], th[(f, 0, "rmul")])
        - pair(th[(f, 0, "lmul")], tf[(f, 0, "rmul")])
    )


def fusion_bracket_from_tables(tf, th, point: FusionPoint) -> float:
    """Contract the fused bivector with precomputed gradient tables."""
    total = 0.0
    for f, t in enumerate(point.space.types):
        total += _double_term(tf, th, f) if t == "D" else _conj_term(tf, th, f)
    conj_f = [conjugation_gradient(tf, point, f) for f in range(len(point.factors))]
    conj_h = [conjugation_gradient(th, point, f) for f in range(len(point.factors))]
    for f1 in range(len(point.factors)):
        for f2 in range(f1 + 1, len(point.factors)):
            total -= 0.5 * (pair(conj_f[f1], conj_h[f2]) - pair(conj_h[f1], conj_f[f2]))
    return total


def fusion_bracket(f_obs, h_obs, point: FusionPoint, cfg: DiffConfig = DEFAULT_DIFF) -> float:
    tf, th = fusion_gradient_tables([f_obs, h_obs], point, cfg)
    return fusion_bracket_from_tables(tf, th, point)


# ---------------------------------------------------------------------------
# cotangent bracket
# ---------------------------------------------------------------------------

def cotangent_gradients(obs_list, point: CotangentPoint, cfg: DiffConfig = DEFAULT_DIFF):
    """(group gradient, fiber gradient) of each observable at (g, J)."""
    n = point.n
    basis, dual, table = _group_steps(n, cfg.h, cfg.scheme)
    out = []
    for obs in obs_list:
        dg = np.zeros(len(basis))
        dj = np.zeros(len(basis))
        for a, z in enumerate(basis):
            vals_g = [obs(CotangentPoint(u @ point.g, point.j)) for u in table[a]]
            vals_j = [obs(CotangentPoint(point.g, point.j + k * cfg.h * z))
                      for k in _steps(cfg.scheme)]
            dg[a] = _central(vals_g, cfg.h, cfg.scheme)
            dj[a] = _central(vals_j, cfg.h, cfg.scheme)
        out.append((assemble_su_gradient(dg, n), assemble_su_gradient(dj, n)))
    return out


def cotangent_bracket(f_obs, h_obs, point: CotangentPoint, cfg: DiffConfig = DEFAULT_DIFF) -> float:
    """Canonical cotangent bracket in right-translation coordinates."""
    (gf, jf), (gh, jh) = cotangent_gradients([f_obs, h_obs], point, cfg)
    lie = jf @ jh - jh @ jf
    return pair(gf, jh) - pair(gh, jf) + pair(point.j, lie)


def cotangent_brackets_against(obs_list, h_obs, point: CotangentPoint,
                               cfg: DiffConfig = DEFAULT_DIFF) -> list[float]:
    """Brackets of several observables with one Hamiltonian, sharing gradients."""
    grads = cotangent_gradients(list(obs_list) + [h_obs], point, cfg)
    gh, jh = grads[-1]
    out = []
    for gf, jf in grads[:-1]:
        lie = jf @ jh - jh @ jf
        out.append(pair(gf, jh) - pair(gh, jf) + pair(point.j, lie))
    return out


# ---------------------------------------------------------------------------
# Heisenberg bracket
# ---------------------------------------------------------------------------

def heisenberg_derivatives_multi(obs_list, point: HeisenbergPoint,
                                 cfg: DiffConfig = DEFAULT_DIFF):
    """Left/right complexified derivatives of several observables at once."""
    n = point.n
    basis, dual, table = _sl_steps(n, cfg.h, cfg.scheme)
    k = len(obs_list)
    dl = np.zeros((k, len(basis)))
    dr = np.zeros((k, len(basis)))
    for a in range(len(basis)):
        vals_l = np.array([[obs(HeisenbergPoint(u @ point.x)) for obs in obs_list]
                           for u in table[a]])
        vals_r = np.array([[obs(HeisenbergPoint(point.x @ u)) for obs in obs_list]
                           for u in table[a]])
        for i in range(k):
            dl[i, a] = _central(list(vals_l[:, i]), cfg.h, cfg.scheme)
            dr[i, a] = _central(list(vals_r[:, i]), cfg.h, cfg.scheme)
    out = []
    for i in range(k):
        left = sum(dl[i, a] * dual[a] for a in range(len(basis)))
        right = sum(dr[i, a] * dual[a] for a in range(len(basis)))
        out.append((left, right))
    return out


def heisenberg_derivatives(obs, point: HeisenbergPoint, cfg: DiffConfig = DEFAULT_DIFF):
    """Left and right complexified derivatives (DF, D'F) of an observable.

    Both are elements of the realified complex algebra, characterized by
    im-pair(Z, DF) = d/dt F(exp(tZ) X) and the right-sided analogue.
    """
    return heisenberg_derivatives_multi([obs], point, cfg)[0]


def _half_difference(z: np.ndarray) -> np.ndarray:
    """The operator (compact projection - Borel projection)/2."""
    return 0.5 * (project_compact(z) - project_borel(z))


def heisenberg_bracket(f_obs, h_obs, point: HeisenbergPoint,
                       cfg: DiffConfig = DEFAULT_DIFF) -> float:
    df, dpf = heisenberg_derivatives(f_obs, point, cfg)
    dh, dph = heisenberg_derivatives(h_obs, point, cfg)
    return pair(df, _half_difference(dh), IM_FORM) + pair(dpf, _half_difference(dph), IM_FORM)


def heisenberg_brackets_against(obs_list, h_obs, point: HeisenbergPoint,
                                cfg: DiffConfig = DEFAULT_DIFF) -> list[float]:
    """Brackets of several observables with one Hamiltonian, sharing derivatives."""
    derivs = heisenberg_derivatives_multi(list(obs_list) + [h_obs], point, cfg)
    rho_h = tuple(_half_difference(z) for z in derivs[-1])
    return [pair(df, rho_h[0], IM_FORM) + pair(dpf, rho_h[1], IM_FORM)
            for df, dpf in derivs[:-1]]


def heisenberg_bracket_table(derivs) -> np.ndarray:
    """All pairwise brackets from precomputed (DF, D'F) derivative pairs."""
    k = len(derivs)
    out = np.zeros((k, k))
    rho = [(_half_difference(d), _half_difference(dp)) for d, dp in derivs]
    for i in range(k):
        for j in range(k):
            out[i, j] = (pair(derivs[i][0], rho[j][0], IM_FORM)
                         + pair(derivs[i][1], rho[j][1], IM_FORM))
    return out


# ---------------------------------------------------------------------------
# dispatch and derived checks
# ---------------------------------------------------------------------------

def poisson_bracket(f_obs, h_obs, point, cfg: DiffConfig = DEFAULT_DIFF) -> float:
    """Bracket of two observables on any supported phase space."""
    if isinstance(point, CotangentPoint):
        return cotangent_bracket(f_obs, h_obs, point, cfg)
    if isinstance(point, HeisenbergPoint):
        return heisenberg_bracket(f_obs, h_obs, point, cfg)
    if isinstance(point, FusionPoint):
        return fusion_bracket(f_obs, h_obs, point, cfg)
    raise UnsupportedBracket(f"no bracket on points of type {type(point).__name__}")


def group_gradient_fd(fn_value, g: np.ndarray, side: str = "L",
                      cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Trace-form gradient of a scalar function on SU(n) by differences."""
    n = g.shape[0]
    basis, dual = _su_pair(n)
    out = np.zeros((n, n), dtype=complex)
    for z, e in zip(basis, dual):
        def curve(t, z=z):
            u = scipy.linalg.expm(t * z)
            return u @ g if side == "L" else g @ u
        out += directional_derivative(fn_value, curve, cfg) * e
    return out


def algebra_gradient_fd(fn_value, j_alg: np.ndarray, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Trace-form gradient of a scalar function on su(n) by differences."""
    n = j_alg.shape[0]
    basis, dual = _su_pair(n)
    out = np.zeros((n, n), dtype=complex)
    for z, e in zip(basis, dual):
        out += directional_derivative(fn_value, lambda t, z=z: j_alg + t * z, cfg) * e
    return out


def borel_gradient_fd(fn_value, b: np.ndarray, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Algebra-valued dressing gradient of a function on the Borel group.

    Solves im-pair(Z_r, W) = d/dt fn(exp(t Z_r) b) over a Borel basis.
    """
    n = b.shape[0]
    bb = borel_basis(n)
    kb = su_basis(n)
    derivs = np.array([
        directional_derivative(
            fn_value, lambda t, z=z: scipy.linalg.expm(t * z) @ b, cfg)
        for z in bb
    ])
    coeffs = _borel_to_su_inverse(n) @ derivs
    return sum(coeffs[s] * kb[s] for s in range(len(kb)))


def momentum_condition_residual(f_obs, k_fn, point: FusionPoint,
                                cfg: DiffConfig = DEFAULT_DIFF) -> float:
    """Defect of the momentum-map/bivector compatibility condition.

    ``k_fn`` is a scalar function on the group; the residual compares the
    bracket of f with the momentum pullback of k_fn against half the pairing
    of f's total conjugation gradient with the two-sided gradient of k_fn at
    the momentum value.
    """
    pulled = lambda x: k_fn(x.momentum())
    tf, th = fusion_gradient_tables([f_obs, pulled], point, cfg)
    lhs = fusion_bracket_from_tables(tf, th, point)
    phi = point.momentum()
    two_sided = group_gradient_fd(k_fn, phi, "L", cfg) + group_gradient_fd(k_fn, phi, "R", cfg)
    conj_grad = total_conjugation_gradient(tf, point)
    rhs = 0.5 * pair(conj_grad, two_sided)
    return abs(lhs - rhs)
