"""Matrix normal forms: chamber/alcove diagonalization and Iwasawa factors.

The chamber form of an anti-Hermitian J is the strictly decreasing real
spectrum xi with frame Q satisfying Q J Q^-1 = i diag(xi).  The alcove form
of a special unitary g picks the unique strictly decreasing, zero-sum phase
vector of range below 2*pi with Q g Q^-1 = exp(i diag(xi)).  Frames are made
deterministic by fixing eigenvector phases and correcting the determinant,
and all downstream formulas only use Q^-1 t Q with t diagonal, so the
residual torus ambiguity of the frame never leaks into results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    NotPositiveDefinite,
    RegularityViolation,
    ShapeError,
    SingularMatrix,
)
from .liecore import RootDatum

DEFAULT_REGULARITY_MARGIN = 1e-8


@dataclass(frozen=True)
class ChamberData:
    """Decreasing real spectrum and diagonalizing frame of an algebra element."""

    spectrum: np.ndarray
    frame: np.ndarray

    @property
    def diagonal_form(self) -> np.ndarray:
        return 1j * np.diag(self.spectrum)


@dataclass(frozen=True)
class AlcoveData:
    """Alcove phase vector and diagonalizing frame of a group element."""

    spectrum: np.ndarray
    frame: np.ndarray

    @property
    def diagonal_form(self) -> np.ndarray:
        return np.diag(np.exp(1j * self.spectrum))


@dataclass(frozen=True)
class IwasawaFactors:
    """Both unitary/triangular splittings X = u_left b_right^-1 = b_left u_right^-1."""

    u_left: np.ndarray
    u_right: np.ndarray
    b_left: np.ndarray
    b_right: np.ndarray


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is positive real."""
    out = vectors.copy()
    for c in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, c])))
        z = out[idx, c]
        out[:, c] *= np.conj(z) / abs(z)
    return out


def _det_correct(vectors: np.ndarray) -> np.ndarray:
    """Scale the last column by a unit scalar so the determinant becomes 1."""
    out = vectors.copy()
    det = np.linalg.det(out)
    out[:, -1] *= np.conj(det) / abs(det)
    return out


def chamber_diagonalize(j: np.ndarray, margin: float = DEFAULT_REGULARITY_MARGIN) -> ChamberData:
    """Chamber normal form of an anti-Hermitian traceless matrix.

    Returns (xi, Q) with Q j Q^-1 = i diag(xi) and xi strictly decreasing.
    Raises RegularityViolation when eigenvalue gaps fall below the margin.
    """
    h = -1j * j
    vals, vecs = np.linalg.eigh(h)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    gaps = vals[:-1] - vals[1:]
    if gaps.size and gaps.min() < margin:
        raise RegularityViolation(f"eigenvalue gap {gaps.min():.3e} below margin {margin:.1e}")
    vecs = _det_correct(_fix_phases(vecs))
    frame = vecs.conj().T
    return ChamberData(spectrum=vals.astype(float), frame=frame)


def alcove_phases(thetas: np.ndarray) -> np.ndarray:
    """Unique alcove representative of a set of eigenphases.

    The input phases live in [0, 2*pi) and sum to 2*pi*s for an integer s.
    Sorting them decreasingly, subtracting 2*pi from the s largest and moving
    those to the tail yields the decreasing, zero-sum vector of range < 2*pi.
    Returns the phase vector together with the argsort order used.
    """
    thetas = np.mod(np.asarray(thetas, dtype=float), 2 * np.pi)
    order = np.argsort(-thetas, kind="stable")
    sorted_phases = thetas[order]
    s = int(np.round(sorted_phases.sum() / (2 * np.pi)))
    xi = np.concatenate([sorted_phases[s:], sorted_phases[:s] - 2 * np.pi])
    perm = np.concatenate([order[s:], order[:s]])
    xi = xi - xi.mean()  # remove rounding drift in the zero-sum constraint
    return xi, perm


def alcove_diagonalize(g: np.ndarray, margin: float = DEFAULT_REGULARITY_MARGIN) -> AlcoveData:
    """Alcove normal form of a special unitary matrix.

    Returns (xi, Q) with Q g Q^-1 = exp(i diag(xi)), xi strictly decreasing,
    summing to zero, with xi_1 - xi_n < 2*pi.  Raises RegularityViolation
    when the point is within ``margin`` of an alcove wall.
    """
    t, z = scipy.linalg.schur(g, output="complex")
    thetas = np.angle(np.diag(t))
    xi, perm = alcove_phases(thetas)
    walls = np.concatenate([xi[:-1] - xi[1:], [2 * np.pi - (xi[0] - xi[-1])]])
    if walls.min() < margin:
        raise RegularityViolation(f"alcove wall margin {walls.min():.3e} below {margin:.1e}")
    vecs = _det_correct(_fix_phases(z[:, perm]))
    frame = vecs.conj().T
    return AlcoveData(spectrum=xi, frame=frame)


def is_regular_group(g: np.ndarray, margin: float = DEFAULT_REGULARITY_MARGIN) -> bool:
    try:
        alcove_diagonalize(g, margin)
        return True
    except RegularityViolation:
        return False


# ---------------------------------------------------------------------------
# action variables and gradients
# ---------------------------------------------------------------------------

def coroot_values(xi: np.ndarray) -> np.ndarray:
    """Pairings of the spectrum with the simple coroots: xi_j - xi_(j+1)."""
    xi = np.asarray(xi, dtype=float)
    return xi[:-1] - xi[1:]


def coweight_values(xi: np.ndarray, datum: RootDatum) -> np.ndarray:
    """Pairings of the spectrum with the fundamental coweights."""
    xi = np.asarray(xi, dtype=float)
    return np.array([float(np.real(np.sum(np.diag(w) * xi))) for w in datum.coweights])


def action_variables(data: ChamberData | AlcoveData, family: str, datum: RootDatum) -> np.ndarray:
    """Coroot ('chi'/'phi') or coweight ('xi') action variables of a normal form."""
    if family in ("chi", "phi"):
        return coroot_values(data.spectrum)
    if family == "xi":
        return coweight_values(data.spectrum, datum)
    raise ShapeError(f"unknown action-variable family {family!r}")


def grad_alcove_coroot(g: np.ndarray, j: int, datum: RootDatum,
                       margin: float = DEFAULT_REGULARITY_MARGIN) -> np.ndarray:
    """Gradient of the j-th coroot alcove variable: -Q^-1 i h_j Q."""
    frame = alcove_diagonalize(g, margin).frame
    return -frame.conj().T @ (1j * datum.coroots[j]) @ frame


def grad_alcove_coweight(g: np.ndarray, j: int, datum: RootDatum,
                         margin: float = DEFAULT_REGULARITY_MARGIN) -> np.ndarray:
    """Gradient of the j-th coweight alcove variable: -Q^-1 i w_j Q."""
    frame = alcove_diagonalize(g, margin).frame
    return -frame.conj().T @ (1j * datum.coweights[j]) @ frame


def grad_chamber_coroot(j_alg: np.ndarray, j: int, datum: RootDatum,
                        margin: float = DEFAULT_REGULARITY_MARGIN) -> np.ndarray:
    """Gradient of the j-th coroot chamber variable: -Q^-1 i h_j Q."""
    frame = chamber_diagonalize(j_alg, margin).frame
    return -frame.conj().T @ (1j * datum.coroots[j]) @ frame


# ---------------------------------------------------------------------------
# Iwasawa decomposition and friends
# ---------------------------------------------------------------------------

def _positive_qr(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR with positive real diagonal on the triangular factor."""
    q, r = np.linalg.qr(x)
    d = np.diag(r)
    if np.min(np.abs(d)) < 1e-14:
        raise SingularMatrix("matrix is numerically singular")
    ph = d / np.abs(d)
    return q * ph[np.newaxis, :], r * (1.0 / ph)[:, np.newaxis]


def iwasawa_decompose(x: np.ndarray) -> IwasawaFactors:
    """Unique factorizations X = u_left b_right^-1 = b_left u_right^-1.

    The unitary factors are special unitary and the triangular factors are
    upper triangular with positive diagonal and unit determinant; both follow
    from det X = 1.
    """
    q1, r1 = _positive_qr(x)
    b_right = scipy.linalg.solve_triangular(r1, np.eye(x.shape[0]))
    q2, r2 = _positive_qr(np.linalg.inv(x))
    b_left = scipy.linalg.solve_triangular(r2, np.eye(x.shape[0]))
    return IwasawaFactors(u_left=q1, u_right=q2, b_left=b_left, b_right=b_right)


def unitary_right(x: np.ndarray) -> np.ndarray:
    return iwasawa_decompose(x).u_right


def borel_right(x: np.ndarray) -> np.ndarray:
    return iwasawa_decompose(x).b_right


def borel_left(x: np.ndarray) -> np.ndarray:
    return iwasawa_decompose(x).b_left


def dress(eta: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dressing action of a unitary on the Borel group: b_left factor of eta b."""
    return iwasawa_decompose(eta @ b).b_left


def posdef_of_borel(b: np.ndarray) -> np.ndarray:
    """The positive-definite image b b^H of a Borel element."""
    return b @ b.conj().T


def borel_of_posdef(p: np.ndarray) -> np.ndarray:
    """Upper-triangular positive-diagonal b with b b^H = p.

    Obtained from the Cholesky factor of p^-1: with p^-1 = L L^H lower
    triangular, b = L^-H is upper triangular with positive diagonal.
    """
    if np.linalg.norm(p - p.conj().T) > 1e-10 * (1 + np.linalg.norm(p)):
        raise NotPositiveDefinite("argument is not Hermitian")
    try:
        low = np.linalg.cholesky(np.linalg.inv(p))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("argument is not positive definite") from exc
    return scipy.linalg.solve_triangular(low.conj().T, np.eye(p.shape[0]))


def heisenberg_from_right_pair(u_right: np.ndarray, b_left: np.ndarray) -> np.ndarray:
    """Point of the complex group with prescribed b_left and u_right factors."""
    return b_left @ u_right.conj().T
