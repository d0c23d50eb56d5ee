"""Type-A root data, invariant pairings and special group elements.

Everything is realized concretely for K = SU(n): group elements are n-by-n
special unitary matrices, algebra elements are anti-Hermitian traceless
matrices, and the invariant bilinear form is normalized so that it coincides
with the matrix trace form.  With that normalization the pairing of opposite
root vectors equals one, which is the convention every bracket and gradient
formula in the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import DegenerateBasis, InvalidRank, ShapeError

DEFAULT_UNITARY_TOL = 1e-10


# ---------------------------------------------------------------------------
# elementary checks and projections
# ---------------------------------------------------------------------------

def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of U^H U - I."""
    n = u.shape[0]
    return float(np.linalg.norm(u.conj().T @ u - np.eye(n)))


def is_special_unitary(u: np.ndarray, tol: float = DEFAULT_UNITARY_TOL) -> bool:
    return unitarity_defect(u) <= tol and abs(np.linalg.det(u) - 1.0) <= tol


def is_algebra_element(z: np.ndarray, tol: float = DEFAULT_UNITARY_TOL) -> bool:
    """Anti-Hermitian and traceless to tolerance."""
    return (
        float(np.linalg.norm(z + z.conj().T)) <= tol
        and abs(np.trace(z)) <= tol
    )


def project_special_unitary(u: np.ndarray) -> np.ndarray:
    """Closest special unitary matrix (polar factor, det-corrected)."""
    w, _, vh = np.linalg.svd(u)
    q = w @ vh
    n = q.shape[0]
    q = q * np.linalg.det(q) ** (-1.0 / n)
    return q


def skew_traceless(m: np.ndarray) -> np.ndarray:
    """Project onto anti-Hermitian traceless matrices w.r.t. the trace form."""
    n = m.shape[0]
    s = 0.5 * (m - m.conj().T)
    return s - (np.trace(s) / n) * np.eye(n)


# ---------------------------------------------------------------------------
# pairings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pairing:
    """Invariant bilinear form: the trace form or its imaginary part.

    ``kind`` is 'trace' for Re tr(XY) on the compact algebra (and its
    complexification) or 'im' for Im tr(XY) on the realified complex algebra.
    The normalization constant is fixed once and for all at 1, which makes
    the form of two opposite root vectors equal to 1 = 2/|alpha|^2.
    """

    kind: str = "trace"

    def __call__(self, x: np.ndarray, y: np.ndarray) -> float:
        return pair(x, y, self)


TRACE_FORM = Pairing("trace")
IM_FORM = Pairing("im")


def pair(x: np.ndarray, y: np.ndarray, pairing: Pairing = TRACE_FORM) -> float:
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise ShapeError(f"incompatible shapes {x.shape} and {y.shape}")
    t = np.trace(x @ y)
    if pairing.kind == "trace":
        return float(t.real)
    if pairing.kind == "im":
        return float(t.imag)
    raise ShapeError(f"unknown pairing kind {pairing.kind!r}")


def dual_basis(basis: list[np.ndarray], pairing: Pairing = TRACE_FORM) -> list[np.ndarray]:
    """Dual basis w.r.t. the pairing: pair(basis[a], dual[b]) = delta_ab.

    Computed through the inverse Gram matrix, dual[a] = sum_b (G^-1)_ab basis[b].
    """
    k = len(basis)
    gram = np.array([[pair(basis[a], basis[b], pairing) for b in range(k)] for a in range(k)])
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateBasis(f"Gram matrix is singular (cond={cond:.3e})")
    ginv = np.linalg.inv(gram)
    return [sum(ginv[a, b] * basis[b] for b in range(k)) for a in range(k)]


# ---------------------------------------------------------------------------
# standard bases
# ---------------------------------------------------------------------------

def su_basis(n: int) -> list[np.ndarray]:
    """Real basis of su(n): off-diagonal skew pairs plus i*coroot diagonals."""
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0
            m[k, j] = -1.0
            out.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0j
            m[k, j] = 1.0j
            out.append(m)
    for j in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[j, j] = 1.0j
        m[j + 1, j + 1] = -1.0j
        out.append(m)
    return out


def sl_complex_basis(n: int) -> list[np.ndarray]:
    """Complex basis of sl(n, C): elementary off-diagonals plus coroots."""
    out = []
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0
            out.append(m)
    for j in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[j, j] = 1.0
        m[j + 1, j + 1] = -1.0
        out.append(m)
    return out


def sl_real_basis(n: int) -> list[np.ndarray]:
    """Basis of the realification of sl(n, C): {B, iB} over a complex basis."""
    cb = sl_complex_basis(n)
    return cb + [1.0j * b for b in cb]


def borel_basis(n: int) -> list[np.ndarray]:
    """Real basis of the Borel algebra: real coroot diagonals and upper pairs."""
    out = []
    for j in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[j, j] = 1.0
        m[j + 1, j + 1] = -1.0
        out.append(m)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0
            out.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0j
            out.append(m)
    return out


# ---------------------------------------------------------------------------
# k + b splitting of sl(n, C)
# ---------------------------------------------------------------------------

def project_borel(z: np.ndarray) -> np.ndarray:
    """Borel component of z in the splitting sl(n,C) = su(n) + borel.

    The Borel part keeps the strict upper triangle of z plus the adjoint of
    the strict lower triangle, and the real part of the diagonal; forced by
    the uniqueness of the anti-Hermitian / upper-real-diagonal decomposition.
    """
    upper = np.triu(z, 1)
    lower = np.tril(z, -1)
    return upper + lower.conj().T + np.diag(np.real(np.diag(z)))


def project_compact(z: np.ndarray) -> np.ndarray:
    """Anti-Hermitian component of z in the splitting sl(n,C) = su(n) + borel."""
    return z - project_borel(z)


# ---------------------------------------------------------------------------
# root datum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootDatum:
    """Simple coroots, fundamental coweights and Cartan data for su(n).

    The coroots are h_j = E_jj - E_(j+1)(j+1) and the coweights are the
    unique traceless diagonal matrices with alpha_k(w_j) = delta_jk.  The
    rational matrix ``q_exact`` expands coweights over coroots and is the
    exact inverse of the transposed Cartan matrix.
    """

    n: int
    rank: int
    coroots: tuple[np.ndarray, ...]
    coweights: tuple[np.ndarray, ...]
    coweights_exact: tuple[tuple[Fraction, ...], ...]
    cartan: np.ndarray
    q_exact: tuple[tuple[Fraction, ...], ...]
    q_matrix: np.ndarray = field(repr=False)

    def simple_root_values(self, xi: np.ndarray) -> np.ndarray:
        """alpha_j(xi) for a real diagonal vector xi, j = 1..rank."""
        xi = np.asarray(xi, dtype=float)
        return xi[:-1] - xi[1:]

    def highest_root_value(self, xi: np.ndarray) -> float:
        """theta(xi) = xi_1 - xi_n for a real diagonal vector xi."""
        xi = np.asarray(xi, dtype=float)
        return float(xi[0] - xi[-1])


def _exact_inverse(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse in exact rational arithmetic."""
    k = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(k)] for i, r in enumerate(rows)]
    for col in range(k):
        piv = next(r for r in range(col, k) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1, 1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[k:] for row in aug]


def build_root_datum(n: int) -> RootDatum:
    if n < 2:
        raise InvalidRank(f"need n >= 2, got {n}")
    rank = n - 1
    coroots = []
    for j in range(rank):
        d = np.zeros(n)
        d[j] = 1.0
        d[j + 1] = -1.0
        coroots.append(np.diag(d).astype(complex))
    coweights = []
    coweights_exact = []
    for j in range(1, n):
        d = tuple([Fraction(n - j, n)] * j + [Fraction(-j, n)] * (n - j))
        coweights_exact.append(d)
        coweights.append(np.diag([float(v) for v in d]).astype(complex))
    cartan = 2 * np.eye(rank, dtype=int) - np.eye(rank, dtype=int, k=1) - np.eye(rank, dtype=int, k=-1)
    # q_exact inverts the transposed Cartan matrix in rational arithmetic
    ct = [[Fraction(int(cartan[k][j])) for k in range(rank)] for j in range(rank)]
    q_rows = _exact_inverse(ct)
    q_exact = tuple(tuple(row) for row in q_rows)
    q_matrix = np.array([[float(v) for v in row] for row in q_rows])
    return RootDatum(
        n=n,
        rank=rank,
        coroots=tuple(coroots),
        coweights=tuple(coweights),
        coweights_exact=tuple(coweights_exact),
        cartan=cartan,
        q_exact=q_exact,
        q_matrix=q_matrix,
    )


# ---------------------------------------------------------------------------
# special elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpecialElements:
    """Coxeter representative, principal element and apposition torus data.

    ``coxeter_rep`` is the det-corrected cyclic shift matrix, normalizing the
    diagonal torus and inducing the cyclic Coxeter permutation on diagonal
    entries.  ``apposition_conjugator`` is the det-corrected unitary DFT
    matrix F; the second torus F T F^-1 meets the diagonal torus exactly in
    the center and has trace-orthogonal Lie algebra.
    """

    n: int
    coxeter_rep: np.ndarray
    principal: np.ndarray
    coxeter_number: int
    rho_coweight: np.ndarray
    apposition_conjugator: np.ndarray
    center: tuple[np.ndarray, ...]

    def coxeter_permutation(self, diag: np.ndarray) -> np.ndarray:
        """Action of the Coxeter element on diagonal coordinates (cyclic shift)."""
        return np.roll(np.asarray(diag, dtype=float), 1)


def special_elements(n: int) -> SpecialElements:
    if n < 2:
        raise InvalidRank(f"need n >= 2, got {n}")
    shift = np.zeros((n, n), dtype=complex)
    for j in range(n):
        shift[(j + 1) % n, j] = 1.0
    # det of the cyclic shift is (-1)^(n-1); flip one entry when needed
    if n % 2 == 0:
        shift[0, n - 1] = -1.0
    rho = np.diag([(n - 1) / 2.0 - j for j in range(n)]).astype(complex)
    principal = scipy.linalg.expm(2j * np.pi * rho / n)
    dft = np.array(
        [[np.exp(2j * np.pi * j * k / n) for k in range(n)] for j in range(n)]
    ) / np.sqrt(n)
    det = np.linalg.det(dft)
    dft[:, 0] *= np.conj(det) / abs(det)
    zeta = np.exp(2j * np.pi / n)
    center = tuple(zeta**k * np.eye(n, dtype=complex) for k in range(n))
    return SpecialElements(
        n=n,
        coxeter_rep=shift,
        principal=principal,
        coxeter_number=n,
        rho_coweight=rho,
        apposition_conjugator=dft,
        center=center,
    )


def diagonal_torus_element(phases: np.ndarray) -> np.ndarray:
    """exp(i diag(phases)) with the phases shifted to zero sum."""
    phases = np.asarray(phases, dtype=float)
    phases = phases - phases.mean()
    return np.diag(np.exp(1j * phases))


def apposition_torus_element(phases: np.ndarray, special: SpecialElements) -> np.ndarray:
    f = special.apposition_conjugator
    return f @ diagonal_torus_element(phases) @ f.conj().T


def apposition_algebra_element(diag: np.ndarray, special: SpecialElements) -> np.ndarray:
    """Element of the apposition torus algebra from real diagonal coordinates."""
    diag = np.asarray(diag, dtype=float)
    diag = diag - diag.mean()
    f = special.apposition_conjugator
    return f @ (1j * np.diag(diag)) @ f.conj().T


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------

def random_algebra_element(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian anti-Hermitian traceless matrix."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return skew_traceless(scale * a)


def random_group_element(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """exp of a Gaussian algebra element; scale 1.0 covers the group well."""
    return scipy.linalg.expm(random_algebra_element(n, rng, scale))


def random_sl_element(n: int, rng: np.random.Generator, scale: float = 0.7) -> np.ndarray:
    """Well-conditioned random element of SL(n, C): unitary times Borel factor."""
    z = np.zeros((n, n), dtype=complex)
    for b in borel_basis(n):
        z += rng.standard_normal() * b
    return random_group_element(n, rng) @ scipy.linalg.expm(scale * z / (n * n))


def group_exp(z: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(z)
