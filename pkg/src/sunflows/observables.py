"""Scalar observables and the closed-form derivative families.

Class functions on the group, invariant functions on the algebra, and
dressing-invariant functions on the Borel group each carry a value and an
exact gradient: the group gradient is the algebra element representing the
left-translation derivative against the trace form, the algebra gradient
represents the linear derivative, and the Borel gradient represents the
left-translation derivative against the imaginary trace form.  Word traces
supply generic probe observables on every phase space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import decomp
from .errors import NotClassFunction
from .liecore import RootDatum, skew_traceless


# ---------------------------------------------------------------------------
# class functions on the group
# ---------------------------------------------------------------------------

class ClassFunction:
    """Conjugation-invariant function on SU(n) with an exact gradient."""

    name = "class-function"

    def value(self, g: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, g: np.ndarray) -> np.ndarray:
        """Algebra element N with pair(Z, N) = d/dt value(exp(tZ) g) at t=0."""
        raise NotImplementedError


@dataclass(frozen=True)
class PowerTrace(ClassFunction):
    """Re tr(g^k), the basic polynomial class function."""

    k: int
    coeff: float = 1.0

    @property
    def name(self):
        return f"retr{self.k}"

    def value(self, g):
        return self.coeff * float(np.trace(np.linalg.matrix_power(g, self.k)).real)

    def grad(self, g):
        return self.coeff * self.k * skew_traceless(np.linalg.matrix_power(g, self.k))


@dataclass(frozen=True)
class AlcoveCoroot(ClassFunction):
    """Pairing of the alcove phase vector with the j-th simple coroot."""

    j: int
    datum: RootDatum
    margin: float = decomp.DEFAULT_REGULARITY_MARGIN

    @property
    def name(self):
        return f"coroot{self.j}"

    def value(self, g):
        xi = decomp.alcove_diagonalize(g, self.margin).spectrum
        return float(xi[self.j] - xi[self.j + 1])

    def grad(self, g):
        return decomp.grad_alcove_coroot(g, self.j, self.datum, self.margin)


@dataclass(frozen=True)
class AlcoveCoweight(ClassFunction):
    """Pairing of the alcove phase vector with the j-th fundamental coweight."""

    j: int
    datum: RootDatum
    margin: float = decomp.DEFAULT_REGULARITY_MARGIN

    @property
    def name(self):
        return f"coweight{self.j}"

    def value(self, g):
        xi = decomp.alcove_diagonalize(g, self.margin).spectrum
        return decomp.coweight_values(xi, self.datum)[self.j]

    def grad(self, g):
        return decomp.grad_alcove_coweight(g, self.j, self.datum, self.margin)


def coroot_family(datum: RootDatum) -> list[ClassFunction]:
    return [AlcoveCoroot(j, datum) for j in range(datum.rank)]


def coweight_family(datum: RootDatum) -> list[ClassFunction]:
    return [AlcoveCoweight(j, datum) for j in range(datum.rank)]


# ---------------------------------------------------------------------------
# invariant functions on the algebra
# ---------------------------------------------------------------------------

class AlgebraFunction:
    """Conjugation-invariant function on su(n) with an exact gradient."""

    name = "algebra-function"

    def value(self, j_alg: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, j_alg: np.ndarray) -> np.ndarray:
        """Algebra element W with pair(Z, W) = d/dt value(J + tZ) at t=0."""
        raise NotImplementedError


@dataclass(frozen=True)
class AlgebraPower(AlgebraFunction):
    """tr((iJ)^k); even powers include the quadratic Casimir k=2."""

    k: int
    coeff: float = 1.0

    @property
    def name(self):
        return f"algpow{self.k}"

    def value(self, j_alg):
        h = 1j * j_alg
        return self.coeff * float(np.trace(np.linalg.matrix_power(h, self.k)).real)

    def grad(self, j_alg):
        n = j_alg.shape[0]
        m = self.k * 1j * np.linalg.matrix_power(1j * j_alg, self.k - 1)
        return self.coeff * (m - (np.trace(m) / n) * np.eye(n))


@dataclass(frozen=True)
class ChamberCoroot(AlgebraFunction):
    """Pairing of the chamber spectrum with the j-th simple coroot."""

    j: int
    datum: RootDatum
    margin: float = decomp.DEFAULT_REGULARITY_MARGIN

    @property
    def name(self):
        return f"chamber{self.j}"

    def value(self, j_alg):
        xi = decomp.chamber_diagonalize(j_alg, self.margin).spectrum
        return float(xi[self.j] - xi[self.j + 1])

    def grad(self, j_alg):
        return decomp.grad_chamber_coroot(j_alg, self.j, self.datum, self.margin)


def chamber_family(datum: RootDatum) -> list[AlgebraFunction]:
    return [ChamberCoroot(j, datum) for j in range(datum.rank)]


# ---------------------------------------------------------------------------
# dressing-invariant functions on the Borel group
# ---------------------------------------------------------------------------

class BorelFunction:
    """Dressing-invariant function on the Borel group with exact gradient."""

    name = "borel-function"

    def value(self, b: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, b: np.ndarray) -> np.ndarray:
        """Algebra element W with im-pair(Z, W) = d/dt value(exp(tZ) b), Z Borel."""
        raise NotImplementedError


@dataclass(frozen=True)
class BorelChamberCoroot(BorelFunction):
    """Half the j-th chamber coroot variable of i log(b b^H)."""

    j: int
    datum: RootDatum
    margin: float = decomp.DEFAULT_REGULARITY_MARGIN

    @property
    def name(self):
        return f"borelchamber{self.j}"

    def _log_point(self, b):
        p = decomp.posdef_of_borel(b)
        return 1j * scipy.linalg.logm(p)

    def value(self, b):
        xi = decomp.chamber_diagonalize(self._log_point(b), self.margin).spectrum
        return 0.5 * float(xi[self.j] - xi[self.j + 1])

    def grad(self, b):
        frame = decomp.chamber_diagonalize(self._log_point(b), self.margin).frame
        return frame.conj().T @ (1j * self.datum.coroots[self.j]) @ frame


@dataclass(frozen=True)
class BorelPower(BorelFunction):
    """tr((b b^H)^k), the polynomial dressing-invariant family."""

    k: int
    coeff: float = 1.0

    @property
    def name(self):
        return f"borelpow{self.k}"

    def value(self, b):
        p = decomp.posdef_of_borel(b)
        return self.coeff * float(np.trace(np.linalg.matrix_power(p, self.k)).real)

    def grad(self, b):
        n = b.shape[0]
        pk = np.linalg.matrix_power(decomp.posdef_of_borel(b), self.k)
        return self.coeff * 2 * self.k * 1j * (pk - (np.trace(pk) / n) * np.eye(n))


def borel_chamber_family(datum: RootDatum) -> list[BorelFunction]:
    return [BorelChamberCoroot(j, datum) for j in range(datum.rank)]


# ---------------------------------------------------------------------------
# generic word-trace probes
# ---------------------------------------------------------------------------

def word_observable(letters: tuple[str, ...], part: str = "re", coeff: float = 1.0):
    """Observable x -> coeff * Re/Im tr(product of letters of x).

    Letters are resolved by the point's ``letter`` method, e.g. 'g', 'j' on
    the cotangent bundle, 'x', 'xh~' on the Heisenberg double, or 'a1', 'c2~'
    on fusion spaces.
    """

    def obs(x):
        m = x.letter(letters[0])
        for name in letters[1:]:
            m = m @ x.letter(name)
        t = np.trace(m)
        return coeff * float(t.real if part == "re" else t.imag)

    obs.__name__ = ("" if part == "re" else "im-") + "tr[" + ".".join(letters) + "]"
    return obs


def observable_product(f, g):
    def obs(x):
        return f(x) * g(x)

    obs.__name__ = f"({getattr(f, '__name__', 'f')})*({getattr(g, '__name__', 'g')})"
    return obs


def pullback(f, chart):
    """Observable f composed with a point map (used for permutation pullbacks)."""

    def obs(x):
        return f(chart(x))

    obs.__name__ = f"pullback[{getattr(f, '__name__', 'f')}]"
    return obs


def require_class_function(fn) -> ClassFunction:
    if not isinstance(fn, ClassFunction):
        raise NotClassFunction(f"{fn!r} is not a class function")
    return fn


def nabla_class_function(fn: ClassFunction, g: np.ndarray) -> np.ndarray:
    """Gradient of a class function; closed form for every supported family."""
    require_class_function(fn)
    return fn.grad(g)
