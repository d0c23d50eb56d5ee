"""Phase-space points and space descriptors.

Three kinds of phase space appear: the cotangent bundle of SU(n) realized as
pairs (g, J) by right translations, the Heisenberg double realized as
SL(n, C), and fusion products of conjugation factors ('K') and double
factors ('D') covering the internally fused double, the sphere system and
all moduli-type spaces.  Points are immutable; every operation returns new
arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import decomp, liecore
from .errors import InvalidShape, ShapeError


# ---------------------------------------------------------------------------
# cotangent bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CotangentPoint:
    g: np.ndarray
    j: np.ndarray

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def letter(self, name: str) -> np.ndarray:
        if name == "g":
            return self.g
        if name == "g~":
            return self.g.conj().T
        if name == "j":
            return self.j
        raise ShapeError(f"unknown cotangent letter {name!r}")

    def conjugate(self, eta: np.ndarray) -> "CotangentPoint":
        ei = eta.conj().T
        return CotangentPoint(eta @ self.g @ ei, eta @ self.j @ ei)

    def distance(self, other: "CotangentPoint") -> float:
        return float(np.linalg.norm(self.g - other.g) + np.linalg.norm(self.j - other.j))


def cotangent_momentum(x: CotangentPoint) -> np.ndarray:
    """Momentum map of the conjugation action: J - g^-1 J g."""
    return x.j - x.g.conj().T @ x.j @ x.g


def random_cotangent_point(n: int, rng: np.random.Generator, scale: float = 1.0) -> CotangentPoint:
    return CotangentPoint(
        liecore.random_group_element(n, rng, scale),
        liecore.random_algebra_element(n, rng, scale),
    )


# ---------------------------------------------------------------------------
# Heisenberg double
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeisenbergPoint:
    x: np.ndarray

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def letter(self, name: str) -> np.ndarray:
        if name == "x":
            return self.x
        if name == "x~":
            return np.linalg.inv(self.x)
        if name == "xh":
            return self.x.conj().T
        if name == "xh~":
            return np.linalg.inv(self.x.conj().T)
        raise ShapeError(f"unknown Heisenberg letter {name!r}")

    def factors(self) -> decomp.IwasawaFactors:
        return decomp.iwasawa_decompose(self.x)

    def distance(self, other: "HeisenbergPoint") -> float:
        return float(np.linalg.norm(self.x - other.x))


def heisenberg_momentum(x: HeisenbergPoint) -> np.ndarray:
    """Group-valued momentum map b_left b_right of the quasi-adjoint action."""
    f = x.factors()
    return f.b_left @ f.b_right


def quasi_adjoint(eta: np.ndarray, x: HeisenbergPoint) -> HeisenbergPoint:
    """Quasi-adjoint action: eta X u_right(eta b_left(X))."""
    f = x.factors()
    twist = decomp.unitary_right(eta @ f.b_left)
    return HeisenbergPoint(eta @ x.x @ twist)


def random_heisenberg_point(n: int, rng: np.random.Generator, scale: float = 0.7) -> HeisenbergPoint:
    return HeisenbergPoint(liecore.random_sl_element(n, rng, scale))


# ---------------------------------------------------------------------------
# fusion products of 'D' and 'K' factors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FusionSpace:
    """Ordered fusion product of double ('D') and conjugation ('K') factors."""

    n: int
    types: tuple[str, ...]

    def __post_init__(self):
        if not self.types:
            raise InvalidShape("a fusion space needs at least one factor")
        if any(t not in ("D", "K") for t in self.types):
            raise InvalidShape(f"unknown factor types in {self.types}")

    @property
    def num_double(self) -> int:
        return sum(1 for t in self.types if t == "D")

    @property
    def num_conj(self) -> int:
        return sum(1 for t in self.types if t == "K")

    def random_point(self, rng: np.random.Generator, scale: float = 1.0) -> "FusionPoint":
        factors = []
        for t in self.types:
            if t == "D":
                factors.append((
                    liecore.random_group_element(self.n, rng, scale),
                    liecore.random_group_element(self.n, rng, scale),
                ))
            else:
                factors.append(liecore.random_group_element(self.n, rng, scale))
        return FusionPoint(self, tuple(factors))


def moduli_space(m: int, n_holes: int, n: int) -> FusionSpace:
    """The canonical fusion space with m double factors and n_holes conjugation factors."""
    if m < 0 or n_holes < 0 or (m == 0 and n_holes == 0):
        raise InvalidShape("need m, n >= 0 and not both zero")
    return FusionSpace(n=n, types=("D",) * m + ("K",) * n_holes)


def double_space(n: int) -> FusionSpace:
    return moduli_space(1, 0, n)


def sphere_space(n: int) -> FusionSpace:
    return moduli_space(0, 3, n)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b @ a.conj().T @ b.conj().T


@dataclass(frozen=True)
class FusionPoint:
    """Point of a fusion space; 'D' entries are pairs, 'K' entries single matrices."""

    space: FusionSpace
    factors: tuple

    @property
    def n(self) -> int:
        return self.space.n

    def factor_momentum(self, f: int) -> np.ndarray:
        if self.space.types[f] == "D":
            a, b = self.factors[f]
            return commutator(a, b)
        return self.factors[f]

    def momentum(self) -> np.ndarray:
        out = np.eye(self.n, dtype=complex)
        for f in range(len(self.factors)):
            out = out @ self.factor_momentum(f)
        return out

    def pair(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """The i-th double factor (1-based, counting 'D' factors only)."""
        positions = [f for f, t in enumerate(self.space.types) if t == "D"]
        if not 1 <= i <= len(positions):
            raise InvalidShape(f"no double factor with index {i}")
        return self.factors[positions[i - 1]]

    def hole(self, k: int) -> np.ndarray:
        """The k-th conjugation factor (1-based, counting 'K' factors only)."""
        positions = [f for f, t in enumerate(self.space.types) if t == "K"]
        if not 1 <= k <= len(positions):
            raise InvalidShape(f"no conjugation factor with index {k}")
        return self.factors[positions[k - 1]]

    def letter(self, name: str) -> np.ndarray:
        inverse = name.endswith("~")
        core = name[:-1] if inverse else name
        kind, idx = core[0], int(core[1:])
        if kind == "a":
            m = self.pair(idx)[0]
        elif kind == "b":
            m = self.pair(idx)[1]
        elif kind == "c":
            m = self.hole(idx)
        else:
            raise ShapeError(f"unknown fusion letter {name!r}")
        return m.conj().T if inverse else m

    def replace(self, f: int, value) -> "FusionPoint":
        factors = list(self.factors)
        factors[f] = value
        return FusionPoint(self.space, tuple(factors))

    def conjugate(self, eta: np.ndarray) -> "FusionPoint":
        ei = eta.conj().T
        factors = []
        for t, fac in zip(self.space.types, self.factors):
            if t == "D":
                factors.append((eta @ fac[0] @ ei, eta @ fac[1] @ ei))
            else:
                factors.append(eta @ fac @ ei)
        return FusionPoint(self.space, tuple(factors))

    def distance(self, other: "FusionPoint") -> float:
        tot = 0.0
        for t, f1, f2 in zip(self.space.types, self.factors, other.factors):
            if t == "D":
                tot += float(np.linalg.norm(f1[0] - f2[0]) + np.linalg.norm(f1[1] - f2[1]))
            else:
                tot += float(np.linalg.norm(f1 - f2))
        return tot

    def on_unit_level(self, tol: float = 1e-10) -> bool:
        """Whether the point lies on the unit level set of the momentum map."""
        return float(np.linalg.norm(self.momentum() - np.eye(self.n))) <= tol

    def flat(self) -> np.ndarray:
        parts = []
        for t, fac in zip(self.space.types, self.factors):
            mats = fac if t == "D" else (fac,)
            for m in mats:
                parts.append(m.real.ravel())
                parts.append(m.imag.ravel())
        return np.concatenate(parts)


def fusion_point(space: FusionSpace, *factors) -> FusionPoint:
    if len(factors) != len(space.types):
        raise InvalidShape(f"expected {len(space.types)} factors, got {len(factors)}")
    return FusionPoint(space, tuple(factors))


def moduli_point(space: FusionSpace, pairs, holes) -> FusionPoint:
    """Point of a canonical space from double pairs and conjugation components."""
    if len(pairs) != space.num_double or len(holes) != space.num_conj:
        raise InvalidShape("component counts do not match the space shape")
    return FusionPoint(space, tuple(pairs) + tuple(holes))


def embed_shift(u: FusionPoint) -> FusionPoint:
    """Append the inverse momentum as a final conjugation factor.

    The image lies on the unit level set of the enlarged space's momentum map
    and realizes the shifting-trick identification.
    """
    target = FusionSpace(u.n, u.space.types + ("K",))
    return FusionPoint(target, u.factors + (np.linalg.inv(u.momentum()),))
