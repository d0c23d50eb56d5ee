"""Commuting Hamiltonian families on fusion spaces and their exact flows.

A family is specified by a set I of single-factor indices, a disjoint set
I_hat of commutator indices, a level-0 collection J of non-intersecting
conjugation-factor intervals, optional nested interval levels, and optional
extras: consecutive commutator ranges and tail words.  Each admissible block
carries the rank-many alcove variables as generators; single-factor blocks
use coroot variables while momentum-type blocks use coweight variables, so
that all torus actions close up with period 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import decomp
from .errors import AssumptionViolation, InvalidPlan, InvalidShape, UnsupportedWord
from .flows import coroot_torus_element, coweight_torus_element
from .liecore import RootDatum
from .observables import (
    AlcoveCoroot,
    AlcoveCoweight,
    ClassFunction,
    PowerTrace,
)
from .spaces import FusionPoint, FusionSpace


# ---------------------------------------------------------------------------
# interval families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalFamily:
    """Block data selecting a commuting family on a canonical fusion space."""

    single: tuple[int, ...] = ()
    commutators: tuple[int, ...] = ()
    intervals: tuple[tuple[int, int], ...] = ()
    nested: tuple[tuple[tuple[int, int], ...], ...] = ()
    commutator_ranges: tuple[tuple[int, int], ...] = ()
    tails: tuple[tuple[int, int], ...] = ()

    def block_count(self) -> int:
        return (
            len(self.single)
            + len(self.commutators)
            + len(self.intervals)
            + sum(len(level) for level in self.nested)
            + len(self.commutator_ranges)
            + len(self.tails)
        )


def _check_interval_list(intervals, n_holes: int, what: str):
    prev_end = 0
    for lo, hi in intervals:
        if not (1 <= lo < hi <= n_holes):
            raise AssumptionViolation(
                f"clause interval-bounds: {what} [{lo},{hi}] must satisfy 1 <= lo < hi <= {n_holes}"
            )
        if lo <= prev_end:
            raise AssumptionViolation(
                f"clause interval-order: {what} [{lo},{hi}] overlaps or touches the previous interval"
            )
        prev_end = hi


def validate_family(space: FusionSpace, fam: IntervalFamily) -> None:
    """Check the admissibility clauses; raises AssumptionViolation naming the clause."""
    m, n_holes = space.num_double, space.num_conj
    if space.types != ("D",) * m + ("K",) * n_holes:
        raise AssumptionViolation("clause canonical-order: family requires a canonical space")
    if fam.block_count() == 0:
        raise AssumptionViolation("clause nonempty: at least one block is required")
    for i in fam.single:
        if not 1 <= i <= m:
            raise AssumptionViolation(f"clause single-range: index {i} outside 1..{m}")
    for i in fam.commutators:
        if not 1 <= i <= m:
            raise AssumptionViolation(f"clause commutator-range: index {i} outside 1..{m}")
    if set(fam.single) & set(fam.commutators):
        raise AssumptionViolation("clause disjoint: single and commutator index sets intersect")
    if len(set(fam.single)) != len(fam.single) or len(set(fam.commutators)) != len(fam.commutators):
        raise AssumptionViolation("clause distinct: repeated factor index")
    _check_interval_list(fam.intervals, n_holes, "interval")
    if m == 0:
        if n_holes < 3:
            raise AssumptionViolation("clause m0-size: with no double factors, need n >= 3")
        covered = set()
        for lo, hi in fam.intervals:
            covered |= set(range(lo, hi + 1))
        if covered >= set(range(1, n_holes + 1)):
            raise AssumptionViolation(
                "clause m0-proper: the interval union must be a proper subset of {1..n}"
            )
    if m == 1 and n_holes == 0 and fam.commutators:
        raise AssumptionViolation(
            "clause m1n0-commutator: the torus-with-one-hole family excludes the commutator block"
        )
    lower_levels = [fam.intervals]
    for lvl, level in enumerate(fam.nested, start=1):
        _check_interval_list(level, n_holes, f"nested-level-{lvl} interval")
        for lo, hi in level:
            for prior in lower_levels:
                for plo, phi in prior:
                    inside = lo <= plo and phi <= hi and (hi - lo) > (phi - plo)
                    disjoint = hi < plo or phi < lo
                    if not (inside or disjoint):
                        raise AssumptionViolation(
                            f"clause nesting: [{lo},{hi}] neither properly contains nor avoids [{plo},{phi}]"
                        )
        lower_levels.append(level)
    blocked = set(fam.single) | set(fam.commutators)
    for k1, k2 in fam.commutator_ranges:
        if not (1 <= k1 < k2 <= m):
            raise AssumptionViolation(
                f"clause commutator-range-bounds: [{k1},{k2}] must satisfy 1 <= k1 < k2 <= {m}"
            )
        if set(range(k1, k2 + 1)) & blocked:
            raise AssumptionViolation(
                "clause commutator-range-disjoint: range meets the single/commutator index sets"
            )
    max_used = max([0, *fam.single, *fam.commutators])
    first_interval = min([lo for lo, _ in fam.intervals], default=n_holes + 1)
    for k, kappa in fam.tails:
        if not (1 <= k <= m and 0 <= kappa <= n_holes):
            raise AssumptionViolation(f"clause tail-bounds: ({k},{kappa}) outside the space")
        if k <= max_used:
            raise AssumptionViolation(
                f"clause tail-start: tail start {k} must exceed every single/commutator index"
            )
        if kappa >= first_interval:
            raise AssumptionViolation(
                f"clause tail-end: tail end {kappa} must precede the first interval"
            )


# ---------------------------------------------------------------------------
# word Hamiltonians
# ---------------------------------------------------------------------------

def block_positions(space: FusionSpace, block: tuple) -> list[int]:
    """Consecutive factor positions whose momenta multiply to the block value.

    Every momentum-type block is the product of factor momenta over a
    consecutive run of fused factors; only such runs carry the flow formula.
    """
    kind = block[0]
    d_pos = [f for f, t in enumerate(space.types) if t == "D"]
    k_pos = [f for f, t in enumerate(space.types) if t == "K"]
    if kind == "commutator":
        positions = [d_pos[block[1] - 1]]
    elif kind == "interval":
        positions = k_pos[block[1] - 1 : block[2]]
    elif kind == "commutator-range":
        positions = d_pos[block[1] - 1 : block[2]]
    elif kind == "tail":
        k, kappa = block[1], block[2]
        positions = d_pos[k - 1 :] + k_pos[:kappa]
    elif kind == "span":
        positions = list(range(block[1], block[2] + 1))
    else:
        raise UnsupportedWord(f"unknown block kind {kind!r}")
    if not positions or positions != list(range(positions[0], positions[-1] + 1)):
        raise UnsupportedWord(f"block {block} is not a consecutive factor run")
    return positions


@dataclass(frozen=True)
class WordHamiltonian:
    """A class function applied to one admissible block of a fusion point."""

    block: tuple
    classfn: ClassFunction

    @property
    def name(self) -> str:
        return f"{self.classfn.name}@{'-'.join(str(p) for p in self.block)}"

    def block_value(self, x: FusionPoint) -> np.ndarray:
        if self.block[0] == "single":
            return x.pair(self.block[1])[0]
        out = np.eye(x.n, dtype=complex)
        for f in block_positions(x.space, self.block):
            out = out @ x.factor_momentum(f)
        return out

    def __call__(self, x: FusionPoint) -> float:
        return self.classfn.value(self.block_value(x))

    def letters(self, x: FusionPoint):
        """Positions (factor, component) moved by this block's flow."""
        if self.block[0] == "single":
            d_pos = [f for f, t in enumerate(x.space.types) if t == "D"]
            return [(d_pos[self.block[1] - 1], 1)]  # flow moves the partner letter
        out = []
        for f in block_positions(x.space, self.block):
            comps = (0, 1) if x.space.types[f] == "D" else (0,)
            out.extend((f, c) for c in comps)
        return out


def family_blocks(fam: IntervalFamily) -> list[tuple]:
    blocks: list[tuple] = [("single", i) for i in fam.single]
    blocks += [("commutator", i) for i in fam.commutators]
    blocks += [("interval", lo, hi) for lo, hi in fam.intervals]
    for level in fam.nested:
        blocks += [("interval", lo, hi) for lo, hi in level]
    blocks += [("commutator-range", k1, k2) for k1, k2 in fam.commutator_ranges]
    blocks += [("tail", k, kappa) for k, kappa in fam.tails]
    return blocks


def hamiltonian_family(space: FusionSpace, fam: IntervalFamily, datum: RootDatum,
                       classfns: list[ClassFunction] | None = None) -> list[WordHamiltonian]:
    """Generators of the commuting family: one per block and class function.

    By default single-factor blocks carry the coroot alcove variables and
    every momentum-type block carries the coweight alcove variables.
    """
    validate_family(space, fam)
    out = []
    for block in family_blocks(fam):
        if classfns is not None:
            fns = classfns
        elif block[0] == "single":
            fns = [AlcoveCoroot(j, datum) for j in range(datum.rank)]
        else:
            fns = [AlcoveCoweight(j, datum) for j in range(datum.rank)]
        out.extend(WordHamiltonian(block, fn) for fn in fns)
    return out


def power_trace_family(space: FusionSpace, fam: IntervalFamily, datum: RootDatum,
                       kmax: int | None = None) -> list[WordHamiltonian]:
    """Same blocks with polynomial class functions, handy away from walls."""
    validate_family(space, fam)
    ks = range(1, (kmax or space.n) + 1)
    return [WordHamiltonian(b, PowerTrace(k)) for b in family_blocks(fam) for k in ks]


# ---------------------------------------------------------------------------
# flows and torus actions
# ---------------------------------------------------------------------------

def _conjugate_letters(x: FusionPoint, letters, u: np.ndarray) -> FusionPoint:
    ui = u.conj().T
    out = x
    for f, comp in letters:
        fac = out.factors[f]
        if out.space.types[f] == "D":
            fac = list(fac)
            fac[comp] = u @ fac[comp] @ ui
            out = out.replace(f, tuple(fac))
        else:
            out = out.replace(f, u @ fac @ ui)
    return out


def moduli_flow(x: FusionPoint, ham: WordHamiltonian, tau: float) -> FusionPoint:
    """Exact integral curve of a word Hamiltonian.

    Single-factor blocks right-translate the partner letter; all
    momentum-type blocks conjugate every letter of the block by
    exp(tau * grad of the class function at the block value).
    """
    if ham.block[0] == "single":
        i = ham.block[1]
        a, b = x.pair(i)
        positions = [f for f, t in enumerate(x.space.types) if t == "D"]
        f = positions[i - 1]
        return x.replace(f, (a, b @ scipy.linalg.expm(-tau * ham.classfn.grad(a))))
    u = scipy.linalg.expm(tau * ham.classfn.grad(ham.block_value(x)))
    return _conjugate_letters(x, ham.letters(x), u)


def moduli_torus_action(x: FusionPoint, taus, hams: list[WordHamiltonian],
                        datum: RootDatum) -> FusionPoint:
    """Joint torus action of a family, one angle vector per block.

    ``taus`` maps each distinct block (in family order) to a rank-length
    angle vector.  Single blocks translate by the coroot torus element in the
    alcove frame of their argument; momentum blocks conjugate by the
    coweight torus element in the alcove frame of the block value.
    """
    blocks = []
    for h in hams:
        if h.block not in blocks:
            blocks.append(h.block)
    taus = np.asarray(taus, dtype=float)
    if taus.shape != (len(blocks), datum.rank):
        raise InvalidShape(f"need {(len(blocks), datum.rank)} angles, got {taus.shape}")
    out = x
    for block, tau in zip(blocks, taus):
        rep = WordHamiltonian(block, PowerTrace(1))
        if block[0] == "single":
            i = block[1]
            a, b = out.pair(i)
            frame = decomp.alcove_diagonalize(a).frame
            t = frame.conj().T @ coroot_torus_element(-tau, datum) @ frame
            positions = [f for f, ty in enumerate(out.space.types) if ty == "D"]
            out = out.replace(positions[i - 1], (a, b @ t))
        else:
            val = rep.block_value(out)
            frame = decomp.alcove_diagonalize(val).frame
            t = frame.conj().T @ coweight_torus_element(tau, datum) @ frame
            out = _conjugate_letters(out, rep.letters(out), t)
    return out


# ---------------------------------------------------------------------------
# permutations of fused factors
# ---------------------------------------------------------------------------

def _act_on_factor(space: FusionSpace, factor, ftype: str, u: np.ndarray):
    ui = u.conj().T
    if ftype == "D":
        return (u @ factor[0] @ ui, u @ factor[1] @ ui)
    return u @ factor @ ui


def swap_adjacent(x: FusionPoint, j: int) -> FusionPoint:
    """Exchange factors j and j+1 (0-based); the left momentum twists the right.

    This is the standard quasi-Poisson identification of the two fusion
    orders: (.., m_j, m_(j+1), ..) maps to (.., momentum_j(m_j) . m_(j+1), m_j, ..).
    """
    types = x.space.types
    if not 0 <= j < len(types) - 1:
        raise InvalidPlan(f"no adjacent pair at position {j}")
    phi = x.factor_momentum(j)
    twisted = _act_on_factor(x.space, x.factors[j + 1], types[j + 1], phi)
    new_types = list(types)
    new_types[j], new_types[j + 1] = new_types[j + 1], new_types[j]
    new_factors = list(x.factors)
    new_factors[j], new_factors[j + 1] = twisted, x.factors[j]
    return FusionPoint(FusionSpace(x.n, tuple(new_types)), tuple(new_factors))


def permutation_pushforward(x: FusionPoint, plan: list[int]) -> FusionPoint:
    """Apply a sequence of adjacent transpositions of fused factors."""
    out = x
    for j in plan:
        if not isinstance(j, int):
            raise InvalidPlan(f"plan entries must be integers, got {j!r}")
        out = swap_adjacent(out, j)
    return out


def pullback_hamiltonian(h, plan: list[int]):
    """Observable on the source space: h evaluated after the pushforward."""

    def obs(x: FusionPoint):
        return h(permutation_pushforward(x, plan))

    obs.__name__ = f"pullback[{getattr(h, 'name', getattr(h, '__name__', 'h'))}]"
    return obs


# ---------------------------------------------------------------------------
# sphere-with-four-holes specifics
# ---------------------------------------------------------------------------

def sphere_family() -> IntervalFamily:
    """The commuting family of the four-holed sphere model: one interval [1,2]."""
    return IntervalFamily(intervals=((1, 2),))


def sphere_constants_of_motion(x: FusionPoint) -> dict[str, float]:
    """Invariant probes constant along the sphere family flows.

    Word traces of (C1, C2) and of (C1 C2, C3) are conserved because the
    flows conjugate C1, C2 simultaneously and fix C3.
    """
    if x.space.types != ("K", "K", "K"):
        raise InvalidShape("expected a three-factor conjugation space")
    c1, c2, c3 = x.factors
    c12 = c1 @ c2
    words = {
        "tr-c1": c1,
        "tr-c2": c2,
        "tr-c12": c12,
        "tr-c123": c12 @ c3,
        "tr-c3": c3,
        "tr-c12-c3-c12": c12 @ c3 @ c12,
        "tr-c1-c2sq": c1 @ c2 @ c2,
    }
    return {k: float(np.trace(m).real) for k, m in words.items()}
