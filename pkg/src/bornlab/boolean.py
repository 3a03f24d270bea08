"""Finite Boolean algebras of commuting projectors.

An algebra is stored by its atoms; element number ``m`` is the sum of the
atoms whose bits are set in ``m``, so Boolean operations on elements are
bit operations on their masks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import TOL, as_operator, commutes, identity, is_projector, max_abs


class NonCommutingError(ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"generators {i} and {j} do not commute, so they generate no Boolean algebra")
        self.pair = (i, j)


def _require_commuting(p, q) -> None:
    if not commutes(p, q):
        raise ValueError("Boolean connectives are only defined for commuting projectors")


def complement(p) -> np.ndarray:
    p = as_operator(p)
    return identity(p.shape[0]) - p


def meet(p, q) -> np.ndarray:
    """``p . q``: the product of two commuting projectors."""
    _require_commuting(p, q)
    return as_operator(p) @ as_operator(q)


def join(p, q) -> np.ndarray:
    """``p ∨ q = p + q - pq`` for commuting projectors."""
    _require_commuting(p, q)
    p, q = as_operator(p), as_operator(q)
    return p + q - p @ q


def biconditional(p, q) -> np.ndarray:
    """``p ↔ q``, defined as ``(p . q) ∨ (p' . q')``."""
    return join(meet(p, q), meet(complement(p), complement(q)))


@dataclass(frozen=True)
class BooleanAlgebra:
    atoms: tuple[np.ndarray, ...]
    elements: tuple[np.ndarray, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def top(self) -> int:
        return (1 << len(self.atoms)) - 1

    def element(self, mask: int) -> np.ndarray:
        return self.elements[mask]

    def mask_of(self, candidate, tol: float = TOL) -> int | None:
        """Bitmask of the element equal to ``candidate``, or None."""
        c = as_operator(candidate)
        if c.shape != self.elements[0].shape:
            raise ValueError(f"candidate of shape {c.shape} for an algebra on shape {self.elements[0].shape}")
        # an element is fixed by which atoms it contains: tr(c A) = tr(A) exactly then
        mask = 0
        for k, a in enumerate(self.atoms):
            if np.trace(c @ a).real > np.trace(a).real / 2:
                mask |= 1 << k
        return mask if max_abs(self.elements[mask] - c) < tol else None

    def complement(self, mask: int) -> int:
        return self.top & ~mask

    def meet(self, m1: int, m2: int) -> int:
        return m1 & m2

    def join(self, m1: int, m2: int) -> int:
        return m1 | m2


def generate_algebra(generators: Sequence, tol: float = TOL) -> BooleanAlgebra:
    """Boolean algebra generated by pairwise-commuting projectors.

    Atoms are the nonzero products over all sign patterns, each factor being
    either a generator or its complement.
    """
    gens = [as_operator(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    dim = gens[0].shape[0]
    for i, g in enumerate(gens):
        if g.shape != (dim, dim):
            raise ValueError(f"generator {i} has shape {g.shape}, expected {(dim, dim)}")
        if not is_projector(g, tol):
            raise ValueError(f"generator {i} is not a projector")
    for i, j in itertools.combinations(range(len(gens)), 2):
        if not commutes(gens[i], gens[j], tol):
            raise NonCommutingError(i, j)

    eye = identity(dim)
    atoms = []
    for signs in itertools.product((True, False), repeat=len(gens)):
        prod = eye
        for g, keep in zip(gens, signs):
            prod = prod @ (g if keep else eye - g)
        if np.trace(prod).real > 0.5:
            atoms.append(prod)

    elements = []
    for mask in range(1 << len(atoms)):
        e = np.zeros((dim, dim), dtype=complex)
        for k, a in enumerate(atoms):
            if mask >> k & 1:
                e = e + a
        elements.append(e)
    return BooleanAlgebra(tuple(atoms), tuple(elements))


@dataclass(frozen=True)
class TruthAssignment:
    algebra: BooleanAlgebra
    true_atom: int

    def value(self, mask: int) -> bool:
        return bool(mask >> self.true_atom & 1)

    @property
    def values(self) -> tuple[bool, ...]:
        """Truth value of every element, indexed by bitmask."""
        return tuple(self.value(m) for m in range(self.algebra.size))

    def value_of(self, candidate) -> bool:
        mask = self.algebra.mask_of(candidate)
        if mask is None:
            raise ValueError("operator is not an element of the interaction algebra")
        return self.value(mask)


def assign_truth(algebra: BooleanAlgebra, outcome_atom: int) -> TruthAssignment:
    """Truth values after a measurement whose outcome is atom ``outcome_atom``."""
    if not 0 <= outcome_atom < len(algebra.atoms):
        raise IndexError(f"atom index {outcome_atom} out of range for {len(algebra.atoms)} atoms")
    return TruthAssignment(algebra, outcome_atom)


def atom_index(algebra: BooleanAlgebra, projector) -> int:
    mask = algebra.mask_of(projector)
    if mask is None or mask == 0 or mask & (mask - 1):
        raise ValueError("projector is not an atom of the algebra")
    return mask.bit_length() - 1


def is_member(algebra: BooleanAlgebra, candidate, tol: float = TOL) -> bool:
    return algebra.mask_of(candidate, tol) is not None
