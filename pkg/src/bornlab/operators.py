"""Dense complex linear algebra for small operators and state vectors.

Operators are ``(n, n)`` complex128 arrays and states are length-``n``
complex128 arrays. For two-particle spaces the left tensor factor is always
particle 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: entrywise max-norm tolerance for all float comparisons
TOL = 1e-10
#: eigenvalues closer than this are treated as one degenerate eigenvalue
DEGENERACY_TOL = 1e-8


def as_operator(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"operator must be a non-empty square matrix, got shape {m.shape}")
    return m


def as_state(v) -> np.ndarray:
    s = np.asarray(v, dtype=complex)
    if s.ndim != 1 or s.shape[0] == 0:
        raise ValueError(f"state must be a non-empty vector, got shape {s.shape}")
    return s


def max_abs(a) -> float:
    """Entrywise max norm; 0.0 for empty input."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def is_hermitian(a, tol: float = TOL) -> bool:
    m = as_operator(a)
    return max_abs(m - dagger(m)) < tol


def is_projector(p, tol: float = TOL) -> bool:
    m = as_operator(p)
    return is_hermitian(m, tol) and max_abs(m @ m - m) < tol


def is_normalized(v, tol: float = TOL) -> bool:
    s = as_state(v)
    return abs(np.vdot(s, s).real - 1.0) < tol


def normalize(v) -> np.ndarray:
    s = as_state(v)
    n = np.linalg.norm(s)
    if n <= TOL:
        raise ValueError("cannot normalize the zero vector")
    return s / n


def ket_bra(v, w=None) -> np.ndarray:
    """``|v><w|``; with one argument, the outer product ``|v><v|``."""
    v = as_state(v)
    w = v if w is None else as_state(w)
    return np.outer(v, np.conj(w))


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def kron(*factors) -> np.ndarray:
    """Kronecker product of states or operators, leftmost factor first."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def tensor(a, b) -> np.ndarray:
    """Tensor product ``a ⊗ b`` with ``a`` acting on particle 1."""
    return np.kron(as_operator(a), as_operator(b))


def commutator(a, b) -> np.ndarray:
    a, b = as_operator(a), as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def commutes(a, b, tol: float = TOL) -> bool:
    return max_abs(commutator(a, b)) < tol


def _basis_matrix(basis: Sequence, dim: int | None = None) -> np.ndarray:
    u = np.column_stack([as_state(v) for v in basis])
    n = u.shape[0]
    if u.shape != (n, n) or (dim is not None and n != dim):
        raise ValueError(f"basis must contain exactly {n} vectors of length {n}")
    if max_abs(dagger(u) @ u - np.eye(n)) >= TOL:
        raise ValueError("basis is not orthonormal")
    return u


def direct_sum(a, b, basis: Sequence) -> np.ndarray:
    """Operator acting as ``a`` on span(basis[:dim a]) and ``b`` on the rest.

    ``basis`` is an orthonormal basis of the full space; coordinates inside
    each summand are taken with respect to that summand's basis vectors in
    the given order. The result is expressed in the standard basis.
    """
    a, b = as_operator(a), as_operator(b)
    n1, n2 = a.shape[0], b.shape[0]
    u = _basis_matrix(basis, n1 + n2)
    block = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    block[:n1, :n1] = a
    block[n1:, n1:] = b
    return u @ block @ dagger(u)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) paired with their spectral projectors."""

    pairs: tuple[tuple[float, np.ndarray], ...]

    @property
    def eigenvalues(self) -> list[float]:
        return [lam for lam, _ in self.pairs]

    @property
    def projectors(self) -> list[np.ndarray]:
        return [p for _, p in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in self.pairs)


def spectral_decompose(a, tol: float = TOL, merge_tol: float = DEGENERACY_TOL) -> SpectralDecomposition:
    """Split a Hermitian operator into distinct eigenvalues and orthogonal projectors.

    Eigenvalues within ``merge_tol`` of their neighbour are merged into one
    projector; the reported eigenvalue is the mean of the merged cluster.
    """
    m = as_operator(a)
    if not is_hermitian(m, tol):
        raise ValueError("spectral decomposition requires a Hermitian operator")
    m = (m + dagger(m)) / 2
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]

    clusters: list[list[int]] = [[0]]
    for i in range(1, len(vals)):
        if vals[clusters[-1][-1]] - vals[i] < merge_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    pairs = []
    for idx in clusters:
        v = vecs[:, idx]
        pairs.append((float(np.mean(vals[idx])), v @ dagger(v)))
    return SpectralDecomposition(tuple(pairs))


def projector_from_span(vectors: Sequence, tol: float = TOL) -> np.ndarray:
    """Orthogonal projector onto the span of linearly independent vectors."""
    if len(vectors) == 0:
        raise ValueError("need at least one vector")
    a = np.column_stack([as_state(v) for v in vectors])
    if a.shape[1] > a.shape[0]:
        raise ValueError("more vectors than the space dimension: they are dependent")
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    if np.min(diag) <= tol * max(1.0, float(np.max(diag))):
        raise ValueError("vectors are linearly dependent")
    return q @ dagger(q)


def rank_of_projector(p) -> int:
    return int(round(np.trace(as_operator(p)).real))
