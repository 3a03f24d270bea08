"""Born-rule probabilities, the projection postulate and seeded measurement runs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import (
    TOL,
    SpectralDecomposition,
    as_operator,
    as_state,
    dagger,
    is_hermitian,
    is_projector,
    max_abs,
    spectral_decompose,
)


class ImpossibleOutcomeError(ValueError):
    """The projector annihilates the state, so the outcome has probability zero."""


class UnderdeterminedError(ValueError):
    def __init__(self, rank: int, required: int):
        super().__init__(
            f"projector set spans only {rank} of the {required} real dimensions "
            "of the Hermitian operators; the density operator is not determined"
        )
        self.rank = rank
        self.required = required


class InconsistentAssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class BornOutcome:
    eigenvalue: float
    probability: float
    projector: np.ndarray
    # unnormalized P_k applied to the state
    post_state: np.ndarray


@dataclass(frozen=True)
class BornDistribution:
    entries: tuple[BornOutcome, ...]

    def probability(self, eigenvalue: float, tol: float = 1e-8) -> float:
        for e in self.entries:
            if abs(e.eigenvalue - eigenvalue) < tol:
                return e.probability
        return 0.0

    def as_dict(self) -> dict[float, float]:
        return {e.eigenvalue: e.probability for e in self.entries}

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _decomposition(observable) -> SpectralDecomposition:
    if isinstance(observable, SpectralDecomposition):
        return observable
    m = as_operator(observable)
    if not is_hermitian(m):
        raise ValueError("observable must be Hermitian")
    return spectral_decompose(m)


def born_distribution(state, observable) -> BornDistribution:
    """Outcome probabilities ``<state, P_k state>`` for each distinct eigenvalue.

    ``observable`` may also be a precomputed :class:`SpectralDecomposition`.
    A non-normalized state is normalized first; the zero vector is rejected.
    """
    psi = as_state(state)
    norm = np.linalg.norm(psi)
    if norm <= TOL:
        raise ValueError("cannot measure the zero state")
    psi = psi / norm
    dec = _decomposition(observable)
    if dec.pairs[0][1].shape[0] != psi.shape[0]:
        raise ValueError(f"state has dimension {psi.shape[0]}, observable {dec.pairs[0][1].shape[0]}")

    entries = []
    for lam, p in dec.pairs:
        image = p @ psi
        # <psi, P psi> is real and equals ||P psi||^2 for an orthogonal projector
        prob = float(np.vdot(psi, image).real)
        entries.append(BornOutcome(lam, min(max(prob, 0.0), 1.0), p, image))
    return BornDistribution(tuple(entries))


def collapse(state, projector) -> np.ndarray:
    """Projection postulate: ``P state`` rescaled to unit length."""
    psi = as_state(state)
    p = as_operator(projector)
    if not is_projector(p):
        raise ValueError("collapse requires an orthogonal projector")
    return _normalized_image(psi, p @ psi)


def _normalized_image(psi, image) -> np.ndarray:
    n = np.linalg.norm(image)
    if n <= TOL:
        raise ImpossibleOutcomeError("projector annihilates the state")
    return image / n


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))


@dataclass(frozen=True)
class MeasurementRecord:
    observable_label: str
    outcome: float
    pre_state: np.ndarray
    post_state: np.ndarray
    rng_seed: int


def sample_outcome(dist: BornDistribution, u: float) -> BornOutcome:
    """Inverse-CDF selection over the entries in descending-eigenvalue order."""
    acc = 0.0
    candidates = [e for e in dist.entries if e.probability > TOL]
    for e in candidates:
        acc += e.probability
        if u < acc:
            return e
    return candidates[-1]


def run_sequence(state, observables: Sequence, rng: np.random.Generator):
    """Measure each observable in turn; returns ``(outcome, pre, post)`` triples."""
    psi = as_state(state)
    steps = []
    for obs in observables:
        dist = born_distribution(psi, obs)
        chosen = sample_outcome(dist, rng.random())
        # spectral projectors need no re-validation
        post = _normalized_image(psi, chosen.post_state)
        steps.append((chosen.eigenvalue, psi, post))
        psi = post
    return steps


def measure_sequence(state, observables: Sequence, seed: int, labels: Sequence[str] | None = None) -> list[MeasurementRecord]:
    """Sequential measurements with Born sampling and collapse after each step.

    Reproducible: the same state, observables and seed give the same records.
    """
    if labels is None:
        labels = [f"observable[{i}]" for i in range(len(observables))]
    if len(labels) != len(observables):
        raise ValueError("one label per observable is required")
    rng = make_rng(seed)
    steps = run_sequence(state, [_decomposition(o) for o in observables], rng)
    return [
        MeasurementRecord(label, outcome, pre, post, int(seed))
        for label, (outcome, pre, post) in zip(labels, steps)
    ]


@dataclass(frozen=True)
class DensityOperator:
    w: np.ndarray

    def probability(self, projector) -> float:
        return float(np.trace(self.w @ as_operator(projector)).real)

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues."""
        return np.linalg.eigvalsh(self.w)

    def rank(self, tol: float = 1e-9) -> int:
        return int(np.sum(self.eigenvalues() > tol))


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Orthonormal basis (Hilbert-Schmidt) of the real space of Hermitian matrices."""
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, i] = 1
        basis.append(e)
    for i, j in itertools.combinations(range(dim), 2):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, j] = e[j, i] = 1 / np.sqrt(2)
        basis.append(e)
        e = np.zeros((dim, dim), dtype=complex)
        e[i, j], e[j, i] = -1j / np.sqrt(2), 1j / np.sqrt(2)
        basis.append(e)
    return basis


def spanning_projectors(dim: int) -> list[np.ndarray]:
    """``dim**2`` rank-1 projectors whose span is every Hermitian operator.

    Uses the basis states and the pairwise superpositions ``(e_i + e_j)/√2``
    and ``(e_i + i e_j)/√2``.
    """
    eye = np.eye(dim, dtype=complex)
    vecs = [eye[i] for i in range(dim)]
    for i, j in itertools.combinations(range(dim), 2):
        vecs.append((eye[i] + eye[j]) / np.sqrt(2))
        vecs.append((eye[i] + 1j * eye[j]) / np.sqrt(2))
    return [np.outer(v, np.conj(v)) for v in vecs]


def density_from_probabilities(assignments: Sequence, dim: int, tol: float = TOL) -> DensityOperator:
    """Reconstruct the density operator ``w`` with ``p(P) = tr(w P)``.

    ``assignments`` is a sequence of ``(projector, probability)`` pairs whose
    projectors must span the Hermitian operators on a ``dim``-dimensional
    space. The linear system is solved by least squares in Hermitian
    coordinates; the result is then symmetrized and rescaled to unit trace.
    An assignment that fits no Hermitian operator, or only a non-positive
    one, is rejected.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    basis = hermitian_basis(dim)
    rows, probs = [], []
    for proj, prob in assignments:
        p = as_operator(proj)
        if p.shape != (dim, dim):
            raise ValueError(f"projector of shape {p.shape} in a {dim}-dimensional problem")
        if not is_projector(p):
            raise ValueError("assignment contains a non-projector")
        if not 0.0 <= prob <= 1.0:
            raise ValueError(f"probability {prob} outside [0, 1]")
        # tr(w P) = sum_k c_k tr(E_k P) with real c_k, since E_k and P are Hermitian
        rows.append([np.trace(e @ p).real for e in basis])
        probs.append(float(prob))
    m = np.array(rows, dtype=float).reshape(len(rows), dim * dim)
    target = np.array(probs, dtype=float)

    required = dim * dim
    rank = int(np.linalg.matrix_rank(m)) if len(rows) else 0
    if rank < required:
        raise UnderdeterminedError(rank, required)

    coeffs, *_ = np.linalg.lstsq(m, target, rcond=None)
    w = sum(c * e for c, e in zip(coeffs, basis))
    w = (w + dagger(w)) / 2
    tr = np.trace(w).real
    if abs(tr) <= tol:
        raise InconsistentAssignmentError("reconstructed operator has zero trace")
    w = w / tr

    residual = max_abs(m @ np.array([np.trace(e @ w).real for e in basis]) - target)
    if residual >= tol:
        raise InconsistentAssignmentError(
            f"no density operator reproduces the assignment (residual {residual:.3e})"
        )
    if np.min(np.linalg.eigvalsh(w)) < -tol:
        raise InconsistentAssignmentError("assignment fits only a non-positive operator")
    return DensityOperator(w)


def probabilities_from_density(w, projectors: Sequence) -> list[tuple[np.ndarray, float]]:
    w = as_operator(w)
    return [(p, float(np.trace(w @ p).real)) for p in projectors]
