"""Spin operators, the singlet and triplet-zero states, and EPR identity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import boolean
from .measurement import born_distribution, collapse, density_from_probabilities, spanning_projectors
from .operators import (
    TOL,
    commutator,
    direct_sum,
    identity,
    ket_bra,
    kron,
    max_abs,
    projector_from_span,
    spectral_decompose,
    tensor,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_R = 1 / math.sqrt(2)
SPIN1_X = _R * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
SPIN1_Y = _R * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
SPIN1_Z = np.diag([1, 0, -1]).astype(complex)

UP = np.array([1, 0], dtype=complex)    # psi_z^+
DOWN = np.array([0, 1], dtype=complex)  # psi_z^-
I2 = identity(2)

HALF = 0.5


@dataclass(frozen=True)
class Direction:
    x: float
    y: float
    z: float
    label: str | None = None

    def __post_init__(self):
        n = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(n - 1.0) >= TOL:
            raise ValueError(f"direction ({self.x}, {self.y}, {self.z}) is not a unit vector (norm {n})")

    @classmethod
    def normalized(cls, x: float, y: float, z: float, label: str | None = None) -> Direction:
        n = math.sqrt(x * x + y * y + z * z)
        if n == 0:
            raise ValueError("zero vector has no direction")
        return cls(x / n, y / n, z / n, label)

    @classmethod
    def polar(cls, theta: float, phi: float = 0.0, label: str | None = None) -> Direction:
        """Direction at polar angle ``theta`` from z and azimuth ``phi``."""
        return cls(math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta), label)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def angle_to(self, other: Direction) -> float:
        c = float(np.dot(self.vector, other.vector))
        return math.acos(max(-1.0, min(1.0, c)))

    def rotated(self, r: np.ndarray) -> Direction:
        v = np.asarray(r) @ self.vector
        return Direction.normalized(*v, label=self.label)


Z_AXIS = Direction(0.0, 0.0, 1.0, "z")
X_AXIS = Direction(1.0, 0.0, 0.0, "x")
Y_AXIS = Direction(0.0, 1.0, 0.0, "y")


def _as_direction(d) -> Direction:
    if isinstance(d, Direction):
        return d
    return Direction(*map(float, d))


def spin_half(direction) -> np.ndarray:
    """``s_d = d . sigma / 2``, eigenvalues +1/2 and -1/2."""
    d = _as_direction(direction)
    return 0.5 * (d.x * SIGMA_X + d.y * SIGMA_Y + d.z * SIGMA_Z)


def spin_one(direction) -> np.ndarray:
    """Spin-1 component ``d . S`` with eigenvalues 1, 0, -1."""
    d = _as_direction(direction)
    return d.x * SPIN1_X + d.y * SPIN1_Y + d.z * SPIN1_Z


def spin_half_projectors(direction) -> tuple[np.ndarray, np.ndarray]:
    """``(P_d^+, P_d^-) = (I/2 + s_d, I/2 - s_d)``."""
    s = spin_half(direction)
    return I2 / 2 + s, I2 / 2 - s


def spin_half_eigenstate(direction, sign: int) -> np.ndarray:
    """Unit eigenvector of ``s_d`` for eigenvalue ``sign/2``."""
    vals, vecs = np.linalg.eigh(spin_half(direction))
    v = vecs[:, 1] if sign > 0 else vecs[:, 0]
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def total_spin(direction) -> np.ndarray:
    """Two-particle total spin component ``s_d ⊗ I + I ⊗ s_d``."""
    s = spin_half(direction)
    return tensor(s, I2) + tensor(I2, s)


def singlet_state() -> np.ndarray:
    return _R * (kron(UP, DOWN) - kron(DOWN, UP))


def triplet_zero_state() -> np.ndarray:
    return _R * (kron(UP, DOWN) + kron(DOWN, UP))


def epr_joint_distribution(dir_a, dir_b, initial, first: str = "a") -> dict[tuple[float, float], float]:
    """Joint outcome probabilities of ``s_a ⊗ I`` and ``I ⊗ s_b``.

    The two measurements are performed one after the other with collapse in
    between; ``first`` picks which particle is measured first.
    """
    if first not in ("a", "b"):
        raise ValueError("first must be 'a' or 'b'")
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (4,):
        raise ValueError("initial state must be a 4-dimensional vector")
    obs_a = tensor(spin_half(dir_a), I2)
    obs_b = tensor(I2, spin_half(dir_b))
    one, two = (obs_a, obs_b) if first == "a" else (obs_b, obs_a)

    joint = {(sa, sb): 0.0 for sa in (HALF, -HALF) for sb in (HALF, -HALF)}
    for o1 in born_distribution(psi, one):
        if o1.probability <= TOL:
            continue
        after = collapse(psi, o1.projector)
        for o2 in born_distribution(after, two):
            key = (o1.eigenvalue, o2.eigenvalue) if first == "a" else (o2.eigenvalue, o1.eigenvalue)
            joint[_outcome_key(key)] += o1.probability * o2.probability
    return joint


def _outcome_key(key):
    return tuple(HALF if v > 0 else -HALF for v in key)


def opposite_probability(joint: dict) -> float:
    return sum(p for (a, b), p in joint.items() if a != b)


def correlation_projector(direction) -> np.ndarray:
    """``P_d^+ ⊗ I ↔ I ⊗ P_d^-``: particle 1 up along d iff particle 2 down."""
    plus, minus = spin_half_projectors(direction)
    return boolean.biconditional(tensor(plus, I2), tensor(I2, minus))


# eigenbasis of s_z ⊗ s_z: V1 (eigenvalue +1/4) then V2 (eigenvalue -1/4)
SZSZ_BASIS = (kron(UP, UP), kron(DOWN, DOWN), kron(DOWN, UP), kron(UP, DOWN))


def direct_sum_spin(direction) -> np.ndarray:
    """``s_d ⊕ s_z`` over the decomposition ``V1 ⊕ V2`` of ``s_z ⊗ s_z``."""
    return direct_sum(spin_half(direction), spin_half(Z_AXIS), SZSZ_BASIS)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    deviation: float
    passed: bool


@dataclass
class EprIdentityReport:
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> IdentityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def equal(self, name: str, lhs, rhs, tol: float = TOL) -> IdentityCheck:
        dev = max_abs(np.asarray(lhs) - np.asarray(rhs))
        return self._add(IdentityCheck(name, dev, dev < tol))

    def nonzero(self, name: str, value, threshold: float = TOL) -> IdentityCheck:
        size = max_abs(value)
        return self._add(IdentityCheck(name, size, size > threshold))

    def _add(self, check: IdentityCheck) -> IdentityCheck:
        self.checks.append(check)
        return check

    def extend(self, other: EprIdentityReport) -> None:
        self.checks.extend(other.checks)


def _pairwise_distinct(d1: Direction, d2: Direction) -> bool:
    return np.linalg.norm(np.cross(d1.vector, d2.vector)) > TOL


def _is_z(d: Direction) -> bool:
    return not _pairwise_distinct(d, Z_AXIS)


def direct_sum_family_check(directions: Sequence) -> EprIdentityReport:
    """Check the ``s_d ⊕ s_z`` argument for the given directions.

    Verifies ``I ⊗ s_z = s_z ⊕ s_z``, that every ``s_d ⊕ s_z`` has
    ``ψ_z^- ⊗ ψ_z^+`` and ``ψ_z^+ ⊗ ψ_z^-`` as eigenstates with eigenvalues
    +1/2 and -1/2, and that ``s_d ⊕ s_z`` and ``s_d' ⊕ s_z`` do not commute
    for non-parallel d, d' off the z axis.
    """
    dirs = [_as_direction(d) for d in directions]
    report = EprIdentityReport()
    report.equal("I⊗s_z == s_z⊕s_z", tensor(I2, spin_half(Z_AXIS)), direct_sum_spin(Z_AXIS))
    down_up, up_down = kron(DOWN, UP), kron(UP, DOWN)
    ops = [direct_sum_spin(d) for d in dirs]
    for i, (d, op) in enumerate(zip(dirs, ops)):
        tag = d.label or f"d{i}"
        report.equal(f"(s_{tag}⊕s_z)(ψ−⊗ψ+) == +½ ψ−⊗ψ+", op @ down_up, 0.5 * down_up)
        report.equal(f"(s_{tag}⊕s_z)(ψ+⊗ψ−) == −½ ψ+⊗ψ−", op @ up_down, -0.5 * up_down)
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            d1, d2 = dirs[i], dirs[j]
            if _is_z(d1) or _is_z(d2) or not _pairwise_distinct(d1, d2):
                continue
            t1, t2 = d1.label or f"d{i}", d2.label or f"d{j}"
            report.nonzero(f"[s_{t1}⊕s_z, s_{t2}⊕s_z] != 0", commutator(ops[i], ops[j]))
    return report


def verify_epr_identities(perturb: Callable[[str, np.ndarray], np.ndarray] | None = None) -> EprIdentityReport:
    """Run every EPR identity check and collect the deviations.

    ``perturb`` is a debugging hook: it receives the name and value of each
    primitive (``"s_z"``, ``"s_x"``, ``"singlet"``, ``"triplet0"``) and may
    return a modified value, to confirm the affected checks fail.
    """
    hook = perturb or (lambda name, value: value)
    s_z = hook("s_z", spin_half(Z_AXIS))
    s_x = hook("s_x", spin_half(X_AXIS))
    gamma = hook("singlet", singlet_state())
    t0 = hook("triplet0", triplet_zero_state())
    pz_plus, pz_minus = I2 / 2 + s_z, I2 / 2 - s_z
    px_plus, px_minus = I2 / 2 + s_x, I2 / 2 - s_x
    S_z = tensor(s_z, I2) + tensor(I2, s_z)
    S_x = tensor(s_x, I2) + tensor(I2, s_x)
    S_y = total_spin(Y_AXIS)
    up_down, down_up = kron(UP, DOWN), kron(DOWN, UP)
    r = EprIdentityReport()

    dec = spectral_decompose(s_z)
    r.equal("spectral(s_z) == {+½: P_z^+, −½: P_z^−}",
            [dec.eigenvalues[0], dec.eigenvalues[1]] + [max_abs(dec.projectors[0] - pz_plus),
                                                         max_abs(dec.projectors[1] - pz_minus)],
            [0.5, -0.5, 0.0, 0.0])
    r.equal("P_z^+ == |ψ_z^+⟩⟨ψ_z^+|", projector_from_span([UP]), pz_plus)
    r.equal("s_z⊗I == ½ P_z^+⊗I − ½ P_z^−⊗I", tensor(s_z, I2),
            0.5 * tensor(pz_plus, I2) - 0.5 * tensor(pz_minus, I2))
    r.equal("P_z^+⊗I Γ == √½ ψ+⊗ψ−", tensor(pz_plus, I2) @ gamma, _R * up_down)
    r.equal("P_z^−⊗I Γ == −√½ ψ−⊗ψ+", tensor(pz_minus, I2) @ gamma, -_R * down_up)

    born = born_distribution(gamma, tensor(s_z, I2))
    r.equal("Born(Γ, s_z⊗I) == {+½: ½, −½: ½}",
            [e.probability for e in born], [0.5, 0.5])
    r.equal("post-states of s_z⊗I on Γ == ψ+⊗ψ−, ψ−⊗ψ+",
            [abs(np.vdot(collapse(gamma, e.projector), v)) for e, v in zip(born, (up_down, down_up))],
            [1.0, 1.0])
    r.equal("I⊗s_z ψ+⊗ψ− == −½ ψ+⊗ψ−", tensor(I2, s_z) @ up_down, -0.5 * up_down)
    r.equal("I⊗s_z ψ−⊗ψ+ == +½ ψ−⊗ψ+", tensor(I2, s_z) @ down_up, 0.5 * down_up)

    for name, state in (("Γ", gamma), ("Γ_t0", t0)):
        joint = epr_joint_distribution(Z_AXIS, Z_AXIS, state)
        r.equal(f"P(equal z outcomes | {name}) == 0",
                [joint[(HALF, HALF)], joint[(-HALF, -HALF)]], [0.0, 0.0])

    for deg in (15, 45, 90, 135):
        theta = math.radians(deg)
        after = collapse(gamma, tensor(pz_plus, I2))
        dist = born_distribution(after, tensor(I2, spin_half(Direction.polar(theta))))
        r.equal(f"P(−½ | θ={deg}°) == cos²(θ/2), P(+½) == sin²(θ/2)",
                [dist.probability(-0.5), dist.probability(0.5)],
                [math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2])

    b1 = boolean.generate_algebra([tensor(pz_plus, I2), tensor(pz_minus, I2)])
    r.equal("I⊗P_z^± ∉ B₁",
            [float(boolean.is_member(b1, tensor(I2, pz_plus))), float(boolean.is_member(b1, tensor(I2, pz_minus)))],
            [0.0, 0.0])

    r.nonzero("[s_z, s_x] != 0", commutator(s_z, s_x))
    r.extend(direct_sum_family_check([X_AXIS, Direction.polar(math.pi / 4, label="d(π/4)")]))

    corr_z = boolean.biconditional(tensor(pz_plus, I2), tensor(I2, pz_minus))
    corr_x = boolean.biconditional(tensor(px_plus, I2), tensor(I2, px_minus))
    eye4 = identity(4)
    r.equal("correlation_projector(z) == I − S_z²", corr_z, eye4 - S_z @ S_z)
    r.equal("correlation_projector(x) == I − S_x²", corr_x, eye4 - S_x @ S_x)
    r.equal("[corr(z), corr(x)] == 0", commutator(corr_z, corr_x), np.zeros((4, 4)))
    r.equal("[S_z², S_x²] == 0", commutator(S_z @ S_z, S_x @ S_x), np.zeros((4, 4)))
    r.equal("corr(z)·corr(x) == |Γ⟩⟨Γ| (S = 0)", corr_z @ corr_x, ket_bra(singlet_state()))
    r.equal("S_w Γ == 0 for w = x, y, z", [max_abs(S_x @ gamma), max_abs(S_y @ gamma), max_abs(S_z @ gamma)],
            [0.0, 0.0, 0.0])
    r.equal("S_z Γ_t0 == 0", S_z @ t0, np.zeros(4))
    r.nonzero("S_x Γ_t0 != 0", S_x @ t0)

    w = density_from_probabilities(
        [(p, float(np.vdot(gamma, p @ gamma).real)) for p in spanning_projectors(4)], 4
    )
    r.equal("Gleason: p(P) = ⟨Γ, PΓ⟩ determines w == |Γ⟩⟨Γ|", w.w, ket_bra(gamma))
    return r
