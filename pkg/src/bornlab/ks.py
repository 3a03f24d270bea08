"""The 33-direction Kochen-Specker configuration and the spin-1 twin experiment.

All ray geometry is exact in Z[sqrt 2]. An orthogonal *frame* is a triple of
mutually orthogonal directions at least two of which belong to the ray set;
when only two do, the third axis is their cross product and is kept as a
completion ray outside the set. Each orthogonal pair of set rays lies in
exactly one frame.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .epr import Direction, spin_one
from .exact import ZERO, ZSqrt2
from .measurement import born_distribution, collapse, make_rng, run_sequence
from .operators import TOL, as_state, identity, max_abs, spectral_decompose, tensor


@dataclass(frozen=True)
class Ray:
    """An unoriented direction with exact coordinates, stored in canonical sign."""

    coords: tuple[ZSqrt2, ZSqrt2, ZSqrt2]

    def __post_init__(self):
        coords = tuple(ZSqrt2.coerce(c) for c in self.coords)
        if len(coords) != 3:
            raise ValueError("a ray needs exactly three coordinates")
        if not any(coords):
            raise ValueError("the zero vector is not a ray")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords) -> Ray:
        """Build a ray from any nonzero representative, fixing its sign."""
        r = cls(tuple(coords))
        return r if r.is_canonical() else cls(tuple(-c for c in r.coords))

    def is_canonical(self) -> bool:
        first = next(c for c in self.coords if c)
        return first.sign() > 0

    def dot(self, other: Ray) -> ZSqrt2:
        return sum((a * b for a, b in zip(self.coords, other.coords)), ZERO)

    def cross(self, other: Ray) -> tuple[ZSqrt2, ZSqrt2, ZSqrt2]:
        (a1, a2, a3), (b1, b2, b3) = self.coords, other.coords
        return (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)

    def is_orthogonal(self, other: Ray) -> bool:
        return not self.dot(other)

    def is_parallel(self, other: Ray) -> bool:
        return not any(self.cross(other))

    def unit_vector(self) -> np.ndarray:
        v = np.array([float(c) for c in self.coords])
        return v / np.linalg.norm(v)

    def direction(self) -> Direction:
        return Direction.normalized(*self.unit_vector(), label=str(self))

    def transformed(self, perm: Sequence[int], signs: Sequence[int]) -> Ray:
        """Image under ``x_i -> signs[i] * x_perm[i]``."""
        return Ray.of(*(self.coords[p] * s for p, s in zip(perm, signs)))

    def to_json(self) -> list[list[int]]:
        return [c.to_pair() for c in self.coords]

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def _reduced(coords) -> Ray:
    g = 0
    for c in coords:
        g = math.gcd(g, math.gcd(c.a, c.b))
    return Ray.of(*(ZSqrt2(c.a // g, c.b // g) for c in coords))


def _pattern(coords) -> str:
    return "".join(sorted("0" if not c else ("1" if c.b == 0 else "s") for c in coords))


_PERES_PATTERNS = ("001", "011", "01s", "11s")


def peres_rays() -> list[Ray]:
    """The 33 rays with coordinates in {0, ±1, ±√2} of types (0,0,1), (0,1,±1),
    (0,1,±√2) and (1,±1,±√2), all coordinate positions allowed.

    Ordered by type, then lexicographically by coordinates.
    """
    values = [ZSqrt2(0, 0), ZSqrt2(1, 0), ZSqrt2(-1, 0), ZSqrt2(0, 1), ZSqrt2(0, -1)]
    found = set()
    for coords in itertools.product(values, repeat=3):
        if any(coords) and _pattern(coords) in _PERES_PATTERNS:
            found.add(Ray.of(*coords))

    def key(r: Ray):
        return (_PERES_PATTERNS.index(_pattern(r.coords)), tuple(-x for c in r.coords for x in (c.a, c.b)))

    return sorted(found, key=key)


@dataclass(frozen=True)
class TripleSet:
    rays: tuple[Ray, ...]
    # index triples into frame_rays; an index >= len(rays) is a completion
    triples: tuple[tuple[int, int, int], ...]
    orthogonal_pairs: tuple[tuple[int, int], ...]
    completions: tuple[Ray, ...] = ()

    @property
    def frame_rays(self) -> tuple[Ray, ...]:
        return self.rays + self.completions

    @property
    def complete_triples(self) -> tuple[tuple[int, int, int], ...]:
        n = len(self.rays)
        return tuple(t for t in self.triples if max(t) < n)

    def members(self, triple: Sequence[int]) -> tuple[int, ...]:
        """The indices of ``triple`` that refer to rays of the set."""
        n = len(self.rays)
        return tuple(i for i in triple if i < n)


def enumerate_triples(rays: Sequence[Ray]) -> TripleSet:
    """All orthogonal pairs and frames of a ray set, by exact inner products.

    Complete triples come first in lexicographic order, followed by one
    frame per orthogonal pair not covered by a complete triple.
    """
    rays = tuple(rays)
    n = len(rays)
    for i, j in itertools.combinations(range(n), 2):
        if rays[i].is_parallel(rays[j]):
            raise ValueError(f"rays {i} and {j} describe the same direction {rays[i]}")
    orth = [[False] * n for _ in range(n)]
    pairs = []
    for i, j in itertools.combinations(range(n), 2):
        if rays[i].is_orthogonal(rays[j]):
            orth[i][j] = orth[j][i] = True
            pairs.append((i, j))

    complete = [
        (i, j, k) for i, j in pairs for k in range(j + 1, n) if orth[i][k] and orth[j][k]
    ]
    covered = {p for t in complete for p in itertools.combinations(t, 2)}

    completions: list[Ray] = []
    frames = list(complete)
    for i, j in pairs:
        if (i, j) in covered:
            continue
        third = _reduced(rays[i].cross(rays[j]))
        try:
            k = n + completions.index(third)
        except ValueError:
            completions.append(third)
            k = n + len(completions) - 1
        frames.append((i, j, k))
    return TripleSet(rays, tuple(frames), tuple(pairs), tuple(completions))


class Constraints(str, enum.Enum):
    TRIPLES_ONLY = "triples_only"
    TRIPLES_AND_PAIRS = "triples_and_pairs"


@dataclass(frozen=True)
class ColoringSearchResult:
    satisfiable: bool
    assignment: tuple[int, ...] | None
    nodes_explored: int
    constraints_used: Constraints
    conflicts: int = 0
    workers: int = 1
    trace: tuple[tuple[int, int], ...] | None = None

    def to_payload(self) -> dict:
        return {
            "satisfiable": self.satisfiable,
            "assignment": list(self.assignment) if self.assignment is not None else None,
            "nodes_explored": self.nodes_explored,
            "conflicts": self.conflicts,
            "constraints_used": self.constraints_used.value,
            "workers": self.workers,
        }


# A clause (members, exact) says: at most one member is 0, and if ``exact``
# then exactly one is.
Clause = tuple[tuple[int, ...], bool]


def coloring_clauses(tripleset: TripleSet, constraints: Constraints | str, complete_only: bool = False) -> list[Clause]:
    """Constraints on the 0/1 values of the set rays.

    A complete triple needs exactly one 0. A frame with a completion axis
    needs at most one 0 among its two set rays, since the free third axis
    takes the remaining value. With ``complete_only`` the incomplete frames
    are dropped.
    """
    constraints = Constraints(constraints)
    clauses: list[Clause] = []
    for t in tripleset.triples:
        m = tripleset.members(t)
        if len(m) == 3:
            clauses.append((m, True))
        elif not complete_only:
            clauses.append((m, False))
    if constraints is Constraints.TRIPLES_AND_PAIRS:
        clauses.extend((p, False) for p in tripleset.orthogonal_pairs)
    return clauses


def check_assignment(tripleset: TripleSet, assignment: Sequence[int], constraints: Constraints | str) -> bool:
    """Whether a full 0/1 assignment satisfies the frame (and pair) rules."""
    constraints = Constraints(constraints)
    if len(assignment) != len(tripleset.rays) or any(v not in (0, 1) for v in assignment):
        return False
    for t in tripleset.triples:
        m = tripleset.members(t)
        zeros = sum(1 for i in m if assignment[i] == 0)
        if zeros > 1 or (len(m) == 3 and zeros != 1):
            return False
    if constraints is Constraints.TRIPLES_AND_PAIRS:
        if any(assignment[i] == 0 and assignment[j] == 0 for i, j in tripleset.orthogonal_pairs):
            return False
    return True


class _Solver:
    """Depth-first search with unit propagation over clause lists."""

    def __init__(self, n: int, clauses: Sequence[Clause], order: Sequence[int], record: bool = False):
        self.n = n
        self.clauses = list(clauses)
        self.order = list(order)
        self.watch: list[list[int]] = [[] for _ in range(n)]
        for ci, (members, _) in enumerate(self.clauses):
            for v in members:
                self.watch[v].append(ci)
        self.nodes = 0
        self.conflicts = 0
        self.record = record
        self.trace: list[tuple[int, int]] = []

    def propagate(self, values: list[int], start: Iterable[int]) -> list[int] | None:
        """Apply forced values; returns the newly set variables, or None on conflict."""
        queue = list(start)
        changed = []
        while queue:
            v = queue.pop()
            for ci in self.watch[v]:
                members, exact = self.clauses[ci]
                zeros = 0
                free = []
                for m in members:
                    x = values[m]
                    if x == 0:
                        zeros += 1
                    elif x < 0:
                        free.append(m)
                if zeros > 1:
                    return None
                if zeros == 1:
                    forced = 1
                elif exact and not free:
                    return None
                elif exact and len(free) == 1:
                    forced = 0
                else:
                    continue
                for m in free:
                    values[m] = forced
                    changed.append(m)
                    queue.append(m)
        return changed

    def initial(self) -> list[int] | None:
        values = [-1] * self.n
        # clauses with a single member pin it down before any decision
        for members, exact in self.clauses:
            if exact and len(members) == 1:
                values[members[0]] = 0
        seeds = [v for v in range(self.n) if values[v] >= 0]
        if self.propagate(values, seeds) is None:
            return None
        for members, exact in self.clauses:
            if self._violated(values, members, exact):
                return None
        return values

    @staticmethod
    def _violated(values, members, exact) -> bool:
        zeros = sum(1 for m in members if values[m] == 0)
        return zeros > 1 or (exact and all(values[m] == 1 for m in members))

    def solve(self, values: list[int]) -> list[int] | None:
        var = next((v for v in self.order if values[v] < 0), None)
        if var is None:
            return values
        for val in (0, 1):
            self.nodes += 1
            if self.record:
                self.trace.append((var, val))
            trial = list(values)
            trial[var] = val
            if self.propagate(trial, [var]) is None:
                self.conflicts += 1
                continue
            found = self.solve(trial)
            if found is not None:
                return found
        return None

    def frontier(self, values: list[int], depth: int) -> list[list[int]]:
        """Partial assignments after ``depth`` decision levels, in search order."""
        if depth == 0:
            return [values]
        var = next((v for v in self.order if values[v] < 0), None)
        if var is None:
            return [values]
        out = []
        for val in (0, 1):
            self.nodes += 1
            trial = list(values)
            trial[var] = val
            if self.propagate(trial, [var]) is None:
                self.conflicts += 1
                continue
            out.extend(self.frontier(trial, depth - 1))
        return out


def _degree_order(n: int, clauses: Sequence[Clause]) -> list[int]:
    degree = [0] * n
    for members, _ in clauses:
        for v in members:
            degree[v] += 1
    return sorted(range(n), key=lambda v: (-degree[v], v))


def _solve_branch(args):
    n, clauses, order, values = args
    s = _Solver(n, clauses, order)
    found = s.solve(list(values))
    return found, s.nodes, s.conflicts


def ks_color_search(
    tripleset: TripleSet,
    constraints: Constraints | str = Constraints.TRIPLES_AND_PAIRS,
    workers: int = 1,
    record_trace: bool = False,
    complete_only: bool = False,
) -> ColoringSearchResult:
    """Complete search for a 0/1 value assignment obeying the frame rules.

    Ray values mean squared-spin outcomes. Variables are branched in order of
    descending clause degree, value 0 first. ``nodes_explored`` counts every
    decision tried, so an unsatisfiable answer comes with a reproducible
    exhaustion count. With ``workers > 1`` the top decision levels are split
    across processes; counts then depend on the worker count but not on
    scheduling.
    """
    constraints = Constraints(constraints)
    n = len(tripleset.rays)
    clauses = coloring_clauses(tripleset, constraints, complete_only)
    order = _degree_order(n, clauses)
    solver = _Solver(n, clauses, order, record=record_trace)

    start = solver.initial()
    if start is None:
        found = None
    elif workers <= 1:
        found = solver.solve(start)
    else:
        depth = max(1, math.ceil(math.log2(workers)))
        branches = solver.frontier(start, depth)
        found = None
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_branch, [(n, clauses, order, b) for b in branches]))
        for sub_found, nodes, conflicts in results:
            solver.nodes += nodes
            solver.conflicts += conflicts
            if found is None and sub_found is not None:
                found = sub_found
    return ColoringSearchResult(
        satisfiable=found is not None,
        assignment=tuple(found) if found is not None else None,
        nodes_explored=solver.nodes,
        constraints_used=constraints,
        conflicts=solver.conflicts,
        workers=max(1, workers),
        trace=tuple(solver.trace) if record_trace else None,
    )


SIGNED_PERMUTATIONS = tuple(
    (perm, signs)
    for perm in itertools.permutations(range(3))
    for signs in itertools.product((1, -1), repeat=3)
)


def rays_to_json(rays: Iterable[Ray]) -> str:
    return json.dumps([r.to_json() for r in rays])


def rays_from_json(text: str) -> list[Ray]:
    """Parse the ray file format; every ray must already be in canonical sign."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("ray file must hold a JSON array")
    rays = []
    for k, item in enumerate(data):
        if not isinstance(item, list) or len(item) != 3:
            raise ValueError(f"ray {k}: expected 3 coordinates")
        ray = Ray(tuple(ZSqrt2.from_pair(c) for c in item))
        if not ray.is_canonical():
            raise ValueError(f"ray {k} is not in canonical sign (first nonzero coordinate must be positive)")
        rays.append(ray)
    return rays


# --- spin-1 twins ------------------------------------------------------------

I3 = identity(3)


def total_spin_one(direction) -> np.ndarray:
    s = spin_one(direction)
    return tensor(s, I3) + tensor(I3, s)


def twin_state() -> np.ndarray:
    """The total-spin-0 state of two spin-1 particles, from the null space of
    the stacked total-spin components.

    The phase is fixed so the largest amplitude is real and positive.
    """
    axes = (Direction(1.0, 0.0, 0.0), Direction(0.0, 1.0, 0.0), Direction(0.0, 0.0, 1.0))
    stacked = np.vstack([total_spin_one(d) for d in axes])
    _, sv, vh = np.linalg.svd(stacked)
    null = [vh[k].conj() for k in range(vh.shape[0]) if sv[k] < TOL]
    if len(null) != 1:
        raise RuntimeError(f"expected a one-dimensional spin-0 subspace, found {len(null)}")
    v = null[0] / np.linalg.norm(null[0])
    k = int(np.argmax(np.abs(v) > np.max(np.abs(v)) - 1e-12))
    return v * (abs(v[k]) / v[k])


def twin_nullity() -> int:
    axes = (Direction(1.0, 0.0, 0.0), Direction(0.0, 1.0, 0.0), Direction(0.0, 0.0, 1.0))
    stacked = np.vstack([total_spin_one(d) for d in axes])
    return stacked.shape[1] - int(np.linalg.matrix_rank(stacked, tol=TOL))


def _squared(direction) -> np.ndarray:
    s = spin_one(direction)
    return s @ s


def twin_joint_distribution(direction, state=None) -> dict[tuple[int, int], float]:
    """Joint distribution of ``S_w² ⊗ I`` then ``I ⊗ S_w²``."""
    psi = twin_state() if state is None else as_state(state)
    sq = _squared(direction)
    joint: dict[tuple[int, int], float] = {(a, b): 0.0 for a in (0, 1) for b in (0, 1)}
    for o1 in born_distribution(psi, tensor(sq, I3)):
        if o1.probability <= TOL:
            continue
        after = collapse(psi, o1.projector)
        for o2 in born_distribution(after, tensor(I3, sq)):
            joint[(round(o1.eigenvalue), round(o2.eigenvalue))] += o1.probability * o2.probability
    return joint


def twin_correlation_check(direction) -> bool:
    joint = twin_joint_distribution(direction)
    return joint[(0, 1)] + joint[(1, 0)] < TOL


@dataclass(frozen=True)
class TripleExperimentRecord:
    a_outcomes: tuple[int, int, int]
    b_outcome: int
    seed: int


def _check_frame(frame: Sequence[Direction]) -> None:
    if len(frame) != 3:
        raise ValueError("a frame has three directions")
    for d1, d2 in itertools.combinations(frame, 2):
        if abs(float(np.dot(d1.vector, d2.vector))) >= TOL:
            raise ValueError("frame directions are not pairwise orthogonal")


class TripleExperiment:
    """A's triple measurement of ``(S_x², S_y², S_z²) ⊗ I`` followed by B's
    ``I ⊗ S_w²``, on the twin state. Decompositions are computed once."""

    def __init__(self, frame: Sequence, w):
        frame = [d if isinstance(d, Direction) else Direction(*d) for d in frame]
        _check_frame(frame)
        w = w if isinstance(w, Direction) else Direction(*w)
        self.frame = tuple(frame)
        self.w = w
        self.state = twin_state()
        obs = [tensor(_squared(d), I3) for d in frame] + [tensor(I3, _squared(w))]
        self._decomps = [spectral_decompose(o) for o in obs]

    def run(self, seed: int) -> TripleExperimentRecord:
        steps = run_sequence(self.state, self._decomps, make_rng(seed))
        vals = [int(round(outcome)) for outcome, _, _ in steps]
        return TripleExperimentRecord(tuple(vals[:3]), vals[3], int(seed))


def triple_experiment(frame: Sequence, w, seed: int) -> TripleExperimentRecord:
    return TripleExperiment(frame, w).run(seed)


def spin_sum_deviation(frame: Sequence[Direction]) -> tuple[float, float]:
    """``(‖S_x²+S_y²+S_z² − 2I‖, max pairwise commutator norm)`` for a frame."""
    sq = [_squared(d) for d in frame]
    total = max_abs(sum(sq) - 2 * I3)
    comm = max(max_abs(a @ b - b @ a) for a, b in itertools.combinations(sq, 2))
    return total, comm
