import itertools
import math

import numpy as np
import pytest

from bornlab import ks
from bornlab.epr import X_AXIS, Y_AXIS, Z_AXIS, Direction
from bornlab.exact import ZSqrt2
from bornlab.ks import (
    SIGNED_PERMUTATIONS,
    Constraints,
    Ray,
    TripleSet,
    check_assignment,
    enumerate_triples,
    ks_color_search,
    peres_rays,
)
from bornlab.operators import TOL, identity, max_abs

from conftest import random_rotation

RAYS = peres_rays()
TS = enumerate_triples(RAYS)
S2 = math.sqrt(2)


def test_ray_count_and_axes():
    assert len(RAYS) == 33
    assert len(set(RAYS)) == 33
    for axis in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        assert Ray.of(*axis) in RAYS
    assert all(r.is_canonical() for r in RAYS)


def test_frame_count_and_structure():
    assert len(TS.triples) == 40
    assert len(TS.complete_triples) == 16
    assert len(TS.orthogonal_pairs) == 72
    assert len(TS.completions) == 24
    # every orthogonal pair lies in exactly one frame
    per_pair = {p: 0 for p in TS.orthogonal_pairs}
    for t in TS.triples:
        for p in itertools.combinations(sorted(TS.members(t)), 2):
            per_pair[p] += 1
    assert set(per_pair.values()) == {1}
    assert {i for t in TS.triples for i in TS.members(t)} == set(range(33))


def test_frames_are_orthogonal_and_completions_new():
    rays = TS.frame_rays
    for t in TS.triples:
        for i, j in itertools.combinations(t, 2):
            assert rays[i].is_orthogonal(rays[j])
            assert abs(np.dot(rays[i].unit_vector(), rays[j].unit_vector())) < 1e-12
    for c in TS.completions:
        assert not any(c.is_parallel(r) for r in RAYS)
    assert Ray.of(3, 1, ZSqrt2(0, 1)) in TS.completions


def test_axes_alone():
    axes = [Ray.of(1, 0, 0), Ray.of(0, 1, 0), Ray.of(0, 0, 1)]
    ts = enumerate_triples(axes)
    assert ts.triples == ((0, 1, 2),)
    assert len(ts.orthogonal_pairs) == 3 and ts.completions == ()
    res = ks_color_search(ts, Constraints.TRIPLES_AND_PAIRS)
    assert res.satisfiable
    assert sorted(res.assignment) == [0, 1, 1]
    assert check_assignment(ts, res.assignment, Constraints.TRIPLES_AND_PAIRS)


def test_duplicate_and_parallel_rays_rejected():
    with pytest.raises(ValueError):
        enumerate_triples([Ray.of(1, 0, 0), Ray.of(1, 0, 0)])
    with pytest.raises(ValueError):
        enumerate_triples([Ray.of(1, 1, 0), Ray.of(2, 2, 0)])
    with pytest.raises(ValueError):
        Ray.of(0, 0, 0)


def test_canonical_sign():
    assert Ray.of(-1, 1, 0) == Ray.of(1, -1, 0)
    assert Ray.of(0, ZSqrt2(0, -1), 1).coords[1].sign() > 0


def _frame_sets(ts):
    rays = ts.frame_rays
    return {frozenset(rays[i] for i in t) for t in ts.triples}


def test_invariance_under_signed_permutations():
    assert len(SIGNED_PERMUTATIONS) == 48
    # x -> -x fixes every unoriented ray, so the 48 act as 24 distinct maps
    actions = {tuple(r.transformed(p, s) for r in RAYS) for p, s in SIGNED_PERMUTATIONS}
    assert len(actions) == 24
    ray_set = set(RAYS)
    frames = _frame_sets(TS)
    for perm, signs in SIGNED_PERMUTATIONS:
        assert {r.transformed(perm, signs) for r in RAYS} == ray_set
        image = {frozenset(r.transformed(perm, signs) for r in f) for f in frames}
        assert image == frames


def test_orthogonality_decisions_are_exact():
    # exact verdicts agree with floats where floats are unambiguous, and
    # floats never come close to zero for the non-orthogonal pairs
    for a, b in itertools.combinations(RAYS, 2):
        f = abs(np.dot(a.unit_vector(), b.unit_vector()))
        if a.is_orthogonal(b):
            assert f < 1e-12
        else:
            assert f > 0.1


@pytest.mark.parametrize("mode", list(Constraints))
def test_peres_set_is_uncolorable(mode):
    res = ks_color_search(TS, mode)
    assert not res.satisfiable and res.assignment is None
    again = ks_color_search(TS, mode.value)
    assert again.nodes_explored == res.nodes_explored
    assert again.conflicts == res.conflicts
    assert res.constraints_used is mode


def test_search_trace_is_deterministic():
    a = ks_color_search(TS, record_trace=True)
    b = ks_color_search(TS, record_trace=True)
    assert a.trace == b.trace
    assert len(a.trace) == a.nodes_explored
    assert "trace" not in a.to_payload()


def test_parallel_search_agrees():
    serial = ks_color_search(TS, workers=1)
    par = ks_color_search(TS, workers=2)
    assert par.satisfiable == serial.satisfiable is False
    assert par.workers == 2
    assert ks_color_search(TS, workers=2).nodes_explored == par.nodes_explored


def test_complete_triples_alone_are_colorable():
    res = ks_color_search(TS, Constraints.TRIPLES_ONLY, complete_only=True)
    assert res.satisfiable
    a = res.assignment
    for t in TS.complete_triples:
        assert sorted(a[i] for i in t) == [0, 1, 1]
    # the assignment must break some incomplete frame
    assert not check_assignment(TS, a, Constraints.TRIPLES_ONLY)


def _abstract(n, triples):
    rays = tuple(RAYS[:n])
    return TripleSet(rays, tuple(triples), ())


def test_fano_plane_of_exact_triples_is_unsat():
    fano = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    res = ks_color_search(_abstract(7, fano), Constraints.TRIPLES_ONLY)
    assert not res.satisfiable


def test_k4_of_triples_is_sat():
    # vertices of K4 -> triples of incident edges; zeros form a perfect matching
    edges = list(itertools.combinations(range(4), 2))
    triples = [tuple(k for k, e in enumerate(edges) if v in e) for v in range(4)]
    ts = _abstract(6, triples)
    res = ks_color_search(ts, Constraints.TRIPLES_ONLY)
    assert res.satisfiable
    assert check_assignment(ts, res.assignment, Constraints.TRIPLES_ONLY)


def _float_oracle(rays):
    """Brute force with float geometry: every orthogonal triple has exactly one
    zero and every orthogonal pair at most one."""
    vecs = [r.unit_vector() for r in rays]
    n = len(vecs)
    orth = {(i, j) for i, j in itertools.combinations(range(n), 2) if abs(vecs[i] @ vecs[j]) < 1e-9}
    trip = [t for t in itertools.combinations(range(n), 3)
            if all(p in orth for p in itertools.combinations(t, 2))]
    for bits in itertools.product((0, 1), repeat=n):
        if any(bits[i] == 0 and bits[j] == 0 for i, j in orth):
            continue
        if all(sum(bits[i] for i in t) == 2 for t in trip):
            return True
    return False


def _synthetic(rng, size):
    """Mostly Peres rays, plus a few random Z[√2] rays; no two parallel."""
    picked = [RAYS[i] for i in rng.choice(33, size=max(1, size - 2), replace=False)]
    while len(picked) < size:
        coords = [ZSqrt2(int(a), int(b)) for a, b in rng.integers(-2, 3, size=(3, 2))]
        if not any(coords):
            continue
        r = Ray.of(*coords)
        if not any(r.is_parallel(p) for p in picked):
            picked.append(r)
    return picked


@pytest.mark.parametrize("mode", list(Constraints))
def test_search_matches_brute_force(mode):
    rng = np.random.default_rng(7)
    sat_seen = 0
    for trial in range(100):
        rays = _synthetic(rng, int(rng.integers(3, 13)))
        ts = enumerate_triples(rays)
        res = ks_color_search(ts, mode)
        assert res.satisfiable == _float_oracle(rays), trial
        if res.satisfiable:
            sat_seen += 1
            assert check_assignment(ts, res.assignment, mode)
    assert sat_seen > 0


def _clause_oracle(n, triples, pairs):
    for bits in itertools.product((0, 1), repeat=n):
        if any(bits[i] == 0 and bits[j] == 0 for i, j in pairs):
            continue
        if all(sum(bits[i] for i in t) == 2 for t in triples):
            return True
    return False


def test_search_matches_brute_force_on_random_hypergraphs():
    rng = np.random.default_rng(11)
    outcomes = set()
    for trial in range(100):
        n = int(rng.integers(3, 13))
        triples = {tuple(sorted(rng.choice(n, 3, replace=False))) for _ in range(rng.integers(1, 2 * n))}
        pairs = {tuple(sorted(rng.choice(n, 2, replace=False))) for _ in range(rng.integers(0, n))}
        ts = TripleSet(tuple(RAYS[:n]), tuple(sorted(triples)), tuple(sorted(pairs)))
        res = ks_color_search(ts, Constraints.TRIPLES_AND_PAIRS)
        assert res.satisfiable == _clause_oracle(n, triples, pairs), trial
        if res.satisfiable:
            assert check_assignment(ts, res.assignment, Constraints.TRIPLES_AND_PAIRS)
        outcomes.add(res.satisfiable)
    assert outcomes == {True, False}


def test_ray_json_round_trip():
    text = ks.rays_to_json(RAYS)
    assert ks.rays_from_json(text) == RAYS


def test_ray_json_rejects_bad_input():
    with pytest.raises(ValueError):
        ks.rays_from_json("[[[-1, 0], [0, 0], [0, 0]]]")
    with pytest.raises(ValueError):
        ks.rays_from_json('{"a": 1}')
    with pytest.raises(ValueError):
        ks.rays_from_json("[[[1, 0], [0, 0]]]")
    with pytest.raises(ValueError):
        ks.rays_from_json("[[[1.5, 0], [0, 0], [0, 0]]]")


def test_spin_identity_on_every_frame():
    rays = TS.frame_rays
    for t in TS.triples:
        total, comm = ks.spin_sum_deviation([rays[i].direction() for i in t])
        assert total < TOL and comm < TOL


# --- twin state ---------------------------------------------------------------


def test_twin_state_is_total_spin_zero():
    g = ks.twin_state()
    assert ks.twin_nullity() == 1
    assert np.linalg.norm(g) == pytest.approx(1)
    s2 = sum(ks.total_spin_one(d) @ ks.total_spin_one(d) for d in (X_AXIS, Y_AXIS, Z_AXIS))
    assert max_abs(s2 @ g) < TOL
    for d in (X_AXIS, Y_AXIS, Z_AXIS):
        assert max_abs(ks.total_spin_one(d) @ g) < TOL


def test_twin_state_components():
    # basis order m = +1, 0, -1 on each factor
    expected = np.zeros(9, dtype=complex)
    expected[2] = expected[6] = 1 / math.sqrt(3)
    expected[4] = -1 / math.sqrt(3)
    assert max_abs(ks.twin_state() - expected) < 1e-12


def test_twin_is_rotation_invariant(rng):
    g = ks.twin_state()
    for _ in range(10):
        d = Direction(*random_rotation(rng)[:, 0])
        assert max_abs(ks.total_spin_one(d) @ g) < TOL


def test_twin_correlation_in_random_directions(rng):
    for _ in range(20):
        d = Direction.normalized(*rng.standard_normal(3))
        joint = ks.twin_joint_distribution(d)
        assert joint[(0, 1)] + joint[(1, 0)] < TOL
        assert joint[(0, 0)] == pytest.approx(1 / 3, abs=1e-12)
        assert joint[(1, 1)] == pytest.approx(2 / 3, abs=1e-12)
        assert ks.twin_correlation_check(d)


def test_triple_experiment_rejects_skew_frame():
    with pytest.raises(ValueError):
        ks.TripleExperiment([X_AXIS, Direction.normalized(1, 1, 0), Z_AXIS], Z_AXIS)
    with pytest.raises(ValueError):
        ks.TripleExperiment([X_AXIS, Y_AXIS], Z_AXIS)


def test_triple_experiment_agreement():
    ray_frame = TS.triples[5]
    frame = [TS.frame_rays[i].direction() for i in ray_frame]
    for k in range(3):
        exp = ks.TripleExperiment(frame, frame[k])
        for seed in range(10_000 if k == 0 else 500):
            rec = exp.run(seed)
            assert sorted(rec.a_outcomes) == [0, 1, 1]
            assert rec.b_outcome == rec.a_outcomes[k]
    assert ks.triple_experiment(frame, frame[0], 3) == ks.TripleExperiment(frame, frame[0]).run(3)


def test_triple_experiment_outcome_statistics():
    exp = ks.TripleExperiment([X_AXIS, Y_AXIS, Z_AXIS], Z_AXIS)
    zeros = [0, 0, 0]
    n = 3000
    for seed in range(n):
        rec = exp.run(seed)
        zeros[rec.a_outcomes.index(0)] += 1
    # each axis carries the zero with probability 1/3
    sigma = math.sqrt(n * (1 / 3) * (2 / 3))
    assert all(abs(z - n / 3) < 4 * sigma for z in zeros)


def test_spin_sum_deviation_detects_skew_frame():
    total, comm = ks.spin_sum_deviation([X_AXIS, Direction.normalized(1, 1, 0), Z_AXIS])
    assert total > 0.1 and comm > 0.1
    assert ks.spin_sum_deviation([X_AXIS, Y_AXIS, Z_AXIS])[0] < TOL
    assert max_abs(ks.I3 - identity(3)) == 0
