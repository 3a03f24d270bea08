"""Command-line entry point: ``bornlab verify | epr | ks | gleason``.

Exit codes: 0 when every check passes (or a search completes), 1 on a
verification failure, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import boolean, epr, ks
from .measurement import (
    born_distribution,
    density_from_probabilities,
    make_rng,
    measure_sequence,
    probabilities_from_density,
    run_sequence,
    spanning_projectors,
)
from .operators import identity, ket_bra, max_abs, spectral_decompose, tensor
from .report import Report


class UsageError(ValueError):
    pass


SUITES = ("born", "boolean", "epr", "spin", "ks")
TWIN_RUNS = 1000


def _suite_born(rep: Report) -> None:
    gamma = epr.singlet_state()
    s_z = epr.spin_half(epr.Z_AXIS)
    dist = born_distribution(gamma, tensor(s_z, epr.I2))
    rep.add("Born(Γ, s_z⊗I) == {+½: ½, −½: ½}",
            max(abs(e.probability - 0.5) for e in dist) < 1e-10,
            max(abs(e.probability - 0.5) for e in dist),
            {str(e.eigenvalue): e.probability for e in dist})
    up_dist = born_distribution(epr.UP, s_z)
    rep.add("eigenstate ψ_z^+ gives +½ with certainty", abs(up_dist.probability(0.5) - 1) < 1e-10,
            abs(up_dist.probability(0.5) - 1))
    sums = []
    for seed in range(200):
        recs = measure_sequence(gamma, [tensor(s_z, epr.I2), tensor(epr.I2, s_z)], seed)
        sums.append(recs[0].outcome + recs[1].outcome)
    rep.add("measured z-spins of Γ are always opposite (200 seeds)", max(map(abs, sums)) < 1e-12,
            max(map(abs, sums)))
    w = density_from_probabilities(probabilities_from_density(ket_bra(gamma), spanning_projectors(4)), 4)
    ev = w.eigenvalues()
    rep.add("Gleason: Born probabilities of Γ determine the rank-1 w = |Γ⟩⟨Γ|",
            max_abs(w.w - ket_bra(gamma)) < 1e-9 and ev[-2] < 1e-9,
            max_abs(w.w - ket_bra(gamma)), {"rank": w.rank()})


def boolean_cardinalities() -> dict[str, tuple[int, int]]:
    """Name -> (generated size, expected size) for the four stated algebras."""
    pz_plus, pz_minus = epr.spin_half_projectors(epr.Z_AXIS)
    b1 = boolean.generate_algebra([tensor(pz_plus, epr.I2), tensor(pz_minus, epr.I2)])
    b12 = boolean.generate_algebra([tensor(pz_plus, epr.I2), tensor(epr.I2, pz_minus)])
    spin1 = boolean.generate_algebra(spectral_decompose(epr.SPIN1_Z).projectors)
    die = boolean.generate_algebra([np.diag(row) for row in np.eye(6, dtype=complex)])
    return {
        "B₁ (s_z⊗I)": (b1.size, 4),
        "B₁⊕B₂": (b12.size, 16),
        "spin-1 Stern-Gerlach": (spin1.size, 8),
        "die": (die.size, 64),
    }


def _suite_boolean(rep: Report) -> None:
    for name, (got, want) in boolean_cardinalities().items():
        rep.add(f"|{name}| == {want}", got == want, None, {"elements": got})


def _suite_epr(rep: Report) -> None:
    for c in epr.verify_epr_identities().checks:
        rep.add(c.name, c.passed, c.deviation)


def _frames(ts: ks.TripleSet) -> list[list[epr.Direction]]:
    rays = ts.frame_rays
    return [[rays[i].direction() for i in t] for t in ts.triples]


def _suite_spin(rep: Report) -> None:
    ts = ks.enumerate_triples(ks.peres_rays())
    devs = [ks.spin_sum_deviation(f) for f in _frames(ts)]
    worst_sum = max(d[0] for d in devs)
    worst_comm = max(d[1] for d in devs)
    rep.add(f"SPIN: S_x²+S_y²+S_z² == 2I on all {len(devs)} frames", worst_sum < 1e-10, worst_sum)
    rep.add(f"SPIN: squared components commute on all {len(devs)} frames", worst_comm < 1e-10, worst_comm)
    ok = [ks.twin_correlation_check(r.direction()) for r in ts.rays]
    rep.add(f"TWIN: equal S_w² outcomes on the twin state for all {len(ok)} directions", all(ok), None,
            {"passed": sum(ok)})
    frame = _frames(ts)[0]
    exp = ks.TripleExperiment(frame, frame[0])
    agree, spin_ok = 0, 0
    for seed in range(TWIN_RUNS):
        rec = exp.run(seed)
        agree += rec.b_outcome == rec.a_outcomes[0]
        spin_ok += sorted(rec.a_outcomes) == [0, 1, 1]
    rep.add(f"TWIN: B agrees with A on a shared axis ({TWIN_RUNS} runs)", agree == TWIN_RUNS, None,
            {"agreements": agree, "runs": TWIN_RUNS})
    rep.add(f"SPIN: A's triple is a permutation of (1, 0, 1) ({TWIN_RUNS} runs)", spin_ok == TWIN_RUNS, None,
            {"runs": TWIN_RUNS})


def _suite_ks(rep: Report, workers: int = 1) -> None:
    rays = ks.peres_rays()
    ts = ks.enumerate_triples(rays)
    rep.add("33 directions", len(rays) == 33, None, {"count": len(rays)})
    rep.add("40 orthogonal frames (exact arithmetic)", len(ts.triples) == 40, None,
            {"count": len(ts.triples), "complete_triples": len(ts.complete_triples),
             "orthogonal_pairs": len(ts.orthogonal_pairs)})
    for mode in ks.Constraints:
        res = ks.ks_color_search(ts, mode, workers=workers)
        rep.add(f"no 1,0,1 assignment exists ({mode.value})", not res.satisfiable, None, res.to_payload())
    sub = ks.ks_color_search(ts, ks.Constraints.TRIPLES_ONLY, complete_only=True)
    rep.add("complete triples alone (diagnostic)", "info", None, sub.to_payload())


def cmd_verify(only: str | None = None, workers: int = 1) -> Report:
    rep = Report(command="verify" + (f" --only {only}" if only else ""))
    t0 = time.perf_counter()
    suites = {
        "born": _suite_born,
        "boolean": _suite_boolean,
        "epr": _suite_epr,
        "spin": _suite_spin,
        "ks": lambda r: _suite_ks(r, workers),
    }
    for name in ([only] if only else SUITES):
        suites[name](rep)
    rep.wall_time_ms = int((time.perf_counter() - t0) * 1000)
    return rep


def cmd_epr(theta_deg: float, shots: int, seed: int = 0) -> Report:
    """Seeded singlet runs: particle 1 along z, particle 2 at angle theta."""
    if not math.isfinite(theta_deg) or not 0 <= theta_deg <= 360:
        raise UsageError("theta must be a finite angle in [0, 360] degrees")
    if shots < 1:
        raise UsageError("shots must be at least 1")
    t0 = time.perf_counter()
    theta = math.radians(theta_deg)
    gamma = epr.singlet_state()
    obs = [
        spectral_decompose(tensor(epr.spin_half(epr.Z_AXIS), epr.I2)),
        spectral_decompose(tensor(epr.I2, epr.spin_half(epr.Direction.polar(theta)))),
    ]
    rng = make_rng(seed)
    opposite = 0
    for _ in range(shots):
        (a, _, _), (b, _, _) = run_sequence(gamma, obs, rng)
        opposite += (a > 0) != (b > 0)
    freq = opposite / shots
    exact = epr.opposite_probability(epr.epr_joint_distribution(epr.Z_AXIS, epr.Direction.polar(theta), gamma))
    sigma = math.sqrt(max(0.0, exact * (1 - exact)) / shots)
    if sigma > 1e-12:
        z = (freq - exact) / sigma
        ok = abs(z) <= 4
    else:
        z = None
        ok = abs(freq - exact) < 1e-12
    rep = Report(command=f"epr --theta-deg {theta_deg:g} --shots {shots} --seed {seed}", seed=seed)
    rep.add("opposite-outcome frequency within 4σ of cos²(θ/2)", ok, abs(freq - exact), {
        "theta_deg": theta_deg,
        "shots": shots,
        "opposite": opposite,
        "empirical_frequency": freq,
        "born_probability": exact,
        "sigma": sigma,
        "z_score": z,
    })
    rep.wall_time_ms = int((time.perf_counter() - t0) * 1000)
    return rep


def cmd_ks(mode: str, constraints: str = "triples_and_pairs", workers: int = 1) -> Report:
    t0 = time.perf_counter()
    rays = ks.peres_rays()
    rep = Report(command=f"ks {mode}" + (f" --constraints {constraints}" if mode == "search" else ""))
    if mode == "list-rays":
        data = [r.to_json() for r in rays]
        rep.add("rays", "info", None, {"count": len(rays), "rays": data})
    elif mode == "triples":
        ts = ks.enumerate_triples(rays)
        rep.add("triples", "info", None, {
            "count": len(ts.triples),
            "triples": [list(t) for t in ts.triples],
            "completions": [r.to_json() for r in ts.completions],
        })
    elif mode == "search":
        ts = ks.enumerate_triples(rays)
        res = ks.ks_color_search(ts, constraints, workers=workers)
        rep.add("search", "info", None, res.to_payload())
    else:
        raise UsageError(f"unknown ks mode {mode!r}")
    rep.wall_time_ms = int((time.perf_counter() - t0) * 1000)
    return rep


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G† / tr`` with complex Gaussian ``G``."""
    cols = dim if rank is None else rank
    g = rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))
    w = g @ g.conj().T
    return w / np.trace(w).real


def cmd_gleason(dim: int, seed: int = 0) -> Report:
    if dim not in (2, 3, 4):
        raise UsageError("dim must be 2, 3 or 4")
    t0 = time.perf_counter()
    rng = make_rng(seed)
    projs = spanning_projectors(dim)
    rep = Report(command=f"gleason --dim {dim} --seed {seed}", seed=seed)

    w0 = random_density(dim, rng)
    w = density_from_probabilities(probabilities_from_density(w0, projs), dim)
    dev = max_abs(w.w - w0)
    rep.add("random density round-trip", dev < 1e-9, dev, {"dim": dim})

    pure = random_density(dim, rng, rank=1)
    wp = density_from_probabilities(probabilities_from_density(pure, projs), dim)
    ev = wp.eigenvalues()
    second = float(ev[-2])
    rep.add("pure-state assignment reconstructs a rank-1 projector", wp.rank() == 1 and second < 1e-9,
            max_abs(wp.w - pure), {"rank": wp.rank(), "second_eigenvalue": second})

    mixed = [(p, float(np.trace(p).real) / dim) for p in projs]
    wm = density_from_probabilities(mixed, dim)
    dev_m = max_abs(wm.w - identity(dim) / dim)
    rep.add("maximally mixed assignment gives I/dim", dev_m < 1e-9, dev_m)
    rep.wall_time_ms = int((time.perf_counter() - t0) * 1000)
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bornlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the identity suites")
    v.add_argument("--only", choices=SUITES)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--json", action="store_true")

    e = sub.add_parser("epr", help="seeded singlet measurements at a relative angle")
    e.add_argument("--theta-deg", type=float, required=True)
    e.add_argument("--shots", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--json", action="store_true")

    k = sub.add_parser("ks", help="the 33-ray Kochen-Specker configuration")
    k.add_argument("mode", choices=("list-rays", "triples", "search"))
    k.add_argument("--constraints", choices=[c.value for c in ks.Constraints], default="triples_and_pairs")
    k.add_argument("--workers", type=int, default=1)
    k.add_argument("--json", action="store_true")

    g = sub.add_parser("gleason", help="density-operator reconstruction round trip")
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--json", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be at least 1")
        if args.command == "verify":
            rep = cmd_verify(args.only, args.workers)
        elif args.command == "epr":
            rep = cmd_epr(args.theta_deg, args.shots, args.seed)
        elif args.command == "ks":
            rep = cmd_ks(args.mode, args.constraints, args.workers)
        else:
            rep = cmd_gleason(args.dim, args.seed)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bornlab: error: {exc}", file=sys.stderr)
        return 2
    print(rep.to_json() if args.json else rep.render())
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
