"""Command-line interface: experiment runs with persisted, replayable outputs.

Every run builds a manifest (command, normalized flags, system config
content), executes, writes its artifacts, and files them in the
content-addressed store under the manifest hash.  `replay <key>`
re-executes a stored manifest and byte-diffs the fresh artifacts against
the stored ones; an empty diff is the reproducibility check.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import dc1, pairlab, pstar, relation, shadowing, store
from .chaingraph import ChainGraph, cyclic_decomposition, reachability_threshold
from .errors import ChainChaosError, InputError
from .symbolic import ShiftPoint
from .systems import (SFT, SystemSpec, box_cover, discretize, load_system,
                      parse_fraction, parse_point, parse_system_config,
                      point_to_box)

try:
    from importlib.metadata import version as _pkg_version
    VERSION = _pkg_version("chainchaos")
except Exception:  # pragma: no cover
    VERSION = "0.1.0"


def _parse_bits(text: str) -> Tuple[int, ...]:
    if not text or any(c not in "01" for c in text):
        raise InputError(f"bit string must be nonempty over 0/1, got {text!r}")
    return tuple(int(c) for c in text)


def _parse_schedule(text: str) -> List[Fraction]:
    return [parse_fraction(part) for part in text.split(",") if part]


def _anchor_pair(spec: SystemSpec):
    """Default separated related pair: periodic points through the most
    distant related boxes (shift systems only)."""
    from .chaingraph import find_chain
    from .relation import related_at

    if spec.kind != SFT:
        raise InputError("--z/--w are required for interval and circle systems")
    g = discretize(spec, spec.depth)
    dec = cyclic_decomposition(g)
    best = None
    for u in range(g.n):
        for v in range(g.n):
            if u != v and related_at(dec, u, v):
                d = g.dist(u, v)
                if best is None or d > best[0]:
                    best = (d, u, v)
    if best is None:
        raise InputError("no related distinct box pair; nothing to anchor")
    _, bu, bv = best

    def periodic_point(b: int) -> ShiftPoint:
        for length in range(1, g.n + 1):
            cyc = find_chain(g, b, b, length)
            if cyc is not None:
                symbols = tuple(g.labels[i][0] for i in cyc[:-1])
                p = ShiftPoint((), symbols)
                p.validate(spec.adjacency)
                return p
        raise InputError("no cycle through a recurrent box; cannot anchor")

    return periodic_point(bu), periodic_point(bv)


# -- handlers: each returns (artifacts, summary lines) ---------------------------


def _grid_args(spec: SystemSpec, args) -> Tuple[int, Fraction]:
    if spec.kind == SFT:
        n = args.boxes if args.boxes is not None else spec.depth
        delta = parse_fraction(args.delta) if args.delta else Fraction(1, 2 ** n)
        return n, delta
    if args.boxes is None:
        raise InputError("--boxes is required for interval and circle systems")
    if args.delta is None:
        raise InputError("--delta is required for interval and circle systems")
    return args.boxes, parse_fraction(args.delta)


def cmd_discretize(spec: SystemSpec, args):
    n, delta = _grid_args(spec, args)
    g = discretize(spec, n, delta)
    artifacts = {}
    if args.emit in ("json", "both"):
        artifacts["graph.json"] = g.to_json()
    if args.emit in ("dot", "both"):
        artifacts["graph.dot"] = g.to_dot()
    summary = [f"graph: {g.n} vertices, {len(g.edges())} edges, delta {g.delta}"]
    return artifacts, summary


def cmd_decompose(spec: SystemSpec, args):
    n, delta = _grid_args(spec, args)
    g = discretize(spec, n, delta)
    dec = cyclic_decomposition(g)
    artifacts = {"decomposition.json": dec.to_json()}
    if args.emit == "dot":
        artifacts["graph.dot"] = g.to_dot()
    summary = [f"components: {len(dec.components)}"]
    for c in dec.components:
        summary.append(f"  component {c.id}: period {c.period}, "
                       f"{sum(len(cl) for cl in c.classes)} vertices")
    return artifacts, summary


def cmd_relate(spec: SystemSpec, args):
    x = parse_point(spec, args.x)
    y = parse_point(spec, args.y)
    verdict = relation.relate_schedule(spec, x, y, _parse_schedule(args.schedule))
    artifacts = {"relation.json": verdict.to_json()}
    summary = [f"related_for_all_tested: {verdict.related_for_all_tested}"]
    for e in verdict.entries:
        summary.append(f"  resolution {e.resolution}: related={e.related}")
    return artifacts, summary


def cmd_entropy_pairs(spec: SystemSpec, args):
    n, delta = _grid_args(spec, args)
    g = discretize(spec, n, delta)
    dec = cyclic_decomposition(g)
    pairs = relation.entropy_pairs(dec)
    artifacts = {"entropy_pairs.json": pairs.to_json()}
    summary = [f"pairs: {len(pairs.pairs)}; exact shadowing: {pairs.shadowing_exact}"]
    if pairs.caveat:
        summary.append(f"caveat: {pairs.caveat}")
    return artifacts, summary


def cmd_pstar(spec: SystemSpec, args):
    n, delta = _grid_args(spec, args)
    g = discretize(spec, n, delta)
    cover = box_cover(spec, n)
    bx = point_to_box(spec, cover, parse_point(spec, args.x))
    by = point_to_box(spec, cover, parse_point(spec, args.y))
    witness = pstar.separated_cycles(g, bx, by, parse_fraction(args.r))
    if witness is None:
        artifacts = {"pstar.json": json.dumps({"witness": None}) + "\n"}
        summary = ["no separated cycle pair at this radius"]
    else:
        artifacts = {"pstar.json": witness.to_json()}
        summary = [f"witness length {witness.length}, "
                   f"adjusted margin {witness.adjusted_margin}"]
    return artifacts, summary


def _dc1_schedule(spec: SystemSpec, args):
    if args.z and args.w:
        z = parse_point(spec, args.z)
        w = parse_point(spec, args.w)
    else:
        z, w = _anchor_pair(spec)
    r = parse_fraction(args.r)
    blocks = dc1.gather_blocks(spec, z, w, r, args.nmax)
    return z, w, r, blocks


def cmd_dc1_gather(spec: SystemSpec, args):
    z, w, r, blocks = _dc1_schedule(spec, args)
    payload = [{"n": b.n, "a": b.a, "gamma0": list(b.gamma0), "gamma1": list(b.gamma1),
                "alpha": list(b.alpha), "beta": list(b.beta),
                "separation": str(b.separation), "defect_bound": str(b.defect_bound)}
               for b in blocks]
    artifacts = {"blocks.json": json.dumps(payload, indent=2, sort_keys=True) + "\n"}
    return artifacts, [f"gathered {len(blocks)} levels at r={r} for z={z}, w={w}"]


def cmd_dc1_schedule(spec: SystemSpec, args):
    z, w, r, blocks = _dc1_schedule(spec, args)
    sched = dc1.build_schedule(blocks, r=r)
    artifacts = {"schedule.json": sched.to_json()}
    return artifacts, [f"m: {list(sched.m)}",
                       f"checkpoints: {[sched.c(n) for n in range(1, sched.n_max + 1)]}"]


def cmd_dc1_build_xi(spec: SystemSpec, args):
    z, w, r, blocks = _dc1_schedule(spec, args)
    sched = dc1.build_schedule(blocks, r=r)
    bits = _parse_bits(args.u)
    total = sched.b(len(bits) + 1) + 1
    if total > 1_000_000:
        raise InputError(f"orbit has {total} entries; use stats/certify instead of emitting it")
    grid = sched.blocks[0].grid
    g = discretize(spec, grid.boxes, grid.delta)
    orbit = dc1.build_block_orbit(bits, sched, graph=g)
    lines = [json.dumps({"i": i, "vertex": int(vid),
                         "label": "".join(map(str, g.labels[int(vid)]))
                         if isinstance(g.labels[int(vid)], tuple) else str(g.labels[int(vid)])})
             for i, vid in enumerate(orbit.ids)]
    artifacts = {"orbit.jsonl": "\n".join(lines) + "\n"}
    return artifacts, [f"assembled {total} entries for bits {args.u}"]


def cmd_dc1_stats(spec: SystemSpec, args):
    z, w, r, blocks = _dc1_schedule(spec, args)
    sched = dc1.build_schedule(blocks, r=r)
    cert = dc1.certify_dc1(spec, sched, _parse_bits(args.u), _parse_bits(args.v))
    artifacts = {"stats.csv": cert.statistics.to_csv()}
    if args.plot_script:
        artifacts["stats.gp"] = _gnuplot_script()
    return artifacts, [f"checkpoints: {[cp.c for cp in cert.statistics.checkpoints]}"]


def cmd_dc1_certify(spec: SystemSpec, args):
    z, w, r, blocks = _dc1_schedule(spec, args)
    sched = dc1.build_schedule(blocks, r=r)
    cert = dc1.certify_dc1(spec, sched, _parse_bits(args.u), _parse_bits(args.v))
    artifacts = {"certificate.json": cert.to_json(),
                 "stats.csv": cert.statistics.to_csv()}
    summary = [f"verdict: {cert.verdict}"]
    for lv in cert.levels:
        summary.append(f"  level {lv.n}: {'closeness' if lv.matched else 'separation'} "
                       f"count {lv.measured} > {float(lv.required):.1f} "
                       f"(margin {float(lv.margin):.4f})")
    return artifacts, summary


def cmd_dc1_factor(spec: SystemSpec, args):
    x = parse_point(spec, args.x)
    y = parse_point(spec, args.y)
    factor = dc1.factor_construct(spec, x, y, parse_fraction(args.epsilon))
    bound = factor.entropy_lower_bound()
    payload = {
        "a": factor.a,
        "chains": {f"{i}{j}": list(c) for (i, j), c in factor.chains.items()},
        "ball_guaranteed": factor.ball_guaranteed,
        "entropy_bound": bound["bound"],
        "true_entropy": bound["true_entropy"],
    }
    if args.sample:
        check = factor.sample(_parse_bits(args.sample))
        payload["sample"] = {"bits": args.sample, "point": str(check.point),
                             "within": check.within,
                             "distances": [str(d) for d in check.distances]}
    artifacts = {"factor.json": json.dumps(payload, indent=2, sort_keys=True) + "\n"}
    return artifacts, [f"a = {factor.a}, bound = {bound['bound']:.6f}, "
                       f"true entropy = {bound['true_entropy']:.6f}"]


def cmd_track(spec: SystemSpec, args):
    lines = Path(args.po).read_text().splitlines()
    entries = [ln.strip() for ln in lines if ln.strip()]
    if spec.kind == SFT:
        g = discretize(spec, spec.depth)
        words = []
        for ln in entries:
            words.append(tuple(int(c) for c in ln))
        po = shadowing.PseudoOrbit(words=words, graph=g)
        y = shadowing.shadow_sft(po, spec.depth)
    else:
        pts = [parse_fraction(ln) for ln in entries]
        po = shadowing.PseudoOrbit(points=pts)
        y = pts[0]
    n = min(args.horizon, len(po))
    eps = shadowing.tracking_average(spec, y, po, n)
    rows = ["m,epsilon"]
    rows += [f"{m},{float(e):.12g}" for m, e in enumerate(eps, start=1)]
    artifacts = {"tracking.csv": "\n".join(rows) + "\n"}
    return artifacts, [f"tracked {n} steps; final average {float(eps[-1]):.3g}"]


def cmd_classify(spec: SystemSpec, args):
    x = parse_point(spec, args.x)
    y = parse_point(spec, args.y)
    cls = pairlab.classify_pair(spec, x, y, args.horizon,
                                low=parse_fraction(args.low),
                                high=parse_fraction(args.high))
    artifacts = {"classify.json": cls.to_json()}
    return artifacts, [f"labels: {sorted(cls.labels) or ['none']}"]


def cmd_thick(args):
    text = Path(args.bits).read_text()
    bits = [c == "1" for c in text if c in "01"]
    profile = pairlab.thick_profile(bits)
    levels = profile.levels(min(args.levels, profile.horizon))
    artifacts = {"thick.json": json.dumps(
        {"max_run": profile.max_run, "horizon": profile.horizon,
         "levels": levels}, indent=2) + "\n"}
    return artifacts, [f"max run: {profile.max_run}"]


def _gnuplot_script() -> str:
    return (
        'set datafile separator ","\n'
        "set key autotitle columnhead\n"
        "set xlabel 'checkpoint'\n"
        "set ylabel 'proportion'\n"
        "set logscale x\n"
        "plot 'stats.csv' using 2:($3==1?$4/$2:1/0) with points title 'closeness', \\\n"
        "     'stats.csv' using 2:($3==0?$5/$2:1/0) with points title 'separation'\n")


# -- driver -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chainchaos",
                                description="chain-dynamics invariants and "
                                            "distributional-chaos certificates")
    p.add_argument("--version", action="version", version=VERSION)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True, grid=False):
        if system:
            sp.add_argument("--system", required=True, help="system config file (TOML)")
        if grid:
            sp.add_argument("--boxes", type=int, default=None,
                            help="box count (numeric) or word depth (shift)")
            sp.add_argument("--delta", default=None, help="edge tolerance p/q")
        sp.add_argument("--out", default=None, help="directory for artifact files")
        sp.add_argument("--store", default=None, help="store root (default $CHAINCHAOS_STORE)")
        sp.add_argument("--no-store", action="store_true", help="skip persisting the run")

    sp = sub.add_parser("discretize", help="build the chain graph of a system")
    common(sp, grid=True)
    sp.add_argument("--emit", choices=["json", "dot", "both"], default="json")

    sp = sub.add_parser("decompose", help="recurrent components, periods, classes")
    common(sp, grid=True)
    sp.add_argument("--emit", choices=["json", "dot"], default="json")

    sp = sub.add_parser("relate", help="relation verdicts over a resolution schedule")
    common(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--schedule", required=True, help="comma-separated resolutions, decreasing")

    sp = sub.add_parser("entropy-pairs", help="related distinct pairs at one resolution")
    common(sp, grid=True)

    sp = sub.add_parser("pstar", help="separated equal-length cycle witness")
    common(sp, grid=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--r", required=True, help="separation radius p/q")

    dc1p = sub.add_parser("dc1", help="block construction pipeline")
    dc1sub = dc1p.add_subparsers(dest="dc1_command", required=True)

    def dc1_common(sp, uv=False):
        common(sp)
        sp.add_argument("--z", default=None, help="first anchor point")
        sp.add_argument("--w", default=None, help="second anchor point")
        sp.add_argument("--r", default="1/2", help="separation radius p/q")
        sp.add_argument("--nmax", type=int, default=6)
        if uv:
            sp.add_argument("--u", required=True, help="bit string")
            sp.add_argument("--v", required=True, help="bit string")

    sp = dc1sub.add_parser("gather", help="per-level separated cycles and chains")
    dc1_common(sp)
    sp = dc1sub.add_parser("schedule", help="minimal repetition counts")
    dc1_common(sp)
    sp = dc1sub.add_parser("build-xi", help="assemble the pseudo-orbit of a bit prefix")
    dc1_common(sp)
    sp.add_argument("--u", required=True, help="bit string")
    sp = dc1sub.add_parser("stats", help="closeness/separation profiles at checkpoints")
    dc1_common(sp, uv=True)
    sp.add_argument("--plot-script", action="store_true")
    sp = dc1sub.add_parser("certify", help="check both bounds at every level")
    dc1_common(sp, uv=True)
    sp = dc1sub.add_parser("factor", help="two-symbol factor and entropy bound")
    common(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--epsilon", required=True)
    sp.add_argument("--sample", default=None, help="bit string to shadow and verify")

    sp = sub.add_parser("track", help="tracking averages of a pseudo-orbit")
    common(sp)
    sp.add_argument("--po", required=True, help="pseudo-orbit file (one entry per line)")
    sp.add_argument("--horizon", type=int, required=True)

    sp = sub.add_parser("classify", help="proximal/distal/Li-Yorke evidence")
    common(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--low", default="1/256")
    sp.add_argument("--high", default="1/4")

    sp = sub.add_parser("thick", help="run-length profile of a bit file")
    sp.add_argument("--bits", required=True)
    sp.add_argument("--levels", type=int, default=64)
    sp.add_argument("--out", default=None)
    sp.add_argument("--store", default=None)
    sp.add_argument("--no-store", action="store_true")

    sp = sub.add_parser("replay", help="re-execute a stored run and diff")
    sp.add_argument("key")
    sp.add_argument("--store", default=None)

    return p


HANDLERS = {
    "discretize": cmd_discretize,
    "decompose": cmd_decompose,
    "relate": cmd_relate,
    "entropy-pairs": cmd_entropy_pairs,
    "pstar": cmd_pstar,
    ("dc1", "gather"): cmd_dc1_gather,
    ("dc1", "schedule"): cmd_dc1_schedule,
    ("dc1", "build-xi"): cmd_dc1_build_xi,
    ("dc1", "stats"): cmd_dc1_stats,
    ("dc1", "certify"): cmd_dc1_certify,
    ("dc1", "factor"): cmd_dc1_factor,
    "track": cmd_track,
    "classify": cmd_classify,
}


def _manifest_from_args(args, system_text: Optional[str]) -> Dict:
    skip = {"out", "store", "no_store", "func", "system"}
    flags = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    flags = {k: (str(v) if not isinstance(v, (int, bool, list)) else v)
             for k, v in flags.items()}
    return {"tool": "chainchaos", "version": VERSION,
            "flags": flags, "system_config": system_text}


class _ReplayFlags(argparse.Namespace):
    """Namespace that reads missing optional flags as None."""

    def __getattr__(self, name):
        return None


def _execute(args, system_text: Optional[str]):
    command = args.command
    if command == "thick":
        return cmd_thick(args)
    key = (command, args.dc1_command) if command == "dc1" else command
    handler = HANDLERS[key]
    spec = parse_system_config(system_text)
    return handler(spec, args)


def _replay(args) -> int:
    manifest, stored = store.load(args.key, root=args.store)
    ns = _ReplayFlags(**manifest["flags"])
    ns.out = None
    ns.store = args.store
    ns.no_store = True
    artifacts, _ = _execute(ns, manifest.get("system_config"))
    diff = store.diff_artifacts(stored, artifacts)
    if diff:
        print("replay diff:")
        for name, what in diff.items():
            print(f"  {name}: {what}")
        return 1
    print(f"replay of {args.key}: outputs identical ({len(artifacts)} artifacts)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return _replay(args)
        system_text = None
        if getattr(args, "system", None):
            system_text = Path(args.system).read_text()
        started = time.time()
        artifacts, summary = _execute(args, system_text)
        elapsed = time.time() - started
        if getattr(args, "out", None):
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            for name, content in artifacts.items():
                (out / name).write_text(content)
        for line in summary:
            print(line)
        if not getattr(args, "no_store", False):
            manifest = _manifest_from_args(args, system_text)
            key = store.persist(manifest, artifacts, root=getattr(args, "store", None))
            print(f"store: {key}")
        print(f"wall-clock: {elapsed:.3f}s")
        return 0
    except ChainChaosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
