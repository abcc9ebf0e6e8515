"""Command-line interface.

Exit codes: 0 success, 1 malformed input, 2 refusal (a well-formed request
the library provably cannot or will not satisfy).
"""

from __future__ import annotations

import argparse
import sys

from . import complex2, contraction, generators, placement, rigidity


class _CliFailure(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise _CliFailure(f"cannot read {path}: {exc}", 1)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_gen(args) -> int:
    kind = args.kind
    if kind == "primitive":
        c = generators.primitive(args.name)
    elif kind == "stacked":
        c = generators.stacked_sphere(args.n, seed=args.seed)
    elif kind == "random-sphere":
        c = generators.random_sphere(args.n, seed=args.seed,
                                     max_new_degree=args.max_new_degree)
    elif kind == "genus":
        c = generators.genus_surface(args.genus, orientable=not args.non_orientable,
                                     n=args.n, seed=args.seed)
    elif kind == "laman-cx":
        vs, es = generators.random_laman(args.n, seed=args.seed)
        inst = generators.laman_counterexample(vs, es, dim=args.dim, seed=args.seed)
        _emit(rigidity.format_graph(inst.aug_vertices, inst.aug_edges), args.out)
        return 0
    elif kind == "mincycle-cx":
        mu = generators.primitive("tetrahedron")
        inst = generators.minimal_cycle_counterexample(mu, rounds=args.rounds)
        _emit(complex2.format_triangulation(inst.result), args.out)
        return 0
    elif kind == "locations":
        ls = placement.generate_locations(args.n, d=3, seed=args.seed)
        _emit(placement.format_locations(ls), args.out)
        return 0
    else:  # pragma: no cover - argparse restricts choices
        raise _CliFailure(f"unknown generator {kind!r}", 1)
    _emit(complex2.format_triangulation(c), args.out)
    return 0


def _cmd_reduce(args) -> int:
    c = complex2.parse_triangulation(_read(args.triangulation))
    sched = contraction.reduction_schedule(c, max_degree=args.max_degree,
                                           floor_size=args.floor)
    _emit(contraction.format_schedule(sched), args.out)
    print(f"steps: {len(sched.steps)}", file=sys.stderr)
    print(f"base_vertices: {sched.base.n_vertices}", file=sys.stderr)
    return 0


def _cmd_place(args) -> int:
    c = complex2.parse_triangulation(_read(args.triangulation))
    if args.locations:
        ls = placement.parse_locations(_read(args.locations))
    else:
        ls = placement.generate_locations(args.c, d=3, seed=args.seed)
    result = placement.place(c, ls, strategy=args.strategy, seed=args.seed)
    _emit(placement.format_placement(result), args.out)
    cert = result.certificate
    used = len(set(result.assignment.values()))
    print(f"rigid: true", file=sys.stderr)
    print(f"rank: {cert.rank}/{cert.required_rank}", file=sys.stderr)
    print(f"condition: {cert.condition_mode or 'none'} "
          f"{'ok' if cert.condition_ok else 'violated'}", file=sys.stderr)
    print(f"locations_used: {used} of {ls.size}", file=sys.stderr)
    print(f"max_failures: {result.max_failures}", file=sys.stderr)
    return 0


def _framework_from_args(args) -> rigidity.Framework:
    verts, edges = rigidity.parse_graph(_read(args.graph))
    coords = rigidity.parse_placement_file(_read(args.coords), args.dim)
    return rigidity.Framework.build(verts, edges, args.dim, coords)


def _cmd_check(args) -> int:
    fw = _framework_from_args(args)
    res = rigidity.is_infinitesimally_rigid(fw, seed=args.seed)
    print(f"rigid: {'true' if res.rigid else 'false'}")
    if res.certificate is not None:
        print(f"rank: {res.certificate.rank_lower_bound}/{fw.required_rank()}")
        print(f"method: {res.certificate.method}")
    if res.degenerate_span:
        print("degenerate_span: true")
    if res.witness is not None:
        print(f"witness_pair: {res.witness.violated_pair[0]} "
              f"{res.witness.violated_pair[1]}")
    return 0


def _cmd_witness(args) -> int:
    fw = _framework_from_args(args)
    w = rigidity.motion_witness(fw)
    if w is None:
        print("witness: none")
        return 0
    print(f"witness_pair: {w.violated_pair[0]} {w.violated_pair[1]}")
    for v in fw.vertices:
        vel = " ".join(str(x) for x in w.velocities[v])
        print(f"{v} {vel}")
    return 0


def _cmd_verify(args) -> int:
    c = complex2.parse_triangulation(_read(args.triangulation))
    ls = placement.parse_locations(_read(args.locations))
    assignment = placement.parse_assignment(_read(args.placement))
    mode = None if args.mode == "none" else args.mode
    out = placement.certify_placement(c, ls, assignment, mode=mode, seed=args.seed)
    print(f"rigid: {'true' if out['rigid'] else 'false'}")
    print(f"rank: {out['rank'] if out['rank'] is not None else '<deficient>'}"
          f"/{out['required_rank']}")
    print(f"condition: {mode or 'none'} "
          f"{'ok' if out['condition_ok'] else 'violated'}")
    if not (out["rigid"] and out["condition_ok"]):
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fewloc")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate triangulations, graphs, locations")
    g.add_argument("kind", choices=["primitive", "stacked", "random-sphere",
                                    "genus", "laman-cx", "mincycle-cx",
                                    "locations"])
    g.add_argument("--name", default="tetrahedron")
    g.add_argument("--n", type=int, default=12)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--genus", type=int, default=1)
    g.add_argument("--non-orientable", action="store_true")
    g.add_argument("--max-new-degree", type=int, default=None)
    g.add_argument("--dim", type=int, default=3, choices=[2, 3])
    g.add_argument("--rounds", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(func=_cmd_gen)

    r = sub.add_parser("reduce", help="greedy contraction schedule")
    r.add_argument("triangulation")
    r.add_argument("--max-degree", type=int, default=5)
    r.add_argument("--floor", type=int, default=4)
    r.add_argument("--out")
    r.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("place", help="few-locations placement with certificate")
    p.add_argument("triangulation")
    p.add_argument("--strategy", required=True,
                   choices=["sphere76", "surface", "stacked", "q10"])
    p.add_argument("--locations")
    p.add_argument("--c", type=int, default=76)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_place)

    c = sub.add_parser("check", help="decide infinitesimal rigidity")
    c.add_argument("--graph", required=True)
    c.add_argument("--coords", required=True)
    c.add_argument("--dim", type=int, default=3, choices=[2, 3])
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=_cmd_check)

    w = sub.add_parser("witness", help="exact nontrivial motion, if any")
    w.add_argument("--graph", required=True)
    w.add_argument("--coords", required=True)
    w.add_argument("--dim", type=int, default=3, choices=[2, 3])
    w.set_defaults(func=_cmd_witness)

    v = sub.add_parser("verify", help="independent placement re-certification")
    v.add_argument("triangulation")
    v.add_argument("--locations", required=True)
    v.add_argument("--placement", required=True)
    v.add_argument("--mode", default="C", choices=["C", "C'", 'C"', "none"])
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=_cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except _CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (complex2.ComplexError, rigidity.FrameworkError, ValueError) as exc:
        # domain refusals carry their own exception types
        from .contraction import ContractionError
        from .generators import GeneratorError
        from .placement import PlacementError

        if isinstance(exc, (ContractionError, GeneratorError, PlacementError)):
            print(f"refused: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
