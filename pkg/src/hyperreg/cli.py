"""Command-line entry point: ``hyperreg <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .complex import Complex, UniformHypergraph
from .counting import count_copies, count_copies_naive, count_extensions, expected_copies, extension_statistics
from .density import DensityVector, certify_regularity
from .embedder import assign_classes, find_embedding
from .errors import CapacityError, StructuralError, ValidationError
from .experiments import KINDS, ExperimentConfig, fmt, run_experiment
from .random_models import SliceSpec, generate_partition_family, generate_regular_complex, slice_level
from .ramsey import PipelineConfig, color_complete, ramsey_oracle, ramsey_pipeline


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def _edges(text: str) -> list[tuple[int, ...]]:
    """``"0,1,2;3,4,5"`` -> ``[(0, 1, 2), (3, 4, 5)]``."""
    return [_ints(part) for part in text.split(";") if part.strip()]


def _load_complex(path: str) -> Complex:
    return Complex.from_json(Path(path).read_text())


def _pattern(text: str, host: Complex) -> Complex:
    """A complex from a JSON file, or inline edges like ``"0,1,2;2,3,4"``.

    Inline patterns are made partite with the host's number of classes.
    """
    if Path(text).is_file():
        return _load_complex(text)
    edges = _edges(text)
    return assign_classes(UniformHypergraph(len(edges[0]), edges), host.num_classes).to_complex(
        UniformHypergraph(len(edges[0]), edges))


def _emit(args, payload, text: str | None = None) -> None:
    body = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if args.out:
        Path(args.out).write_text(body + "\n")
        if text:
            print(text)
        print(f"wrote {args.out}")
    else:
        if text:
            print(text)
        print(body)


def cmd_gen(args) -> int:
    d = DensityVector(_floats(args.densities))
    g = generate_regular_complex(args.classes, args.n, d, args.seed)
    _emit(args, g.to_dict(), f"generated {g!r}")
    return 0


def cmd_slice(args) -> int:
    g = _load_complex(args.host)
    parts = slice_level(g, args.level, SliceSpec(_floats(args.p), seed=args.seed))
    total = max(1, len(g.edges[args.level]))
    payload = {"level": args.level, "parts": [sorted(map(list, p)) for p in parts],
               "densities": [fmt(len(p) / total) for p in parts]}
    _emit(args, payload, "part sizes: " + " ".join(str(len(p)) for p in parts))
    return 0


def cmd_family(args) -> int:
    fam = generate_partition_family(args.vertices, _ints(args.a), args.seed,
                                    discard_remainder=args.discard)
    _emit(args, fam.to_dict(), json.dumps(fam.equitability(), sort_keys=True, default=str))
    return 0


def cmd_count(args) -> int:
    g = _load_complex(args.host)
    h = _pattern(args.pattern, g)
    exact = count_copies(h, g)
    payload = {"exact": str(exact)}
    if args.naive or args.verify:
        naive = count_copies_naive(h, g)
        payload["naive"] = str(naive)
        if naive != exact:
            print("naive count disagrees", file=sys.stderr)
            _emit(args, payload)
            return 1
    if args.densities:
        pred = expected_copies(h, max(g.vertex_classes.sizes), DensityVector(_floats(args.densities)))
        payload.update({"predicted": fmt(pred), "rel_err": fmt(abs(exact - pred) / pred)})
    _emit(args, payload)
    return 0


def cmd_extend(args) -> int:
    g = _load_complex(args.host)
    h, hp = _pattern(args.base, g), _pattern(args.extension, g)
    copy = {int(x): int(y) for x, y in json.loads(args.copy).items()}
    n = count_extensions(h, hp, copy, g, truncated=args.truncated)
    _emit(args, {"extensions": str(n)})
    return 0


def cmd_stats(args) -> int:
    g = _load_complex(args.host)
    h, hp = _pattern(args.base, g), _pattern(args.extension, g)
    st = extension_statistics(h, hp, g, args.epsilon, DensityVector(_floats(args.densities)),
                              truncated=args.truncated)
    d = st.to_dict()
    _emit(args, {k: fmt(v) if isinstance(v, float) else v for k, v in d.items()})
    return 0


def cmd_certify(args) -> int:
    g = _load_complex(args.host)
    rep = certify_regularity(g, args.level, args.d, args.delta, r=args.r, mode=args.mode,
                             samples=args.samples, seed=args.seed)
    _emit(args, rep.to_dict(), rep.verdict())
    return 0 if rep.passed else 1


def cmd_embed(args) -> int:
    g = _load_complex(args.host)
    h = _pattern(args.pattern, g)
    res = find_embedding(h, g, budget=args.budget, verify=args.verify)
    _emit(args, res.to_dict(), f"status={res.status} nodes={res.nodes}")
    return 0 if res.found else 1


def cmd_ramsey(args) -> int:
    edges = _edges(args.pattern)
    h = UniformHypergraph(len(edges[0]), edges)
    if args.action == "oracle":
        res = ramsey_oracle(h, args.m_max, budget=args.budget)
        line = (f"R(h) = {res.value}" if res.exact else f"R(h) >= {res.lower_bound} (bound)")
        _emit(args, res.to_dict(), line)
        return 0
    c = color_complete(args.m, h.k, source=args.colouring, seed=args.seed, p=args.p)
    cfg = PipelineConfig(delta_k=args.delta_k, r=args.r, samples=args.samples, seed=args.seed,
                         budget=args.budget, ell=args.ell, verify=args.verify)
    if args.a:
        cfg.a = _ints(args.a)
    res = ramsey_pipeline(h, c, cfg)
    line = (f"monochromatic {res.colour} copy found" if res.success
            else f"failed at stage: {res.failed_stage}")
    _emit(args, res.to_dict(), line)
    return 0 if res.success else 1


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.seeds:
        cfg.seeds = _ints(args.seeds)
    if args.threads:
        cfg.threads = args.threads
    rep = run_experiment(cfg, args.kind, args.out or cfg.out)
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status} {args.kind}: {json.dumps(rep.summary(cfg)['aggregate'], sort_keys=True)}")
    for msg in rep.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    print(f"wrote {rep.csv_path} and {rep.json_path}")
    return 0 if rep.passed else 1


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # subcommands repeat the flags without defaults so values given earlier survive
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", default=dflt(None), help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=dflt(0))
    parser.add_argument("--out", default=dflt(None), help="output file (directory for `run`)")
    parser.add_argument("--threads", type=int, default=dflt(0))
    parser.add_argument("--verify", action="store_true", default=dflt(False),
                        help="run independent re-checks")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    p = argparse.ArgumentParser(prog="hyperreg", description="Hypergraph regularity and Ramsey toolkit")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="random regular complex")
    s.add_argument("--classes", type=int, default=3)
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--densities", default="0.5,0.5", help="d_2,...,d_k")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("slice", parents=[common], help="slice one level of a complex")
    s.add_argument("--host", required=True)
    s.add_argument("--level", type=int, default=2)
    s.add_argument("--p", default="0.5,0.5")
    s.set_defaults(func=cmd_slice)

    s = sub.add_parser("family", parents=[common], help="family of partitions")
    s.add_argument("--vertices", type=int, required=True)
    s.add_argument("--a", required=True, help="a_1,...,a_{k-1}")
    s.add_argument("--discard", action="store_true", help="drop remainder vertices")
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("count", parents=[common], help="count partition-respecting copies")
    s.add_argument("--pattern", required=True, help="complex JSON or inline edges '0,1,2;...'")
    s.add_argument("--host", required=True)
    s.add_argument("--naive", action="store_true")
    s.add_argument("--densities", help="report the random-model prediction too")
    s.set_defaults(func=cmd_count)

    for name, fn, help_ in (("extend", cmd_extend, "extensions of one copy"),
                            ("stats", cmd_stats, "extension statistics over all copies")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--base", required=True)
        s.add_argument("--extension", required=True)
        s.add_argument("--host", required=True)
        s.add_argument("--truncated", action="store_true")
        if name == "extend":
            s.add_argument("--copy", required=True, help='JSON map, e.g. \'{"0": 5, "1": 47}\'')
        else:
            s.add_argument("--epsilon", type=float, default=0.25)
            s.add_argument("--densities", default="0.5,0.5")
        s.set_defaults(func=fn)

    s = sub.add_parser("certify", parents=[common], help="(d, delta, r)-regularity report")
    s.add_argument("--host", required=True)
    s.add_argument("--level", type=int, default=3)
    s.add_argument("--d", type=float, required=True)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--mode", choices=("sampled", "exhaustive"), default="sampled")
    s.add_argument("--samples", type=int, default=200)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("embed", parents=[common], help="search for one copy")
    s.add_argument("--pattern", required=True)
    s.add_argument("--host", required=True)
    s.add_argument("--budget", type=int, default=10**6)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("ramsey", parents=[common], help="Ramsey pipeline or exact oracle")
    s.add_argument("action", choices=("pipeline", "oracle"))
    s.add_argument("--pattern", required=True, help="edges '0,1,2;3,4,5'")
    s.add_argument("--m", type=int, default=40)
    s.add_argument("--m-max", type=int, default=8)
    s.add_argument("--colouring", default="random",
                   choices=("random", "all-red", "all-blue", "parity"))
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--a", help="a_1,...,a_{k-1}")
    s.add_argument("--delta-k", type=float, default=0.2)
    s.add_argument("--r", type=int, default=16)
    s.add_argument("--samples", type=int, default=64)
    s.add_argument("--ell", type=int)
    s.add_argument("--budget", type=int, default=10**6)
    s.set_defaults(func=cmd_ramsey)

    s = sub.add_parser("run", parents=[common], help="run an experiment battery")
    s.add_argument("kind", choices=KINDS)
    s.add_argument("--seeds", help="comma-separated seed list")
    s.set_defaults(func=cmd_run)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, StructuralError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
