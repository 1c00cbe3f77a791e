"""Command line interface: h3nr <subcommand> GROUP [options].

Exit codes: 0 success, 1 the theory refuses the computation (H4_n of a
2-group), 2 bad input.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import catalog
from . import resolutions as res
from .cohomology import CohomologyData
from .negligible import RefusedError, h4n, h4p
from .unramified import bogomolov_multiplier, choose_hi_pairs, h4nr

EXIT_OK, EXIT_REFUSED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _entry(name):
    try:
        e = catalog.entry(name)
        return e, e.load()
    except (KeyError, ValueError, OSError) as exc:
        raise InputError(str(exc)) from exc


def _config(args):
    return catalog.PipelineConfig(
        strategy=args.strategy, length=args.length, subgroup_filter=args.subgroup_filter,
        h1_trivial=args.h1_trivial, exhaustive_cosets=args.exhaustive_cosets,
        cache_dir=args.cache_dir)


def _load(args):
    e, G = _entry(args.group)
    cache = catalog.cache_for(_config(args))
    RG = cache.get(G, args.length, args.strategy)
    return e, G, RG, cache


def _emit(args, payload):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for k, v in payload.items():
            print(f"{k}\t{catalog.format_invariants(v) if isinstance(v, list) or v is None else v}")


def cmd_cohomology(args):
    e, G, RG, _ = _load(args)
    out = {"group": e.name, "dims": list(RG.dims)}
    for n in range(1, RG.length):
        out[f"H{n}"] = CohomologyData(RG, n).torsion_coefficients
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        print(f"group\t{e.name}\ndims\t{' '.join(map(str, RG.dims))}")
        for n in range(1, RG.length):
            print(f"H{n}\t{catalog.format_invariants(out[f'H{n}'])}")


def cmd_h4p(args):
    e, G, RG, _ = _load(args)
    P = h4p(RG, h1_trivial=args.h1_trivial)
    _emit(args, {"group": e.name, "H4": P.torsion, "H4_p": P.invariants()})


def _nr(args, G, RG, cache, P=None):
    pairs = choose_hi_pairs(G, args.subgroup_filter, cache=cache)
    mode = "exhaustive" if args.exhaustive_cosets else "kernel"
    return h4nr(RG, P=P, pairs=pairs, mode=mode)


def cmd_h4nr(args):
    e, G, RG, cache = _load(args)
    NR = _nr(args, G, RG, cache)
    _emit(args, {"group": e.name, "H4": NR.torsion, "H4_nr": NR.invariants()})


def cmd_h3nr(args):
    e, G, RG, cache = _load(args)
    N = h4n(RG, cache=cache)
    NR = _nr(args, G, RG, cache, P=N)
    _emit(args, {"group": e.name, "H3_nr": NR.quotient_invariants(N)})


def cmd_stable(args):
    e, G, RG, cache = _load(args)
    N = h4n(RG, cache=cache)
    _emit(args, {"group": e.name, "H4_n": N.invariants(), "H3_s": N.quotient_invariants()})


def cmd_b0(args):
    e, G, RG, _ = _load(args)
    _emit(args, {"group": e.name, "B0": bogomolov_multiplier(G, RG)})


def _run_one(name_and_config):
    name, config = name_and_config
    return catalog.run_pipeline(catalog.entry(name), config)


def cmd_table(args):
    names = args.group.split(",") if args.group not in ("all",) else list(catalog.load_catalog())
    if len(names) == 1 and names[0].startswith("Phi"):
        names = [e.name for e in catalog.family(names[0])]
    for n in names:
        _entry(n)
    config = _config(args)
    jobs = [(n, config) for n in names]
    if args.threads > 1:
        with ProcessPoolExecutor(args.threads) as ex:
            records = list(ex.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    for r in records:
        if not r.containment_chain_holds():
            raise RuntimeError(f"containment chain violated for {r.group}")
    sys.stdout.write(catalog.emit_table(records, args.format))


def cmd_verify(args):
    e, G, RG, _ = _load(args)
    ok_d2 = RG.check_d_squared()
    ok_h = RG.check_homotopy(RG.length - 1)
    print(f"group\t{e.name}\ndims\t{' '.join(map(str, RG.dims))}\nd^2=0\t{ok_d2}\nhomotopy\t{ok_h}")
    return EXIT_OK if ok_d2 and ok_h else EXIT_REFUSED


def cmd_selftest(args):
    from . import oracle
    ok = oracle.selftest(verbose=True)
    return EXIT_OK if ok else EXIT_REFUSED


COMMANDS = {
    "cohomology": cmd_cohomology, "h4p": cmd_h4p, "h4nr": cmd_h4nr, "h3nr": cmd_h3nr,
    "b0": cmd_b0, "stable": cmd_stable, "table": cmd_table, "verify": cmd_verify,
    "selftest": cmd_selftest,
}


def build_parser():
    p = argparse.ArgumentParser(prog="h3nr", description="Unramified cohomology of finite groups.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        if name != "selftest":
            s.add_argument("group", help="catalog name (e.g. G_243_56), a presentation file, "
                           "or for table a comma list / family tag / all")
        s.add_argument("--strategy", choices=["norm", "abelian", "normal-series", "derived-series", "generic"])
        s.add_argument("--length", type=int, default=res.DEFAULT_LENGTH)
        s.add_argument("--threads", type=int, default=1)
        s.add_argument("--subgroup-filter", action=argparse.BooleanOptionalAction, default=True)
        s.add_argument("--h1-trivial", action="store_true")
        s.add_argument("--exhaustive-cosets", action=argparse.BooleanOptionalAction, default=True)
        s.add_argument("--cache-dir")
        s.add_argument("--json", action="store_true")
        if name == "table":
            s.add_argument("--format", choices=["tsv", "json", "markdown"], default="tsv")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        if args.length < 5:
            raise InputError("length must be at least 5 for H^4 computations")
        code = COMMANDS[args.command](args)
    except RefusedError as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
