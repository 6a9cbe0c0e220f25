"""Command-line interface: ``sukp generate|solve|oracle|bench|stats``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys

import numpy as np

from sukp import bench, stats
from sukp.dtlbo import DtlboParams, derive_seed, run
from sukp.instance import (
    InstanceFormatError,
    generate_instance,
    instance_name,
    read_instance,
    write_instance,
)
from sukp.oracle import InstanceTooLarge, exact_branch_bound, exact_bruteforce
from sukp.repair import Repairer

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bits(v) -> str:
    return "".join("1" if b else "0" for b in v)


def _seed_or_new(seed, out):
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed} (generated)", file=out)
    return seed


def _load(path):
    try:
        return read_instance(path)
    except OSError as exc:
        raise DataError(f"cannot read instance {path}: {exc.strerror}") from None
    except InstanceFormatError as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_generate(args, out):
    seed = _seed_or_new(args.seed, out)
    try:
        inst = generate_instance(args.items, args.elements, args.density, args.ratio, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    path = args.out or instance_name(args.items, args.elements, args.density, args.ratio) + ".sukp"
    write_instance(inst, path)
    print(f"wrote {path}", file=out)


def cmd_solve(args, out):
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    inst = _load(args.instance)
    master = _seed_or_new(args.seed, out)
    repair_kind = args.repair or ("esro" if args.mode == "element" else "isro")
    try:
        repair = Repairer(inst, repair_kind)
        base = DtlboParams(popsize=args.popsize, mfc=args.mfc, mode=args.mode, repair=repair_kind,
                           eos=not args.no_eos, sf=not args.no_sf).resolved(inst)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    lines = [
        f"instance: {inst.name or os.path.basename(args.instance)}",
        f"mode: {args.mode} repair: {repair_kind} popsize: {base.popsize} mfc: {base.mfc} "
        f"master_seed: {master}",
    ]
    results = []
    for r in range(args.runs):
        seed = derive_seed(master, 0, 0, r)
        res = run(inst, DtlboParams(**{**base.__dict__, "seed": seed}), repair)
        results.append(res)
        lines.append(f"run {r} seed {seed} fitness {bench.fmt(res.fitness)} "
                     f"evaluations {res.evaluations_used}")
        lines.append(f"run {r} solution {_bits(res.best.y)}")
    fits = np.array([res.fitness for res in results])
    lines.append(f"summary best {bench.fmt(fits.max())} worst {bench.fmt(fits.min())} "
                 f"mean {bench.fmt(fits.mean())} std {bench.fmt(fits.std())}")
    text = "\n".join(lines) + "\n"
    out.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.history:
        with open(args.history, "w", encoding="utf-8") as fh:
            fh.write("run,evaluation,best_fitness\n")
            for r, res in enumerate(results):
                for t, f in res.history:
                    fh.write(f"{r},{t},{bench.fmt(f)}\n")


def cmd_oracle(args, out):
    inst = _load(args.instance)
    solver = exact_bruteforce if args.method == "brute" else exact_branch_bound
    try:
        res = solver(inst)
    except InstanceTooLarge as exc:
        raise DataError(f"refusing: {exc}") from None
    print(f"optimum {bench.fmt(res.optimum)}", file=out)
    print(f"witness {_bits(res.witness)}", file=out)
    print(f"explored {res.explored}", file=out)


def _print_ranks(table, out):
    diffs, sig = table.differences(), table.significant()
    print(f"{'algorithm':<12} {'avg_rank':>9} {'diff':>7}  significant", file=out)
    for a, r in zip(table.algorithms, table.avg_ranks):
        d = diffs.get(a)
        print(f"{a:<12} {r:9.3f} {'' if d is None else f'{d:7.3f}':>7}  "
              f"{'' if d is None else bench.fmt(sig[a])}", file=out)
    print(f"friedman {table.friedman_statistic:.4f} p-value {table.p_value:.3g} "
          f"nemenyi_cd {table.nemenyi_cd:.3f} (alpha {table.alpha})", file=out)


def _ranks_from_means(path, alpha):
    try:
        if path is None:
            instances, algorithms, x = stats.paper_means()
        else:
            instances, algorithms, x = stats.read_means_csv(path)
        return stats.friedman_ranks(x, algorithms, alpha)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_bench(args, out):
    if args.from_means is not None:
        table = _ranks_from_means(None if args.from_means == "paper" else args.from_means, args.alpha)
        _print_ranks(table, out)
        if args.out:
            bench.emit([], table, args.format, args.out)
        return

    if args.config:
        try:
            config = bench.load_config(args.config)
        except OSError as exc:
            raise DataError(f"cannot read config {args.config}: {exc.strerror}") from None
        except bench.ConfigError as exc:
            raise DataError(str(exc)) from None
    else:
        if not args.instance or not args.algorithm:
            raise UsageError("bench needs --config, --from-means, or --instance and --algorithm")
        config = bench.ExperimentConfig(
            instances=args.instance, algorithms=args.algorithm, runs=args.runs,
            master_seed=args.seed if args.seed is not None else 0, popsize=args.popsize,
            mfc=args.mfc, output=args.out, format=args.format, jobs=args.jobs,
        )
        if args.seed is None:
            config.master_seed = _seed_or_new(None, out)
        try:
            config.validate()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.jobs != 1:
        config.jobs = args.jobs
    try:
        rows = bench.run_experiment(config)
    except (OSError, InstanceFormatError, ValueError) as exc:
        raise DataError(str(exc)) from None
    print("instance,algorithm,best,worst,mean,std", file=out)
    for r in rows:
        print(",".join([r.instance, r.algorithm] + [bench.fmt(v) for v in (r.best, r.worst, r.mean, r.std)]),
              file=out)
    table = bench.rank_rows(rows, args.alpha)
    if table is not None:
        _print_ranks(table, out)
    target = config.output
    if target:
        for p in bench.emit(rows, table, config.format, target):
            print(f"wrote {p}", file=out)


def cmd_stats(args, out):
    if args.runs_csv:
        try:
            rows = bench.read_runs_csv(args.runs_csv)
        except OSError as exc:
            raise DataError(f"cannot read {args.runs_csv}: {exc.strerror}") from None
        except (KeyError, ValueError) as exc:
            raise DataError(f"{args.runs_csv}: malformed runs file ({exc})") from None
        table = bench.rank_rows(rows, args.alpha)
        if table is None:
            raise DataError("ranking needs at least 2 algorithms and 2 instances")
    else:
        table = _ranks_from_means(args.means, args.alpha)
    _print_ranks(table, out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sukp", description="Set-union knapsack solver toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--items", type=int, required=True)
    g.add_argument("--elements", type=int, required=True)
    g.add_argument("--density", type=float, required=True)
    g.add_argument("--ratio", type=float, required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run DTLBO on an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--mode", choices=["item", "element"], default="item")
    s.add_argument("--repair", choices=list(Repairer.KINDS))
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.add_argument("--popsize", type=int, default=20)
    s.add_argument("--mfc", type=int, help="evaluation budget (default 20 + 20*max(m, n))")
    s.add_argument("--no-eos", action="store_true", help="disable elite opposite search")
    s.add_argument("--no-sf", action="store_true", help="disable survival of the fittest")
    s.add_argument("--out", help="also write the report to this file")
    s.add_argument("--history", help="write the best-so-far history CSV here")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="solve a small instance exactly")
    o.add_argument("--instance", required=True)
    o.add_argument("--method", choices=["brute", "bb"], default="bb")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="multi-run experiment with statistics")
    b.add_argument("--config")
    b.add_argument("--from-means", metavar="CSV",
                   help="rank a means table instead of running ('paper' for the shipped fixture)")
    b.add_argument("--instance", action="append", help="instance path or gen:m:n:density:ratio:seed")
    b.add_argument("--algorithm", action="append", help=f"one of {', '.join(bench.ALGORITHMS)}")
    b.add_argument("--runs", type=int, default=50)
    b.add_argument("--seed", type=int)
    b.add_argument("--popsize", type=int, default=20)
    b.add_argument("--mfc", type=int)
    b.add_argument("--out", help="output directory")
    b.add_argument("--format", choices=list(bench.FORMATS), default="csv")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--alpha", type=float, default=0.05, choices=[0.05, 0.10])
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("stats", help="Friedman ranks and Nemenyi CD for a results table")
    src = t.add_mutually_exclusive_group()
    src.add_argument("--means", help="instance x algorithm means CSV (default: shipped fixture)")
    src.add_argument("--runs-csv", help="runs.csv emitted by bench")
    t.add_argument("--alpha", type=float, default=0.05, choices=[0.05, 0.10])
    t.set_defaults(func=cmd_stats)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"sukp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"sukp: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
