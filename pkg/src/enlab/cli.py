"""Deterministic command-line front end.

Exit codes: 0 all hard checks passed, 1 a hard check failed (the report
points at the first failure), 2 usage error.  Reports are JSON, tabular
Monte Carlo output is CSV.  ENLAB_THREADS caps worker threads; results
are independent of its value.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .brownian_demo import brownian_demo
from .errors import EnlabError
from .harness import run_crosscheck, run_identity_suite
from .model_io import dump_model, load_model
from .nupbr import nupbr_check, theorem2_crosscheck, verify_witness
from .poisson_mc import (
    PoissonModel,
    example1_run,
    example2_run,
    ruin_mc,
    thread_count,
)
from .random_times import analyze, enlarge, generate_honest_model
from .ruin import RuinOracle
from .finite_prob import AdaptedProcess


def _seed_range(text: str) -> range:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    return range(1, int(text) + 1)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _write_json(path, payload) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))


def _summary(status: int, line: str) -> int:
    print(("PASS " if status == 0 else "FAIL ") + line)
    return status


def cmd_gen(args) -> int:
    space, tau, asset = generate_honest_model(args.seed, args.depth,
                                              args.branching)
    dump_model(space, tau, asset, args.out)
    return _summary(0, f"gen seed={args.seed} outcomes={len(space.outcomes)} "
                       f"-> {args.out}")


def cmd_verify(args) -> int:
    suite = run_identity_suite(_seed_range(args.models_seed_range),
                               args.depth, args.branching,
                               threads=thread_count(args.threads))
    _write_json(args.out, suite.to_json())
    status = 0 if suite.ok else 1
    return _summary(status, f"verify models={suite.n_models} "
                            f"violations={suite.n_violations} "
                            f"elapsed={suite.elapsed:.1f}s")


def cmd_nupbr(args) -> int:
    space, tau, asset = load_model(args.model)
    analysis = analyze(space, tau)
    enlarged = enlarge(space, analysis)
    after = AdaptedProcess(
        {o: [asset.at(o, t) - asset.at(o, min(t, tau[o]))
             for t in range(space.horizon + 1)]
         for o in space.outcomes}, "G")
    base = nupbr_check(asset, space)
    after_verdict = nupbr_check(after, space, enlarged)
    sound = (verify_witness(base, asset, space)
             and verify_witness(after_verdict, after, space, enlarged))
    payload = {"model": str(args.model),
               "honest": analysis.honest, "class_h": analysis.class_h,
               "base": base.to_json(), "after": after_verdict.to_json(),
               "witnesses_verified": sound}
    _write_json(args.out, payload)
    print(json.dumps(payload["base"]))
    print(json.dumps(payload["after"]))
    return _summary(0 if sound else 1,
                    f"nupbr base={base.satisfied} after={after_verdict.satisfied}")


def cmd_crosscheck(args) -> int:
    suite = run_crosscheck(_seed_range(args.seeds), args.depth,
                           args.branching, fixtures_dir=args.fixtures_dir,
                           threads=thread_count(args.threads))
    if args.csv:
        Path(args.csv).write_text("\n".join(suite.csv_lines()) + "\n")
    status = 0 if suite.n_witness_failures == 0 else 1
    return _summary(status, f"crosscheck seeds={len(suite.rows)} "
                            f"disagreements={suite.n_disagreements} "
                            f"witness_failures={suite.n_witness_failures} "
                            f"elapsed={suite.elapsed:.1f}s")


def cmd_example1(args) -> int:
    model = PoissonModel(mu=args.mu, a=args.a)
    report = example1_run(model, args.paths, args.seed,
                          threads=thread_count(args.threads))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("path_id,terminal_wealth,min_wealth\n")
            for pid, w, lo in report.rows():
                fh.write(f"{pid},{w!r},{lo!r}\n")
    status = 0 if (report.monotone_ok and report.positive_at_99) else 1
    lam = {str(k): v for k, v in report.lambda_table.items()}
    return _summary(status, f"example1 mean={report.mean_terminal:.5f} "
                            f"se={report.se_terminal:.5f} "
                            f"frac_positive={report.frac_strictly_positive:.4f} "
                            f"censored={report.n_censored} lambda={lam}")


def cmd_example2(args) -> int:
    model = PoissonModel(mu=args.mu, a=args.a)
    report = example2_run(model, args.paths, args.seed,
                          checkpoints=args.checkpoints,
                          threads=thread_count(args.threads))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("checkpoint,quantity,mean,se,flag\n")
            for s in report.deflator:
                fh.write(f"{s.checkpoint},deflator,{s.mean!r},{s.se!r},"
                         f"{int(s.ok)}\n")
            for s in report.product:
                fh.write(f"{s.checkpoint},product,{s.mean!r},{s.se!r},"
                         f"{int(s.ok)}\n")
    status = 0 if (report.positivity_ok and report.martingale_ok) else 1
    return _summary(status, f"example2 positivity={report.positivity_ok} "
                            f"martingale={report.martingale_ok} "
                            f"min_deflator={report.min_deflator:.5f} "
                            f"censored={report.n_censored}")


def cmd_psi(args) -> int:
    oracle = RuinOracle(args.mu)
    us = np.asarray(args.u)
    pk = oracle.psi_many(us)
    freq, se = ruin_mc(args.mu, us, args.mc_paths, args.seed,
                       threads=thread_count(args.threads))
    ok = bool(np.all(np.abs(pk - freq) <= 3 * se + 1e-12))
    lines = ["u,psi_pk,psi_mc,se"]
    for u, p, f, s in zip(us, pk, freq, se):
        print(f"psi({u}) = {p:.10f}   mc = {f:.6f} +- {s:.6f}")
        lines.append(f"{float(u)!r},{float(p)!r},{float(f)!r},{float(s)!r}")
    if args.csv:
        Path(args.csv).write_text("\n".join(lines) + "\n")
    return _summary(0 if ok else 1,
                    f"psi mu={args.mu} max|pk-mc|/se="
                    f"{float(np.max(np.abs(pk - freq) / np.maximum(se, 1e-300))):.2f}")


def cmd_brownian(args) -> int:
    report = brownian_demo(args.epsilon, args.dt, args.paths, args.seed,
                           time_cap=args.time_cap)
    payload = {"eps": report.eps, "dt": report.dt, "paths": report.n_paths,
               "censored": report.n_censored,
               "structural_ok": report.structural_ok,
               "mean_last_return": report.mean_last_return,
               "inner_mean": float(report.inner_estimates.mean()),
               "lattice_survival": report.lattice_survival,
               "frac_near_one": report.frac_near_one,
               "class_h_plausible": report.class_h_plausible}
    _write_json(args.out, payload)
    status = 0 if report.structural_ok else 1
    return _summary(status, f"brownian structural={report.structural_ok} "
                            f"censored={report.n_censored}/{report.n_paths} "
                            f"inner_mean={payload['inner_mean']:.4f} "
                            f"(lattice {report.lattice_survival:.4f})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enlab",
        description="exact no-arbitrage verification after random times")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--threads", type=int, default=None)
        return p

    p = add("gen", cmd_gen, help="generate a model file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--branching", type=int, default=3)
    p.add_argument("--out", required=True)

    p = add("verify", cmd_verify, help="run the exact identity suite")
    p.add_argument("--models-seed-range", default="1..500")
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--branching", type=int, default=3)
    p.add_argument("--out")

    p = add("nupbr", cmd_nupbr, help="verdicts for a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--out")

    p = add("crosscheck", cmd_crosscheck, help="three-way theorem harness")
    p.add_argument("--seeds", default="1..1000")
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--branching", type=int, default=3)
    p.add_argument("--csv")
    p.add_argument("--fixtures-dir")

    p = add("example1", cmd_example1, help="after-time arbitrage strategy run")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--csv")

    p = add("example2", cmd_example2, help="deflator martingale run")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--checkpoints", type=_floats, default=(1.0, 2.0, 5.0))
    p.add_argument("--csv")

    p = add("psi", cmd_psi, help="ruin probability with MC cross-check")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--u", type=_floats, required=True)
    p.add_argument("--mc-paths", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--csv")

    p = add("brownian", cmd_brownian, help="excursion-ladder diagnostic")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--paths", type=int, default=20_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--time-cap", type=float, default=100.0)
    p.add_argument("--out")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except EnlabError as exc:
        print(f"FAIL {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
