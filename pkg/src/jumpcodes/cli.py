"""Command-line front end.

Exit codes: 0 success/pass, 1 a verified negative result, 2 usage or input error.
Times are in units of 1/kappa_ref and rates in 1/time.

Environment overrides: JUMPCODES_OUTPUT_DIR (where default-named outputs go)
and JUMPCODES_WORKERS (default worker count for trajectory ensembles).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .codes import Codebook, build_1jc, dfs_basis, verify_detected_jump, verify_full_knill
from .designs import (
    C0_933_BLOCKS,
    SearchStats,
    SeedDesign,
    affine_plane,
    block_to_bits,
    search_2seed_933,
    seed_to_code,
    verify_seed,
)
from .dynamics import DecayModel
from .errors import JumpCodeError, SearchExhausted
from .qstate import basis_state
from .recovery import CodeRecovery
from .trajectory import TrajectoryConfig, ensemble_fidelity

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("jumpcodes")


class UsageError(Exception):
    pass


# -- helpers ----------------------------------------------------------------


def _out_path(path: str | None, default_name: str) -> Path:
    base = Path(os.environ.get("JUMPCODES_OUTPUT_DIR", "."))
    p = Path(path) if path else Path(default_name)
    return p if p.is_absolute() else base / p


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _provenance(**inputs: str) -> dict:
    return {"tool": "jumpcodes", "version": __version__, "inputs": {k: _sha256(v) for k, v in inputs.items()}}


def _load_code(path: str) -> Codebook:
    obj = _read_json(path)
    try:
        return Codebook.from_json_obj(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed codebook {path}: {exc}") from exc


def _load_design(path: str) -> SeedDesign:
    obj = _read_json(path)
    try:
        return SeedDesign.from_json_obj(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed design {path}: {exc}") from exc


def _model(n: int, args) -> DecayModel:
    if getattr(args, "rates", None):
        rates = [float(x) for x in args.rates.split(",")]
        if len(rates) != n:
            raise UsageError(f"--rates needs {n} values, got {len(rates)}")
        return DecayModel(n, tuple(rates))
    return DecayModel.with_spread(n, args.kappa, getattr(args, "kappa_spread", 0.0))


def _ket_listing(words_blocks, n: int) -> str:
    return " + ".join(f"|{block_to_bits(b, n)}>" for b in words_blocks)


# -- commands ---------------------------------------------------------------


def cmd_code_build(args) -> int:
    code = build_1jc(args.n)
    out = _out_path(args.out, f"code_n{args.n}.json")
    _write_json(out, code.to_json_obj())
    print(f"{code.label}: n={code.n}, k={code.k}, l={code.l}, dfs_dim={len(dfs_basis(code.n))}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_code_verify(args) -> int:
    code = _load_code(args.code)
    model = _model(code.n, args)
    prov = _provenance(code=args.code)
    if args.mode == "full-knill":
        report = verify_full_knill(code, model)
        obj = {**prov, **report.to_json_obj()}
        print(f"full Knill conditions: {'pass' if report.passed else 'violated'} ({len(report.violations)} entries)")
        for v in report.violations[: args.show]:
            print(f"  <c{v.i}|L{v.alpha}^dag L{v.beta}|c{v.j}> = {v.value.real:.12g}{v.value.imag:+.12g}i")
        status = EXIT_OK
    else:
        report = verify_detected_jump(code, args.t, model)
        obj = {**prov, "mode": "detected", **report.to_json_obj()}
        worst = report.worst
        lams = sorted({round(c.lam, 12) for c in report.checks if len(c.pattern) == 1})
        print(f"detected-jump conditions up to t={args.t}: {'pass' if report.passed else 'FAIL'}")
        print(f"  single-jump Lambda values: {', '.join(f'{x:.12g}' for x in lams)}")
        print(f"  worst pattern {list(worst.pattern)}: deviation {worst.max_deviation:.3g}")
        status = EXIT_OK if report.passed else EXIT_FAIL
    out = _out_path(args.out, "report.json")
    _write_json(out, obj)
    print(f"wrote {out}")
    return status


def cmd_sim(args) -> int:
    if args.unencoded:
        psi0 = basis_state("1")
        n = 1
        recovery = None
        if args.recovery == "on":
            raise UsageError("--recovery on needs an encoded state (--code)")
    elif args.code:
        code = _load_code(args.code)
        n = code.n
        if not 0 <= args.initial < code.l:
            raise UsageError(f"--initial must be in 0..{code.l - 1}")
        psi0 = code.codewords[args.initial]
        recovery = None
    else:
        raise UsageError("give --code PATH or --unencoded")
    model = _model(n, args)
    if args.recovery == "on":
        recovery = CodeRecovery(code, model, method=args.recovery_method)
    t_max = args.t_max
    cfg = TrajectoryConfig(
        model=model,
        t_max=t_max,
        sample_times=TrajectoryConfig.grid(t_max, args.samples),
        seed=args.seed,
        n_trajectories=args.n_traj,
        recovery_enabled=args.recovery == "on",
        recovery_delay=args.delay,
    )
    result = ensemble_fidelity(psi0, cfg, recovery, workers=args.workers)
    out = _out_path(args.out, "fidelity.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(result.to_csv())
    counts = result.jump_counts
    print(f"final mean fidelity {result.mean[-1]:.12g} +- {result.stderr[-1]:.3g} ({result.n_traj} trajectories)")
    print(f"minimum final fidelity {result.min_fidelity[-1]:.12g}")
    print(
        f"jumps per trajectory: mean {sum(counts) / len(counts):.6g}, max {max(counts)}; "
        f"uncorrectable events {result.uncorrectable}"
    )
    print(f"wrote {out}")
    return EXIT_OK


def cmd_design_affine(args) -> int:
    plane = affine_plane(args.q)
    design = SeedDesign(args.q**2, args.q, plane.parallel_classes)
    obj = {
        **design.to_json_obj(),
        "q": args.q,
        "points": list(plane.points),
        "lines": [list(b) for b in plane.lines],
    }
    out = _out_path(args.out, f"affine_q{args.q}.json")
    _write_json(out, obj)
    print(
        f"AG(2,{args.q}): {len(plane.points)} points, {len(plane.lines)} lines, "
        f"{len(plane.parallel_classes)} parallel classes"
    )
    for i, cls in enumerate(plane.parallel_classes):
        print(f"  class {i}: " + " ".join("{" + ",".join(map(str, b)) + "}" for b in cls))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_design_verify(args) -> int:
    design = _load_design(args.design)
    model = _model(design.n, args)
    report = verify_seed(design, args.t, model)
    obj = {**_provenance(design=args.design), **report.to_json_obj()}
    out = _out_path(args.out, "seed_report.json")
    _write_json(out, obj)
    print(f"SEED({design.n},{design.k},{design.l}) at t={args.t}: {'pass' if report.passed else 'FAIL'}")
    print(f"  block counts balanced: {report.extra['counts_balanced']}")
    print(f"  worst pattern {list(report.worst.pattern)}: deviation {report.worst.max_deviation:.3g}")
    print(f"wrote {out}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_design_search(args) -> int:
    anchor = None if args.free else C0_933_BLOCKS
    stats = SearchStats()
    try:
        designs = search_2seed_933(anchor, budget=args.budget, max_solutions=args.max_solutions, stats=stats)
    except SearchExhausted as exc:
        print(f"search exhausted: {exc} (budget {args.budget})")
        return EXIT_FAIL
    obj = {
        "tool": "jumpcodes",
        "version": __version__,
        "anchor": "fixed-c0" if anchor else "free",
        "explored": stats.explored,
        "candidates": stats.candidates,
        "designs": [d.to_json_obj() for d in designs],
    }
    out = _out_path(args.out, "seed_search.json")
    _write_json(out, obj)
    print(f"found {len(designs)} certified 2-SEED(9,3,3); explored {stats.explored} partial classes")
    for i, d in enumerate(designs):
        rep = verify_seed(d, 2, DecayModel.uniform(9))
        print(f"  design {i}: verify_seed t=2 {'pass' if rep.passed else 'FAIL'}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_design_to_code(args) -> int:
    design = _load_design(args.design)
    code = seed_to_code(design)
    out = _out_path(args.out, "seed_code.json")
    _write_json(out, code.to_json_obj())
    for i, cls in enumerate(design.classes):
        print(f"c{i} ~ {_ket_listing(cls, design.n)}")
    print(f"wrote {out}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return val


def _nonneg_float(text: str) -> float:
    val = float(text)
    if not (val >= 0 and math.isfinite(val)):
        raise argparse.ArgumentTypeError("must be a finite non-negative number")
    return val


def _even_int(text: str) -> int:
    val = int(text)
    if val < 2 or val % 2:
        raise argparse.ArgumentTypeError(f"n must be even and >= 2, got {val}")
    return val


def _add_rates(p: argparse.ArgumentParser, spread: bool = False) -> None:
    p.add_argument("--kappa", type=_nonneg_float, default=1.0, help="decay rate of every qubit, 1/time (default 1)")
    p.add_argument("--rates", help="comma-separated per-qubit decay rates in 1/time; overrides --kappa")
    if spread:
        p.add_argument(
            "--kappa-spread",
            type=_nonneg_float,
            default=0.0,
            help="relative rate spread s: kappa_a = kappa(1+delta_a), delta evenly spaced in [-s, s]",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jumpcodes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="flat key = value file; keys are flag names, flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    code = sub.add_parser("code", help="build and verify detected-jump codes").add_subparsers(
        dest="action", required=True
    )
    p = code.add_parser("build", help="write the optimal one-jump complementary-pair code")
    p.add_argument("--n", type=_even_int, required=True, help="number of physical qubits (even)")
    p.add_argument("--out", help="output codebook JSON (default code_n<N>.json)")
    p.set_defaults(func=cmd_code_build)

    p = code.add_parser("verify", help="check correctability conditions of a codebook")
    p.add_argument("--code", required=True, help="codebook JSON file")
    p.add_argument("--t", type=_positive_int, default=1, help="maximum jump-pattern length (default 1)")
    p.add_argument("--mode", choices=("detected", "full-knill"), default="detected")
    p.add_argument("--show", type=int, default=10, help="violations to print in full-knill mode")
    p.add_argument("--out", help="output report JSON (default report.json)")
    _add_rates(p)
    p.set_defaults(func=cmd_code_verify)

    p = sub.add_parser("sim", help="quantum-jump trajectory ensemble with optional recovery")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--code", help="codebook JSON; the initial state is codeword --initial")
    src.add_argument("--unencoded", action="store_true", help="single qubit prepared in |1>")
    p.add_argument("--initial", type=int, default=0, help="index of the initial codeword (default 0)")
    p.add_argument("--t-max", type=_nonneg_float, default=3.0, help="final time in units of 1/kappa_ref")
    p.add_argument("--samples", type=_positive_int, default=31, help="evenly spaced sample times in [0, t-max]")
    p.add_argument("--n-traj", type=_positive_int, default=1000, help="number of trajectories")
    p.add_argument("--seed", type=int, required=True, help="64-bit RNG seed (required)")
    p.add_argument("--recovery", choices=("on", "off"), default="on")
    p.add_argument("--recovery-method", choices=("auto", "circuit", "synthesized"), default="auto")
    p.add_argument("--delay", type=_nonneg_float, default=0.0, help="recovery delay in units of 1/kappa_ref")
    p.add_argument(
        "--workers",
        type=_positive_int,
        default=int(os.environ.get("JUMPCODES_WORKERS", "1")),
        help="worker processes; results do not depend on it",
    )
    p.add_argument("--out", help="fidelity CSV (default fidelity.csv)")
    _add_rates(p, spread=True)
    p.set_defaults(func=cmd_sim)

    design = sub.add_parser("design", help="spontaneous-emission-error designs").add_subparsers(
        dest="action", required=True
    )
    p = design.add_parser("affine", help="affine plane AG(2,q) and its parallel classes")
    p.add_argument("--q", type=int, default=2, help="prime order of the field")
    p.add_argument("--out", help="output design JSON (default affine_q<Q>.json)")
    p.set_defaults(func=cmd_design_affine)

    p = design.add_parser("verify", help="check a design through the code it induces")
    p.add_argument("--design", required=True, help="design JSON file")
    p.add_argument("--t", type=_positive_int, default=1, help="maximum jump-pattern length")
    p.add_argument("--out", help="output report JSON (default seed_report.json)")
    _add_rates(p)
    p.set_defaults(func=cmd_design_verify)

    p = design.add_parser("search", help="search for 2-SEED(9,3,3) designs")
    anchor = p.add_mutually_exclusive_group()
    anchor.add_argument(
        "--fix-c0", "--fix-c0-paper", dest="fix_c0", action="store_true",
        help="anchor the first class on the reference nine-block |c0> (default)",
    )
    anchor.add_argument("--free", action="store_true", help="try every resolvable first class")
    p.add_argument("--budget", type=_positive_int, default=2_000_000, help="max partial classes explored")
    p.add_argument("--max-solutions", type=_positive_int, default=None)
    p.add_argument("--out", help="output JSON (default seed_search.json)")
    p.set_defaults(func=cmd_design_search)

    p = design.add_parser("to-code", help="codebook induced by a design")
    p.add_argument("--design", required=True, help="design JSON file")
    p.add_argument("--out", help="output codebook JSON (default seed_code.json)")
    p.set_defaults(func=cmd_design_to_code)
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-")] = val
    return out


def _leaf_parser(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.ArgumentParser:
    node = parser
    for tok in argv:
        for action in node._actions:
            if isinstance(action, argparse._SubParsersAction) and tok in action.choices:
                node = action.choices[tok]
                break
    return node


def _config_argv(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Append config entries as flags unless the same flag is already on the command line."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    entries = _read_config(path)
    leaf = _leaf_parser(parser, argv)
    by_key = {}
    for action in leaf._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_key[opt[2:]] = action
    given = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
    extra: list[str] = []
    for key, raw in entries.items():
        action = by_key.get(key)
        if action is None or key in ("help", "config", "version"):
            raise UsageError(f"unknown config key {key!r}")
        if f"--{key}" in given:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            if raw.lower() in ("1", "true", "yes", "on"):
                extra.append(f"--{key}")
        else:
            extra.append(f"--{key}={raw}")
    return argv + extra


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        argv = _config_argv(parser, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, JumpCodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
