"""``robq`` command line.

Exit codes: 0 success, 2 usage or schema error, 3 numerical failure.
Every file written with ``--out`` gets a ``<out>.manifest.json`` sidecar
(command, flags, seed, version, input hashes, timestamp) so the data file
itself stays byte-identical across re-runs.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from . import __version__
from .bounds import full_report
from .circuit import Circuit, load_circuit
from .errors import DimensionMismatch, LengthMismatch, NoConvergence, NotHermitian, NotSingleQubit, NotUnitary, \
    OutOfRegime, RobqError, SchemaError, TooLarge, UnknownGate
from .gates import normalize_mode
from .presets import PRESETS
from .rng import SeededRng, default_seed
from .simulator import monte_carlo, stats_to_csv

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
NUMERIC_ERRORS = (NoConvergence, NotHermitian, NotUnitary, OutOfRegime, FloatingPointError)


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    flags: dict
    master_seed: int | None
    version: str = __version__
    started: str = ""
    finished: str = ""
    inputs: dict = field(default_factory=dict)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load(spec: str) -> tuple[str, Circuit]:
    """A circuit from a JSON path or ``preset:<name>``."""
    if spec.startswith("preset:"):
        name = spec.split(":", 1)[1]
        if name not in PRESETS:
            raise UsageError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        return spec, PRESETS[name]()
    return spec, load_circuit(spec)


def _seed(args) -> int:
    return default_seed() if args.seed is None else args.seed


def _positive(name):
    def check(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be at least 1")
        return v
    return check


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _write_outputs(args, manifest: RunManifest, text: str, fmt: str):
    """Write ``text`` to ``--out`` (with sidecar) or stdout."""
    out = getattr(args, "out", None)
    if not out:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    manifest.finished = _now()
    with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump({**asdict(manifest), "format": fmt}, fh, indent=2)
        fh.write("\n")


def _manifest(args, inputs=()) -> RunManifest:
    flags = {k: v for k, v in vars(args).items() if k not in ("func",)}
    hashes = {p: _sha256(p) for p in inputs if p and not p.startswith("preset:") and os.path.exists(p)}
    seed = _seed(args) if hasattr(args, "seed") else None
    return RunManifest(args.command, flags, seed, started=_now(), inputs=hashes)


# ------------------------------------------------------------------ commands

def cmd_analyze(args) -> int:
    src = args.circuit or f"preset:{args.preset}"
    _, c = _load(src)
    rep = full_report(c, args.eps_bar, args.target_fidelity, normalize_mode(args.mode), args.pairwise)
    if args.json:
        print(rep.to_json())
    else:
        print(rep.to_table())
    return EXIT_OK


def cmd_simulate(args) -> int:
    src = args.circuit or f"preset:{args.preset or 'intro'}"
    cid, c = _load(src)
    intro_like = src in ("preset:intro", "preset:intro-prime")
    samples = args.samples or (500 if intro_like else 1000)
    if args.psi0 is not None:
        initial = args.psi0
    elif args.haar or not intro_like:
        initial = "haar"
    else:
        initial = 0
    if args.psi0 is not None and not 0 <= args.psi0 < (1 << c.n_qubits):
        raise UsageError(f"--psi0 must be a basis index below {1 << c.n_qubits}")
    manifest = _manifest(args, [src])
    rng = SeededRng(_seed(args))
    st = monte_carlo(c, args.eps_bar, samples, initial, rng, "simulate", args.threads, keep_samples=bool(args.out))
    if args.out:
        _write_outputs(args, manifest, stats_to_csv([(cid, 0, st)]), "csv")
    print(json.dumps(st.summary(), indent=2))
    return EXIT_OK


def cmd_compare(args) -> int:
    loaded = [_load(s) for s in args.circuits]
    rows = []
    rng = SeededRng(_seed(args))
    for i, (cid, c) in enumerate(loaded):
        rep = full_report(c, args.eps_bar, args.target_fidelity, normalize_mode(args.mode))
        row = {"circuit": cid, "gates": rep.n_gates, "L_norm": rep.L_norm, "L_pair_dp": rep.L_pair_dp,
               "fidelity_bound": rep.fidelity_bound, "eps_max": rep.to_dict()["eps_max"]}
        if args.samples:
            st = monte_carlo(c, args.eps_bar, args.samples, "haar", rng, f"compare/{i}", args.threads,
                             keep_samples=False)
            row["min_fidelity"] = st.min_fidelity
            row["mean_fidelity"] = st.mean_fidelity
        rows.append(row)
    rows.sort(key=lambda r: (r["L_norm"], r["circuit"]))
    for rank, row in enumerate(rows, 1):
        row["rank"] = rank
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        width = max(len(r["circuit"]) for r in rows)
        for r in rows:
            extra = f"  min F {r['min_fidelity']:.6f}" if "min_fidelity" in r else ""
            print(f"{r['rank']:>2}  {r['circuit']:<{width}}  L {r['L_norm']:.6f}  "
                  f"F >= {r['fidelity_bound']:.6f}{extra}")
    return EXIT_OK


def cmd_qft_study(args) -> int:
    from .qft_study import compare_variants

    manifest = _manifest(args)
    cmp = compare_variants(args.eps_bar, args.samples, SeededRng(_seed(args)), threads=args.threads)
    if args.out:
        _write_outputs(args, manifest, cmp.to_csv(), "csv")
    print(cmp.to_json())
    return EXIT_OK


def cmd_validation_sweep(args) -> int:
    from .presets import validation_a, validation_b
    from .tomography import validation_sweep

    manifest = _manifest(args)
    res = validation_sweep({"A": validation_a(), "B": validation_b()}, args.levels, args.samples, args.shots,
                           SeededRng(_seed(args)), threads=args.threads)
    if args.out:
        _write_outputs(args, manifest, res.to_csv(), "csv")
    print(res.to_json())
    return EXIT_OK


def cmd_vqa(args) -> int:
    from .vqa import DEFAULT_LAMBDAS, adam_train, regularization_study

    shots = 20000 if args.paper_mode else args.shots
    kw = dict(iters=args.iters, restarts=args.restarts, eps_bar=args.eps_bar, shots=shots,
              rng=SeededRng(_seed(args)))
    manifest = _manifest(args)
    if args.study:
        lambdas = args.lambdas or list(DEFAULT_LAMBDAS)
        res = regularization_study(lambdas, args.seeds, threads=args.threads, **kw)
        if args.out:
            _write_outputs(args, manifest, res.to_csv(), "csv")
        print(res.to_json())
    else:
        rec = adam_train(args.lam, args.run_seed, **kw)
        print(json.dumps(rec.summary(), indent=2))
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robq", description="Lipschitz robustness bounds for coherent control errors.")
    p.add_argument("--version", action="version", version=f"robq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, threads=True, out=True):
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="master seed (default: $ROBQ_SEED or built-in)")
        if threads:
            sp.add_argument("--threads", type=_positive("--threads"), default=1)
        if out:
            sp.add_argument("--out", help="CSV output path (a .manifest.json sidecar is written next to it)")

    a = sub.add_parser("analyze", help="bound report for one circuit")
    a.add_argument("circuit", nargs="?")
    a.add_argument("--preset", choices=sorted(PRESETS), default=None)
    a.add_argument("--eps-bar", type=_nonneg_float, default=None)
    a.add_argument("--target-fidelity", type=float, default=0.99)
    a.add_argument("--mode", default="raw", help="raw | phase-opt")
    a.add_argument("--pairwise", choices=("greedy", "dp"), default="dp")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="Monte Carlo fidelity statistics")
    s.add_argument("circuit", nargs="?")
    s.add_argument("--preset", choices=sorted(PRESETS), default=None)
    s.add_argument("--eps-bar", type=_nonneg_float, default=None)
    s.add_argument("--samples", type=_positive("--samples"), default=None)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--haar", action="store_true", help="one Haar-random initial state per sample")
    g.add_argument("--psi0", type=int, default=None, help="computational basis state index")
    common(s)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="rank circuits by Lipschitz bound")
    c.add_argument("circuits", nargs="+", help="JSON files or preset:<name>")
    c.add_argument("--eps-bar", type=_nonneg_float, default=None)
    c.add_argument("--target-fidelity", type=float, default=0.99)
    c.add_argument("--mode", default="raw")
    c.add_argument("--samples", type=int, default=0, help="also simulate with this many Haar samples")
    c.add_argument("--json", action="store_true")
    common(c, out=False)
    c.set_defaults(func=cmd_compare)

    q = sub.add_parser("qft-study", help="QFT across five gate sets")
    q.add_argument("--eps-bar", type=_nonneg_float, default=0.05)
    q.add_argument("--samples", type=_positive("--samples"), default=40000)
    common(q)
    q.set_defaults(func=cmd_qft_study)

    v = sub.add_parser("validation-sweep", help="simulated tomography sweep of the two validation circuits")
    v.add_argument("--levels", type=_positive("--levels"), default=16)
    v.add_argument("--samples", type=_positive("--samples"), default=80)
    v.add_argument("--shots", type=_positive("--shots"), default=20000)
    common(v)
    v.set_defaults(func=cmd_validation_sweep)

    m = sub.add_parser("vqa", help="regularised variational regression")
    mode = m.add_mutually_exclusive_group(required=True)
    mode.add_argument("--lambda", dest="lam", type=_nonneg_float, help="train one model")
    mode.add_argument("--study", action="store_true", help="lambda x seed grid")
    m.add_argument("--lambdas", type=_nonneg_float, nargs="+", default=None)
    m.add_argument("--seeds", type=_positive("--seeds"), default=8)
    m.add_argument("--run-seed", type=int, default=0, help="model seed for --lambda")
    m.add_argument("--iters", type=_positive("--iters"), default=50)
    m.add_argument("--restarts", type=_positive("--restarts"), default=8)
    m.add_argument("--eps-bar", type=_nonneg_float, default=0.05)
    m.add_argument("--shots", type=_positive("--shots"), default=None)
    m.add_argument("--paper-mode", action="store_true", help="20,000-shot estimates plus noise injection")
    common(m)
    m.set_defaults(func=cmd_vqa)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    if getattr(args, "circuit", "x") is None and getattr(args, "preset", None) is None and args.command == "analyze":
        print("robq analyze: give a circuit file or --preset", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"robq: schema error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, UnknownGate, TooLarge, NotSingleQubit, DimensionMismatch, LengthMismatch) as e:
        print(f"robq: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"robq: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as e:
        print(f"robq: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except RobqError as e:
        print(f"robq: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
