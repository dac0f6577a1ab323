"""Command-line front end: synth, analyze, eval, spectrum, selftest.

Exit codes: 0 success, 2 usage, 3 input format, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .evaluate import rrase, run_scenario
from .fileio import (InputFormatError, MissingTauError, file_sha256, read_signal, read_table, write_csv,
                     write_decomposition, write_json, write_ridges, write_signal, write_sst)
from .noise import ARMA1, ARMA2, ARMA3, ARMA4, ArmaSpec, arma_spectral_density
from .reconstruct import AnalysisConfig, decompose
from .scenarios import build_scenario

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4
THREADS_ENV = "SSTDECOMP_THREADS"
SPECTRUM_POINTS = 512

# flag name -> AnalysisConfig field
_CONFIG_FLAGS = {
    "ridges": "k",
    "lam": "lam",
    "gamma": "gamma",
    "kappa": "kappa",
    "c1": "c1",
    "delta": "delta",
    "d": "d",
    "voices": "n_voices",
    "pad": "pad",
    "boundary": "boundary",
    "min_cycles": "min_cycles",
    "band_frac": "band_frac",
    "reconstruction": "reconstruction",
    "seed": "seed",
}
_PROCESSES = {"ARMA1": ARMA1, "ARMA2": ARMA2, "ARMA3": ARMA3, "ARMA4": ARMA4}


class UsageError(Exception):
    pass


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _auto_or_float(text: str):
    return "auto" if text == "auto" else float(text)


def _pad_arg(text: str):
    return int(text) if text.isdigit() else text


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    elif os.environ.get(THREADS_ENV):
        try:
            n = int(os.environ[THREADS_ENV])
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer") from None
    else:
        n = os.cpu_count() or 1
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def build_config(args) -> AnalysisConfig:
    """Defaults, then the --config JSON file, then explicit flags."""
    values = {}
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputFormatError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputFormatError(f"{args.config}: config must be a JSON object")
        known = {f.name for f in dataclasses.fields(AnalysisConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for flag, key in _CONFIG_FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            values[key] = val
    try:
        return AnalysisConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from exc


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("analysis configuration (flags override --config)")
    g.add_argument("--config", help="JSON file with AnalysisConfig fields")
    g.add_argument("--ridges", type=int, help="number of seasonal components k")
    g.add_argument("--lambda", dest="lam", type=float, help="ridge smoothness weight")
    g.add_argument("--gamma", type=_auto_or_float, help="threshold or 'auto'")
    g.add_argument("--kappa", type=float, help="multiplier of the automatic threshold")
    g.add_argument("--c1", type=_auto_or_float, help="lowest seasonal frequency or 'auto'")
    g.add_argument("--delta", type=float, help="wavelet half-bandwidth")
    g.add_argument("--d", type=float, help="component separation parameter")
    g.add_argument("--voices", type=int, help="voices per octave")
    g.add_argument("--pad", type=_pad_arg, help="'double', 'minimal' or an explicit length")
    g.add_argument("--boundary", choices=("reflect", "symmetric"))
    g.add_argument("--min-cycles", dest="min_cycles", type=float,
                   help="ignore ridge frequencies below this many cycles per record")
    g.add_argument("--band-frac", dest="band_frac", type=float, help="peeling band half-width")
    g.add_argument("--reconstruction", choices=("sst", "cwt"))
    g.add_argument("--seed", type=int, help="recorded in the manifest")


def _manifest(command: str, config: dict | None, seed, started: str, outputs, inputs=None) -> dict:
    return {
        "tool": "sstdecomp",
        "version": __version__,
        "command": command,
        "argv": sys.argv[1:],
        "config": config,
        "seed": seed,
        "inputs": inputs or [],
        "started": started,
        "finished": _now(),
        "outputs": [str(p) for p in outputs],
    }


def cmd_synth(args) -> int:
    started = _now()
    try:
        draw = build_scenario(args.scenario, args.seed, args.n, args.tau)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    truth_path = out.with_name(out.stem + ".truth.csv")
    man_path = out.with_name(out.stem + ".manifest.json")
    write_signal(out, draw.signal)
    names = list(draw.spec.component_names) + ["T", "noise"]
    n = len(draw.signal)
    write_csv(truth_path, ["index", "t"] + names,
              [np.arange(1, n + 1), draw.signal.times] + [draw.truth[k] for k in names])
    write_json(man_path, _manifest("synth", {"scenario": args.scenario, "n": args.n, "tau": args.tau},
                                   args.seed, started, [out, truth_path, man_path]))
    print(f"wrote {out}, {truth_path}, {man_path}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    started = _now()
    config = build_config(args)
    try:
        signal = read_signal(args.input, args.tau)
    except MissingTauError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dec = decompose(signal, config)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    times = signal.times
    paths = [write_decomposition(out / "decomposition.csv", dec, times)]
    meta = {
        "config": config.to_dict(),
        "gamma": dec.gamma,
        "r_psi": dec.r_psi,
        "c1": dec.c1,
        "tau": signal.tau,
        "n": len(signal),
        "ridge_scores": [r.score for r in dec.ridges],
        "components_found": len(dec.ridges),
        "warnings": [str(w.message) for w in caught],
    }
    paths.append(write_json(out / "decomposition.json", meta))
    if dec.sst is not None:
        paths.extend(write_sst(out / "sst.bin", dec))
    paths.append(write_ridges(out / "ridges.csv", dec, times))
    man = out / "manifest.json"
    inputs = [{"path": str(args.input), "sha256": file_sha256(args.input)}]
    write_json(man, _manifest("analyze", config.to_dict(), config.seed, started, paths + [man], inputs))
    print(f"wrote {len(paths) + 1} files to {out}")
    return EXIT_OK


def _eval_files(args) -> dict:
    est = Path(args.est)
    if est.is_dir():
        est = est / "decomposition.csv"
    eh, ed = read_table(est)
    th, td = read_table(args.truth)
    if ed.shape[0] != td.shape[0]:
        raise InputFormatError(f"{est} has {ed.shape[0]} rows but {args.truth} has {td.shape[0]}")
    ecol = {h: ed[:, i] for i, h in enumerate(eh)}
    tcol = {h: td[:, i] for i, h in enumerate(th)}
    comps = [h for h in th if h not in ("index", "t", "T", "noise")]

    def pick(*names):
        # an analysis CSV names columns comp_k/trend/residual, a truth CSV uses the truth names
        for name in names:
            if name in ecol:
                return ecol[name]
        raise InputFormatError(f"{est} lacks a column named {' or '.join(names)}")

    report = {}
    for k, name in enumerate(comps, start=1):
        report[name] = rrase(pick(name, f"comp_{k}"), tcol[name])
    if "T" in tcol:
        report["T"] = rrase(pick("T", "trend"), tcol["T"])
    if "noise" in tcol and np.any(tcol["noise"] != 0):
        report["r"] = rrase(pick("noise", "residual"), tcol["noise"])
    return {"est": str(est), "truth": str(args.truth), "rrase": report}


def cmd_eval(args) -> int:
    started = _now()
    if args.scenario:
        if args.est or args.truth:
            raise UsageError("use either --scenario or --est/--truth")
        config = build_config(args)
        try:
            rep = run_scenario(args.scenario, args.reps, args.seed0, config, workers=_threads(args))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        print(rep.table())
        result = rep.to_dict()
        outputs = []
        if args.per_rep:
            cols = [np.array(rep.seeds)] + [rep.rrase[:, i] for i in range(len(rep.targets))]
            outputs.append(write_csv(args.per_rep, ["seed"] + list(rep.targets), cols))
    else:
        if not (args.est and args.truth):
            raise UsageError("eval needs --scenario, or both --est and --truth")
        result = _eval_files(args)
        for k, v in result["rrase"].items():
            print(f"{k:>6s}  {v:.6f}")
        outputs = []
    if args.out:
        result["manifest"] = _manifest("eval", None, getattr(args, "seed0", None), started,
                                       outputs + [args.out])
        write_json(args.out, result)
    return EXIT_OK


def _poly(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(c) for c in text.split(","))
    except ValueError:
        raise UsageError(f"bad polynomial {text!r}; use comma-separated coefficients like 1,0.5") from None


def cmd_spectrum(args) -> int:
    if args.process:
        spec = _PROCESSES[args.process]
        if args.ar or args.ma:
            raise UsageError("--process excludes --ar/--ma")
    else:
        try:
            spec = ArmaSpec(_poly(args.ar or "1"), _poly(args.ma or "1"))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    xi = np.linspace(0.0, np.pi, args.points)
    dens = arma_spectral_density(spec, xi, args.sigma2)
    if args.out:
        write_csv(args.out, ["xi", "density"], [xi, dens])
        print(f"wrote {args.out}")
    else:
        lines = ["xi,density"] + [f"{a:.17g},{b:.17g}" for a, b in zip(xi, dens)]
        try:
            sys.stdout.write("\n".join(lines) + "\n")
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head)
            sys.stderr.close()
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_NUMERIC


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sstdecomp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes for batch evaluation (default: ${THREADS_ENV} or CPU count)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="write a simulated scenario and its ground truth")
    s.add_argument("--scenario", required=True, help="e.g. Y0, Y_1_2_1, Y_1_2_1_O, clean_s2_T1")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="signal CSV path; truth and manifest go alongside")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--tau", type=float, default=0.01)
    s.set_defaults(func=cmd_synth)

    a = sub.add_parser("analyze", help="decompose a CSV signal")
    a.add_argument("input")
    a.add_argument("--out", required=True, help="output directory")
    a.add_argument("--tau", type=float, help="sampling interval, required for single-column input")
    _add_config_flags(a)
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("eval", help="score an analysis against truth, or run a scenario batch")
    e.add_argument("--est", help="analysis directory or decomposition CSV")
    e.add_argument("--truth", help="truth CSV written by synth")
    e.add_argument("--scenario", help="run a batch of this scenario instead")
    e.add_argument("--reps", type=int, default=50)
    e.add_argument("--seed0", type=int, default=0)
    e.add_argument("--per-rep", dest="per_rep", help="CSV of per-replication RRASE")
    e.add_argument("--out", help="JSON report path")
    _add_config_flags(e)
    e.set_defaults(func=cmd_eval)

    sp = sub.add_parser("spectrum", help="ARMA spectral density on [0, pi]")
    sp.add_argument("--process", choices=sorted(_PROCESSES))
    sp.add_argument("--ar", help="a(z) coefficients from z^0, e.g. 1,0.5")
    sp.add_argument("--ma", help="b(z) coefficients from z^0, e.g. 1,0.4")
    sp.add_argument("--sigma2", type=float, default=1.0, help="innovation variance (default 1)")
    sp.add_argument("--points", type=int, default=SPECTRUM_POINTS)
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.set_defaults(func=cmd_spectrum)

    st = sub.add_parser("selftest", help="run the built-in property checks")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
