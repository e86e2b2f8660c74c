"""Command line entry point.

Usage (experiment mode, the default):

    rankspectra --stat hoeffding-d --n 300 --p 400 --seed 1 --out results/

An optional positional argument names a key=value config file whose keys
match the long flags; explicit flags override file values. ``--scan``
switches to the variance or Stieltjes convergence scans. Exit codes:
0 success, 2 validation error, 3 computation error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .data import MARGINS
from .errors import RankSpectraError, ValidationError
from .harness import (
    DEFAULT_BINS,
    ExperimentConfig,
    run_experiment,
    run_stieltjes_convergence,
    run_variance_scan,
)
from .kernels import KERNEL_IDS


def _parse_complex_list(text: str) -> tuple:
    try:
        return tuple(complex(part.strip()) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex list {text!r}: {exc}") from exc


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(part.strip()) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse integer list {text!r}: {exc}") from exc


def _read_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


_FILE_KEYS = {
    "stat": str, "n": int, "p": str, "seed": int, "margin": str, "bins": int,
    "trials": int, "truncation": int, "z": str, "out": str, "threads": str,
    "scan": str, "gamma": float,
}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rankspectra", description=__doc__.split("\n")[0])
    ap.add_argument("config", nargs="?", help="optional key=value config file")
    ap.add_argument("--stat", choices=KERNEL_IDS, help="statistic id")
    ap.add_argument("--n", type=int, help="sample count")
    ap.add_argument("--p", help="dimension (comma list in variance scan)")
    ap.add_argument("--seed", type=int, help="64-bit seed (default 0)")
    ap.add_argument("--margin", choices=MARGINS, help="margin id (default uniform01)")
    ap.add_argument("--bins", type=int, help=f"histogram bins (default {DEFAULT_BINS})")
    ap.add_argument("--trials", type=int, help="trial count for scans")
    ap.add_argument("--truncation", type=int, help="series truncation T; analyzes the truncated second-order matrix")
    ap.add_argument("--z", help="comma list of complex probes, e.g. '1j,0.5+2j'")
    ap.add_argument("--out", help="output directory for artifacts")
    ap.add_argument("--threads", help="worker count or 'auto' (env RANKSPECTRA_THREADS)")
    ap.add_argument("--scan", choices=("experiment", "variance", "stieltjes"),
                    help="run mode (default experiment)")
    ap.add_argument("--gamma", type=float, help="p/n ratio for the variance scan")
    return ap


def _merged_options(argv) -> dict:
    args = _build_parser().parse_args(argv)
    opts: dict = {}
    if args.config:
        raw = _read_config_file(args.config)
        unknown = set(raw) - set(_FILE_KEYS)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        for key, val in raw.items():
            opts[key] = _FILE_KEYS[key](val)
    for key in ("stat", "n", "p", "seed", "margin", "bins", "trials",
                "truncation", "z", "out", "threads", "scan", "gamma"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    if "threads" not in opts and os.environ.get("RANKSPECTRA_THREADS"):
        opts["threads"] = os.environ["RANKSPECTRA_THREADS"]
    return opts


def _threads_value(raw) -> int | str:
    if raw in (None, "auto"):
        return "auto"
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ValidationError(f"threads must be an integer or 'auto', got {raw!r}") from None


def _to_int(opts: dict, key: str):
    try:
        return int(opts[key])
    except (TypeError, ValueError):
        raise ValidationError(f"option {key!r} must be an integer, got {opts[key]!r}") from None


def _require(opts: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in opts]
    if missing:
        raise ValidationError(f"missing required options: {missing}")


def _f(v: float) -> str:
    return format(float(v), ".17g")


def _run(opts: dict) -> None:
    mode = opts.get("scan", "experiment")
    if mode == "experiment":
        _require(opts, "stat", "n", "p")
        cfg = ExperimentConfig(
            statistic=opts["stat"],
            n=_to_int(opts, "n"),
            p=_to_int(opts, "p"),
            seed=int(opts.get("seed", 0)),
            margin=opts.get("margin", "uniform01"),
            bins=int(opts.get("bins", DEFAULT_BINS)),
            trials=int(opts.get("trials", 1)),
            truncation_T=int(opts["truncation"]) if "truncation" in opts else None,
            z_probes=_parse_complex_list(opts.get("z", "1j")),
            out_dir=opts.get("out"),
            threads=_threads_value(opts.get("threads")),
        )
        result = run_experiment(cfg)
        print(
            f"{cfg.statistic}: n={cfg.n} p={cfg.p} gamma={_f(result.gamma)} "
            f"radius={_f(result.radius)} ks={_f(result.ks)} "
            f"elapsed={result.elapsed_seconds:.2f}s"
        )
        return
    if mode == "variance":
        _require(opts, "stat", "p")
        from .harness import _apply_threads

        _apply_threads(_threads_value(opts.get("threads")))
        scan = run_variance_scan(
            statistic=opts["stat"],
            p_list=_parse_int_list(str(opts["p"])),
            gamma=float(opts.get("gamma", 1.0)),
            trials=int(opts.get("trials", 100)),
            z=_parse_complex_list(opts.get("z", "1j"))[0],
            seed=int(opts.get("seed", 0)),
        )
        lines = ["p,n,variance"] + [f"{r.p},{r.n},{_f(r.variance)}" for r in scan.rows]
        _write_or_print(opts, "variance_scan.csv", "\n".join(lines) + "\n")
        print(f"variance scan slope: {_f(scan.slope)}")
        return
    # stieltjes convergence
    _require(opts, "stat", "n", "p")
    from .harness import _apply_threads

    _apply_threads(_threads_value(opts.get("threads")))
    rows = run_stieltjes_convergence(
        statistic=opts["stat"],
        n=int(opts["n"]),
        p=int(opts["p"]),
        trials=int(opts.get("trials", 20)),
        z_probes=_parse_complex_list(opts.get("z", "1j")),
        seed=int(opts.get("seed", 0)),
    )
    lines = ["re_z,im_z,re_mean_s,im_mean_s,re_m_theta,im_m_theta,gap"]
    for r in rows:
        lines.append(",".join(_f(v) for v in (
            r.z.real, r.z.imag, r.mean_s.real, r.mean_s.imag,
            r.m_theta.real, r.m_theta.imag, r.gap,
        )))
    _write_or_print(opts, "stieltjes_scan.csv", "\n".join(lines) + "\n")
    for r in rows:
        print(f"z={r.z}: gap={_f(r.gap)}")


def _write_or_print(opts: dict, name: str, text: str) -> None:
    if opts.get("out"):
        out = Path(opts["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        _run(_merged_options(sys.argv[1:] if argv is None else argv))
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RankSpectraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
