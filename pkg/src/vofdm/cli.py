"""Command line front end: experiment presets and composable pipeline steps.

    vofdm run fig1|fig2|fig3|fig3b|fig4suite|custom [--m M] [--n N] [--seed S]
              [--trials T] [--out DIR] [--format csv|json] [--plot svg]
              [--config FILE]
    vofdm modulate|demodulate|spectrum|precode|papr --in FILE --out FILE [...]

Every preset writes its data files plus ``summary.json`` into ``--out`` and
exits with status 1 if any check fails.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .core import FrameParams, demodulate, modulate, spectrum
from .errors import VofdmError
from .io import fmt, load, save
from .precoder import NullSpec, null_bins, precode_grid, verify_nulls
from .simkit import SymbolSource, averaged_magnitudes, draw_grid, papr, papr_db

log = logging.getLogger("vofdm")

PRESETS = ("fig1", "fig2", "fig3", "fig3b", "fig4suite", "custom")
STRUCTURAL_TOL = 1e-12
PRECODED_TOL = 1e-10
NONNULL_FLOOR = 1e-3
STABILITY_TOL = 0.05


@dataclass
class ExperimentConfig:
    preset: str
    M: int = 8
    N: int = 64
    seed: int = 0
    trials: int = 1000
    format: str = "csv"
    plot: str = "none"
    k: int = 0
    m_values: list = field(default_factory=lambda: [4, 8, 16, 32, 64])
    nulls: list = field(default_factory=list)
    mode: str = "exact"


PRESET_DEFAULTS = {
    "fig1": dict(M=4, N=4, trials=1),
    "fig2": dict(M=8, N=64, trials=1),
    "fig3": dict(M=8, N=64, trials=1000),
    "fig3b": dict(N=64, trials=1000),
    "fig4suite": dict(M=8, N=64, trials=1000),
    "custom": dict(trials=1),
}


def parse_null(text: str) -> dict:
    """``"k:z1,z2"`` or ``"k:z1,z2:p1,p2,p3"``."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"null spec {text!r} is not K:Z[:P]")
    try:
        def ints(s):
            return [int(v) for v in s.split(",") if v.strip()]
        out = {"k": int(parts[0]), "null_positions": ints(parts[1])}
        if len(parts) == 3:
            out["precode_positions"] = ints(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"null spec {text!r} has non-integer fields") from None
    return out


def to_specs(nulls: list) -> list[NullSpec]:
    return [NullSpec(d["k"], tuple(d["null_positions"]),
                     tuple(d["precode_positions"]) if d.get("precode_positions") is not None else None)
            for d in nulls]


def build_config(args) -> ExperimentConfig:
    """Preset defaults, then config file values, then explicit flags."""
    values = dict(PRESET_DEFAULTS[args.preset])
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise VofdmError(f"cannot read config {args.config}: {exc}") from None
        values.pop("preset", None)
    flags = {"M": args.m, "N": args.n, "seed": args.seed, "trials": args.trials,
             "format": args.format, "plot": args.plot, "k": args.k, "mode": args.mode}
    values.update({key: v for key, v in flags.items() if v is not None})
    if args.null:
        values["nulls"] = args.null
    if args.m_values:
        values["m_values"] = args.m_values
    known = ExperimentConfig.__dataclass_fields__
    unknown = set(values) - set(known)
    if unknown:
        raise VofdmError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(preset=args.preset, **values)


class Run:
    """Collects checks and written files for one preset invocation."""

    def __init__(self, config: ExperimentConfig, out: Path):
        self.config = config
        self.out = out
        self.checks: list[dict] = []
        self.files: list[str] = []
        self.report: dict = {}
        out.mkdir(parents=True, exist_ok=True)

    def check(self, name: str, value, passed: bool, tol=None):
        self.checks.append({"name": name, "value": value, "tol": tol, "passed": bool(passed)})

    def save(self, obj, stem: str):
        path = save(obj, self.out / f"{stem}.{self.config.format}", self.config.format)
        self.files.append(path.name)

    def save_table(self, stem: str, header: list[str], rows: list[list]):
        if self.config.format == "json":
            doc = {"columns": header, "rows": rows}
            text = json.dumps(doc, indent=1) + "\n"
        else:
            lines = [",".join(header)]
            lines += [",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
            text = "\n".join(lines) + "\n"
        path = self.out / f"{stem}.{self.config.format}"
        path.write_text(text)
        self.files.append(path.name)

    def plot(self, stem: str, values, title: str, xlabel: str):
        if self.config.plot != "svg":
            return
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        plt.rcParams["svg.hashsalt"] = "vofdm"
        fig, ax = plt.subplots(figsize=(7, 3.5))
        ax.stem(np.arange(len(values)), values, basefmt=" ")
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("magnitude")
        fig.tight_layout()
        path = self.out / f"{stem}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        self.files.append(path.name)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def summary(self) -> dict:
        cfg = asdict(self.config)
        return {
            "preset": self.config.preset,
            "config": cfg,
            "report": self.report,
            "checks": self.checks,
            "passed": self.passed,
            "files": sorted(self.files),
            "metadata": {
                "version": __version__,
                "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            },
        }


def _structural_nulls(run: Run, zero_vectors: list[int]):
    """Shared body of fig1/fig2: zero some vectors, check their spectrum vectors vanish."""
    cfg = run.config
    params = FrameParams(cfg.M, cfg.N)
    grid = draw_grid(SymbolSource("bpsk", cfg.seed), params, zero_vectors=zero_vectors)
    frame = modulate(grid)
    spec = spectrum(frame)
    bins = sorted(m * params.N + k for k in zero_vectors for m in range(params.M))
    others = np.setdiff1d(np.arange(params.length), bins)
    mags = np.abs(spec.bins)
    null_max = float(mags[bins].max()) if bins else 0.0
    floor = float(mags[others].min()) if others.size else float("inf")
    run.check("null_bins_max", null_max, null_max <= STRUCTURAL_TOL, STRUCTURAL_TOL)
    run.check("other_bins_min", floor, floor > NONNULL_FLOOR, NONNULL_FLOOR)
    run.report.update(null_bins=bins, papr=papr(frame), papr_db=papr_db(frame))
    run.save(grid, "symbols")
    run.save(frame, "time")
    run.save(spec, "spectrum")
    run.plot("spectrum", mags, f"VOFDM spectrum, M={cfg.M}, N={cfg.N}", "flat frequency index")


def preset_fig1(run: Run):
    _structural_nulls(run, [0])


def preset_fig2(run: Run):
    _structural_nulls(run, list(range(max(1, run.config.N // 4))))


def _stats_table(stats) -> list[list]:
    return [[n, float(v)] for n, v in enumerate(stats.per_position_mean)]


def preset_fig3(run: Run):
    cfg = run.config
    params = FrameParams(cfg.M, cfg.N)
    spec = NullSpec.trailing(cfg.k, cfg.M, 2)
    specs = [spec]
    source = SymbolSource("bpsk", cfg.seed)

    # trial 0 realization, reproducible with `vofdm precode`
    free = {spec.k: spec.free_positions(cfg.M)}
    grid = draw_grid(source, params, free_positions=free, substream=0)
    run.save(grid, "input_symbols")
    run.save(precode_grid(grid, specs, cfg.mode), "precoded_symbols")

    stats = averaged_magnitudes(params, specs, source, cfg.trials, mode=cfg.mode)
    alt = averaged_magnitudes(params, specs, SymbolSource("bpsk", cfg.seed + 1), cfg.trials, mode=cfg.mode)
    P = list(spec.precode_positions)
    F = list(spec.free_positions(cfg.M))
    drift = float(np.max(np.abs(stats.per_position_mean[P] - alt.per_position_mean[P])
                         / alt.per_position_mean[P]))
    run.check("null_bins_max_all_trials", stats.max_null_magnitude,
              stats.max_null_magnitude <= PRECODED_TOL, PRECODED_TOL)
    free_exact = bool(np.all(stats.per_position_mean[F] == 1.0))
    run.check("free_means_exactly_one", free_exact, free_exact)
    run.check("precoded_means_seed_drift", drift, drift < STABILITY_TOL, STABILITY_TOL)
    run.report.update(k=spec.k, precode_positions=P, mean_papr=stats.mean_papr,
                      per_position_mean=stats.per_position_mean.tolist())
    run.save_table("magnitudes", ["position", "mean_magnitude"], _stats_table(stats))
    run.plot("magnitudes", stats.per_position_mean, f"mean |x_k(n)|, M={cfg.M}, N={cfg.N}", "position n")


def preset_fig3b(run: Run):
    cfg = run.config
    rows = []
    worst = 0.0
    for M in cfg.m_values:
        params = FrameParams(int(M), cfg.N)
        spec = NullSpec.trailing(min(cfg.k, cfg.N - 1), params.M, 2)
        stats = averaged_magnitudes(params, [spec], SymbolSource("bpsk", cfg.seed), cfg.trials, mode=cfg.mode)
        tail = stats.per_position_mean[list(spec.precode_positions)]
        rows.append([params.M, float(tail[0]), float(tail[1]), float(tail.mean())])
        worst = max(worst, stats.max_null_magnitude)
    run.check("null_bins_max_all_trials", worst, worst <= PRECODED_TOL, PRECODED_TOL)
    run.report.update(m_values=[r[0] for r in rows], precoded_mean=[r[3] for r in rows])
    run.save_table("precoded_magnitudes", ["M", "mean_second_last", "mean_last", "mean_precoded"], rows)
    run.plot("precoded_magnitudes", [r[3] for r in rows], f"mean precoded magnitude, N={cfg.N}", "sweep index")


def preset_fig4suite(run: Run):
    cfg = run.config
    params = FrameParams(cfg.M, cfg.N)
    ks = list(range(cfg.N // 2, cfg.N))
    specs = [NullSpec.trailing(k, cfg.M, 1) for k in ks]
    source = SymbolSource("bpsk", cfg.seed)
    free = {s.k: s.free_positions(cfg.M) for s in specs}
    grid = draw_grid(source, params, free_positions=free, substream=0)
    grid = precode_grid(grid, specs, cfg.mode)
    frame = modulate(grid)
    spec = spectrum(frame)
    bins = null_bins(specs, params)
    report = verify_nulls(frame, bins, PRECODED_TOL)
    run.check("null_bins_max", report.max_magnitude, report.passed, PRECODED_TOL)
    ratio = papr(frame)
    run.check("papr_at_least_one", ratio, ratio >= 1.0)

    stats = averaged_magnitudes(params, specs, source, cfg.trials, k_range=ks, mode=cfg.mode)
    run.check("null_bins_max_all_trials", stats.max_null_magnitude,
              stats.max_null_magnitude <= PRECODED_TOL, PRECODED_TOL)
    means = stats.per_position_mean
    free_exact = bool(np.all(means[: cfg.M - 1] == 1.0))
    run.check("free_means_exactly_one", free_exact, free_exact)
    run.check("precoded_mean_finite", float(means[-1]), bool(np.isfinite(means[-1])))
    run.report.update(null_bins=[bins[0], bins[-1]], papr=ratio, papr_db=papr_db(frame),
                      mean_papr=stats.mean_papr, per_position_mean=means.tolist())
    run.save(grid, "symbols")
    run.save(frame, "time")
    run.save(spec, "spectrum")
    run.save_table("magnitudes", ["position", "mean_magnitude"], _stats_table(stats))
    run.plot("spectrum", np.abs(spec.bins), "spectrum with trailing bins nulled", "flat frequency index")
    run.plot("time", np.abs(frame.samples), "time-domain magnitude", "sample index")
    run.plot("magnitudes", means, "mean |x_k(n)| over the precoded half", "position n")


def preset_custom(run: Run):
    cfg = run.config
    params = FrameParams(cfg.M, cfg.N)
    specs = to_specs(cfg.nulls)
    free = {s.k: s.free_positions(cfg.M) for s in specs}
    grid = draw_grid(SymbolSource("bpsk", cfg.seed), params, free_positions=free, substream=0)
    run.save(grid, "input_symbols")
    grid = precode_grid(grid, specs, cfg.mode)
    frame = modulate(grid)
    report = verify_nulls(frame, null_bins(specs, params), PRECODED_TOL)
    run.check("null_bins_max", report.max_magnitude, report.passed, PRECODED_TOL)
    run.report.update(papr=papr(frame), papr_db=papr_db(frame))
    run.save(grid, "precoded_symbols")
    run.save(frame, "time")
    run.save(spectrum(frame), "spectrum")


RUNNERS: dict[str, Callable[[Run], None]] = {
    "fig1": preset_fig1,
    "fig2": preset_fig2,
    "fig3": preset_fig3,
    "fig3b": preset_fig3b,
    "fig4suite": preset_fig4suite,
    "custom": preset_custom,
}


def run_preset(config: ExperimentConfig, out) -> dict:
    """Run one preset, write its files into ``out`` and return the summary."""
    run = Run(config, Path(out))
    try:
        RUNNERS[config.preset](run)
    except VofdmError as exc:
        raise VofdmError(f"preset {config.preset}: {exc}") from exc
    summary = run.summary()
    log.info("preset %s wrote %d files to %s", config.preset, len(run.files), run.out)
    (run.out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    return summary


def _cmd_run(args) -> int:
    config = build_config(args)
    summary = run_preset(config, args.out or f"out/{config.preset}")
    for c in summary["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {config.preset}.{c['name']} = {c['value']}"
              + (f" (tol {c['tol']})" if c["tol"] is not None else ""))
    return 0 if summary["passed"] else 1


def _cmd_transform(args) -> int:
    kind_in = {"modulate": "symbols", "demodulate": "time", "spectrum": "time",
               "precode": "symbols", "papr": "time"}[args.command]
    obj = load(args.inp, kind=kind_in, M=args.m, N=args.n, fmt_hint=args.in_format)
    if args.command == "modulate":
        result = modulate(obj)
    elif args.command == "demodulate":
        result = demodulate(obj)
    elif args.command == "spectrum":
        result = spectrum(obj)
    elif args.command == "precode":
        specs = to_specs(args.null or [])
        result = precode_grid(obj, specs, args.mode or "exact")
    else:
        doc = {"papr": papr(obj), "papr_db": papr_db(obj)}
        text = json.dumps(doc, indent=1) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    save(result, args.out, args.format)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vofdm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment preset")
    run.add_argument("preset", choices=PRESETS)
    run.add_argument("--m", type=int)
    run.add_argument("--n", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--k", type=int, help="vector index for fig3/fig3b")
    run.add_argument("--m-values", type=int, nargs="+", help="vector sizes swept by fig3b")
    run.add_argument("--null", type=parse_null, action="append", help="K:Z[:P] for the custom preset")
    run.add_argument("--mode", choices=("exact", "min_norm"))
    run.add_argument("--out")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--plot", choices=("none", "svg"))
    run.add_argument("--config", help="JSON file of ExperimentConfig fields")
    run.set_defaults(func=_cmd_run)

    for name in ("modulate", "demodulate", "spectrum", "precode", "papr"):
        p = sub.add_parser(name)
        p.add_argument("--in", dest="inp", required=True)
        p.add_argument("--out", required=name != "papr")
        p.add_argument("--m", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--format", choices=("csv", "json"), help="output format (default: from extension)")
        p.add_argument("--in-format", choices=("csv", "json"))
        if name == "precode":
            p.add_argument("--null", type=parse_null, action="append", required=True, help="K:Z[:P]")
            p.add_argument("--mode", choices=("exact", "min_norm"))
        p.set_defaults(func=_cmd_transform)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (VofdmError, OSError, ValueError) as exc:
        print(f"vofdm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
