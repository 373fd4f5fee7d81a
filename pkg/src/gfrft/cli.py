"""Command-line surface for graph construction, transforms, denoising
sweeps and timing benchmarks.

Subcommands: ``synth``, ``build-graph``, ``transform``, ``denoise``,
``bench``.  Every run is reproducible from its config plus seed; flags
override values loaded from ``--config`` JSON.  Exit codes: 0 success,
2 input/config error, 3 numerical-diagnostic failure in strict mode.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import denoise as dn
from .dataio import WeatherCube, day_matrix, load_weather, save_weather, synth_cube
from .graph import (
    DEFAULT_PERTURBATION,
    directed_line_graph,
    hermitian_laplacian,
    knn_graph,
    laplacian,
    load_edge_list,
    load_stations,
    save_edge_list,
    save_stations,
)
from .spectral import (
    fractional_laplacian,
    hermitian_fractional,
    product_fractional_laplacian,
)
from .transform import (
    box_forward,
    dgfrft_forward,
    frequency_order,
    kron_forward,
    save_spectrum,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_DIAGNOSTIC = 3

ALL_TRANSFORMS = ("box", "kron", "dgfrft")


class DiagnosticFailure(RuntimeError):
    """Numerical diagnostic tripped under --strict."""


@dataclass
class RunConfig:
    """One run's parameters; round-trips through JSON."""

    command: str = ""
    alpha: float = 0.7
    q: float = 0.5
    k: int = 5
    weight: str = "w1"
    epsilon: float = 4.0
    omega: int = 40
    seed: int = 0
    trials: int = 100
    days: int = 1
    day: int = 1
    transforms: tuple = ALL_TRANSFORMS
    stations_path: str | None = None
    weather_path: str | None = None
    graph_path: str | None = None
    out: str = "."
    data_dir: str | None = None
    strict: bool = False
    zero_perturbation: bool = False
    n_stations: int = 32
    n_hours: int = 24
    n_days: int = 31
    reps: int = 20

    def to_json(self) -> str:
        d = asdict(self)
        d["transforms"] = list(self.transforms)
        return json.dumps(d, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.transforms = tuple(cfg.transforms)
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed config JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ValueError("config JSON must be an object")
        return cls.from_dict(data)


def _resolve(cfg: RunConfig, explicit: str | None, default_name: str) -> Path:
    if explicit:
        return Path(explicit)
    root = cfg.data_dir or os.environ.get("GFRFT_DATA_DIR") or "."
    return Path(root) / default_name

def _selected_transforms(value: str) -> tuple:
    if value == "all":
        return ALL_TRANSFORMS
    return (value,)


def _perturbation(cfg: RunConfig) -> float:
    return 0.0 if cfg.zero_perturbation else DEFAULT_PERTURBATION


def _load_corpus(cfg: RunConfig) -> WeatherCube:
    stations = load_stations(_resolve(cfg, cfg.stations_path, "stations.csv"))
    return load_weather(_resolve(cfg, cfg.weather_path, "weather.csv"), stations)


def _station_graph(cfg: RunConfig, cube: WeatherCube):
    if cfg.graph_path:
        return load_edge_list(cfg.graph_path)
    signals = cube.station_series() if cfg.weight in ("w2", "w3") else None
    return knn_graph(
        cube.stations, cfg.k, cfg.weight,
        signals=signals, seed=cfg.seed, perturbation=_perturbation(cfg),
    )


def _check_strict(cfg: RunConfig, flagged: bool) -> None:
    if cfg.strict and flagged:
        raise DiagnosticFailure(
            "a factor power is complex (eigenvalue at -1); rerun without --strict "
            "to accept complex spectra"
        )


def _bundle(cfg: RunConfig, cube: WeatherCube):
    """Factorizations shared by the transform and denoise commands."""
    time_graph = directed_line_graph(cube.hours)
    station_graph = _station_graph(cfg, cube)
    f1 = fractional_laplacian(laplacian(time_graph), cfg.alpha)
    f2 = fractional_laplacian(laplacian(station_graph), cfg.alpha)
    _check_strict(cfg, f1.complex_flagged or f2.complex_flagged)
    out = {"f1": f1, "f2": f2, "order": frequency_order(f1, f2)}
    if "box" in cfg.transforms:
        out["product"] = product_fractional_laplacian(f1, f2)
    if "dgfrft" in cfg.transforms:
        h1 = hermitian_fractional(hermitian_laplacian(time_graph, cfg.q), cfg.alpha)
        h2 = hermitian_fractional(hermitian_laplacian(station_graph, cfg.q), cfg.alpha)
        _check_strict(cfg, h1.complex_flagged or h2.complex_flagged)
        out["h1"], out["h2"] = h1, h2
        out["order_q"] = frequency_order(h1, h2)
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_synth(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cube = synth_cube(cfg.n_stations, cfg.n_hours, cfg.n_days, seed=cfg.seed)
    save_stations(cube.stations, out / "stations.csv")
    save_weather(cube, out / "weather.csv")
    print(f"wrote {out / 'stations.csv'} and {out / 'weather.csv'} "
          f"({cube.days} days x {cube.hours} hours x {cube.stations.n} stations)")
    return EXIT_OK


def cmd_build_graph(cfg: RunConfig) -> int:
    stations = load_stations(_resolve(cfg, cfg.stations_path, "stations.csv"))
    signals = None
    if cfg.weight in ("w2", "w3"):
        cube = load_weather(_resolve(cfg, cfg.weather_path, "weather.csv"), stations)
        signals = cube.station_series()
    g = knn_graph(stations, cfg.k, cfg.weight, signals=signals, seed=cfg.seed,
                  perturbation=_perturbation(cfg))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"graph_{cfg.weight}.csv"
    save_edge_list(g, path)
    edges = int(np.count_nonzero(g.adjacency))
    print(f"wrote {path} ({g.n} vertices, {edges} directed edges)")
    return EXIT_OK


def cmd_transform(cfg: RunConfig) -> int:
    cube = _load_corpus(cfg)
    bundle = _bundle(cfg, cube)
    x = day_matrix(cube, cfg.day)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    meta_common = {
        "alpha": cfg.alpha,
        "weight": cfg.weight,
        "day": cfg.day,
        "dims": [cube.hours, cube.stations.n],
        "seed": cfg.seed,
        "omega": cfg.omega,
    }
    for tag in cfg.transforms:
        if tag == "box":
            fl = bundle["product"]
            sp = box_forward(fl, x)
            freqs = fl.values
            order = None
        elif tag == "kron":
            sp = kron_forward(bundle["f1"], bundle["f2"], x)
            order = bundle["order"]
            freqs = order.taus
        else:
            sp = dgfrft_forward([bundle["h1"], bundle["h2"]], x)
            order = bundle["order_q"]
            freqs = order.taus
        frac = dn.energy_fraction(sp, cfg.omega, order=order)
        if order is None:
            y1, y2 = sp.y1, sp.y2
        else:
            idx = np.ravel_multi_index(np.array(order.pairs).T, sp.dims)
            y1 = sp.y1[idx]
            y2 = sp.y2[idx] if sp.y2.size else None
        meta = dict(meta_common, transform=tag,
                    energy_fraction_at_omega=frac,
                    max_abs_imag=float(np.abs(np.asarray(y1).imag).max(initial=0.0)))
        if tag == "dgfrft":
            meta["q"] = cfg.q
            meta["columns"] = "y1=Re, y2=Im"
        save_spectrum(out / f"spectrum_{tag}.csv", freqs, y1, y2, meta=meta)
        print(f"{tag}: energy fraction in first {cfg.omega} of {sp.n} frequencies = {frac:.4f}")
    return EXIT_OK


def cmd_denoise(cfg: RunConfig) -> int:
    cube = _load_corpus(cfg)
    bundle = _bundle(cfg, cube)
    reports = []
    for day in range(1, cfg.days + 1):
        x = day_matrix(cube, day).matrix
        for trial in range(cfg.trials):
            seed = dn.trial_seed(cfg.seed, day, trial)
            spec = dn.NoiseSpec(epsilon=cfg.epsilon, seed=seed, limit=math.inf)
            xhat = dn.add_uniform_noise(x, spec)
            for tag in cfg.transforms:
                if tag == "box":
                    xt = dn.bandlimit_box(bundle["product"], xhat, cfg.omega)
                elif tag == "kron":
                    xt = dn.bandlimit_kron(bundle["f1"], bundle["f2"], xhat, cfg.omega,
                                           order=bundle["order"])
                else:
                    xt = dn.bandlimit_dgfrft(bundle["h1"], bundle["h2"], xhat, cfg.omega,
                                             order=bundle["order_q"])
                reports.append(dn.metrics(
                    x, xhat, xt,
                    omega=cfg.omega, transform=tag, weight=cfg.weight,
                    alpha=cfg.alpha, epsilon=cfg.epsilon, seed=seed,
                    day=day, trial=trial,
                ))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    dn.write_trial_rows(reports, out / "denoise_trials.csv")
    summary = dn.aggregate_reports(reports)
    dn.write_summary(summary, out / "denoise_summary.json")
    for row in summary:
        print(f"{row['transform']:7s} mean ISNR={row['mean_isnr']:.4f} dB  "
              f"mean SNR={row['mean_snr']:.4f} dB  mean BAE={row['mean_bae']:.4f}")
    return EXIT_OK


def _median_time(fn, reps: int) -> float:
    times = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def cmd_bench(cfg: RunConfig) -> int:
    """Time the frequency-component pipelines at the configured sizes."""
    cube = synth_cube(cfg.n_stations, cfg.n_hours, days=2, seed=cfg.seed)
    time_graph = directed_line_graph(cfg.n_hours)
    station_graph = knn_graph(cube.stations, min(cfg.k, cfg.n_stations - 1), "w1",
                              seed=cfg.seed, perturbation=_perturbation(cfg))
    l1 = laplacian(time_graph)
    l2 = laplacian(station_graph)

    def run_kron():
        fractional_laplacian(l1, cfg.alpha)
        fractional_laplacian(l2, cfg.alpha)

    def run_box():
        f1 = fractional_laplacian(l1, cfg.alpha)
        f2 = fractional_laplacian(l2, cfg.alpha)
        product_fractional_laplacian(f1, f2)

    def run_dgfrft():
        hermitian_fractional(hermitian_laplacian(time_graph, cfg.q), cfg.alpha)
        hermitian_fractional(hermitian_laplacian(station_graph, cfg.q), cfg.alpha)

    t_kron = _median_time(run_kron, cfg.reps)
    t_box = _median_time(run_box, cfg.reps)
    t_dgfrft = _median_time(run_dgfrft, cfg.reps)
    speedup = t_box / t_kron if t_kron > 0 else math.inf
    report = {
        "n1": cfg.n_hours,
        "n2": cfg.n_stations,
        "alpha": cfg.alpha,
        "reps": cfg.reps,
        "median_seconds": {"box": t_box, "kron": t_kron, "dgfrft": t_dgfrft},
        "speedup_kron_vs_box": speedup,
    }
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.json").write_text(json.dumps(report, indent=2))
    print(f"box   : {t_box * 1e3:9.3f} ms  (full {cfg.n_hours * cfg.n_stations}-point factorization)")
    print(f"kron  : {t_kron * 1e3:9.3f} ms  (factor-wise)")
    print(f"dgfrft: {t_dgfrft * 1e3:9.3f} ms  (factor-wise, Hermitian)")
    print(f"separable speedup over product factorization: {speedup:.1f}x")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON config file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--alpha", type=float, default=None)
    common.add_argument("--q", type=float, default=None)
    common.add_argument("--k", type=int, default=None)
    common.add_argument("--omega", type=int, default=None)
    common.add_argument("--epsilon", type=float, default=None)
    common.add_argument("--weight", choices=["w1", "w2", "w3"], default=None)
    common.add_argument("--transform", choices=["box", "kron", "dgfrft", "all"], default=None)
    common.add_argument("--out", type=str, default=None)
    common.add_argument("--data-dir", type=str, default=None,
                        help="data root (default: $GFRFT_DATA_DIR or '.')")
    common.add_argument("--stations", dest="stations_path", type=str, default=None)
    common.add_argument("--weather", dest="weather_path", type=str, default=None)
    common.add_argument("--graph", dest="graph_path", type=str, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--days", type=int, default=None)
    common.add_argument("--day", type=int, default=None)
    common.add_argument("--reps", type=int, default=None)
    common.add_argument("--stations-count", dest="n_stations", type=int, default=None)
    common.add_argument("--hours-count", dest="n_hours", type=int, default=None)
    common.add_argument("--days-count", dest="n_days", type=int, default=None)
    common.add_argument("--strict", action="store_true", default=None)
    common.add_argument("--zero-perturbation", action="store_true", default=None,
                        dest="zero_perturbation")

    parser = argparse.ArgumentParser(
        prog="gfrft",
        description="fractional spectral transforms and denoising on directed product graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    sub.add_parser("build-graph", parents=[common], help="k-NN station graph to edge-list CSV")
    sub.add_parser("transform", parents=[common], help="spectra of one day's signal")
    sub.add_parser("denoise", parents=[common], help="noise/bandlimit sweep with metrics")
    sub.add_parser("bench", parents=[common], help="frequency-component timing comparison")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        cfg = RunConfig.from_json(Path(args.config).read_text())
    else:
        cfg = RunConfig()
    cfg.command = args.command
    overrides = {
        "seed": args.seed, "alpha": args.alpha, "q": args.q, "k": args.k,
        "omega": args.omega, "epsilon": args.epsilon, "weight": args.weight,
        "out": args.out, "data_dir": args.data_dir,
        "stations_path": args.stations_path, "weather_path": args.weather_path,
        "graph_path": args.graph_path, "trials": args.trials, "days": args.days,
        "day": args.day, "reps": args.reps, "n_stations": args.n_stations,
        "n_hours": args.n_hours, "n_days": args.n_days,
        "strict": args.strict, "zero_perturbation": args.zero_perturbation,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    if args.transform is not None:
        cfg.transforms = _selected_transforms(args.transform)
    return cfg


COMMANDS = {
    "synth": cmd_synth,
    "build-graph": cmd_build_graph,
    "transform": cmd_transform,
    "denoise": cmd_denoise,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return COMMANDS[args.command](cfg)
    except DiagnosticFailure as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
