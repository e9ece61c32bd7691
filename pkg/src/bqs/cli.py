"""Command-line front end: ingest traces, compress, simulate, benchmark.

Subcommands: ``compress`` (one algorithm, metric report plus key output),
``compare`` (several algorithms side by side), ``abqs-sim`` (drive the
amnesic store over a stream or scripted scenario), ``generate`` (synthetic
traces), ``bench`` (timing harness).

Traces are CSV with header ``t,x,y`` (seconds, meters), optionally
``vx,vy`` velocity columns, or ``t,lat,lon`` degrees with ``--geo``; geo
input is projected onto the tangent plane of the first row at ingest.
Coordinates are written with nine fractional digits, which round-trips
bit-exactly at the magnitudes the toolkit works in.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 storage
exhausted.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import sys
import time
from typing import Dict, List, Optional, Sequence, Tuple

import click
import numpy as np

from .amnesic import AgedPoint, AmnesicStore, dump_store, storyboard_stream
from .baselines import BufferConfig, bdp_compress, bgd_compress, dead_reckoning, dp_compress
from .core import CompressedTrajectory, CompressorState, Mode, Stats, compress_with_stats
from .errors import StorageExhausted, ToleranceOrder, TrajectoryError
from .fastpath import fast_key_indices, warm_up
from .geometry import GeoPoint, Point, project, segment_distances
from .metrics import MetricReport, evaluate, time_sync_error
from .synth import SHAPE_KINDS, WalkConfig, correlated_walk, shape

ALGORITHMS = ("bqs", "fbqs", "pbqs", "abqs", "dp", "bdp", "bgd", "dr")
BENCH_ALGORITHMS = ALGORITHMS[:3] + ("fbqs_kernel",) + ALGORITHMS[4:]


class ConfigError(click.ClickException):
    exit_code = 2


class DataError(click.ClickException):
    exit_code = 3


class StorageError(click.ClickException):
    exit_code = 4


# -- trace I/O ---------------------------------------------------------------


def read_trace(path: str, geo: bool = False) -> List[Point]:
    """Parse a trace CSV; malformed rows report their line number."""
    points: List[Point] = []
    origin: Optional[GeoPoint] = None
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}")
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if geo:
            if header[:3] != ["t", "lat", "lon"]:
                raise DataError(f"{path}: expected header t,lat,lon, got {header}")
        elif header[:3] != ["t", "x", "y"]:
            raise DataError(f"{path}: expected header t,x,y, got {header}")
        has_velocity = header[3:5] == ["vx", "vy"]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed row {row!r}")
            if len(values) < 3:
                raise DataError(f"{path}:{lineno}: expected at least 3 columns")
            if geo:
                gp = GeoPoint(values[0], values[1], values[2])
                if origin is None:
                    origin = gp
                points.append(project(origin, gp))
            elif has_velocity and len(values) >= 5:
                points.append(Point(values[0], values[1], values[2],
                                    values[3], values[4]))
            else:
                points.append(Point(values[0], values[1], values[2]))
    if not points:
        raise DataError(f"{path}: no data rows")
    return points


def write_trace(path_or_stream, points: Sequence[Point]) -> None:
    """Write points as CSV with nine fractional digits."""
    stream = path_or_stream
    close = False
    if isinstance(path_or_stream, str):
        stream = open(path_or_stream, "w", newline="")
        close = True
    try:
        with_velocity = all(p.vx is not None and p.vy is not None for p in points)
        stream.write("t,x,y,vx,vy\n" if with_velocity else "t,x,y\n")
        for p in points:
            row = f"{p.t:.9f},{p.x:.9f},{p.y:.9f}"
            if with_velocity:
                row += f",{p.vx:.9f},{p.vy:.9f}"
            stream.write(row + "\n")
    finally:
        if close:
            stream.close()


# -- shared run plumbing -----------------------------------------------------


def _run_algorithm(algo: str, points: Sequence[Point], epsilon: float, *,
                   epsilon_prev: float = 0.0, buffer_size: int = 32,
                   slots: int = 2400, k: int = 8, multiplier: float = 2.5,
                   r_init: int = 5) -> Tuple[CompressedTrajectory, Optional[Stats], float]:
    """Run one algorithm; returns (trajectory, bound stats or None, seconds)."""
    if epsilon <= 0.0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    start = time.perf_counter()
    stats: Optional[Stats] = None
    try:
        if algo == "bqs":
            traj, stats, _ = compress_with_stats(points, epsilon, r_init=r_init)
        elif algo == "fbqs":
            traj, stats, _ = compress_with_stats(points, epsilon, mode=Mode.FAST,
                                                 r_init=r_init)
        elif algo == "pbqs":
            if epsilon_prev < 0.0:
                raise ConfigError("epsilon-prev must be nonnegative")
            traj, stats, _ = compress_with_stats(points, epsilon, mode=Mode.FAST,
                                                 epsilon_prev=epsilon_prev,
                                                 r_init=r_init)
        elif algo == "abqs":
            store = AmnesicStore(slots, epsilon, k=k, multiplier=multiplier,
                                 r_init=r_init)
            for p in points:
                store.insert(p)
            traj = CompressedTrajectory([ap.point for ap in store.export()])
        elif algo == "dp":
            traj = dp_compress(points, epsilon)
        elif algo == "bdp":
            traj = bdp_compress(points, epsilon, BufferConfig(buffer_size))
        elif algo == "bgd":
            traj = bgd_compress(points, epsilon, BufferConfig(buffer_size))
        elif algo == "dr":
            traj = dead_reckoning(points, epsilon)
        else:
            raise ConfigError(f"unknown algorithm {algo!r}")
    except ToleranceOrder as exc:
        raise ConfigError(str(exc))
    except StorageExhausted as exc:
        raise StorageError(str(exc))
    except TrajectoryError as exc:
        raise DataError(str(exc))
    except ValueError as exc:
        raise ConfigError(str(exc))
    return traj, stats, time.perf_counter() - start


def _report_dict(algo: str, report: MetricReport) -> Dict[str, object]:
    out: Dict[str, object] = {"algorithm": algo}
    out.update(dataclasses.asdict(report))
    return out


def _print_table(rows: List[Dict[str, object]]) -> None:
    cols = [("algorithm", "{}"), ("key_count", "{}"), ("compression_rate", "{:.4f}"),
            ("pruning_power", "{:.4f}"), ("max_deviation", "{:.3f}"),
            ("mean_sync_error", "{:.3f}"), ("wall_time", "{:.3f}")]
    header = ["algo", "keys", "rate", "alpha", "max_dev_m", "sync_err_m", "seconds"]
    widths = [max(len(h), 10) for h in header]
    click.echo("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        cells = [fmt.format(row[name]) for name, fmt in cols]
        click.echo("  ".join(c.rjust(w) for c, w in zip(cells, widths)))


def _emit(rows: List[Dict[str, object]], as_json: bool,
          report_path: Optional[str]) -> None:
    payload = rows[0] if len(rows) == 1 else rows
    if report_path:
        with open(report_path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if as_json:
        click.echo(json.dumps(payload, indent=2))
    else:
        _print_table(rows)


# -- commands ----------------------------------------------------------------


@click.group()
def main() -> None:
    """Streaming trajectory compression toolkit."""


_COMMON = [
    click.option("--epsilon", type=float, required=True,
                 help="Error tolerance in meters."),
    click.option("--input", "input_path", required=True,
                 type=click.Path(exists=True, dir_okay=False),
                 help="Trace CSV (t,x,y[,vx,vy] or t,lat,lon with --geo)."),
    click.option("--geo", is_flag=True, help="Input is t,lat,lon degrees."),
    click.option("--buffer", "buffer_size", type=int, default=32,
                 show_default=True, help="Window capacity for bdp/bgd."),
    click.option("--r-init", type=int, default=5, show_default=True,
                 help="Calibration window length for the quadrant machines."),
    click.option("--json", "as_json", is_flag=True,
                 help="Machine-readable report on stdout."),
    click.option("--report", "report_path", type=click.Path(dir_okay=False),
                 help="Also write the JSON report to this path."),
]


def _with(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


@main.command()
@click.option("--algo", type=click.Choice(ALGORITHMS), required=True)
@click.option("--epsilon-prev", type=float, default=0.0, show_default=True,
              help="Existing tolerance of the input keys (pbqs).")
@click.option("--slots", type=int, default=2400, show_default=True,
              help="Storage slot count (abqs).")
@click.option("--k", type=int, default=8, show_default=True,
              help="Reserved slots for incoming points (abqs).")
@click.option("--multiplier", type=float, default=2.5, show_default=True,
              help="Tolerance multiplier per age step (abqs).")
@click.option("--output", "output_path", type=click.Path(dir_okay=False),
              help="Write the kept key points as CSV.")
@_with(_COMMON)
def compress(algo, epsilon_prev, slots, k, multiplier, output_path, epsilon,
             input_path, geo, buffer_size, r_init, as_json, report_path):
    """Compress one trace with one algorithm and report metrics."""
    points = read_trace(input_path, geo)
    traj, stats, seconds = _run_algorithm(
        algo, points, epsilon, epsilon_prev=epsilon_prev,
        buffer_size=buffer_size, slots=slots, k=k, multiplier=multiplier,
        r_init=r_init)
    report = evaluate(points, traj,
                      full_calcs=stats.full_calc_count if stats else 0,
                      decisions=stats.total if stats else 0,
                      wall_time=seconds)
    if output_path:
        write_trace(output_path, traj.keys)
    _emit([_report_dict(algo, report)], as_json, report_path)


@main.command()
@click.option("--algos", default="bqs,fbqs,dp,bdp,bgd", show_default=True,
              help="Comma-separated algorithm list.")
@click.option("--epsilon-prev", type=float, default=0.0, show_default=True)
@_with(_COMMON)
def compare(algos, epsilon_prev, epsilon, input_path, geo, buffer_size,
            r_init, as_json, report_path):
    """Run several algorithms on one trace and tabulate the metrics."""
    names = [a.strip() for a in algos.split(",") if a.strip()]
    unknown = [a for a in names if a not in ALGORITHMS]
    if unknown:
        raise ConfigError(f"unknown algorithms {unknown}; choose from {ALGORITHMS}")
    points = read_trace(input_path, geo)
    rows = []
    for algo in names:
        traj, stats, seconds = _run_algorithm(
            algo, points, epsilon, epsilon_prev=epsilon_prev,
            buffer_size=buffer_size, r_init=r_init)
        report = evaluate(points, traj,
                          full_calcs=stats.full_calc_count if stats else 0,
                          decisions=stats.total if stats else 0,
                          wall_time=seconds)
        rows.append(_report_dict(algo, report))
    _emit(rows, as_json, report_path)


def _aged_margin(original: Sequence[Point], exported: List[AgedPoint]) -> float:
    """Worst deviation of original points relative to the covering segment's
    tolerance; below 1.0 means every generation honours its bound."""
    kt = np.array([ap.point.t for ap in exported])
    kx = np.array([ap.point.x for ap in exported])
    ky = np.array([ap.point.y for ap in exported])
    tol = np.array([ap.tolerance for ap in exported])
    ot = np.array([p.t for p in original])
    ox = np.array([p.x for p in original])
    oy = np.array([p.y for p in original])
    seg = np.clip(np.searchsorted(kt, ot, side="right") - 1, 0, len(kt) - 2)
    worst = 0.0
    for j in np.unique(seg):
        mask = seg == j
        d = segment_distances(ox[mask], oy[mask], kx[j], ky[j], kx[j + 1], ky[j + 1])
        allowed = max(tol[j], tol[j + 1])
        worst = max(worst, float(d.max()) / allowed)
    return worst


@main.command("abqs-sim")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              help="Trace CSV to stream into the store.")
@click.option("--scenario", type=click.Choice(["fig8"]),
              help="Scripted scenario instead of an input file.")
@click.option("--epsilon", type=float, default=2.0, show_default=True)
@click.option("--slots", type=int, default=2400, show_default=True)
@click.option("--k", type=int, default=8, show_default=True)
@click.option("--multiplier", type=float, default=2.5, show_default=True)
@click.option("--r-init", type=int, default=5, show_default=True)
@click.option("--geo", is_flag=True)
@click.option("--front", type=click.Choice(["raw", "fbqs"]), default="raw",
              show_default=True,
              help="Feed raw points, or fast-machine keys at the base tolerance.")
@click.option("--dump", "dump_path", type=click.Path(dir_okay=False),
              help="Write the final store as a binary dump.")
@click.option("--json", "as_json", is_flag=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False))
def abqs_sim(input_path, scenario, epsilon, slots, k, multiplier, r_init, geo,
             front, dump_path, as_json, report_path):
    """Stream a trace through the amnesic store and audit the result."""
    if (input_path is None) == (scenario is None):
        raise ConfigError("provide exactly one of --input or --scenario")
    if scenario == "fig8":
        points = storyboard_stream(150)
        slots, k, epsilon, multiplier = 16, 4, 2.0, 5.0
    else:
        points = read_trace(input_path, geo)
    if front == "fbqs":
        stream = _run_algorithm("fbqs", points, epsilon, r_init=r_init)[0].keys
    else:
        stream = points
    try:
        store = AmnesicStore(slots, epsilon, k=k, multiplier=multiplier, r_init=r_init)
    except ValueError as exc:
        raise ConfigError(str(exc))
    checks = 0
    start = time.perf_counter()
    try:
        for p in stream:
            store.insert(p)
            head = store.index[0]
            if head.a > 0 and head.e > slots - k - head.a:
                raise RuntimeError(f"reserve law violated: {store.index}")
            checks += 1
    except StorageExhausted as exc:
        click.echo(f"storage exhausted after {checks} points: {exc}", err=True)
        click.echo(f"index snapshot: {[(e.a, e.s, e.e) for e in store.index]}",
                   err=True)
        raise StorageError(str(exc))
    except TrajectoryError as exc:
        raise DataError(str(exc))
    seconds = time.perf_counter() - start
    exported = store.export()
    keys = CompressedTrajectory([ap.point for ap in exported])
    _, sync_err = time_sync_error(points, keys)
    generations = [{"age": e.a, "tolerance": store.tolerance(e.a),
                    "slots": [e.s, e.e], "points": e.size}
                   for e in store.index]
    payload: Dict[str, object] = {
        "input_points": len(points),
        "stream_points": len(stream),
        "slots": slots,
        "storage_ratio": slots / len(points),
        "live_points": store.live_count,
        "generations": generations,
        "sink_passes": len(store.event_log),
        "invariant_checks": checks,
        "mean_sync_error": sync_err,
        "worst_deviation_vs_tolerance": _aged_margin(points, exported),
        "wall_time": seconds,
    }
    if dump_path:
        with open(dump_path, "wb") as fh:
            dump_store(store, fh)
    if report_path:
        with open(report_path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if as_json:
        click.echo(json.dumps(payload, indent=2))
        return
    if scenario == "fig8":
        click.echo("sinking storyboard (age, tolerance):")
        for ev in store.event_log:
            click.echo(
                f"  {ev.age_from}->{ev.age_to} tolerance "
                f"{store.tolerance(ev.age_from):g}->{store.tolerance(ev.age_to):g}  "
                f"slots[{ev.src_start},{ev.src_end}] -> {ev.keys_out} keys  "
                f"index {ev.index_after}")
    click.echo(f"stored {store.live_count}/{slots} slots after "
               f"{len(points)} points ({payload['storage_ratio']:.1%} ratio)")
    for gen in generations:
        click.echo(f"  age {gen['age']}: {gen['points']} points at "
                   f"tolerance {gen['tolerance']:g} m, slots {gen['slots']}")
    click.echo(f"mean sync error {sync_err:.3f} m; worst deviation at "
               f"{payload['worst_deviation_vs_tolerance']:.3f} of tolerance; "
               f"{len(store.event_log)} sink passes in {seconds:.3f}s")


@main.group()
def generate() -> None:
    """Write synthetic traces as CSV."""


@generate.command("walk")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n", type=int, default=30000, show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Gaussian measurement jitter sigma in meters.")
@click.option("--bounds", type=float, default=10000.0, show_default=True)
@click.option("--interval", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              help="Output CSV path (stdout when omitted).")
def generate_walk(seed, n, noise, bounds, interval, out_path):
    """Correlated random walk with velocity annotations."""
    try:
        cfg = WalkConfig(seed=seed, n_points=n, noise_sigma=noise,
                         bounds=bounds, sample_interval=interval)
    except ValueError as exc:
        raise ConfigError(str(exc))
    points = correlated_walk(cfg)
    write_trace(out_path if out_path else sys.stdout, points)


@generate.command("shape")
@click.argument("kind")
@click.option("--n", type=int, default=500, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def generate_shape(kind, n, out_path):
    """Deterministic stress shape; KIND is one of the known kinds."""
    try:
        points = shape(kind, n)
    except (TrajectoryError, ValueError) as exc:
        raise ConfigError(str(exc))
    write_trace(out_path if out_path else sys.stdout, points)


@main.command()
@click.option("--algos", default="fbqs,fbqs_kernel,dp", show_default=True)
@click.option("--epsilon", type=float, default=10.0, show_default=True)
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              help="Trace CSV; a walk is generated when omitted.")
@click.option("--n", type=int, default=100000, show_default=True,
              help="Generated walk length when no input is given.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--repeat", type=int, default=3, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def bench(algos, epsilon, input_path, n, seed, repeat, as_json):
    """Time algorithms; one untimed warm-up run per algorithm is excluded."""
    names = [a.strip() for a in algos.split(",") if a.strip()]
    unknown = [a for a in names if a not in BENCH_ALGORITHMS]
    if unknown:
        raise ConfigError(f"unknown algorithms {unknown}; choose from {BENCH_ALGORITHMS}")
    if repeat < 1:
        raise ConfigError("repeat must be at least 1")
    if input_path:
        points = read_trace(input_path, False)
    else:
        points = correlated_walk(WalkConfig(seed=seed, n_points=n))
    ts = np.ascontiguousarray([p.t for p in points])
    xs = np.ascontiguousarray([p.x for p in points])
    ys = np.ascontiguousarray([p.y for p in points])

    def once(algo: str) -> int:
        if algo == "fbqs_kernel":
            return fast_key_indices(ts, xs, ys, epsilon)[0].size
        traj, _, _ = _run_algorithm(algo, points, epsilon)
        return len(traj.keys)

    rows = []
    for algo in names:
        if algo == "fbqs_kernel":
            warm_up()
        keys = once(algo)  # warm-up, untimed
        samples = []
        for _ in range(repeat):
            start = time.perf_counter()
            once(algo)
            samples.append(time.perf_counter() - start)
        best = min(samples)
        rows.append({"algorithm": algo, "points": len(points), "keys": keys,
                     "seconds": best, "points_per_second": len(points) / best})
    if as_json:
        click.echo(json.dumps(rows, indent=2))
    else:
        for row in rows:
            click.echo(f"{row['algorithm']:>12}: {row['seconds']*1e3:9.2f} ms "
                       f"({row['points_per_second']:,.0f} pts/s, "
                       f"{row['keys']} keys)")


if __name__ == "__main__":
    main()
