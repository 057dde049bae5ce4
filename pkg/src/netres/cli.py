"""
Command-line front end.

    netres analyze  --graph G [--format json|csv]
    netres sweep    --graph G --node J [--F F] [--gamma G] [--omega-min A --omega-max B --steps N]
    netres rescale  --graph G --omega W --out G2
    netres simulate --graph G --node J --omega W [--F 1 --gamma 0.02 --dt 0.001] --t-end T [--ma-window N]
    netres beats    --input SIM.csv [--node I]
    netres demo     [--outdir DIR]

Every file written with ``--out`` gets a ``<file>.manifest.json`` next to it.
JSON written to stdout embeds the same manifest under ``"manifest"``; passing
such a document (or a manifest file) to ``--config`` re-runs with its parameters.

Exit codes: 0 success, 2 usage or input error, 3 model assumption violated
(not strongly connected / not symmetrizable), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import StimulusSpec, energy_sweep, mode_window, resonance_peak
from .beats import BeatConfig, detect_beats, omen_score
from .errors import DivergenceError, GraphFormatError, ModelAssumptionError, NumericalError
from .flaming import NoTargetModeError, plan_rescale, rescale_network
from .graph_core import format_graph, load_graph, symmetrize
from .simulator import SimConfig, default_ma_window, moving_average, run
from .spectral import eigendecompose

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_NUMERIC = 0, 2, 3, 4
SUBCOMMANDS = ("analyze", "sweep", "rescale", "simulate", "beats", "demo")


# ---------------------------------------------------------------- helpers

def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _worker_count() -> int:
    try:
        cap = int(os.environ.get("NETRES_THREADS", "0"))
    except ValueError:
        cap = 0
    cpus = os.cpu_count() or 1
    return max(1, min(cap, cpus) if cap > 0 else cpus)


def _manifest(command: str, params: dict, inputs: list[Path]) -> dict:
    return {
        "command": command,
        "parameters": params,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def _write_output(text: str, out: str | None, manifest: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    manifest = dict(manifest, outputs={str(path): _sha256(path)})
    Path(f"{path}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _json_doc(result: dict, manifest: dict) -> str:
    return json.dumps({"manifest": manifest, "result": result}, indent=2) + "\n"


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _load_spectrum(graph_path: str):
    g = load_graph(graph_path)
    sym = symmetrize(g)
    return g, sym, eigendecompose(sym)


def _params(args: argparse.Namespace, *names: str) -> dict:
    return {name: getattr(args, name) for name in names}


# ---------------------------------------------------------------- subcommands

def cmd_analyze(args) -> int:
    g, sym, spec = _load_spectrum(args.graph)
    manifest = _manifest("analyze", _params(args, "graph", "format"), [Path(args.graph)])
    if args.format == "csv":
        text = _csv_text(["mu", "lambda", "omega"], ((mu, float(l), float(w)) for mu, (l, w) in enumerate(zip(spec.lambdas, spec.omegas))))
    else:
        result = {
            "n": g.n,
            "symmetrizable": True,
            "m": sym.m.tolist(),
            "lambdas": spec.lambdas.tolist(),
            "omegas": spec.omegas.tolist(),
        }
        text = _json_doc(result, manifest)
    _write_output(text, args.out, manifest)
    return EXIT_OK


def _sweep_peaks(spec, sweep, node_j: int) -> list[dict]:
    peaks = []
    upper = float(sweep.omegas[-1])
    for mu in range(1, spec.n):
        predicted = resonance_peak(float(spec.omegas[mu]), sweep.stim.gamma)
        if predicted is None or predicted > upper:
            continue
        lo, hi = mode_window(spec, mu, upper)
        for i in range(spec.n):
            if abs(spec.vectors[i, mu] * spec.vectors[node_j, mu]) <= 0.05:
                continue
            center, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            observed = sweep.peak_near(i, center, half)
            peaks.append({"node": i, "mode": mu, "predicted": predicted, "observed": observed,
                          "within_one_step": abs(observed - predicted) <= sweep.step * (1 + 1e-9)})
    return peaks


def cmd_sweep(args) -> int:
    g, sym, spec = _load_spectrum(args.graph)
    stim = StimulusSpec(args.node, args.F, 0.0, args.gamma)
    omega_max = args.omega_max if args.omega_max is not None else 1.2 * float(spec.omegas[-1])
    grid = np.linspace(args.omega_min, omega_max, args.steps)
    sweep = energy_sweep(spec, stim, grid)
    params = _params(args, "graph", "node", "F", "gamma", "omega_min", "omega_max", "steps", "format")
    manifest = _manifest("sweep", params, [Path(args.graph)])
    if args.format == "csv":
        text = _csv_text(["omega", "node", "energy"], sweep.rows())
    else:
        result = {
            "omegas": sweep.omegas.tolist(),
            "energies": sweep.energies.tolist(),
            "eigenfrequencies": spec.omegas.tolist(),
            "peaks": _sweep_peaks(spec, sweep, args.node),
        }
        text = _json_doc(result, manifest)
    _write_output(text, args.out, manifest)
    return EXIT_OK


def cmd_rescale(args) -> int:
    g, sym, spec = _load_spectrum(args.graph)
    plan = plan_rescale(spec, args.omega)
    new = rescale_network(g, plan)
    manifest = _manifest("rescale", _params(args, "graph", "omega", "out"), [Path(args.graph)])
    _write_output(format_graph(new), args.out, dict(manifest, plan=plan.as_dict()))
    sys.stdout.write(json.dumps(plan.as_dict(), indent=2) + "\n")
    return EXIT_OK


def _simulate(graph_path: str, node: int, omega: float, F: float, gamma: float, dt: float, t_end: float,
              stride: int, ma_window: int | None):
    g, sym, spec = _load_spectrum(graph_path)
    stim = StimulusSpec(node, F, omega, gamma)
    config = SimConfig(dt, t_end, stim, stride=stride)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                sim = run(g, sym.m, config, omega_max=float(spec.omegas[-1]))
        finally:
            for w in caught:
                print(f"warning: {w.message}", file=sys.stderr)
    window = ma_window or default_ma_window(omega, dt, stride, len(sim.times))
    K_ma = moving_average(sim.K, window)
    return spec, sim, window, K_ma


def _simulation_rows(sim, window: int, K_ma: np.ndarray):
    offset = (window - 1) // 2
    n = sim.x.shape[1]
    for k, t in enumerate(sim.times):
        ma_row = k - offset
        for i in range(n):
            kma = float(K_ma[ma_row, i]) if 0 <= ma_row < len(K_ma) else None
            yield float(t), i, float(sim.x[k, i]), float(sim.v[k, i]), float(sim.K[k, i]), kma


def cmd_simulate(args) -> int:
    spec, sim, window, K_ma = _simulate(args.graph, args.node, args.omega, args.F, args.gamma, args.dt,
                                        args.t_end, args.stride, args.ma_window)
    params = _params(args, "graph", "node", "omega", "F", "gamma", "dt", "t_end", "stride", "ma_window", "format")
    params["ma_window_resolved"] = window
    manifest = _manifest("simulate", params, [Path(args.graph)])
    if args.format == "csv":
        text = _csv_text(["t", "node", "x", "v", "K", "K_ma"], _simulation_rows(sim, window, K_ma))
    else:
        result = {
            "times": sim.times.tolist(),
            "x": sim.x.tolist(),
            "v": sim.v.tolist(),
            "K": sim.K.tolist(),
            "K_ma": K_ma.tolist(),
            "K_ma_offset": (window - 1) // 2,
            "m": sim.m.tolist(),
        }
        text = _json_doc(result, manifest)
    _write_output(text, args.out, manifest)
    return EXIT_OK


def read_simulation_csv(path: str | Path) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Parse simulation CSV into the K_ma times and a per-node K_ma series."""
    per_node: dict[int, list[tuple[float, float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"t", "node", "K_ma"} - set(reader.fieldnames or [])
        if missing:
            raise GraphFormatError(f"simulation CSV lacks columns {sorted(missing)}")
        for row in reader:
            if row["K_ma"] == "":
                continue
            per_node.setdefault(int(row["node"]), []).append((float(row["t"]), float(row["K_ma"])))
    if not per_node:
        raise GraphFormatError("simulation CSV has no K_ma samples")
    first = next(iter(per_node.values()))
    times = np.array([t for t, _ in first])
    return times, {i: np.array([k for _, k in rows]) for i, rows in per_node.items()}


def _beat_reports(times, series: dict[int, np.ndarray], spec, omega, gamma, F, node_j, nodes):
    from .analytic import oscillation_energies

    peak_energy = None
    reports = []
    for i in nodes:
        rep = detect_beats(series[i], times, omega=omega, spectrum=spec, gamma=gamma, node=i)
        doc = rep.as_dict()
        if spec is not None and omega and gamma and node_j is not None:
            if peak_energy is None:
                mu = rep.mode
                w_peak = resonance_peak(float(spec.omegas[mu]), gamma) or float(spec.omegas[mu])
                peak_energy = oscillation_energies(spec, StimulusSpec(node_j, F or 1.0, w_peak, gamma))
            doc["omen_score"] = omen_score(rep, float(peak_energy[i]))
        reports.append(doc)
    return reports


def cmd_beats(args) -> int:
    times, series = read_simulation_csv(args.input)
    sim_params = {}
    manifest_path = Path(f"{args.input}.manifest.json")
    inputs = [Path(args.input)]
    if manifest_path.exists():
        sim_params = json.loads(manifest_path.read_text(encoding="utf-8")).get("parameters", {})
    omega = args.omega if args.omega is not None else sim_params.get("omega")
    gamma = args.gamma if args.gamma is not None else sim_params.get("gamma")
    graph = args.graph if args.graph is not None else sim_params.get("graph")
    spec = None
    if graph is not None:
        _, _, spec = _load_spectrum(graph)
        inputs.append(Path(graph))
    nodes = sorted(series) if args.node is None else [args.node]
    for i in nodes:
        if i not in series:
            raise GraphFormatError(f"node {i} not present in {args.input}")
    reports = _beat_reports(times, series, spec, omega, gamma, sim_params.get("F"), sim_params.get("node"), nodes)
    params = dict(_params(args, "input", "node", "format"), omega=omega, gamma=gamma, graph=graph)
    manifest = _manifest("beats", params, inputs)
    _write_output(_json_doc({"reports": reports}, manifest), args.out, manifest)
    return EXIT_OK


def _demo_graph(name: str, outdir: str) -> dict:
    from .data import path as data_path

    src = Path(outdir) / name
    src.parent.mkdir(parents=True, exist_ok=True)
    src.write_text(Path(data_path(name)).read_text(encoding="utf-8"), encoding="utf-8")
    stem = src.with_suffix("")
    g, sym, spec = _load_spectrum(str(src))
    w1 = float(spec.omegas[1])
    omega_sim = w1 - 0.05
    t_end = round(2.5 * 2 * math.pi / 0.05, 1)
    steps = [
        ["analyze", "--graph", str(src), "--out", f"{stem}_analyze.json"],
        ["sweep", "--graph", str(src), "--node", "0", "--gamma", "0.02", "--format", "csv", "--out", f"{stem}_sweep.csv"],
        ["rescale", "--graph", str(src), "--omega", repr(1.1 * w1), "--out", f"{stem}_rescaled.txt"],
        ["simulate", "--graph", str(src), "--node", "0", "--omega", repr(omega_sim), "--F", "1.0", "--gamma", "0.02",
         "--dt", "0.001", "--t-end", repr(t_end), "--format", "csv", "--out", f"{stem}_simulate.csv"],
        ["beats", "--input", f"{stem}_simulate.csv", "--out", f"{stem}_beats.json"],
    ]
    codes = []
    for argv in steps:
        code = main(argv, _quiet=True)
        codes.append(code)
        if code != EXIT_OK:
            break
    outputs = sorted(str(p) for p in Path(outdir).glob(f"{stem.name}_*"))
    return {"graph": name, "exit_codes": codes, "outputs": outputs}


def cmd_demo(args) -> int:
    names = ["graph4.txt", "graph5.txt"]
    workers = min(_worker_count(), len(names))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_demo_graph, names, [args.outdir] * len(names)))
    else:
        summaries = [_demo_graph(n, args.outdir) for n in names]
    sys.stdout.write(json.dumps({"demo": summaries}, indent=2) + "\n")
    failed = [c for s in summaries for c in s["exit_codes"] if c != EXIT_OK]
    return failed[0] if failed else EXIT_OK


# ---------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netres", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"netres {__version__}")
    parser.add_argument("--config", help="JSON output or manifest whose parameters become defaults")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def common(p, formats=("json", "csv"), default="json"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", help="write here (plus a .manifest.json) instead of stdout")

    p = sub.add_parser("analyze", help="eigenvalues and eigenfrequencies of a graph")
    p.add_argument("--graph", required=True)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="oscillation energy of each node over a frequency grid")
    p.add_argument("--graph", required=True)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--F", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.02)
    p.add_argument("--omega-min", type=float, default=0.0)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=2000)
    common(p, default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rescale", help="shift the nearest eigenfrequency at or below omega onto omega")
    p.add_argument("--graph", required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rescale)

    p = sub.add_parser("simulate", help="explicit time stepping from rest")
    p.add_argument("--graph", required=True)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--F", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.02)
    p.add_argument("--dt", type=float, default=0.001)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--ma-window", type=int, default=None)
    common(p, default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("beats", help="beat report per node from a simulation CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--node", type=int, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--graph", default=None)
    common(p, formats=("json",))
    p.set_defaults(func=cmd_beats)

    p = sub.add_parser("demo", help="run the whole pipeline on the bundled 4- and 5-node graphs")
    p.add_argument("--outdir", default="netres-demo")
    p.set_defaults(func=cmd_demo)
    return parser


def _config_argv(path: str, argv: list[str]) -> list[str]:
    """Splice parameters from a JSON document or manifest in front of explicit flags."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    manifest = doc.get("manifest", doc)
    command = manifest.get("command")
    params = manifest.get("parameters", {})
    explicit = [a for a in argv if a in SUBCOMMANDS]
    if explicit:
        command = explicit[0]
        argv = [a for a in argv if a != command]
    if command not in SUBCOMMANDS:
        raise GraphFormatError(f"{path}: no recognizable command in config")
    injected = []
    for key, value in params.items():
        if value is None or key.endswith("_resolved"):
            continue
        injected += [f"--{key.replace('_', '-')}" if key not in ("F",) else "--F", str(value)]
    return [command] + injected + argv


def main(argv: list[str] | None = None, _quiet: bool = False) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--config" in argv:
        k = argv.index("--config")
        if k + 1 >= len(argv):
            print("netres: error: --config needs a path", file=sys.stderr)
            return EXIT_USAGE
        path = argv[k + 1]
        rest = argv[:k] + argv[k + 2:]
        try:
            argv = _config_argv(path, rest)
        except (OSError, ValueError) as exc:
            print(f"netres: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    stdout = sys.stdout
    try:
        if _quiet:
            sys.stdout = io.StringIO()
        return args.func(args)
    except ModelAssumptionError as exc:
        print(f"netres: model assumption violated: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (DivergenceError, NumericalError) as exc:
        print(f"netres: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphFormatError, NoTargetModeError, OSError, ValueError, IndexError) as exc:
        print(f"netres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        sys.stdout = stdout


if __name__ == "__main__":
    sys.exit(main())
