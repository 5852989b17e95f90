import argparse
import json
import os
import sys
from typing import Dict, List, Optional

import numpy as np

from diracflow.common.config import RunConfig
from diracflow.common.errors import DiracFlowError, UsageError, ValidationError
from diracflow.common.logger import Logger
from diracflow.common.utils import config_hash, max_abs, set_seeds
from diracflow.diagnostics.checks import DiagnosticContext, run_checks
from diracflow.flow.runner import FlowRunner
from diracflow.flow.state import dump_trajectory, initial_state, load_trajectory
from diracflow.geometry.complex import OrientedComplex, build_complex, euler_characteristic
from diracflow.geometry.graph import graph_from_spec
from diracflow.geometry.operators import dirac, dump_operator
from diracflow.oracles.circle import circle_exact_deviation, circle_model_evolve, circle_model_init, circle_model_limit
from diracflow.oracles.k2 import k2_compare, k2_complex, k2_inflection
from diracflow.oracles.k3 import VARIABLES, k3_compare, k3_complex
from diracflow.spectral.connes import connes_distance
from diracflow.spectral.inflation import inflation_report
from diracflow.spectral.wave import wave_energy, wave_solve, wave_velocity
from diracflow.spectral.zeta import circle_graph_zeta, dirac_zeta, write_zeta_grid, zeta_grid, zeta_spec

CONFIG_FLAGS = {
    "graph": "graph_path",
    "beta": "beta",
    "gamma": "gamma",
    "t_end": "t_end",
    "h": "h",
    "seed": "seed",
    "output_dir": "output_dir",
    "observers": "observers",
    "checks": "checks",
    "snapshot_every": "snapshot_every",
    "poly": "flow_poly",
    "formats": "formats",
}


def _comma_list(text: str) -> List[str]:
    return [item for item in text.split(",") if item]


def _load_config(args: argparse.Namespace, need_graph: bool = True) -> RunConfig:
    overrides = {}
    for flag, key in CONFIG_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "no_unitary", False):
        overrides["with_unitary"] = False
    if getattr(args, "config", None):
        config = RunConfig.from_json(args.config, **overrides)
    else:
        config = RunConfig().update(overrides)
    config.validate(need_graph=need_graph)
    set_seeds(config.seed)
    return config


def _header(args: argparse.Namespace) -> str:
    values = {k: v for k, v in vars(args).items() if k not in ("output_dir", "formats", "func")}
    return "config-hash: {}".format(config_hash(values))


def _complex(spec: str, seed: int = 0) -> OrientedComplex:
    graph = graph_from_spec(spec, seed)
    if not graph.vertices:
        raise ValidationError("graph {!r} has no vertices".format(spec))
    return build_complex(graph)


def _write_json(output_dir: str, name: str, doc: Dict, header: str) -> str:
    os.makedirs(output_dir, exist_ok=True)
    doc = dict(doc)
    doc["provenance"] = header
    path = os.path.join(output_dir, name)
    with open(path, "w") as file:
        json.dump(doc, file, indent=2)
        file.write("\n")
    return path


def _format_number(value: float) -> str:
    return "0" if abs(value) < 1e-9 else "{:.6g}".format(value)


def cmd_build(args: argparse.Namespace) -> int:
    c = _complex(args.graph, args.seed)
    D = dirac(c)
    spectrum = ", ".join(_format_number(x) for x in np.sort(D.eigvalsh()))
    f = ",".join(str(n) for n in c.f_vector)
    print("f=({}) chi={} spec=[{}]".format(f, euler_characteristic(c), spectrum))
    if args.dump:
        doc = dump_operator(D)
        doc["provenance"] = _header(args)
        with open(args.dump, "w") as file:
            json.dump(doc, file)
            file.write("\n")
    return 0


def _run(config: RunConfig, log: bool = True):
    c = _complex(config.graph_path, config.seed)
    state = initial_state(c, config.beta, config.gamma, config.with_unitary)
    runner = FlowRunner(
        state,
        config.t_end,
        h=config.h,
        observers=config.observers,
        snapshot_every=config.snapshot_every,
        flow_poly=config.flow_poly,
        log_mode=list(config.formats) if log else [],
        logdir=config.output_dir,
        header=config.header(),
    )
    return c, runner.run()


def cmd_flow(args: argparse.Namespace) -> int:
    config = _load_config(args)
    _, traj = _run(config)
    _write_json(config.output_dir, "trajectory.json", dump_trajectory(traj), config.header())
    final = traj.final
    print(
        "t={:g} norm_d={:.3e} spec_drift={:.3e} tr_M={:.6g}".format(
            final.t,
            max_abs(final.d.entries),
            max_abs(np.sort(final.dirac().eigvalsh()) - np.sort(traj.initial.dirac().eigvalsh())),
            float(np.real(np.trace(final.M().entries))),
        )
    )
    return 0


def cmd_diagnose(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if config.t_end < 0:
        raise UsageError("diagnostics run forward in time, got t_end={}".format(config.t_end))
    c, traj = _run(config)
    report = run_checks(config.check_names, DiagnosticContext(c, traj, config.h))
    report.write(config.output_dir, config.header(), config.formats)
    print(report.to_text())
    return 0 if report.passed else 1


def _read_json(path: str, what: str) -> Dict:
    try:
        with open(path, "r") as file:
            return json.load(file)
    except (OSError, ValueError) as err:
        raise UsageError("cannot read {} {}: {}".format(what, path, err))


def cmd_oracle_k2(args: argparse.Namespace) -> int:
    header = _header(args)
    if args.compare:
        traj = load_trajectory(_read_json(args.compare, "trajectory"))
    else:
        state = initial_state(k2_complex(), with_unitary=False)
        traj = FlowRunner(state, args.t_end, h=args.h, snapshot_every=args.snapshot_every).run()
    comparison = k2_compare(traj)
    inflection = k2_inflection()
    deviation = max(comparison.d_error, comparison.b_error)
    print("max deviation from closed form: {:.3e}".format(deviation))
    print("integral drift: {:.3e}".format(comparison.integral_drift))
    print("inflection t*={:.6f} slope={:.6f} (numeric t={:.6f} slope={:.6f})".format(*inflection))
    _write_json(args.output_dir, "oracle_k2.json", {**comparison._asdict(), **inflection._asdict()}, header)
    return 0 if deviation <= args.tol else 1


def cmd_oracle_k3(args: argparse.Namespace) -> int:
    header = _header(args)
    if args.compare:
        traj = load_trajectory(_read_json(args.compare, "trajectory"))
    else:
        gamma = tuple(args.gamma) if args.gamma else (1.0, 1.0)
        traj = FlowRunner(initial_state(k3_complex(), gamma=gamma, with_unitary=False), args.t_end, h=args.h).run()
    comparison = k3_compare(traj)
    inflation = inflation_report(traj)
    logger = Logger(args.output_dir, formats=_comma_list(args.formats or "csv"), name="oracle_k3", header=header)
    every = args.snapshot_every
    for t, y in zip(comparison.times[::every], comparison.values[::every]):
        logger.write({"t": float(t), **{name: float(v) for name, v in zip(VARIABLES, y)}}, "t")
    logger.close()
    print("reduced vs full: variables {:.3e}, matrices {:.3e}".format(comparison.variable_difference, comparison.matrix_difference))
    print("inflation bump t={:.6f} value={:.6g}".format(inflation.bump_time, inflation.bump_value))
    doc = {
        "gamma": list(traj.initial.gamma),
        "variable_difference": comparison.variable_difference,
        "matrix_difference": comparison.matrix_difference,
        "bump_time": inflation.bump_time,
        "bump_value": inflation.bump_value,
    }
    if args.compare:
        doc["compared"] = args.compare
    _write_json(args.output_dir, "oracle_k3.json", doc, header)
    return 0 if comparison.matrix_difference <= args.tol else 1


CIRCLE_RESULTS = ("norm_A", "limit_deviation", "invariant", "block_drift", "exact_deviation")


def _circle_differences(doc: Dict, path: str) -> Dict[str, float]:
    previous = _read_json(path, "circle result")
    if not isinstance(previous, dict) or previous.get("n") != doc["n"]:
        raise UsageError("{} is not an oracle circle result for n={}".format(path, doc["n"]))
    differences = {}
    for key in CIRCLE_RESULTS:
        if key not in previous:
            continue
        try:
            differences[key] = abs(doc[key] - float(previous[key]))
        except (TypeError, ValueError):
            raise UsageError("{} holds a non-numeric {}".format(path, key))
        print("{}: {:.3e} vs {:.3e}, diff {:.3e}".format(key, doc[key], float(previous[key]), differences[key]))
    if not differences:
        raise UsageError("{} holds none of {}".format(path, ", ".join(CIRCLE_RESULTS)))
    return differences


def cmd_oracle_circle(args: argparse.Namespace) -> int:
    header = _header(args)
    run = circle_model_evolve(circle_model_init(args.n), args.t_end, args.h, args.variant, args.snapshot_every)
    logger = Logger(args.output_dir, formats=_comma_list(args.formats or "csv"), name="oracle_circle", header=header)
    for i, t in enumerate(run.times):
        logger.write({"t": float(t), **{name: float(values[i]) for name, values in run.series.items()}}, "t")
    logger.close()
    final = run.final
    limit = circle_model_limit(args.n)
    deviation = min(max_abs(final.B - limit), max_abs(final.B + limit))
    doc = {
        "n": args.n,
        "norm_A": max_abs(final.A),
        "limit_deviation": deviation,
        "invariant": float(np.max(run.series["invariant"])),
        "block_drift": float(max(np.max(run.series["upper"]), np.max(run.series["lower"]))),
        "exact_deviation": circle_exact_deviation(run),
    }
    print(" ".join("{}={:.3e}".format(k, v) for k, v in doc.items() if k != "n"))
    worst = doc["exact_deviation"]
    if args.compare:
        differences = _circle_differences(doc, args.compare)
        doc["compared"] = args.compare
        doc["differences"] = differences
        worst = max(worst, max(differences.values()))
    _write_json(args.output_dir, "oracle_circle.json", doc, header)
    return 0 if worst <= args.tol else 1


def cmd_zeta(args: argparse.Namespace) -> int:
    header = _header(args)
    if args.kind == "graph":
        if not args.graph:
            raise UsageError("zeta graph needs --graph")
        spec = zeta_spec(dirac(_complex(args.graph, args.seed)))

        def fn(s):
            return dirac_zeta(spec, s)

    else:
        if args.n is None:
            raise UsageError("zeta circle-graph needs --n")
        sign, scale = (-1, 2.0) if args.spectral else (1, 1.0)

        def fn(s):
            return circle_graph_zeta(args.n, s, sign, scale)

    if args.grid:
        grid = zeta_grid(fn, (args.re_min, args.re_max), (args.im_min, args.im_max), args.step)
        write_zeta_grid(grid, args.output_dir, "zeta", header, _comma_list(args.formats or "csv"))
        print("wrote {} grid points".format(len(grid.values)))
    else:
        value = fn(complex(args.s[0], args.s[1]))
        print("zeta({:g}{:+g}i) = {:.10g}{:+.10g}i".format(args.s[0], args.s[1], value.real, value.imag))
    return 0


def cmd_wave(args: argparse.Namespace) -> int:
    header = _header(args)
    c = _complex(args.graph, args.seed)
    D = dirac(c)
    L = D @ D
    u0 = np.zeros(c.total_dim)
    v0 = np.zeros(c.total_dim)
    vertex = args.vertex if args.vertex is not None else c.vertices[0]
    for flag, v in (("--vertex", vertex), ("--velocity-vertex", args.velocity_vertex)):
        if v is not None and v not in c.vertices:
            raise UsageError("{} {} is not a vertex of the graph".format(flag, v))
    u0[c.index_of((vertex,))] = 1.0
    if args.velocity_vertex is not None:
        v0[c.index_of((args.velocity_vertex,))] = 1.0
    u = wave_solve(L, u0, v0, args.t, project_kernel=args.project_kernel)
    v = wave_velocity(L, u0, v0, args.t, project_kernel=args.project_kernel)
    v_start = wave_velocity(L, u0, v0, 0.0, project_kernel=args.project_kernel)
    doc = {
        "t": args.t,
        "u": [float(x) for x in np.real(u)],
        "energy_start": wave_energy(L, u0, v_start),
        "energy_end": wave_energy(L, u, v),
    }
    print("energy {:.10g} -> {:.10g}".format(doc["energy_start"], doc["energy_end"]))
    _write_json(args.output_dir, "wave.json", doc, header)
    return 0


def cmd_distance(args: argparse.Namespace) -> int:
    header = _header(args)
    c = _complex(args.graph, args.seed)
    state = initial_state(c, args.beta or 0.0, args.gamma, with_unitary=False)
    if args.t != 0:
        state = FlowRunner(state, args.t, h=args.h).run().final
    distance = connes_distance(state.free_part(), c, args.source, args.target, seed=args.seed)
    print(_format_number(distance) if np.isfinite(distance) else "inf")
    _write_json(
        args.output_dir,
        "distance.json",
        {"t": args.t, "from": args.source, "to": args.target, "distance": distance if np.isfinite(distance) else None},
        header,
    )
    return 0


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="json run configuration")
    parser.add_argument("--graph", help="edge-list file or builtin spec such as cycle:4")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--gamma", type=float, nargs="+")
    parser.add_argument("--t-end", dest="t_end", type=float)
    parser.add_argument("--h", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--observers", type=_comma_list)
    parser.add_argument("--checks")
    parser.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    parser.add_argument("--no-unitary", dest="no_unitary", action="store_true")
    parser.add_argument("--poly", type=float, nargs="+", help="coefficients of f in D' = f(L)[B,D]")
    parser.add_argument("--formats", type=_comma_list, help="comma separated logger formats")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", dest="output_dir", default="runs")
    parser.add_argument("--formats", default="csv")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diracflow", description="Isospectral deformation of graph Dirac operators")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    build = commands.add_parser("build", help="print f-vector, Euler characteristic and spectrum")
    build.add_argument("graph")
    build.add_argument("--dump", help="write D(0) as a matrix dump")
    build.add_argument("--seed", type=int, default=0)
    build.set_defaults(func=cmd_build)

    flow = commands.add_parser("flow", help="integrate the deformation")
    _add_run_flags(flow)
    flow.set_defaults(func=cmd_flow)

    diagnose = commands.add_parser("diagnose", help="run the diagnostics suite")
    _add_run_flags(diagnose)
    diagnose.set_defaults(func=cmd_diagnose)

    oracle = commands.add_parser("oracle", help="closed form and reduced references")
    oracles = oracle.add_subparsers(dest="oracle")
    oracles.required = True
    k2 = oracles.add_parser("k2")
    k2.add_argument("--compare", help="trajectory.json written by the flow command")
    k2.add_argument("--t-end", dest="t_end", type=float, default=3.0)
    k2.add_argument("--h", type=float, default=1e-3)
    k2.add_argument("--snapshot-every", dest="snapshot_every", type=int, default=10)
    k2.add_argument("--tol", type=float, default=1e-8)
    _add_output_flags(k2)
    k2.set_defaults(func=cmd_oracle_k2)
    k3 = oracles.add_parser("k3")
    k3.add_argument("--compare", help="trajectory.json of a real flow on complete:3")
    k3.add_argument("--gamma", type=float, nargs=2)
    k3.add_argument("--t-end", dest="t_end", type=float, default=3.0)
    k3.add_argument("--h", type=float, default=1e-3)
    k3.add_argument("--snapshot-every", dest="snapshot_every", type=int, default=10)
    k3.add_argument("--tol", type=float, default=1e-6)
    _add_output_flags(k3)
    k3.set_defaults(func=cmd_oracle_k3)
    circle = oracles.add_parser("circle")
    circle.add_argument("--n", type=int, default=8)
    circle.add_argument("--t-end", dest="t_end", type=float, default=10.0)
    circle.add_argument("--h", type=float, default=1e-3)
    circle.add_argument("--variant", choices=["display", "commutator"], default="display")
    circle.add_argument("--snapshot-every", dest="snapshot_every", type=int, default=10)
    circle.add_argument("--compare", help="oracle_circle.json of an earlier run with the same --n")
    circle.add_argument("--tol", type=float, default=1e-6)
    _add_output_flags(circle)
    circle.set_defaults(func=cmd_oracle_circle)

    zeta = commands.add_parser("zeta", help="Dirac zeta values and grids")
    zeta.add_argument("kind", choices=["graph", "circle-graph"])
    zeta.add_argument("--graph")
    zeta.add_argument("--n", type=int)
    zeta.add_argument("--spectral", action="store_true", help="use 2 sin(pi k/n) and exponent -s")
    zeta.add_argument("--s", type=float, nargs=2, default=[2.0, 0.0], metavar=("RE", "IM"))
    zeta.add_argument("--grid", action="store_true")
    zeta.add_argument("--re-min", dest="re_min", type=float, default=-1.5)
    zeta.add_argument("--re-max", dest="re_max", type=float, default=1.5)
    zeta.add_argument("--im-min", dest="im_min", type=float, default=0.0)
    zeta.add_argument("--im-max", dest="im_max", type=float, default=18.0)
    zeta.add_argument("--step", type=float, default=0.05)
    _add_output_flags(zeta)
    zeta.set_defaults(func=cmd_zeta)

    wave = commands.add_parser("wave", help="solve u'' = -L u from a vertex impulse")
    wave.add_argument("--graph", required=True)
    wave.add_argument("--t", type=float, required=True)
    wave.add_argument("--vertex", type=int)
    wave.add_argument("--velocity-vertex", dest="velocity_vertex", type=int)
    wave.add_argument("--project-kernel", dest="project_kernel", action="store_true")
    _add_output_flags(wave)
    wave.set_defaults(func=cmd_wave)

    distance = commands.add_parser("distance", help="Connes distance between two vertices at time t")
    distance.add_argument("--graph", required=True)
    distance.add_argument("--t", type=float, default=0.0)
    distance.add_argument("--from", dest="source", type=int, required=True)
    distance.add_argument("--to", dest="target", type=int, required=True)
    distance.add_argument("--beta", type=float, default=0.0)
    distance.add_argument("--gamma", type=float, nargs="+")
    distance.add_argument("--h", type=float, default=1e-3)
    _add_output_flags(distance)
    distance.set_defaults(func=cmd_distance)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the diracflow command

    :param argv: Arguments without the program name, sys.argv[1:] when None
    :returns: Exit code, 0 ok, 1 failed checks, 2 usage or config, 3 numerical failure
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        return args.func(args)
    except DiracFlowError as err:
        print("error: {}".format(err.message), file=sys.stderr)
        return err.exit_code
    except NotImplementedError:
        print("error: unknown name in the request", file=sys.stderr)
        return 2
    except OSError as err:
        print("error: {}".format(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
