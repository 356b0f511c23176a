"""Command-line entry point: ``logconf {selftest,channel,cylinder,tables}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..mesh import MeshError
from ..solver import ContinuationStall, NewtonError
from ..solver.linear import LinearSolverError
from .channel import ChannelConfig, run_channel_verification
from .config import BenchConfig, ConfigError, build_config, load_config, parse_schedule
from .problem import load_mesh
from .run import read_drag_csv, run_cylinder
from .selftest import SUITES, run_selftests
from .tables import DRAG_TABLE, MESHES

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(parse_schedule(text))
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="logconf", description="Steady log-conformation FEM solver and benchmarks.")
    ap.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for Newton detail")
    sub = ap.add_subparsers(dest="command", required=True)

    st = sub.add_parser("selftest", help="run the kernel oracle suites")
    st.add_argument("suites", nargs="*", metavar="SUITE", help=f"subset of: {', '.join(SUITES)}")

    ch = sub.add_parser("channel", help="channel flow against the analytic solution")
    ch.add_argument("--wi", type=_floats, default=ChannelConfig.wi, help="Weissenberg numbers, e.g. 0.1,0.3,0.6")
    ch.add_argument("--nx", type=int, default=ChannelConfig.nx)
    ch.add_argument("--ny", type=_ints, default=ChannelConfig.ny, help="two row counts, coarse,fine")

    cy = sub.add_parser("cylinder", help="Weissenberg sweep on the confined cylinder")
    cy.add_argument("--config", type=Path, help="key = value run configuration")
    cy.add_argument("--wi-max", type=float, help="sweep 0.1, 0.2, .. 0.5 then steps of 0.05 up to this value")
    cy.add_argument("--wi", help="explicit schedule, start:stop:step or a comma list")
    cy.add_argument("--mesh", help="M1, M2, M3 or a path to an MSH 2.2 file")
    cy.add_argument("--out", help="output directory")
    cy.add_argument("--backend", choices=["direct", "gmres"])
    cy.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    cy.add_argument("--no-vtk", action="store_true")

    tb = sub.add_parser("tables", help="print the published drag table")
    tb.add_argument("--compare", nargs="?", const="results/drag.csv", metavar="DRAG_CSV",
                    help="put computed K from a drag.csv next to the table (default results/drag.csv)")
    tb.add_argument("--mesh", default="M1", choices=MESHES, help="column compared against")
    return ap


def _cylinder_config(args) -> BenchConfig:
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip().lower()] = v.strip()
    if args.wi_max is not None:
        overrides["bench.wi_max"] = str(args.wi_max)
    if args.wi is not None:
        overrides["bench.wi"] = args.wi
    if args.mesh is not None:
        overrides["mesh.class"] = args.mesh
    if args.out is not None:
        overrides["output.dir"] = args.out
    if args.backend is not None:
        overrides["solver.backend"] = args.backend
    if args.config is not None:
        if not args.config.is_file():
            raise UsageError(f"config file not found: {args.config}")
        return load_config(args.config, overrides)
    return build_config(overrides)


def cmd_selftest(args) -> int:
    try:
        results = run_selftests(args.suites or None)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_channel(args) -> int:
    if len(args.ny) != 2:
        raise UsageError("--ny needs exactly two values")
    cfg = ChannelConfig(wi=args.wi, nx=args.nx, ny=args.ny)
    report = run_channel_verification(cfg)
    for line in report.lines():
        print(line)
    coarse, fine = cfg.ny
    for wi in cfg.wi:
        print(f"Wi = {wi:g}: Psi L2 order {report.psi_order(wi, coarse, fine):.2f} (ny {coarse} -> {fine})")
    return EXIT_OK


def cmd_cylinder(args) -> int:
    cfg = _cylinder_config(args)
    mesh = load_mesh(cfg.mesh, cfg.R)
    print(f"mesh {cfg.mesh}, Wi schedule {', '.join(f'{w:g}' for w in cfg.wi_schedule)}, "
          f"backend {cfg.linear.backend}, output {cfg.out_dir}")
    result = run_cylinder(cfg, mesh, out_dir=cfg.out_dir, vtk=not args.no_vtk)
    print(f"{'Wi':>6} {'K':>10} {'newton':>6} {'s':>7}")
    for r in result.drag:
        print(f"{r.wi:6.3g} {r.K:10.4f} {r.newton_iters:6d} {r.seconds:7.1f}")
    bad = {wi: n for wi, n in result.spd_violations.items() if n}
    if bad:
        print(f"exp(Psi) not SPD at quadrature points: {bad}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_tables(args) -> int:
    computed = {}
    if args.compare is not None:
        path = Path(args.compare)
        if not path.is_file():
            raise UsageError(f"drag table not found: {path} (run `logconf cylinder` first)")
        computed = read_drag_csv(path)
    head = f"{'Wi':>5} " + " ".join(f"{m:>9}" for m in MESHES)
    if computed:
        head += f" {'computed':>9} {'diff':>8}"
    print(head)
    col = MESHES.index(args.mesh)
    for wi, row in DRAG_TABLE.items():
        line = f"{wi:5.2f} " + " ".join(f"{k:9.4f}" for k in row)
        if computed:
            k = next((v for w, v in computed.items() if abs(w - wi) < 1e-9), None)
            line += f" {k:9.4f} {k - row[col]:+8.4f}" if k is not None else f" {'':>9} {'':>8}"
        print(line)
    return EXIT_OK


COMMANDS = {"selftest": cmd_selftest, "channel": cmd_channel, "cylinder": cmd_cylinder, "tables": cmd_tables}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, FileNotFoundError, MeshError) as exc:
        print(f"logconf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NewtonError, ContinuationStall, LinearSolverError) as exc:
        print(f"logconf {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
