"""Command-line front door: gen, inspect, diagram, bench, serve, cache.

Exit codes: 0 success, 1 domain error (one-line stderr diagnostic),
2 usage error (argparse).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .cache import clear_project
from .errors import HfvError
from .layout import LayoutKind
from .model import SyntheticSpec, generate_synthetic, validate_dataset, write_dataset
from .parser import bench_compare, parse_node_tree_fast, read_sizes
from .render import render_svg
from .service import DatasetSession, DiagramRequest


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hfv", description="Heat-flow post-processing toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset directory")
    gen.add_argument("--submodels", type=int, required=True)
    gen.add_argument(
        "--nodes-per",
        type=str,
        required=True,
        help="nodes per submodel: a constant or comma-separated list",
    )
    gen.add_argument("--timesteps", type=int, default=1)
    gen.add_argument("--linear-density", type=float, default=1.0)
    gen.add_argument("--radiative-density", type=float, default=0.5)
    gen.add_argument("--temp-min", type=float, default=250.0)
    gen.add_argument("--temp-max", type=float, default=350.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True)

    inspect = sub.add_parser("inspect", help="print sizes and submodel table")
    inspect.add_argument("dataset", type=Path)
    inspect.add_argument(
        "--validate", action="store_true", help="also run the structural validator"
    )

    diagram = sub.add_parser("diagram", help="render a heat-flow diagram")
    diagram.add_argument("dataset", type=Path)
    diagram.add_argument("--timestep", type=int, default=0)
    diagram.add_argument(
        "--layout",
        choices=[k.value for k in LayoutKind],
        default="circular",
    )
    diagram.add_argument("--include", type=str, default=None, help="comma-separated names")
    diagram.add_argument(
        "--group",
        action="append",
        default=[],
        metavar="NAME=member1,member2",
        help="repeatable group definition",
    )
    diagram.add_argument("--threshold", type=float, default=0.0)
    diagram.add_argument("--seed", type=int, default=None)
    diagram.add_argument("--units-temp", choices=["K", "C"], default="K")
    diagram.add_argument("--format", choices=["svg", "json"], default=None)
    diagram.add_argument("--out", type=Path, required=True)
    diagram.add_argument("--width", type=int, default=1000)
    diagram.add_argument("--height", type=int, default=700)

    bench = sub.add_parser("bench", help="time fast parser vs redundant baseline")
    bench.add_argument("dataset", type=Path)
    bench.add_argument("--runs", type=int, default=5)
    bench.add_argument("--out", type=Path, default=None)

    serve = sub.add_parser("serve", help="start the HTTP JSON service")
    serve.add_argument("dataset", type=Path)
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", type=str, default="127.0.0.1")
    serve.add_argument("--project", type=Path, default=None, help="cache directory")
    serve.add_argument("--ui", type=Path, default=None, help="static UI directory")

    cache = sub.add_parser("cache", help="project cache management")
    cache_sub = cache.add_subparsers(dest="cache_command", required=True)
    clear = cache_sub.add_parser("clear", help="delete a project's cache files")
    clear.add_argument("project", type=Path)

    return parser


def _parse_nodes_per(text: str, num_submodels: int) -> int | tuple[int, ...]:
    if "," in text:
        return tuple(int(part) for part in text.split(","))
    return int(text)


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        num_submodels=args.submodels,
        nodes_per_submodel=_parse_nodes_per(args.nodes_per, args.submodels),
        num_timesteps=args.timesteps,
        linear_density=args.linear_density,
        radiative_density=args.radiative_density,
        temp_range=(args.temp_min, args.temp_max),
        seed=args.seed,
    )
    dataset = generate_synthetic(spec)
    write_dataset(dataset, args.out)
    sizes = dataset.sizes()
    print(
        f"wrote {args.out}: {sizes.num_submodels} submodels, "
        f"{sizes.num_nodes} nodes, {sizes.num_timesteps} timesteps, "
        f"{sizes.num_linear} linear + {sizes.num_radiative} radiative conductors"
    )
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    sizes = read_sizes(args.dataset)
    index = parse_node_tree_fast(args.dataset)
    print(f"dataset: {args.dataset}")
    print(
        f"submodels={sizes.num_submodels} nodes={sizes.num_nodes} "
        f"linear={sizes.num_linear} radiative={sizes.num_radiative} "
        f"timesteps={sizes.num_timesteps}"
    )
    print(f"{'submodel':<24} {'nodes':>8} {'range':>16}")
    for name, (start, end) in index.entries:
        print(f"{name:<24} {end - start:>8} {f'[{start}, {end})':>16}")
    if args.validate:
        report = validate_dataset(args.dataset)
        if report.ok:
            print("validation: OK")
        else:
            for v in report.violations:
                print(f"validation: {v.code}: {v.message}")
            return 1
    return 0


def _cmd_diagram(args: argparse.Namespace) -> int:
    groups: dict[str, list[str]] = {}
    for item in args.group:
        if "=" not in item:
            raise HfvError(f"bad --group value {item!r}, expected NAME=a,b")
        name, members = item.split("=", 1)
        groups[name] = [m for m in members.split(",") if m]
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.out.suffix.lower() == ".json" else "svg"
    session = DatasetSession(args.dataset)
    req = DiagramRequest(
        timestep=args.timestep,
        include=args.include.split(",") if args.include else None,
        groups=groups or None,
        radiant_threshold=args.threshold,
        layout=args.layout,
        seed=args.seed,
        units={"temp": args.units_temp, "power": "W"},
        width=args.width,
        height=args.height,
    )
    spec, _meta = session.build_diagram(req)
    if fmt == "svg":
        args.out.write_text(render_svg(spec, args.width, args.height))
    else:
        args.out.write_text(spec.to_json())
    print(f"wrote {args.out}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    report = bench_compare(args.dataset, runs=args.runs)
    text = report.to_json()
    if args.out is not None:
        args.out.write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    port = int(os.environ.get("HFV_PORT", args.port))
    app = create_app(args.dataset, project_dir=args.project, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=port)
    return 0


def _cmd_cache(args: argparse.Namespace) -> int:
    if args.cache_command == "clear":
        clear_project(args.project)
        print(f"cleared {args.project}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "inspect": _cmd_inspect,
        "diagram": _cmd_diagram,
        "bench": _cmd_bench,
        "serve": _cmd_serve,
        "cache": _cmd_cache,
    }
    try:
        return handlers[args.command](args)
    except HfvError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
