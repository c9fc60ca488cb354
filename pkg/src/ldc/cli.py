"""``ldc`` command line: run built-in or file scenarios, list built-ins."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .scenario import ScenarioError, builtin_names, load_scenario, run_scenario

log = logging.getLogger("ldc")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3


def _parse_set(items) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ScenarioError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _threads(arg) -> int:
    if arg is not None:
        return max(1, int(arg))
    env = os.environ.get("LDC_THREADS")
    return max(1, int(env)) if env else 1


def cmd_list(args) -> int:
    rows = []
    for name in builtin_names():
        sc = load_scenario(name)
        axes = " x ".join(f"{a.name}[{a.lo:g},{a.hi:g}]" for a in sc.section.axes)
        unit = "t" if sc.is_flow else "n"
        params = ",".join(f"{k}={v:g}" for k, v in sc.model.params.items())
        rows.append((name, f"{sc.model.kind.value}({params})", axes, f"{unit}={sc.ld.window:g}"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    print("  ".join(h.ljust(w) for h, w in zip(("name", "model", "section", "window"), widths)))
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = _parse_set(args.set)
    if args.resolution is not None:
        overrides["section.resolution"] = str(args.resolution)
    for flag in (args.final_time, args.iterates):
        if flag is not None:
            overrides["ld.window"] = str(flag)
    sc = load_scenario(args.scenario, overrides)
    res = run_scenario(sc, out_dir=args.out, threads=_threads(args.threads), overrides=overrides)
    rng = res.manifest["value_range"]
    print(f"{sc.name}: {sc.model.kind.value} {sc.model.params} N={sc.section.resolution} "
          f"window={sc.ld.window:g} in {res.manifest['wall_clock_s']:.1f}s")
    if rng["min"] is not None:
        print(f"  min={rng['min']:.6g} p1={rng['p_lo']:.6g} p99={rng['p_hi']:.6g} max={rng['max']:.6g}")
    print(f"  masked cells: {rng['masked']}")
    for k, v in res.manifest.get("probe_medians", {}).items():
        print(f"  probe {k}: median {v:.4g}")
    for fname in res.manifest["outputs"]:
        print(f"  wrote {os.path.join(args.out, fname)}")
    if "pgm" in sc.outputs:
        print("  hint: convert with e.g. `convert field.pgm field.png`")
    if res.degenerate:
        log.warning("every cell of %s is masked", sc.name)
        return EXIT_DEGENERATE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ldc", description="Lagrangian descriptor stability maps")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario (built-in name or .ini path)")
    run.add_argument("scenario")
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a scenario setting (bare key or section.key)")
    run.add_argument("--resolution", type=int)
    run.add_argument("--final-time", type=float)
    run.add_argument("--iterates", type=int)
    run.add_argument("--threads", type=int, help="worker threads (default: $LDC_THREADS or 1)")
    run.add_argument("--out", default=".", help="output directory")
    run.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list built-in scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"ldc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ldc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
