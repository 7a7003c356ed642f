"""Command-line front end.

Exit codes: 0 success, 2 input/IO/validation error, 3 ``detect`` found alerts.
Timings go to stderr; stdout in ``records`` mode is tab-separated and stable.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from .automaton import RouteAutomaton
from .baselines import compare_sizes
from .detect import DetectorConfig, detect, format_alert
from .dominance import assess_leak, diff, dominance, format_movers, format_verdict, top_movers
from .dot import export_dot
from .frl import FrlError, IpPrefix
from .ingest import FORMATS, dump_simple, ingest_file
from .snapshot import SnapshotError, load, save
from .synth import DEFCON_SPEC, InvalidSpec, gen_benign, gen_interception, gen_leak, gen_leak_base, parse_spec

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_ALERTS = 3


class CliError(Exception):
    pass


def thread_cap() -> int:
    """Validated CAIR_THREADS value; work currently runs on one thread regardless."""
    raw = os.environ.get("CAIR_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"CAIR_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise CliError(f"CAIR_THREADS must be a positive integer, got {raw!r}")
    return n


@contextmanager
def timed(label: str, quiet: bool):
    t0 = time.perf_counter()
    yield
    if not quiet:
        print(f"[{label}] {time.perf_counter() - t0:.3f}s", file=sys.stderr)


def _load_snapshot(path) -> RouteAutomaton:
    try:
        return load(path)
    except OSError as exc:
        raise CliError(f"IoError: {exc}") from exc
    except SnapshotError as exc:
        raise CliError(f"{type(exc).__name__}: {path}: {exc}") from exc


def _read_routes(path, fmt: str, collapse: bool):
    try:
        return ingest_file(path, fmt, collapse)
    except OSError as exc:
        raise CliError(f"IoError: {exc}") from exc


def _emit_pairs(pairs, mode: str) -> None:
    width = max((len(k) for k, _ in pairs), default=0)
    for k, v in pairs:
        if mode == "records":
            print(f"{k}\t{v}")
        else:
            print(f"{k:<{width}}  {v:>12,}" if isinstance(v, int) else f"{k:<{width}}  {v:>12}")


def cmd_build(args) -> int:
    with timed("ingest", args.quiet):
        routes, report = _read_routes(args.input, args.format, args.collapse_prepends)
    with timed("construct", args.quiet):
        automaton = RouteAutomaton(routes)
    if args.output:
        try:
            save(automaton, args.output)
        except OSError as exc:
            raise CliError(f"IoError: {exc}") from exc
    st = automaton.stats()
    _emit_pairs(
        [("states", st.states), ("transitions", st.transitions), ("routes", st.routes),
         ("prefixes", st.prefixes), ("asns", st.asns)]
        + [(k, v) for k, v in report.as_dict().items()],
        args.mode,
    )
    return EXIT_OK


def _sibling_groups(args) -> tuple:
    groups = []
    for text in args.sibling_group or ():
        try:
            groups.append(frozenset(int(x) for x in text.replace(",", " ").split()))
        except ValueError:
            raise CliError(f"bad sibling group {text!r}") from None
    return tuple(groups)


def cmd_detect(args) -> int:
    if args.min_segment_length < 1:
        raise CliError("--min-segment-length must be >= 1")
    config = DetectorConfig(min_segment_length=args.min_segment_length, sibling_groups=_sibling_groups(args))
    automaton = _load_snapshot(args.snapshot)
    with timed("detect", args.quiet):
        alerts = detect(automaton, config).alerts
    if args.mode == "records":
        for al in alerts:
            print(al.record())
    else:
        for al in alerts:
            print(format_alert(al))
        print(f"{len(alerts)} alert(s)")
    return EXIT_ALERTS if alerts else EXIT_OK


def cmd_dominance(args) -> int:
    automaton = _load_snapshot(args.snapshot)
    with timed("dominance", args.quiet):
        report = dominance(automaton, str(args.snapshot))
    ranked = report.ranking(args.top)
    if args.mode == "records":
        for asn, n in ranked:
            print(f"{asn}\t{n}")
    else:
        print(f"{'rank':>4}  {'AS':<10} {'|Q(u)|':>10}")
        for i, (asn, n) in enumerate(ranked, 1):
            print(f"{i:>4}. AS{asn:<8} {n:>10,}")
    return EXIT_OK


def cmd_diff(args) -> int:
    a = _load_snapshot(args.before)
    b = _load_snapshot(args.after)
    with timed("diff", args.quiet):
        d = diff(dominance(a, str(args.before)), dominance(b, str(args.after)))
        verdict = assess_leak(d, args.gain_threshold, args.churn_threshold)
    if args.mode == "records":
        for asn, x in top_movers(d, args.top):
            print(f"mover\t{asn}\t{x.before}\t{x.after}\t{x.delta}")
        orig = "-" if verdict.suspected_originator is None else str(verdict.suspected_originator)
        print(f"verdict\t{int(verdict.triggered)}\t{orig}\t{verdict.originator_gain_pct:.4f}"
              f"\t{verdict.changed_as_fraction:.6f}")
    else:
        print(format_movers(d, args.top))
        print(format_verdict(verdict))
    return EXIT_OK


def cmd_compare(args) -> int:
    routes, _ = _read_routes(args.input, args.format, args.collapse_prepends)
    with timed("compare", args.quiet):
        c = compare_sizes(routes)
    if args.mode == "records":
        for k, v in vars(c).items():
            print(f"{k}\t{v}")
        for k, v in c.ratios.items():
            print(f"{k}\t{v:.6f}")
    else:
        print(f"{'model':<10} {'objects':>10} {'links':>12}")
        print(f"{'automaton':<10} {c.automaton_states:>10,} {c.automaton_transitions:>12,}")
        print(f"{'trie':<10} {c.trie_nodes:>10,} {c.trie_edges:>12,}")
        print(f"{'graph':<10} {c.graph_nodes:>10,} {c.graph_links:>12,}")
        for k, v in c.ratios.items():
            print(f"{k:<28} {v:>10.2f}")
    return EXIT_OK


def cmd_export_dot(args) -> int:
    prefix = None
    if args.prefix:
        try:
            prefix = IpPrefix.parse(args.prefix)
        except FrlError as exc:
            raise CliError(str(exc)) from exc
    automaton = _load_snapshot(args.snapshot)
    text = export_dot(automaton, prefix=prefix, asn=args.asn)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            raise CliError(f"IoError: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _write_routes(path: Path, routes) -> None:
    with open(path, "w") as f:
        dump_simple(routes, f)


def cmd_synth(args) -> int:
    if args.spec == "defcon":
        kind, spec = "interception", DEFCON_SPEC
    else:
        try:
            kind, spec = parse_spec(Path(args.spec).read_text())
        except OSError as exc:
            raise CliError(f"IoError: {exc}") from exc
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if kind == "benign":
            written = {"routes.txt": gen_benign(spec)}
        elif kind == "interception":
            routes, expected = gen_interception(spec)
            written = {"routes.txt": routes}
            (out / "expected_alert.tsv").write_text(expected.record() + "\n")
            written["expected_alert.tsv"] = None
        else:
            before, after = gen_leak(spec, gen_leak_base(spec))
            written = {"before.txt": before, "after.txt": after}
        for name, routes in written.items():
            if routes is not None:
                _write_routes(out / name, routes)
    except OSError as exc:
        raise CliError(f"IoError: {exc}") from exc
    for name in sorted(written):
        print(out / name)
    return EXIT_OK


def cmd_routes(args) -> int:
    automaton = _load_snapshot(args.snapshot)
    for r in automaton.enumerate_routes():
        print(r)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="route-automata",
        description="Build minimal route automata from BGP tables and analyse them.",
        epilog="CAIR_THREADS caps internal parallelism (validated; work is single-threaded).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, inputs=False):
        p.add_argument("--mode", choices=("table", "records"), default="table", help="output style")
        p.add_argument("-q", "--quiet", action="store_true", help="no timings on stderr")
        if inputs:
            p.add_argument("--format", choices=FORMATS, default="simple", help="route file format")
            p.add_argument("--collapse-prepends", action="store_true", help="drop AS path prepending")

    p = sub.add_parser("build", help="ingest routes and write a snapshot")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="snapshot file to write")
    common(p, inputs=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("detect", help="search a snapshot for interception alerts")
    p.add_argument("snapshot")
    p.add_argument("--min-segment-length", type=int, default=3)
    p.add_argument("--sibling-group", action="append", metavar="ASNS",
                   help="comma-separated ASNs under one administration (repeatable)")
    common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("dominance", help="rank ASes by routing dominance")
    p.add_argument("snapshot")
    p.add_argument("--top", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_dominance)

    p = sub.add_parser("diff", help="compare dominance across two snapshots and assess a leak")
    p.add_argument("before")
    p.add_argument("after")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--gain-threshold", type=float, default=500.0, help="originator gain in percent")
    p.add_argument("--churn-threshold", type=float, default=0.05, help="fraction of ASes that changed")
    common(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("compare", help="size of automaton versus trie and AS graph")
    p.add_argument("input")
    common(p, inputs=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export-dot", help="render a snapshot as Graphviz DOT")
    p.add_argument("snapshot")
    p.add_argument("--prefix", help="keep only routes for this prefix")
    p.add_argument("--asn", type=int, help="keep only routes through this AS")
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("synth", help="write a synthetic scenario")
    p.add_argument("spec", help="scenario file, or 'defcon' for the built-in interception preset")
    p.add_argument("-o", "--out-dir", default=".")
    common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("routes", help="list the routes stored in a snapshot")
    p.add_argument("snapshot")
    common(p)
    p.set_defaults(func=cmd_routes)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        thread_cap()
        return args.func(args)
    except (CliError, InvalidSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
