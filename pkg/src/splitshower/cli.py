"""Command-line front end.

Subcommands: theory-check, calibrate, shower, jets, compare, scan-concurrence.
Every command is deterministic given its inputs and seed; CSV outputs are
byte-stable across reruns. Exit codes: 0 success, 1 runtime or data error,
2 usage error. Plots (--plot) are best-effort and never affect exit codes.

Seed resolution: --seed flag, else the SPLITSHOWER_SEED environment variable,
else 0. An optional --config file holds "key = value" lines keyed by long
option names; explicit flags win over config values.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys

import numpy as np

from . import calibrate as cal
from . import histograms as hg
from . import jets as jt
from . import noise as nz
from . import qsim
from .entanglement import c_qcd, concurrence_wootters
from .errors import EmptyDataset, EmptyInput
from .qcd import rho_sc
from .splitter import (
    ShowerTopology,
    SplittingParams,
    TopologyKind,
    build_topology,
    composed_concurrence_scan,
    n_splittings,
    predicted_reduced_ab,
    predicted_reduced_single,
    prong_wires,
    scan_relative_deviation,
)

DEFAULT_BINS = 20

_TOPOLOGY_NAMES = {t.value.lower(): t for t in TopologyKind}


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form; keeps CSV output byte-stable."""
    return repr(float(x))


def resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("SPLITSHOWER_SEED")
    return int(env) if env else 0


# ---------------------------------------------------------------- csv io


def write_params_csv(path: str, dist: cal.ParamDistribution) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["z", "gamma1", "gamma2", "gamma3", "residual_z", "residual_c"])
        for rec in dist.records:
            p = rec.params
            w.writerow(map(_fmt, [rec.z, p.gamma1, p.gamma2, p.gamma3, rec.residual_z, rec.residual_c]))


def read_params_csv(path: str) -> list[SplittingParams]:
    params = []
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            params.append(
                SplittingParams(float(row["gamma1"]), float(row["gamma2"]), float(row["gamma3"]))
            )
    if not params:
        raise EmptyDataset(f"no parameter rows in {path}")
    return params


def read_z_samples(path: str) -> list[float]:
    """Momentum-fraction sample: one value per line or a CSV column.

    A CSV header selects the column: "z" or "fraction" when present (so
    `calibrate` consumes both plain samples and `jets` output), otherwise the
    first column.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.splitlines()
    header = [t.strip().lower() for t in lines[0].split(",")] if lines else []
    column = next((c for c in ("z", "fraction") if c in header), None)
    if column is not None:
        return [
            float(row[column])
            for row in csv.DictReader(io.StringIO(text))
            if row.get(column, "").strip()
        ]
    zs: list[float] = []
    for line in lines:
        token = line.strip().split(",")[0].strip()
        if not token:
            continue
        try:
            zs.append(float(token))
        except ValueError:
            if zs:
                raise
            # unrecognized header line
    return zs


def write_fractions_csv(path: str, results: list, n_prongs: int) -> None:
    header = ["run_id", "accepted"] + [f"frac{i+1}" for i in range(n_prongs)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for run_id, res in enumerate(results):
            if isinstance(res, nz.ProngFractions):
                w.writerow([run_id, 1] + [_fmt(f) for f in res.final])
            else:
                w.writerow([run_id, 0] + [""] * n_prongs)


def read_fractions_csv(path: str) -> list[tuple[int, list[float] | None]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if int(row["accepted"]):
                fracs = [float(v) for k, v in row.items() if k.startswith("frac")]
                out.append((int(row["run_id"]), fracs))
            else:
                out.append((int(row["run_id"]), None))
    return out


def write_histograms_csv(path: str, hists: list[hg.Histogram]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["prong_rank", "bin_index", "bin_lo", "bin_hi", "count"])
        for rank, h in enumerate(hists, start=1):
            for i, c in enumerate(h.counts):
                w.writerow([rank, i, _fmt(h.edges[i]), _fmt(h.edges[i + 1]), c])


def read_histograms_csv(path: str) -> dict[int, hg.Histogram]:
    rows: dict[int, list[tuple[int, float, float, int]]] = {}
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.setdefault(int(row["prong_rank"]), []).append(
                (int(row["bin_index"]), float(row["bin_lo"]), float(row["bin_hi"]), int(row["count"]))
            )
    hists = {}
    for rank, bins in rows.items():
        bins.sort()
        edges = [b[1] for b in bins] + [bins[-1][2]]
        hists[rank] = hg.Histogram(tuple(edges), tuple(b[3] for b in bins))
    return hists


def extract_column(path: str, column: str | None, rank: int | None) -> list[float]:
    """Pull one numeric sample out of any of the package's CSV schemas.

    Auto-detects the jets schema (fraction column, optionally filtered by
    prong_rank) and the shower schema (frac1..fracN of accepted rows, or the
    rank-K column). --col overrides with an explicit column name.
    """
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        rows = list(reader)
    if not rows:
        raise EmptyInput(f"{path} has no data rows")

    def grab(col: str, rws) -> list[float]:
        vals = [float(r[col]) for r in rws if r.get(col, "") not in ("", None)]
        if not vals:
            raise EmptyInput(f"{path}: no numeric values in column {col!r}")
        return vals

    if column:
        return grab(column, rows)
    if "fraction" in fields:
        if rank is not None:
            rows = [r for r in rows if int(r["prong_rank"]) == rank]
        return grab("fraction", rows)
    if "frac1" in fields:
        kept = [r for r in rows if int(r.get("accepted", 1))]
        if rank is not None:
            return grab(f"frac{rank}", kept)
        out: list[float] = []
        for col in fields:
            if col.startswith("frac"):
                out.extend(grab(col, kept))
        return out
    raise EmptyInput(f"{path}: cannot infer a value column; pass --col")


# ---------------------------------------------------------------- commands


def cmd_theory_check(args) -> int:
    lo, hi = 1e-3, 1.0 - 1e-3
    grid = np.array([0.5]) if args.grid == 1 else np.linspace(lo, hi, args.grid)
    lines = []
    ok = True

    dev = max(abs(concurrence_wootters(rho_sc(z)) - c_qcd(z)) for z in grid)
    passed = dev < 1e-8
    ok &= passed
    detail = f"max|dC| = {dev:.3e} over {len(grid)} z points"
    if args.grid == 1:
        detail += f"; C({grid[0]:g}) = {concurrence_wootters(rho_sc(grid[0])):.9f}"
    lines.append(("mixed-state concurrence vs vertex closed form", passed, detail))

    rng = np.random.default_rng(resolve_seed(args.seed))
    worst_single = worst_expect = 0.0
    for _ in range(args.sets):
        p = SplittingParams.from_angles(rng.uniform(0, math.pi / 3), rng.uniform(0, math.pi))
        state = qsim.run(build_topology(ShowerTopology(TopologyKind.TWO_PRONG, (p,))))
        rho = qsim.to_density(state)
        pred_a, pred_b = predicted_reduced_single(p)
        worst_single = max(
            worst_single,
            np.abs(qsim.partial_trace(rho, [0]).elements - pred_a.elements).max(),
            np.abs(qsim.partial_trace(rho, [1]).elements - pred_b.elements).max(),
        )
        a = qsim.expect_sigma3(state, 0)
        b = qsim.expect_sigma3(state, 1)
        worst_expect = max(worst_expect, abs(a - p.z), abs(a + b - 1.0))
    passed = worst_single < 1e-10 and worst_expect < 1e-10
    ok &= passed
    lines.append(
        (
            "single-block reduced states vs closed forms",
            passed,
            f"max element dev {worst_single:.3e}, max fraction dev {worst_expect:.3e}",
        )
    )

    worst_a = worst_diag_b = 0.0
    for _ in range(args.sets):
        p1 = SplittingParams.from_angles(rng.uniform(0, math.pi / 3), rng.uniform(0, math.pi))
        p2 = SplittingParams.from_angles(rng.uniform(0, math.pi / 3), rng.uniform(0, math.pi))
        t = ShowerTopology(TopologyKind.THREE_DOMINANT, (p1, p2))
        rho = qsim.to_density(qsim.run(build_topology(t)))
        pred_a, pred_b = predicted_reduced_ab(p1.z, p2)
        worst_a = max(
            worst_a, np.abs(qsim.partial_trace(rho, [0]).elements - pred_a.elements).max()
        )
        sim_b = qsim.partial_trace(rho, [1]).elements
        worst_diag_b = max(worst_diag_b, np.abs(np.diag(sim_b) - np.diag(pred_b.elements)).max())
    passed = worst_a < 1e-10 and worst_diag_b < 1e-10
    ok &= passed
    lines.append(
        (
            "composed-block reduced states vs closed forms",
            passed,
            f"top qubit max dev {worst_a:.3e}, bottom diag max dev {worst_diag_b:.3e}",
        )
    )

    report = "\n".join(
        f"{'PASS' if passed else 'FAIL'}  {name}: {detail}" for name, passed, detail in lines
    )
    print(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report + "\n")
    return 0 if ok else 1


def cmd_calibrate(args) -> int:
    zs = read_z_samples(args.input)
    if not zs:
        raise EmptyDataset(f"no z values in {args.input}")
    dist = cal.calibrate_dataset(zs, source=args.input)
    write_params_csv(args.output, dist)
    print(f"accepted {len(dist.records)}, rejected {len(dist.rejected)}, "
          f"reflected {dist.n_reflected} (z -> 1-z)")
    for z, reason in dist.rejected:
        print(f"  rejected z={z:g}: {reason}", file=sys.stderr)
    return 0


def _noise_model(args) -> nz.NoiseModel:
    return nz.NoiseModel(args.p01, args.p10, args.depol)


def run_shower(
    kind: TopologyKind,
    rows: list[SplittingParams],
    runs: int,
    shots: int,
    seed: int,
    model: nz.NoiseModel,
    mode: str,
) -> tuple[list, list[tuple[int, ...]]]:
    """Per-run row sampling (uniform with replacement) and fraction recovery.

    Run r draws from the stream (seed, r): first the row indices, then the
    shot sample. Returns (results, drawn row indices per run).
    """
    prob_cache: dict[tuple[int, ...], np.ndarray] = {}
    results = []
    drawn = []
    for r in range(runs):
        rng = np.random.default_rng([seed, r])
        idx = tuple(int(i) for i in rng.integers(0, len(rows), size=n_splittings(kind)))
        drawn.append(idx)
        topology = ShowerTopology(kind, tuple(rows[i] for i in idx))
        if idx not in prob_cache:
            circuit = build_topology(topology, include_intermediate=True)
            prob_cache[idx] = nz.circuit_probabilities(circuit, model)
        counts = nz.sample_with_readout(prob_cache[idx], shots, rng, model, topology.n_qubits)
        if mode == "raw":
            res = nz.raw_mode(counts, topology)
        else:
            res = nz.fractions_from_counts(counts, topology)
            if mode == "shifted" and isinstance(res, nz.ProngFractions):
                res = nz.sigma_shift(res, shots)
        results.append(res)
    return results, drawn


def cmd_shower(args) -> int:
    kind = _TOPOLOGY_NAMES[args.topology.lower()]
    rows = read_params_csv(args.params)
    seed = resolve_seed(args.seed)
    model = _noise_model(args)
    results, _ = run_shower(kind, rows, args.runs, args.shots, seed, model, args.mode)
    n_prongs = len(prong_wires(kind))
    write_fractions_csv(args.out, results, n_prongs)
    accepted = [r for r in results if isinstance(r, nz.ProngFractions)]
    print(f"runs {args.runs}, accepted {len(accepted)}, rejected {args.runs - len(accepted)}")
    if not accepted:
        print("warning: no accepted runs; histogram not written", file=sys.stderr)
        return 0
    hists = [
        hg.make_histogram([f.final[k] for f in accepted], args.bins) for k in range(n_prongs)
    ]
    if args.hist:
        write_histograms_csv(args.hist, hists)
    if args.plot:
        def render():
            from . import plotting

            plotting.save_histogram_overlay(
                args.plot,
                [(f"prong {k+1}", h) for k, h in enumerate(hists)],
                title=f"{kind.value}: per-prong momentum fractions",
            )

        _try_plot(args.plot, render)
    return 0


def cmd_jets(args) -> int:
    events = jt.read_events(args.input)
    if not events:
        raise EmptyInput(f"{args.input} contains no events")
    cuts = jt.SelectionCuts(args.jet_pt_min, args.abs_eta_max, args.constituent_pt_min)
    mode = {
        "perjet": jt.FractionMode.PER_JET_PT,
        "pairmin": jt.FractionMode.PAIR_MIN,
        "pairmax": jt.FractionMode.PAIR_MAX,
    }[args.mode]
    jet_spec = jt.ClusterSpec(jt.Algorithm.ANTI_KT, args.jet_r)
    re_spec = jt.ClusterSpec(jt.Algorithm.CAM_AACHEN, args.recluster_r)
    n_written = 0
    n_skipped = 0
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["event_id", "prong_rank", "fraction"])
        for event_id, constituents in events:
            if not constituents:
                n_skipped += 1
                continue
            fracs = jt.prong_fractions_pipeline(
                constituents, cuts, args.n_prongs, mode, jet_spec, re_spec
            )
            if fracs is None:
                n_skipped += 1
                continue
            for rank, f in enumerate(fracs, start=1):
                w.writerow([event_id, rank, _fmt(f)])
            n_written += 1
    print(f"events {len(events)}, with fractions {n_written}, skipped {n_skipped}")
    if n_skipped:
        print(f"warning: {n_skipped} event(s) skipped (empty or failed selection)", file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    a = extract_column(args.csv_a, args.col, args.rank)
    b = extract_column(args.csv_b, args.col, args.rank)
    report = hg.compare_samples(a, b, bins=args.bins, lo=args.lo, hi=args.hi)
    crit = hg.ks_critical_value(args.alpha, report.samples_a, report.samples_b)
    lines = [
        f"samples_a = {report.samples_a}",
        f"samples_b = {report.samples_b}",
        f"ks_statistic = {report.ks_statistic!r}",
        f"ks_critical_{args.alpha:g} = {crit!r}",
        f"chi2 = {report.chi2!r}",
        f"n_bins = {report.n_bins}",
    ]
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    if args.plot:
        ha = hg.make_histogram(a, args.bins, args.lo, args.hi)
        hb = hg.make_histogram(b, args.bins, args.lo, args.hi)

        def render():
            from . import plotting

            plotting.save_histogram_overlay(
                args.plot, [(args.csv_a, ha), (args.csv_b, hb)], title="sample comparison"
            )

        _try_plot(args.plot, render)
    return 0


def cmd_scan_concurrence(args) -> int:
    grid = np.linspace(args.grid_start, args.grid_stop, args.grid_points)
    scan = composed_concurrence_scan(args.z_first, grid)
    max_dev = scan_relative_deviation(scan)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["z_prime", "c_circuit", "c_qcd", "rel_deviation"])
        for zp, c in scan:
            ref = c_qcd(zp)
            w.writerow([_fmt(zp), _fmt(c), _fmt(ref), _fmt(abs(c - ref) / ref)])
    print(f"z_first = {args.z_first:g}: max relative deviation {max_dev:.6f} "
          f"over {len(scan)} points")
    if args.plot:
        zs = np.array([zp for zp, _ in scan])
        cs = np.array([c for _, c in scan])
        ref = np.array([c_qcd(zp) for zp in zs])

        def render():
            from . import plotting

            plotting.save_curves(
                args.plot,
                [("circuit", zs, cs, "o"), ("vertex closed form", zs, ref, "-")],
                title=f"reduced-state concurrence, first splitting z = {args.z_first:g}",
                xlabel="second splitting fraction z'",
                ylabel="concurrence",
            )

        _try_plot(args.plot, render)
    return 0


def _try_plot(path: str, render) -> None:
    try:
        render()
    except Exception as exc:  # plotting must never change the exit code
        print(f"warning: plot {path} failed: {exc}", file=sys.stderr)


# ---------------------------------------------------------------- parser


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $SPLITSHOWER_SEED or 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitshower",
        description="Splitting-circuit laboratory: simulate, calibrate, decluster, compare.",
    )
    parser.add_argument("--config", default=None, help="key = value defaults file; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory-check", help="closed-form consistency checks")
    p.add_argument("--grid", type=positive_int, default=1000, help="z grid points (1 checks z = 0.5)")
    p.add_argument("--sets", type=positive_int, default=50, help="random parameter sets per check")
    p.add_argument("--out", default=None, help="write the report to this file")
    _add_seed(p)
    p.set_defaults(func=cmd_theory_check)

    p = sub.add_parser("calibrate", help="solve circuit parameters for a z sample")
    p.add_argument("input", help="z sample file (one value per line or first CSV column)")
    p.add_argument("output", help="parameter CSV to write")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("shower", help="sample a splitting topology from calibrated parameters")
    p.add_argument("topology", choices=sorted(_TOPOLOGY_NAMES), help="shower topology")
    p.add_argument("params", help="parameter CSV from `calibrate`")
    p.add_argument("--runs", type=positive_int, default=500)
    p.add_argument("--shots", type=positive_int, default=1024)
    p.add_argument("--mode", choices=["raw", "derived", "shifted"], default="derived",
                   help="raw prong readout, high-side derivation, or derivation plus sigma shift")
    p.add_argument("--depol", type=float, default=0.0, help="two-qubit depolarizing probability")
    p.add_argument("--p01", type=float, default=0.0, help="readout P(1|0) per qubit")
    p.add_argument("--p10", type=float, default=0.0, help="readout P(0|1) per qubit")
    p.add_argument("--out", default="fractions.csv", help="per-run fractions CSV")
    p.add_argument("--hist", default=None, help="per-prong histogram CSV")
    p.add_argument("--bins", type=positive_int, default=DEFAULT_BINS)
    p.add_argument("--plot", default=None, help="per-prong histogram figure (.svg/.png/...)")
    _add_seed(p)
    p.set_defaults(func=cmd_shower)

    p = sub.add_parser("jets", help="cluster, decluster, and extract momentum fractions")
    p.add_argument("input", help="JSONL constituents, one event per line")
    p.add_argument("--out", default="prongs.csv", help="fraction CSV to write")
    p.add_argument("--n-prongs", type=positive_int, default=2)
    p.add_argument("--mode", choices=["perjet", "pairmin", "pairmax"], default="perjet")
    p.add_argument("--jet-pt-min", type=float, default=300.0)
    p.add_argument("--abs-eta-max", type=float, default=2.4)
    p.add_argument("--constituent-pt-min", type=float, default=1.0)
    p.add_argument("--jet-r", type=float, default=0.8)
    p.add_argument("--recluster-r", type=float, default=0.4)
    p.set_defaults(func=cmd_jets)

    p = sub.add_parser("compare", help="two-sample KS and chi-square on fraction CSVs")
    p.add_argument("csv_a")
    p.add_argument("csv_b")
    p.add_argument("--bins", type=positive_int, default=DEFAULT_BINS)
    p.add_argument("--rank", type=int, default=None, help="restrict to one prong rank")
    p.add_argument("--col", default=None, help="explicit value column")
    p.add_argument("--alpha", type=float, default=0.01, help="KS critical-value level")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--out", default=None, help="write the report to this file")
    p.add_argument("--plot", default=None, help="overlaid histogram figure")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scan-concurrence", help="composed-circuit concurrence across z'")
    p.add_argument("--z-first", type=float, required=True, help="first splitting fraction")
    p.add_argument("--grid-start", type=float, default=0.55)
    p.add_argument("--grid-stop", type=float, default=0.99)
    p.add_argument("--grid-points", type=positive_int, default=45)
    p.add_argument("--out", default="scan.csv", help="curve CSV to write")
    p.add_argument("--plot", default=None, help="overlay figure")
    p.set_defaults(func=cmd_scan_concurrence)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Inject config-file values as defaults for the chosen subcommand."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        parser.error("--config needs a file argument")
    path = argv[i + 1]
    try:
        with open(path, encoding="utf-8") as fh:
            pairs = {}
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    parser.error(f"config line without '=': {line!r}")
                key, value = (s.strip() for s in line.split("=", 1))
                pairs[key.replace("-", "_")] = value
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(1)
    # locate the subparser to learn option types
    remaining = [a for j, a in enumerate(argv) if j not in (i, i + 1)]
    if not remaining:
        parser.error("--config given without a subcommand")
    sub_actions = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    subparser = sub_actions[0].choices.get(remaining[0])
    if subparser is None:
        return remaining
    known = {}
    for action in subparser._actions:
        if action.dest in pairs:
            value = pairs[action.dest]
            known[action.dest] = action.type(value) if action.type else value
    unknown = set(pairs) - set(known)
    if unknown:
        parser.error(f"unknown config keys for {remaining[0]}: {sorted(unknown)}")
    subparser.set_defaults(**known)
    return remaining


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    argv = _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        # SplitShowerError subclasses ValueError; malformed numeric/JSON input
        # lands here too and is a data error, not a crash
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
