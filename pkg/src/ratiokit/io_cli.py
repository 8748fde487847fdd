"""Data ingestion, report serialization, density-curve export, and the CLI.

File formats:
  - sequences CSV: header ``sequence_id,interval_s`` or
    ``sequence_id,onset_s``; rows grouped by sequence id, ordered within a
    group; UTF-8 with '.' decimals.  Durations are seconds, but the ratio
    pipeline is scale-invariant, so the unit only matters for null model
    parameters (which are interpreted in file units).
  - report: one JSON document, schema ``ratiokit_report_v1``.
  - density curves: one two-column CSV (``x,density``) per curve plus a
    JSON metadata sidecar.

Exit codes: 0 success, 2 input validation failure, 3 numeric
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .binstats import (
    BinLayout,
    BinRole,
    BinWidth,
    ModelMass,
    apply_normalizers,
    combine_off_bins,
    count_bins,
    ks_test,
    resolve_normalizers,
    wilcoxon_signed_rank,
)
from .errors import NonConvergenceError, RatioKitError, ValidationError
from .nulls import (
    Exponential,
    HalfNormal,
    RatioDistribution,
    Tabulated,
    Uniform,
    sample_sequence,
)
from .ratios import (
    FractionQ,
    IntervalSequence,
    OnsetSequence,
    RescaledMinus,
    RescaledPlus,
    StandardR,
    intervals_from_onsets,
    sequence_ratios,
)

__all__ = [
    "SCHEMA_VERSION",
    "AnalysisConfig",
    "DensityCurve",
    "load_sequences",
    "run_analysis",
    "emit_density_curves",
    "simulate_command",
    "main",
]

logger = logging.getLogger("ratiokit")

SCHEMA_VERSION = "ratiokit_report_v1"

_FLOAT_FMT = "%.17g"


def load_sequences(path, kind: str) -> list[IntervalSequence]:
    """Read an interval or onset CSV into interval sequences.

    Sequences too short for ratio extraction (< 3 onsets, < 2 intervals)
    are skipped with a logged warning; malformed rows and non-positive
    intervals raise with their line number.
    """
    if kind not in ("onsets", "intervals"):
        raise ValidationError(f"kind must be 'onsets' or 'intervals', got {kind!r}")
    column = "onset_s" if kind == "onsets" else "interval_s"
    groups: dict[str, list[float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError(f"{path}: empty file, no sequences")
        header = [h.strip() for h in header]
        if header[:2] != ["sequence_id", column]:
            raise ValidationError(
                f"{path}: expected header 'sequence_id,{column}', got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ValidationError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            seq_id = row[0].strip()
            try:
                value = float(row[1])
            except ValueError as exc:
                raise ValidationError(
                    f"{path}:{lineno}: malformed {column} value {row[1]!r}"
                ) from exc
            values = groups.setdefault(seq_id, [])
            if kind == "intervals" and value <= 0.0:
                raise ValidationError(
                    f"{path}:{lineno}: non-positive interval {value} in sequence {seq_id!r}"
                )
            if kind == "onsets" and values and value <= values[-1]:
                raise ValidationError(
                    f"{path}:{lineno}: onsets not increasing in sequence {seq_id!r}"
                )
            values.append(value)

    sequences = []
    n_skipped = 0
    min_events = 3 if kind == "onsets" else 2
    for seq_id, values in groups.items():
        if len(values) < min_events:
            n_skipped += 1
            continue
        if kind == "onsets":
            seq = intervals_from_onsets(OnsetSequence(np.array(values), source_id=seq_id))
        else:
            seq = IntervalSequence(np.array(values), source_id=seq_id)
        sequences.append(seq)
    if n_skipped:
        logger.warning("skipped %d sequence(s) too short for ratio extraction", n_skipped)
    if not sequences:
        raise ValidationError(f"{path}: no sequences")
    return sequences


@dataclass
class AnalysisConfig:
    """Resolved configuration for one analysis run."""

    input_path: str
    kind: str = "intervals"
    transform: str = "r"
    null_spec: str | None = None
    layout_spec: str = "one-to-one"
    anchor: str = "1:1"
    normalizer_spec: str = "width"
    tests: tuple[str, ...] = ("wilcoxon",)
    seed: int | None = None
    out_path: str | None = None
    separate_off_bins: bool = False


def parse_null(spec: str):
    """Parse a null model spec like 'exponential:1.0' or 'uniform:0,1'."""
    kind, _, params = spec.partition(":")
    try:
        if kind == "exponential":
            return Exponential(rate=float(params))
        if kind == "uniform":
            a, b = (float(x) for x in params.split(","))
            return Uniform(a=a, b=b)
        if kind == "halfnormal":
            return HalfNormal(scale=float(params))
        if kind == "table":
            return Tabulated.from_csv(params)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"bad null model spec {spec!r}: {exc}") from exc
    raise ValidationError(
        f"unknown null model {kind!r} (use exponential:RATE, uniform:A,B, "
        f"halfnormal:SCALE, or table:PATH)"
    )


def parse_anchor(text: str) -> tuple[int, int]:
    try:
        m, n = (int(x) for x in text.split(":"))
    except ValueError as exc:
        raise ValidationError(f"bad anchor {text!r}, expected M:N") from exc
    return (m, n)


def parse_layouts(spec: str, anchor: str = "1:1") -> list[BinLayout]:
    """Parse a layout spec: 'one-to-one', 'thirds:M:N,...', or 'edges:e1,...'."""
    from .binstats import one_to_one_layout, thirds_layout

    if spec == "one-to-one":
        return [one_to_one_layout()]
    kind, _, params = spec.partition(":")
    if kind == "thirds":
        anchors = [parse_anchor(a) for a in params.split(",") if a]
        return thirds_layout(anchors)
    if kind == "edges":
        try:
            edges = np.array([float(x) for x in params.split(",")])
        except ValueError as exc:
            raise ValidationError(f"bad edges in layout spec {spec!r}") from exc
        anchor_mn = parse_anchor(anchor)
        anchor_r = anchor_mn[0] / sum(anchor_mn)
        roles = tuple(
            BinRole.ON if edges[k] <= anchor_r <= edges[k + 1] else BinRole.OFF
            for k in range(edges.size - 1)
        )
        return [BinLayout(anchor=anchor_mn, edges=edges, roles=roles)]
    raise ValidationError(f"unknown layout spec {spec!r}")


def parse_transform(name: str, model=None):
    if name == "q":
        return FractionQ()
    if name == "r":
        return StandardR()
    if name in ("rescale-plus", "rescale-minus"):
        if model is None:
            raise ValidationError(f"transform {name!r} requires a null model (--null)")
        return RescaledPlus(model) if name == "rescale-plus" else RescaledMinus(model)
    raise ValidationError(f"unknown transform {name!r}")


def parse_normalizer(spec: str, model, transform, seed: int):
    if spec == "width":
        return BinWidth()
    if spec == "mass" or spec.startswith("mass-mc"):
        if model is None:
            raise ValidationError("model-mass normalizers require a null model (--null)")
        if spec == "mass":
            return ModelMass(model=model, transform=transform, method="analytic")
        _, _, n_text = spec.partition(":")
        n = int(n_text) if n_text else 10**6
        mc_seed = int(np.random.SeedSequence(seed).generate_state(1, np.uint64)[0])
        return ModelMass(model=model, transform=transform, method="mc", n=n, seed=mc_seed)
    raise ValidationError(f"unknown normalizer {spec!r} (width, mass, or mass-mc:N)")


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def run_analysis(config: AnalysisConfig) -> dict:
    """Run the configured pipeline and return the full report document."""
    seed = config.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
        logger.info("no seed given; using generated seed %d", seed)

    model = parse_null(config.null_spec) if config.null_spec else None
    transform = parse_transform(config.transform, model)
    layouts = parse_layouts(config.layout_spec, config.anchor)
    normalizer = parse_normalizer(config.normalizer_spec, model, transform, seed)
    if transform.kind == "q":
        raise ValidationError(
            "bin layouts live in (0, 1) ratio space; use transform r, "
            "rescale-plus, or rescale-minus for layout-based analysis"
        )
    for test in config.tests:
        if test not in ("wilcoxon", "ks"):
            raise ValidationError(f"unknown test {test!r}")
        if test == "ks" and model is None:
            raise ValidationError("the ks test requires a null model (--null)")

    sequences = load_sequences(config.input_path, config.kind)
    ratio_lists = [sequence_ratios(seq, transform) for seq in sequences]
    pooled = np.concatenate(ratio_lists)

    report = {
        "schema": SCHEMA_VERSION,
        "config": {
            "input": str(config.input_path),
            "kind": config.kind,
            "transform": transform.describe(),
            "null_model": model.describe() if model else None,
            "normalizer": normalizer.describe(),
            "layout_spec": config.layout_spec,
            "tests": list(config.tests),
            "seed": seed,
            "separate_off_bins": config.separate_off_bins,
        },
        "sequences": [
            {
                "id": seq.source_id,
                "n_intervals": len(seq),
                "ratios": [float(r) for r in ratios],
            }
            for seq, ratios in zip(sequences, ratio_lists)
        ],
        "n_ratios_total": int(pooled.size),
        "layouts": [],
    }

    for layout in layouts:
        per_sequence = []
        on_values, off_values = [], []
        # Resolve the normalizer once per layout (an MC normalizer runs its
        # simulation here, not per sequence).
        norm_values, norm_meta = resolve_normalizers(layout, normalizer)
        pooled_counts = apply_normalizers(count_bins(pooled, layout), norm_values, norm_meta)
        for seq, ratios in zip(sequences, ratio_lists):
            counts = apply_normalizers(count_bins(ratios, layout), norm_values, norm_meta)
            combined = combine_off_bins(counts)
            on_values.append(combined.on_value)
            if config.separate_off_bins:
                off_idx = [
                    k for k, role in enumerate(layout.roles) if role is BinRole.OFF
                ]
                off_values.append(
                    [float(counts.values[k]) for k in off_idx]
                )
            else:
                off_values.append(combined.off_value)
            per_sequence.append(
                {
                    "id": seq.source_id,
                    "counts": [int(c) for c in counts.counts],
                    "n_total": int(counts.n_total),
                    "normalized": [float(v) for v in counts.values],
                    "combined": combined.describe(),
                }
            )

        tests = []
        for test in config.tests:
            if test == "wilcoxon":
                ons = np.asarray(on_values)
                if config.separate_off_bins:
                    offs = np.asarray(off_values)
                    pairs_on = np.repeat(ons, offs.shape[1])
                    pairs_off = offs.ravel()
                else:
                    pairs_on, pairs_off = ons, np.asarray(off_values)
                result = wilcoxon_signed_rank(pairs_on, pairs_off)
            else:
                dist = RatioDistribution(model, transform)
                result = ks_test(pooled, lambda x: dist._s_cdf_arr(np.asarray(x)))
            tests.append(result.to_dict())

        report["layouts"].append(
            {
                "layout": layout.describe(),
                "pooled": pooled_counts.describe(),
                "per_sequence": per_sequence,
                "tests": tests,
            }
        )
    return _jsonable(report)


@dataclass
class DensityCurve:
    """A plottable density curve: grid points, densities, provenance."""

    axis: str
    grid: np.ndarray
    densities: np.ndarray
    provenance: dict = field(default_factory=dict)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "density"])
            for x, d in zip(self.grid, self.densities):
                writer.writerow([_FLOAT_FMT % x, _FLOAT_FMT % d])

    def trapezoid_mass(self) -> float:
        return float(np.trapezoid(self.densities, self.grid))


def emit_density_curves(
    model,
    transform,
    grid_size: int = 512,
    *,
    n_samples: int = 100_000,
    n_bins: int = 100,
    seed: int = 0,
) -> tuple[DensityCurve, DensityCurve]:
    """Analytic null ratio density plus a sampled histogram for overlay.

    The analytic grid spans the ratio support (for the unbounded q axis it
    is quantile-spaced and covers all but 5e-4 of the mass); the histogram
    comes from the ratios of one seeded sequence of ``n_samples`` intervals.
    """
    if grid_size < 64:
        raise ValidationError("grid_size must be >= 64")
    dist = RatioDistribution(model, transform)
    axis = {"q": "q", "r": "r"}.get(transform.kind, "s")

    if transform.kind == "q":
        # Quantile-spaced so the 1/q^2-type tail keeps trapezoid mass within
        # 1e-3 of 1; at least 2048 points regardless of grid_size.
        probs = np.linspace(0.0, 1.0 - 2.5e-4, max(grid_size, 2048))
        grid = np.unique(np.asarray(model.ratio_q_quantile(probs), dtype=np.float64))
        grid = grid[np.isfinite(grid) & (grid > 0.0)]
        densities = np.asarray(dist.q_pdf(grid))
        coverage = float(dist.q_cdf(grid[-1]) - dist.q_cdf(grid[0]))
    else:
        lo, hi = dist.s_support
        unbounded = np.isinf(model.support[1])
        if transform.kind != "r" or unbounded:
            # Keep the grid strictly inside (0, 1) where the density is only
            # defined in the limit; bounded-support r curves keep exact edges.
            lo, hi = max(lo, 1e-9), min(hi, 1.0 - 1e-9)
        grid = np.linspace(lo, hi, grid_size)
        kink = float(np.asarray(transform.from_q(1.0)))
        if lo < kink < hi:
            grid = np.unique(np.concatenate([grid, [kink]]))
        if transform.kind == "r":
            densities = dist._r_pdf_arr(grid)
        else:
            densities = np.array([float(dist.s_pdf(float(s))) for s in grid])
        coverage = 1.0
    analytic = DensityCurve(
        axis=axis,
        grid=grid,
        densities=densities,
        provenance={"kind": "analytic", "mode": dist.mode, "coverage": coverage},
    )

    seq = sample_sequence(model, n_samples, np.random.default_rng(seed))
    sampled = sequence_ratios(seq, transform)
    hist_range = (float(grid[0]), float(grid[-1]))
    hist, edges = np.histogram(sampled, bins=n_bins, range=hist_range, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    histogram = DensityCurve(
        axis=axis,
        grid=centers,
        densities=hist,
        provenance={"kind": "histogram", "n_samples": n_samples, "n_bins": n_bins, "seed": seed},
    )
    return analytic, histogram


def simulate_command(model, n_sequences: int, seq_len: int, seed: int, out_path) -> int:
    """Write simulated interval sequences as a loadable CSV; returns row count.

    Sequences use per-sequence seeds derived from ``seed``; identical seeds
    produce identical files.
    """
    if n_sequences < 1 or seq_len < 2:
        raise ValidationError("need n_sequences >= 1 and seq_len >= 2")
    children = np.random.SeedSequence(seed).spawn(n_sequences)
    rows = 0
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sequence_id", "interval_s"])
        for k, child in enumerate(children):
            seq = sample_sequence(
                model, seq_len, np.random.default_rng(child), source_id=f"seq{k:04d}"
            )
            for value in seq.intervals:
                writer.writerow([seq.source_id, _FLOAT_FMT % value])
                rows += 1
    return rows


def _dump_report(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _add_common_analysis_args(sub):
    sub.add_argument("--input", required=True, help="sequences CSV")
    sub.add_argument("--kind", choices=["onsets", "intervals"], default="intervals")
    sub.add_argument(
        "--transform",
        choices=["q", "r", "rescale-plus", "rescale-minus"],
        default="r",
    )
    sub.add_argument("--null", help="null model: exponential:RATE | uniform:A,B | halfnormal:SCALE | table:PATH")
    sub.add_argument("--layout", default="one-to-one", help="one-to-one | thirds:M:N,... | edges:E1,E2,...")
    sub.add_argument("--anchor", default="1:1", help="anchor M:N for explicit edge layouts")
    sub.add_argument("--normalizer", default="width", help="width | mass | mass-mc:N")
    sub.add_argument("--separate-off-bins", action="store_true", help="pair each off bin separately instead of combining")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", help="report path (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratiokit",
        description="Integer-ratio rhythm category detection for temporal sequences",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="write simulated interval sequences")
    sim.add_argument("--null", required=True)
    sim.add_argument("--sequences", type=int, default=10)
    sim.add_argument("--length", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)

    rat = subs.add_parser("ratios", help="compute per-sequence ratio values")
    rat.add_argument("--input", required=True)
    rat.add_argument("--kind", choices=["onsets", "intervals"], default="intervals")
    rat.add_argument("--transform", choices=["q", "r", "rescale-plus", "rescale-minus"], default="r")
    rat.add_argument("--null")
    rat.add_argument("--out", help="ratios CSV (stdout when omitted)")

    norm = subs.add_parser("normalize", help="bin, normalize, and report counts (no tests)")
    _add_common_analysis_args(norm)

    ana = subs.add_parser("analyze", help="full pipeline: counts, normalization, tests")
    _add_common_analysis_args(ana)
    ana.add_argument("--tests", default="wilcoxon", help="comma list: wilcoxon,ks")

    cur = subs.add_parser("curves", help="export analytic + sampled density curves")
    cur.add_argument("--null", required=True)
    cur.add_argument("--transform", choices=["q", "r", "rescale-plus", "rescale-minus"], default="r")
    cur.add_argument("--grid", type=int, default=512)
    cur.add_argument("--samples", type=int, default=100_000)
    cur.add_argument("--bins", type=int, default=100)
    cur.add_argument("--seed", type=int, default=0)
    cur.add_argument("--out-prefix", required=True)
    return parser


def _cmd_simulate(args) -> int:
    model = parse_null(args.null)
    rows = simulate_command(model, args.sequences, args.length, args.seed, args.out)
    logger.info("wrote %d intervals to %s", rows, args.out)
    return 0


def _cmd_ratios(args) -> int:
    model = parse_null(args.null) if args.null else None
    transform = parse_transform(args.transform, model)
    sequences = load_sequences(args.input, args.kind)
    lines = [["sequence_id", "ratio"]]
    for seq in sequences:
        for value in sequence_ratios(seq, transform):
            lines.append([seq.source_id, _FLOAT_FMT % value])
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerows(lines)
    else:
        csv.writer(sys.stdout).writerows(lines)
    return 0


def _config_from_args(args, tests) -> AnalysisConfig:
    return AnalysisConfig(
        input_path=args.input,
        kind=args.kind,
        transform=args.transform,
        null_spec=args.null,
        layout_spec=args.layout,
        anchor=args.anchor,
        normalizer_spec=args.normalizer,
        tests=tests,
        seed=args.seed,
        out_path=args.out,
        separate_off_bins=args.separate_off_bins,
    )


def _cmd_curves(args) -> int:
    model = parse_null(args.null)
    transform = parse_transform(args.transform, model)
    analytic, histogram = emit_density_curves(
        model,
        transform,
        args.grid,
        n_samples=args.samples,
        n_bins=args.bins,
        seed=args.seed,
    )
    prefix = args.out_prefix
    analytic.write_csv(f"{prefix}analytic.csv")
    histogram.write_csv(f"{prefix}histogram.csv")
    meta = {
        "schema": SCHEMA_VERSION,
        "model": model.describe(),
        "transform": transform.describe(),
        "curves": {
            "analytic": {"path": f"{prefix}analytic.csv", **analytic.provenance},
            "histogram": {"path": f"{prefix}histogram.csv", **histogram.provenance},
        },
    }
    Path(f"{prefix}meta.json").write_text(
        json.dumps(_jsonable(meta), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "ratios":
            return _cmd_ratios(args)
        if args.command == "normalize":
            report = run_analysis(_config_from_args(args, tests=()))
            _dump_report(report, args.out)
            return 0
        if args.command == "analyze":
            tests = tuple(t.strip() for t in args.tests.split(",") if t.strip())
            report = run_analysis(_config_from_args(args, tests=tests))
            _dump_report(report, args.out)
            return 0
        if args.command == "curves":
            return _cmd_curves(args)
        parser.error(f"unknown command {args.command!r}")
    except NonConvergenceError as exc:
        logger.error("numeric non-convergence: %s", exc)
        return 3
    except RatioKitError as exc:
        logger.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
