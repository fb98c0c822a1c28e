"""Command-line interface.

``geophysio analyze --manifest PATH --out DIR``  runs the full pipeline and
writes the track GeoJSONs, segments.csv and stats.json.

``geophysio synth --spec PATH --out DIR``  generates a synthetic cohort
(plus ground-truth sidecar) in the ingest formats.

Exit codes: 0 success, 1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .eda import EdaConfig
from .errors import GeoPhysioError
from .pipeline import InputFilesError, RunConfig, analyze_study, write_outputs
from .synth import generate_cohort, load_synth_spec


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geophysio",
        description="Geo-referenced physiology pipeline: wearable logs + GPS -> "
        "per-segment signal maps and episode statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the analysis pipeline on a study manifest")
    analyze.add_argument("--manifest", required=True, help="study manifest JSON")
    analyze.add_argument("--out", required=True, help="output directory")
    analyze.add_argument(
        "--corridor", type=float, default=None, metavar="M",
        help="override the route's corridor half-width in meters",
    )
    analyze.add_argument(
        "--scr-threshold", type=float, default=None, metavar="US",
        help="override the SCR significance threshold in microsiemens",
    )
    analyze.add_argument(
        "--tolerance", type=float, default=0.5, metavar="S",
        help="timestamp matching tolerance in seconds (default 0.5)",
    )
    analyze.add_argument(
        "--jobs", type=int, default=1, metavar="N",
        help="participants processed concurrently (default 1)",
    )

    synth = sub.add_parser("synth", help="generate a synthetic cohort dataset")
    synth.add_argument("--spec", required=True, help="generator spec JSON")
    synth.add_argument("--out", required=True, help="output directory")
    return parser


def _cmd_analyze(args: argparse.Namespace) -> int:
    eda_cfg = EdaConfig() if args.scr_threshold is None else EdaConfig(scr_threshold_uS=args.scr_threshold)
    config = RunConfig(
        manifest_path=Path(args.manifest),
        out_dir=Path(args.out),
        eda=eda_cfg,
        corridor_m=args.corridor,
        tolerance_s=args.tolerance,
        jobs=args.jobs,
    )
    result = analyze_study(config)
    written = write_outputs(result, config.out_dir)
    for path in written:
        print(f"wrote {path}")
    if result.notice:
        print(f"notice: {result.notice}")
    for r in result.stats:
        print(
            f"{r.index_name}: n={r.n} t={r.t_stat:.3f} df={r.df} p={r.p_two_tailed:.4f} "
            f"expected={r.pct_expected:.0%}"
        )
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec_path = Path(args.spec)
    with open(spec_path, encoding="utf-8") as fh:
        spec = load_synth_spec(fh, base_dir=spec_path.parent)
    cohort = generate_cohort(spec, args.out)
    print(f"wrote {cohort.manifest_path}")
    print(f"wrote {cohort.ground_truth_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_synth(args)
    except InputFilesError as exc:
        for line in exc.diagnostics:
            print(f"error: {line}", file=sys.stderr)
        return 1
    except (GeoPhysioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
