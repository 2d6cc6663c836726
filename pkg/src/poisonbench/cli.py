"""Command line entry point: ``poisonbench {sweep,generate,explain}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import _core
from .config import MODEL_NAMES, ConfigError, load_config
from .dataio import SyntheticSpec, default_class_means, generate_synthetic, write_dataset
from .harness import (
    BASELINE,
    Cell,
    SweepReport,
    grid,
    prepare,
    render_importance_report,
    run_cell,
    run_sweep,
    write_report,
)

log = logging.getLogger("poisonbench")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML experiment config")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", type=Path, help="output directory (overrides the config)")
    p.add_argument("--format", choices=("csv", "json", "both"), default="csv", help="metrics table format")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poisonbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run the full models x scenarios x rates grid")
    _common(p)
    p.add_argument("--jobs", type=int, help="worker processes for grid cells")
    p.add_argument("--save-models", action="store_true", help="also write trained models as JSON")

    p = sub.add_parser("generate", help="write a synthetic band-power dataset as CSV")
    _common(p)
    p.add_argument("--samples-per-class", type=int, default=500)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--separation", type=float, default=0.3)
    p.add_argument("--dominant-electrode", default="Pz", help="electrode name, or 'none'")

    p = sub.add_parser("explain", help="permutation importance for one grid cell")
    _common(p)
    p.add_argument("--model", choices=sorted(MODEL_NAMES), required=True)
    p.add_argument("--scenario", default=BASELINE, help="none, random or targeted")
    p.add_argument("--rate", type=float, default=0.0, help="poisoning rate in percent")
    return parser


def _config(args):
    return load_config(args.config, seed=args.seed, output=str(args.out) if args.out else None,
                       jobs=getattr(args, "jobs", None))


def cmd_sweep(args) -> int:
    cfg = _config(args)
    log.info("kernel backend: %s", _core.BACKEND)
    report = run_sweep(cfg, keep_models=args.save_models)
    written = write_report(report, cfg.output, args.format)
    print(f"wrote {len(written)} files to {cfg.output}")
    return 0


def cmd_generate(args) -> int:
    dom = None if str(args.dominant_electrode).lower() == "none" else args.dominant_electrode
    spec = SyntheticSpec(
        samples_per_class=args.samples_per_class,
        class_means=default_class_means(args.separation),
        noise_stddev=args.noise,
        dominant_electrode=dom,
    )
    out = args.out or Path("synthetic.csv")
    if out.suffix != ".csv":
        out = out / "synthetic.csv"
    write_dataset(generate_synthetic(spec, args.seed or 0), out)
    print(f"wrote {out}")
    return 0


def cmd_explain(args) -> int:
    cfg = _config(args)
    scenario = args.scenario.lower()
    rate = 0.0 if scenario == BASELINE else args.rate
    if scenario != BASELINE and rate <= 0:
        raise ConfigError("--rate must be > 0 for a poisoning scenario")
    # reuse the sweep's cell index so seeds match the corresponding sweep cell
    match = [c for c in grid(cfg) if c.model == args.model and c.scenario == scenario and c.rate == rate]
    cell = match[0] if match else Cell(len(grid(cfg)), args.model, scenario, rate)
    result = run_cell(cfg, prepare(cfg), cell)
    report = SweepReport([result.metrics], [result.importance], [cell], cfg.echo(), {})
    render_importance_report(report, cfg.output)
    imp = result.importance
    for e, s in zip(imp.schema.electrodes, imp.electrode_scores):
        print(f"{e}\t{s:.4f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {"sweep": cmd_sweep, "generate": cmd_generate, "explain": cmd_explain}
    try:
        return handlers[args.command](args)
    except Exception as exc:  # noqa: BLE001
        print(f"poisonbench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
