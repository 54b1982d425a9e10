"""
Compose, reduce, certify and check every model listed in
``config/pipeline.yaml``; stages are checkpointed so that interrupted runs
resume where they stopped.
"""

import argparse
import sys
import time
import traceback
from pathlib import Path

import yaml

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from cubeabs._logger import logger, set_console_level
from cubeabs.checkpoint import CheckpointManager
from cubeabs.compose import compose
from cubeabs.config import load_settings, set_settings
from cubeabs.formats import (
    read_hda,
    read_property,
    read_report,
    write_hda,
    write_report,
)
from cubeabs.program_graph import load_program_graph
from cubeabs.properties import has_property
from cubeabs.reduce import CertifyOptions, ReduceOptions, Verdict, certify, reduce

parser = argparse.ArgumentParser(description="Run the HDA reduction pipeline")
parser.add_argument(
    "--config",
    type=str,
    default=str(project_root / "config/pipeline.yaml"),
    help="Pipeline YAML",
)
parser.add_argument("--no-checkpoint", action="store_true", help="Ignore checkpoint")
parser.add_argument("--skip-until", type=str, help="Skip stages until this one")
parser.add_argument("--only", type=str, help="Only these models or stages (comma-separated)")
parser.add_argument("--reset-checkpoint", action="store_true", help="Clear checkpoint and restart")
args = parser.parse_args()
set_console_level("INFO")

with open(args.config, "r") as f:
    pipeline_config = yaml.safe_load(f)

settings_path = pipeline_config["settings"].get("config")
set_settings(load_settings(project_root / settings_path if settings_path else None))

output_dir = project_root / pipeline_config["settings"].get("output_dir", "pipeline-out")
output_dir.mkdir(parents=True, exist_ok=True)

checkpoint_enabled = (
    pipeline_config.get("checkpoint", {}).get("enabled", True) and not args.no_checkpoint
)
checkpoint = CheckpointManager(output_dir / ".checkpoint.json") if checkpoint_enabled else None

if args.reset_checkpoint and checkpoint:
    checkpoint.reset()
    logger.info("Checkpoint reset. Starting fresh.")

only = set(args.only.split(",")) if args.only else None
failures = []


def run_stage(stage: str, func) -> bool:
    """Run one stage with checkpoint support."""
    if checkpoint and not checkpoint.should_run(stage, args.skip_until, only):
        logger.info(f"Skipping {stage}")
        return True
    if checkpoint is None and only and stage not in only and stage.split("/")[0] not in only:
        return True

    t0 = time.time()
    try:
        func()
        if checkpoint:
            checkpoint.mark_completed(stage)
        t1 = time.time()
        logger.info(f"{stage} done in {round((t1 - t0) / 60, 2)} mins")
        return True
    except Exception as e:
        logger.error(f"{stage} failed: {e}")
        if checkpoint:
            checkpoint.mark_failed(stage, e)
        traceback.print_exc()
        failures.append(stage)
        return False


def pipeline(name: str, entry: dict) -> None:
    model_dir = output_dir / name
    model_dir.mkdir(parents=True, exist_ok=True)
    composed = model_dir / "model.hda"
    reduced = model_dir / "reduced.hda"
    report_path = model_dir / "reduction.txt"

    def run_compose():
        pgs = [load_program_graph(project_root / p) for p in entry["programs"]]
        write_hda(compose(pgs), composed)

    def run_reduce():
        B, report = reduce(read_hda(composed), ReduceOptions(**entry.get("reduce", {})))
        write_hda(B, reduced)
        write_report(report, report_path)

    def run_certify():
        result = certify(
            read_hda(composed),
            read_hda(reduced),
            read_report(report_path),
            options=CertifyOptions(**entry.get("certify", {})),
        )
        (model_dir / "certificate.txt").write_text("\n".join(result.lines()) + "\n")
        if result.verdict not in (Verdict.CERTIFIED, Verdict.CERTIFIED_BOUNDED):
            raise RuntimeError(f"certification {result.verdict.value}")

    def run_check():
        B = read_hda(reduced)
        lines = []
        for prop in entry.get("properties", []):
            L = read_property(project_root / prop).build(B.letters)
            holds, counterexample = has_property(B, L)
            verdict = "holds" if holds else "fails " + ";".join(counterexample)
            lines.append(f"{prop} {verdict}")
        (model_dir / "properties.txt").write_text("\n".join(lines) + "\n")

    for stage, func in (
        ("compose", run_compose),
        ("reduce", run_reduce),
        ("certify", run_certify),
        ("check", run_check),
    ):
        if not run_stage(f"{name}/{stage}", func):
            break


for model_name, model_entry in pipeline_config["models"].items():
    pipeline(model_name, model_entry)

if failures:
    logger.error(f"Failed stages: {', '.join(failures)}")
    sys.exit(1)
logger.info("Pipeline completed successfully.")
