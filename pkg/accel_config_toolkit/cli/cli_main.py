"""Command-line entry point: opt, sim, roofline, report and random.

Exit codes: 0 success, 1 simulation or analysis error, 2 input error.
"""
import argparse
import json
import os
import sys
from typing import Dict, List, Optional
from loguru import logger
from pydantic import ValidationError
from accel_config_toolkit import settings
from accel_config_toolkit.accel_model.descriptor_loader import (
    config_bandwidth, descriptor_map, resolve_descriptor, resolve_descriptor_path)
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor
from accel_config_toolkit.basemodel_validator.pass_pipeline_model import PassPipeline
from accel_config_toolkit.basemodel_validator.run_manifest_model import RunManifest
from accel_config_toolkit.benchgen.matmul_generator import gen_tiled_matmul, rescale_spec, resolve_matmul_spec
from accel_config_toolkit.cli.experiment_main import ExperimentRunner, report_frame
from accel_config_toolkit.errors import AccelConfigError, InputError, ManifestError
from accel_config_toolkit.ir.ir_parser import parse_program
from accel_config_toolkit.ir.ir_printer import print_program
from accel_config_toolkit.ir.ir_types import Program
from accel_config_toolkit.ir.ir_verifier import verify_or_raise
from accel_config_toolkit.ir.random_program import random_program
from accel_config_toolkit.log_config import configure_logging
from accel_config_toolkit.passes.pass_pipeline_main import PassPipelineRunner
from accel_config_toolkit.roofline.roofline_measure import roofline_export, roofsurface_grid
from accel_config_toolkit.sim.simulator import simulate
from accel_config_toolkit.sim.timeline import format_summary, timeline_csv

# exit codes
EXIT_OK, EXIT_ANALYSIS, EXIT_INPUT = 0, 1, 2

# register fields of the random programs when no descriptor is given
DEFAULT_RANDOM_FIELDS = {"acc": ["k", "n", "m", "go"]}


def build_parser() -> argparse.ArgumentParser:
    """Function to declare the sub-commands and their shared flags."""
    parser = argparse.ArgumentParser(prog="accel-config", description=__doc__.splitlines()[0])
    parser.add_argument("--log-level", default=None, help="loguru level, defaults to ACCEL_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("opt", "optimize a program and print the canonical IR"),
            ("sim", "simulate a program and print the cycle summary"),
            ("roofline", "measure roofline points of the pipeline variants"),
            ("report", "sweep benchmark sizes and tabulate speedups"),
            ("random", "print a seeded random program")):
        command = commands.add_parser(name, help=help_text)
        command.add_argument("--program", help="textual IR program")
        command.add_argument("--spec", help="benchmark spec path or shipped short name")
        command.add_argument("--size", type=int, help="square size override for --spec")
        command.add_argument("--sizes", help="comma separated sweep sizes for report")
        command.add_argument("--accel", action="append", default=[], help="descriptor path or short name (repeatable)")
        command.add_argument("--passes", default="", help="comma separated pass names")
        command.add_argument("--all", action="store_true", help="run every pass in canonical order")
        command.add_argument("--no-overlap", action="store_true", help="leave pipeline/overlap out")
        command.add_argument("--format", dest="output_format", choices=["text", "json", "csv"], default="text")
        command.add_argument("--timeline", help="write the timeline CSV here")
        command.add_argument("--out-dir", help="directory for CSV exports")
        command.add_argument("--seed", type=int, help="random program seed")
    return parser


def build_manifest(args: argparse.Namespace) -> RunManifest:
    """Function to turn parsed flags into a validated RunManifest.

    Args:
        args (argparse.Namespace): parsed command line.

    Returns:
        RunManifest: resolved descriptor paths, pass list and output options.
    """
    if args.command == "report" and args.spec is None:
        raise ManifestError("report needs --spec")
    passes = PassPipeline.parse("all" if args.all else args.passes).passes
    sizes = [int(size) for size in args.sizes.split(",") if size.strip()] if args.sizes else []
    return RunManifest(
        program_path=args.program,
        spec=args.spec,
        size=args.size,
        sizes=sizes,
        descriptors=[resolve_descriptor_path(name) for name in args.accel],
        passes=passes,
        output_format=args.output_format,
        out_dir=args.out_dir,
        timeline=args.timeline,
        seed=args.seed)


def print_random_program(accels: List[str], seed: int, stdout):
    """Print the seeded random program over the fields of the given descriptors."""
    descriptors = [resolve_descriptor(name) for name in accels]
    fields = {d.name: d.field_names for d in descriptors} or DEFAULT_RANDOM_FIELDS
    stdout.write(print_program(random_program(seed, fields)))


class CommandRunner:
    """Executes one sub-command from a manifest and writes its output."""

    def __init__(self, manifest: RunManifest, enable_overlap: bool = True, stdout=None):
        self.manifest = manifest
        self.enable_overlap = enable_overlap
        self.stdout = stdout or sys.stdout
        self.descriptor_list: List[AcceleratorDescriptor] = [resolve_descriptor(path) for path in manifest.descriptors]
        self.descriptors: Dict[str, AcceleratorDescriptor] = descriptor_map(self.descriptor_list)

    def write(self, text: str):
        self.stdout.write(text)

    # 1. inputs
    def target(self) -> AcceleratorDescriptor:
        if not self.descriptor_list:
            raise ManifestError("this command needs at least one --accel descriptor")
        return self.descriptor_list[0]

    def load_program(self) -> Program:
        """Parse --program or generate --spec, then verify."""
        if self.manifest.program_path is not None:
            logger.info(f"Reading program {os.path.basename(self.manifest.program_path)}")
            with open(self.manifest.program_path, encoding="utf-8") as handle:
                program = parse_program(handle.read())
        else:
            target = self.target()
            spec = resolve_matmul_spec(self.manifest.spec, target)
            if self.manifest.size is not None:
                spec = rescale_spec(spec, self.manifest.size)
            program = gen_tiled_matmul(spec, target.name, target)
        return verify_or_raise(program, self.descriptors)

    def pipeline(self) -> PassPipeline:
        return PassPipeline(passes=self.manifest.passes, enable_overlap=self.enable_overlap)

    def write_csv(self, frame, file_name: str) -> Optional[str]:
        if self.manifest.out_dir is None:
            return None
        os.makedirs(self.manifest.out_dir, exist_ok=True)
        path = os.path.join(self.manifest.out_dir, file_name)
        frame.to_csv(path, index=False)
        logger.info(f"Wrote {path}")
        return path

    # 2. commands
    def cmd_opt(self):
        output = PassPipelineRunner(self.load_program(), self.pipeline(), self.descriptors).run()
        text = print_program(output["program"])
        if self.manifest.output_format == "json":
            self.write(json.dumps({
                "program": text,
                "log": [entry.model_dump() for entry in output["log"]]}, indent=2) + "\n")
            return
        self.write(text)
        for entry in output["log"]:
            self.write(f"// {entry.describe()}\n")

    def cmd_sim(self):
        program = self.load_program()
        if self.manifest.passes:
            program = PassPipelineRunner(program, self.pipeline(), self.descriptors).run()["program"]
        result = simulate(program, self.descriptors)
        if self.manifest.timeline:
            with open(self.manifest.timeline, "w", encoding="utf-8") as handle:
                handle.write(timeline_csv(result))
            logger.info(f"Wrote timeline {self.manifest.timeline}")
        if self.manifest.output_format == "json":
            self.write(result.model_dump_json(indent=2) + "\n")
        elif self.manifest.output_format == "csv":
            summary = result.summary_dict()
            self.write(",".join(summary) + "\n" + ",".join(str(v) for v in summary.values()) + "\n")
        else:
            self.write(format_summary(result))

    def cmd_roofline(self):
        target = self.target()
        label = os.path.splitext(os.path.basename(self.manifest.program_path or self.manifest.spec))[0]
        points = ExperimentRunner(self.descriptors, target.name).measure_variants(self.load_program(), label)
        bandwidth = config_bandwidth(target)
        frame = roofline_export(points.values(), target.peak_perf, bandwidth)
        self.write_csv(frame, "roofline.csv")
        if target.mem_bandwidth is not None:
            # i_operational axis around the memory knee
            knee = target.peak_perf / target.mem_bandwidth
            grid = roofsurface_grid(
                target.peak_perf, target.mem_bandwidth, bandwidth,
                [knee * 2.0 ** e for e in range(-4, 5)],
                [target.peak_perf / bandwidth * 2.0 ** e for e in range(-4, 5)])
            self.write_csv(grid, "roofsurface.csv")
        if self.manifest.output_format == "json":
            self.write(json.dumps([point.model_dump() for point in points.values()], indent=2) + "\n")
            return
        self.write(frame.to_csv(index=False))
        if self.manifest.output_format == "text":
            for point in points.values():
                self.write(f"// {point.label}: {point.bound} (i_oc={point.i_oc:.2f}, perf={point.perf:.2f})\n")

    def cmd_report(self):
        target = self.target()
        template = resolve_matmul_spec(self.manifest.spec, target)
        sizes = self.manifest.sizes or ([self.manifest.size] if self.manifest.size else settings.REPORT_SIZES)
        output = ExperimentRunner(self.descriptors, target.name).run_report(sizes, template)
        frame = report_frame(output["rows"])
        self.write_csv(frame, "report.csv")
        if self.manifest.output_format == "json":
            self.write(json.dumps({
                "rows": [row.model_dump() for row in output["rows"]],
                "geomean_speedup": output["geomean_speedup"]}, indent=2) + "\n")
        elif self.manifest.output_format == "csv":
            self.write(frame.to_csv(index=False))
        else:
            self.write(frame.to_string(index=False) + "\n")

    def run(self, command: str):
        handler = getattr(self, f"cmd_{command}")
        handler()


def main(argv: Optional[List[str]] = None, stdout=None) -> int:
    """Function to run the CLI.

    Args:
        argv (list): arguments without the program name, defaults to sys.argv.
        stdout: stream for command output, defaults to sys.stdout.

    Returns:
        int: exit code.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        if args.command == "random":
            # random needs no program source
            print_random_program(args.accel, args.seed or 0, stdout or sys.stdout)
            return EXIT_OK
        manifest = build_manifest(args)
        CommandRunner(manifest, enable_overlap=not args.no_overlap, stdout=stdout).run(args.command)
    except (InputError, ValidationError) as error:
        logger.error(f"Input error: {error}")
        return EXIT_INPUT
    except AccelConfigError as error:
        logger.exception(f"{args.command} failed: {error}")
        return EXIT_ANALYSIS
    except OSError as error:
        logger.error(f"File error: {error}")
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
