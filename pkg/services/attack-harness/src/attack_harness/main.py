"""Command-line entry point for training, attacking and evaluating models.

Subcommands::

    sfw train    --model linear --data synth:train --epochs 50 --out model.txt
    sfw attack   --model model.txt --ball nuclear --eps 2 --steps 20 --out runs/
    sfw sweep    --model model.txt --axis eps --values 0,0.5,1,2,4 --out runs/
    sfw transfer --models a.txt,b.txt --ball nuclear --eps 2 --out runs/
    sfw census   --model model.txt --eps 1 --out runs/
    sfw selftest

Exit codes: 0 on success, 2 on invalid input (including usage errors),
3 on runtime failures and failed self-tests.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path
from typing import TYPE_CHECKING

from attack_harness.datasets import resolve_source
from attack_harness.experiments import (
    BallAdapter,
    accuracy_under_attack,
    pixel_census,
    sweep,
    transfer_matrix,
)
from attack_harness.group_spec import load_group_spec, load_weights, variance_weights
from attack_harness.imaging import emit_heatmap, emit_image
from attack_harness.reports import (
    write_census_report,
    write_metrics_report,
    write_sweep_diagnostics,
    write_transfer_report,
)
from attack_harness.selftest import run_selftest
from attack_harness.settings import HarnessSettings, get_settings, load_config_file
from sfw_attacks.registry import default_registry as attack_registry
from sfw_core.errors import ValidationFailure
from sfw_core.models.attack import AttackConfig
from sfw_core.models.balls import (
    DistortionBall,
    GroupNuclearBall,
    GroupSelection,
    LpBall,
    Matricization,
    SchattenBall,
)
from sfw_core.models.groups import GroupPartition
from sfw_core.models.loss import LossMode
from sfw_core.models.report import MetricsReport, ReportMeta
from sfw_core.models.steps import parse_step_rule
from sfw_core.tensor import FloatArray  # noqa: TC001
from sfw_models.base import ModelKind
from sfw_models.registry import default_registry as model_registry
from sfw_models.serialization import load_model, save_model
from sfw_models.training import train_sgd

if TYPE_CHECKING:
    from collections.abc import Sequence

    from sfw_core.models.dataset import Dataset
    from sfw_models.base import NumpyClassifier

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

SUBCOMMANDS = ("train", "attack", "sweep", "transfer", "census", "selftest")

#: Options that take no value; config files set them with true/false.
BOOLEAN_OPTIONS = frozenset({"random-start", "verbose"})

BALL_CHOICES = ("nuclear", "schatten", "groupnuclear", "linf", "l1", "l2")


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parent.add_argument("--seed", type=int, default=None, help="global seed (default SFW_SEED)")
    parent.add_argument(
        "--workers", type=int, default=None, help="attack worker threads (default SFW_WORKERS)"
    )
    return parent


def _attack_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--data", default="synth:test", help="dataset source")
    parent.add_argument("--attack", default="fw", help="attack name")
    parent.add_argument("--ball", choices=BALL_CHOICES, default="nuclear")
    parent.add_argument("--eps", type=float, default=1.0, help="ball radius")
    parent.add_argument("--q", type=float, default=1.0, help="Schatten order (inf allowed)")
    parent.add_argument(
        "--matricization",
        choices=[m.value for m in Matricization],
        default=Matricization.STACKED.value,
    )
    parent.add_argument("--groups", type=Path, default=None, help="group spec file")
    parent.add_argument("--grid", default=None, help="grid partition ROWSxCOLS")
    parent.add_argument("--weights", default=None, help="'auto' or a weights file")
    parent.add_argument(
        "--selection",
        choices=[s.value for s in GroupSelection],
        default=GroupSelection.SPECTRAL.value,
    )
    parent.add_argument("--steps", type=int, default=20)
    parent.add_argument("--rule", default="backtrack", help="short:L, backtrack or harmonic")
    parent.add_argument("--step-size", type=float, default=None, help="PGD step size alpha")
    parent.add_argument("--random-start", action="store_true")
    parent.add_argument("--block", type=int, default=None, help="groups sampled per iteration")
    parent.add_argument("--target", type=int, default=None, help="target class (targeted mode)")
    parent.add_argument("--limit", type=int, default=None, help="attack the first N images")
    parent.add_argument("--out", type=Path, default=None, help="output directory")
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Build the ``sfw`` argument parser."""
    parser = argparse.ArgumentParser(
        prog="sfw",
        description="Frank-Wolfe adversarial attacks over structured norm balls",
    )
    parser.add_argument("--config", type=Path, default=None, help="key=value defaults file")
    commands = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    attack_options = _attack_options()

    train = commands.add_parser("train", parents=[common], help="train a classifier")
    train.add_argument("--model", choices=[k.value for k in ModelKind], default="linear")
    train.add_argument("--data", default="synth:train")
    train.add_argument("--epochs", type=int, default=50)
    train.add_argument("--lr", type=float, default=0.1)
    train.add_argument("--batch-size", type=int, default=32)
    train.add_argument("--hidden", type=int, default=None, help="MLP hidden width")
    train.add_argument("--filters", type=int, default=None, help="conv filter count")
    train.add_argument("--out", type=Path, required=True, help="model file to write")

    attack = commands.add_parser(
        "attack", parents=[common, attack_options], help="accuracy under attack"
    )
    attack.add_argument("--model", type=Path, required=True)
    attack.add_argument(
        "--emit-images", type=int, default=0, help="write the first N images and heatmaps"
    )

    sweep_cmd = commands.add_parser(
        "sweep", parents=[common, attack_options], help="accuracy versus eps or steps"
    )
    sweep_cmd.add_argument("--model", type=Path, required=True)
    sweep_cmd.add_argument("--axis", choices=["eps", "steps"], required=True)
    sweep_cmd.add_argument("--values", required=True, help="comma-separated, increasing")

    transfer = commands.add_parser(
        "transfer", parents=[common, attack_options], help="fooling-rate matrix"
    )
    transfer.add_argument("--models", required=True, help="comma-separated model files")

    census = commands.add_parser("census", parents=[common], help="rank-one pixel census")
    census.add_argument("--model", type=Path, required=True)
    census.add_argument("--data", default="synth:test")
    census.add_argument("--eps", type=float, default=1.0)
    census.add_argument("--limit", type=int, default=None)
    census.add_argument("--out", type=Path, default=None)

    commands.add_parser("selftest", parents=[common], help="run the invariant suite")
    return parser


def _config_arguments(values: dict[str, str]) -> list[str]:
    args: list[str] = []
    for key, value in values.items():
        if key in BOOLEAN_OPTIONS:
            if value.lower() in ("1", "true", "yes", "on"):
                args.append(f"--{key}")
            elif value.lower() not in ("0", "false", "no", "off"):
                msg = f"config option {key} expects true or false, got {value!r}"
                raise ValidationFailure(msg)
        else:
            args.extend([f"--{key}", value])
    return args


def expand_config(argv: Sequence[str]) -> list[str]:
    """Splice ``--config`` file values in right after the subcommand.

    Options given explicitly on the command line come later and therefore
    override the file.
    """
    args = list(argv)
    config: str | None = None
    for i, arg in enumerate(args):
        if arg == "--config" and i + 1 < len(args):
            config = args[i + 1]
            del args[i : i + 2]
            break
        if arg.startswith("--config="):
            config = arg.split("=", 1)[1]
            del args[i]
            break
    if config is None:
        return args
    extra = _config_arguments(load_config_file(config))
    for i, arg in enumerate(args):
        if arg in SUBCOMMANDS:
            return [*args[: i + 1], *extra, *args[i + 1 :]]
    return args


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _parse_float(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def _load_data(source: str, limit: int | None) -> Dataset:
    dataset = resolve_source(source)
    if limit is not None:
        if limit < 1:
            msg = f"--limit must be positive, got {limit}"
            raise ValidationFailure(msg)
        dataset = dataset.subset(range(min(limit, len(dataset))))
    return dataset


def _partition(args: argparse.Namespace, shape: tuple[int, int, int]) -> GroupPartition:
    if args.groups is not None and args.grid is not None:
        msg = "--groups and --grid are mutually exclusive"
        raise ValidationFailure(msg)
    if args.groups is not None:
        partition = load_group_spec(args.groups, shape)
    elif args.grid is not None:
        rows, sep, cols = args.grid.lower().partition("x")
        if not sep or not rows.isdigit() or not cols.isdigit():
            msg = f"--grid must look like ROWSxCOLS, got {args.grid!r}"
            raise ValidationFailure(msg)
        partition = GroupPartition.grid(shape, int(rows), int(cols))
    else:
        partition = GroupPartition.per_channel(shape)
    if args.weights is not None and args.weights != "auto":
        partition = load_weights(args.weights, partition)
    return partition


def build_ball(args: argparse.Namespace, shape: tuple[int, int, int]) -> DistortionBall:
    """Translate the ball options into a distortion ball for images of ``shape``."""
    matricization = Matricization(args.matricization)
    if args.ball == "nuclear":
        return SchattenBall.nuclear(args.eps, matricization)
    if args.ball == "schatten":
        return SchattenBall(q=args.q, radius=args.eps, matricization=matricization)
    if args.ball == "groupnuclear":
        return GroupNuclearBall(
            partition=_partition(args, shape),
            radius=args.eps,
            selection=GroupSelection(args.selection),
        )
    p = {"linf": math.inf, "l1": 1.0, "l2": 2.0}[args.ball]
    return LpBall(p=p, radius=args.eps)


def build_config(args: argparse.Namespace, shape: tuple[int, int, int]) -> AttackConfig:
    """Translate the attack options into an :class:`AttackConfig`."""
    targeted = args.target is not None
    return AttackConfig(
        ball=build_ball(args, shape),
        steps=args.steps,
        rule=parse_step_rule(args.rule),
        step_size=args.step_size,
        random_start=args.random_start,
        loss_mode=LossMode.TARGETED if targeted else LossMode.UNTARGETED,
        target_label=args.target,
        block_count=args.block,
    )


def _ball_adapter(args: argparse.Namespace, settings: HarnessSettings) -> BallAdapter | None:
    if args.weights != "auto":
        return None
    if args.ball != "groupnuclear":
        msg = "--weights auto needs --ball groupnuclear"
        raise ValidationFailure(msg)
    kappa = settings.variance_kappa

    def adapt(x: FloatArray, ball: DistortionBall) -> DistortionBall:
        if not isinstance(ball, GroupNuclearBall):
            return ball
        return ball.model_copy(update={"partition": variance_weights(x, ball.partition, kappa)})

    return adapt


def _meta(
    model_id: str,
    dataset: Dataset,
    seed: int,
    settings: HarnessSettings,
    started: float,
) -> ReportMeta:
    wall = time.perf_counter() - started if settings.report_wall_time else None
    return ReportMeta(model_id=model_id, dataset_id=dataset.name, seed=seed, wall_time_seconds=wall)


def _out_dir(args: argparse.Namespace, settings: HarnessSettings) -> Path:
    return Path(args.out) if args.out is not None else settings.output_dir


def _check_model(model: NumpyClassifier, dataset: Dataset, path: Path | str) -> None:
    if model.input_shape != dataset.image_shape:
        msg = (
            f"shape mismatch: model {path} expects {model.input_shape}, "
            f"dataset {dataset.name} has {dataset.image_shape}"
        )
        raise ValidationFailure(msg)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_train(args: argparse.Namespace, seed: int) -> int:
    """Train a classifier and save it in the model text format."""
    dataset = resolve_source(args.data)
    options: dict[str, int] = {}
    if args.model != ModelKind.LINEAR:
        options["seed"] = seed
    if args.hidden is not None:
        options["hidden"] = args.hidden
    if args.filters is not None:
        options["filters"] = args.filters
    model = model_registry.create(
        args.model, dataset.image_shape, max(dataset.num_classes, 2), **options
    )
    result = train_sgd(
        model, dataset, epochs=args.epochs, lr=args.lr, seed=seed, batch_size=args.batch_size
    )
    save_model(result.model, args.out)
    print(f"trained {args.model} on {dataset.name}: train accuracy {100 * result.train_accuracy:.2f}%")
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_attack(args: argparse.Namespace, settings: HarnessSettings, seed: int, workers: int) -> int:
    """Evaluate accuracy under attack and write the report."""
    started = time.perf_counter()
    dataset = _load_data(args.data, args.limit)
    model = load_model(args.model)
    _check_model(model, dataset, args.model)
    cfg = build_config(args, dataset.image_shape)
    row, results = accuracy_under_attack(
        model,
        dataset,
        args.attack,
        cfg,
        workers=workers,
        seed=seed,
        registry=attack_registry,
        ball_for=_ball_adapter(args, settings),
    )
    out = _out_dir(args, settings)
    report = MetricsReport(
        meta=_meta(Path(args.model).name, dataset, seed, settings, started), rows=[row]
    )
    csv_path, _ = write_metrics_report(report, out, "attack")
    if args.emit_images:
        images = out / "images"
        images.mkdir(parents=True, exist_ok=True)
        for index, result in enumerate(results[: args.emit_images]):
            suffix = "pgm" if result.x_adv.shape[0] == 1 else "ppm"
            emit_image(result.x_adv, images / f"{index:04d}_adv.{suffix}")
            emit_heatmap(result.perturbation, images / f"{index:04d}_heat.{suffix}")
    print(
        f"{row.attack} {row.ball} eps={row.eps:g} steps={row.steps}: "
        f"clean {row.clean_accuracy:.2f}%, attacked {row.attacked_accuracy:.2f}%, "
        f"success {row.success_rate:.2f}%"
    )
    print(f"report written to {csv_path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: HarnessSettings, seed: int, workers: int) -> int:
    """Run an eps or steps sweep and write the curve table."""
    started = time.perf_counter()
    dataset = _load_data(args.data, args.limit)
    model = load_model(args.model)
    _check_model(model, dataset, args.model)
    try:
        values = [_parse_float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        msg = f"--values must be comma-separated numbers, got {args.values!r}"
        raise ValidationFailure(msg) from exc
    cfg = build_config(args, dataset.image_shape)
    result = sweep(
        model,
        dataset,
        args.attack,
        cfg,
        args.axis,
        values,
        tolerance=settings.monotone_tolerance,
        workers=workers,
        seed=seed,
        registry=attack_registry,
        ball_for=_ball_adapter(args, settings),
    )
    out = _out_dir(args, settings)
    report = MetricsReport(
        meta=_meta(Path(args.model).name, dataset, seed, settings, started), rows=result.rows
    )
    csv_path, _ = write_metrics_report(report, out, f"sweep_{result.axis}")
    write_sweep_diagnostics(result, out, f"sweep_{result.axis}")
    for value, row in zip(result.values, result.rows, strict=True):
        print(f"{result.axis}={value:g}: attacked {row.attacked_accuracy:.2f}%")
    print(f"monotone: {'yes' if result.monotone else 'no'}; report written to {csv_path}")
    return EXIT_OK


def cmd_transfer(
    args: argparse.Namespace, settings: HarnessSettings, seed: int, workers: int
) -> int:
    """Compute the fooling-rate matrix between several models."""
    dataset = _load_data(args.data, args.limit)
    paths = [Path(p.strip()) for p in args.models.split(",") if p.strip()]
    models = [load_model(path) for path in paths]
    for model, path in zip(models, paths, strict=True):
        _check_model(model, dataset, path)
    cfg = build_config(args, dataset.image_shape)
    matrix = transfer_matrix(
        models,
        dataset,
        args.attack,
        cfg,
        model_ids=[path.name for path in paths],
        workers=workers,
        seed=seed,
        registry=attack_registry,
        ball_for=_ball_adapter(args, settings),
    )
    csv_path, _ = write_transfer_report(matrix, _out_dir(args, settings), "transfer")
    for source, rates in zip(matrix.model_ids, matrix.rates, strict=True):
        print(f"{source}: " + " ".join(f"{rate:6.2f}" for rate in rates))
    print(f"report written to {csv_path}")
    return EXIT_OK


def cmd_census(args: argparse.Namespace, settings: HarnessSettings) -> int:
    """Histogram of 8-bit modified entries under rank-one perturbations."""
    dataset = _load_data(args.data, args.limit)
    model = load_model(args.model)
    _check_model(model, dataset, args.model)
    census = pixel_census(model, dataset, args.eps)
    csv_path, _ = write_census_report(census, _out_dir(args, settings), "census")
    for count, images in census.histogram:
        print(f"{count:5d} modified: {images} images")
    print(f"report written to {csv_path}")
    return EXIT_OK


def cmd_selftest() -> int:
    """Run the invariant suite; exit 3 if any check fails."""
    outcomes = run_selftest()
    for outcome in outcomes:
        status = "PASS" if outcome.passed else "FAIL"
        print(f"{status} {outcome.name}: {outcome.detail}")
    failed = sum(not outcome.passed for outcome in outcomes)
    print(f"{len(outcomes) - failed}/{len(outcomes)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_RUNTIME


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and run the selected subcommand.

    Usage errors raise ``SystemExit(2)`` from argparse; every other failure
    is logged and mapped to an exit code.
    """
    try:
        settings = get_settings()
    except ValueError as exc:
        logging.basicConfig()
        logger.error("Invalid settings: %s", exc)
        return EXIT_VALIDATION
    try:
        args = build_parser().parse_args(expand_config(sys.argv[1:] if argv is None else argv))
    except (ValidationFailure, OSError) as exc:
        logging.basicConfig(level=settings.log_level)
        logger.error("Invalid configuration: %s", exc)
        return EXIT_VALIDATION

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    seed = settings.seed if args.seed is None else args.seed
    workers = settings.workers if args.workers is None else args.workers

    try:
        if args.command == "train":
            return cmd_train(args, seed)
        if args.command == "attack":
            return cmd_attack(args, settings, seed, workers)
        if args.command == "sweep":
            return cmd_sweep(args, settings, seed, workers)
        if args.command == "transfer":
            return cmd_transfer(args, settings, seed, workers)
        if args.command == "census":
            return cmd_census(args, settings)
        return cmd_selftest()
    except (ValueError, KeyError, OSError) as exc:
        logger.error("Invalid input: %s", exc)
        return EXIT_VALIDATION
    except (RuntimeError, ArithmeticError) as exc:
        logger.error("Run failed: %s", exc)
        return EXIT_RUNTIME


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())
