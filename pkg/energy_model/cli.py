"""
Command-line interface.

Subcommands:
    gen-train   train a model from a robot description and a dataset
    test        evaluate a model on a dataset and export the predictions
    predict     single-state power and current/torque prediction
    synth       generate a synthetic dataset from known parameters
    fixtures    write the bundled robot descriptions and excitation specs

Exit status: 0 success, 2 usage, 3 missing or unreadable input, 4 numerical
failure. On error the last line written to stderr is
``error: code=<name> <message>``.
"""

import argparse
import logging
import re
import sys
from pathlib import Path

import numpy as np

from config import settings
from energy_model import fixtures
from energy_model.datasets.files import (
    load_dataset,
    load_robot_description,
    load_sinusoid_spec,
    load_truth,
    write_dataset,
    write_truth,
)
from energy_model.datasets.synthetic import default_truth, synth_generate
from energy_model.exceptions import (
    EnergyModelError,
    FileFormatError,
    InvalidArgumentError,
    NumericalError,
    SchemaError,
)
from energy_model.identification import gen_train_model, load_model
from energy_model.metrics import format_summary, pc_model, test_model, write_predictions, write_report
from energy_model.models.parameters import BackEmfForm
from energy_model.models.states import JointState
from energy_model.power import predict_power_series
from energy_model.regressor import build_layout

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4


class UsageError(InvalidArgumentError):
    """Raised for malformed command lines"""


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_vector(text: str) -> np.ndarray:
    """Vector literal such as ``0,0.5,-1`` or ``[0, 0.5, -1]``."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    items = [item for item in re.split(r"[,\s]+", body.strip()) if item]
    if not items:
        raise UsageError(f"empty vector literal {text!r}")
    try:
        values = np.array([float(item) for item in items])
    except ValueError:
        raise UsageError(f"malformed vector literal {text!r}") from None
    if not np.all(np.isfinite(values)):
        raise UsageError(f"vector literal {text!r} must be finite")
    return values


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def _non_negative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _print_report(reports: dict) -> None:
    columns = ("RMSE_D", "%RMSE_D", "RMSE [W]", "RMSE%", "r2")
    print("split  " + "  ".join(f"{column:>10}" for column in columns))
    for split, report in reports.items():
        values = report.headline()
        print(f"{split:<5}  " + "  ".join(f"{format_summary(values[c]):>10}" for c in columns))


def cmd_gen_train(args) -> int:
    robot = load_robot_description(args.robot)
    dataset = load_dataset(args.dataset, robot.dof)
    train_set, test_set = dataset, None
    if args.holdout:
        train_set, test_set = dataset.split(1.0 - args.holdout)
    name = args.name or (Path(args.out).stem if args.out else robot.name)
    model = gen_train_model(
        robot,
        train_set,
        name,
        estimate_payload=args.estimate_payload,
        back_emf=args.back_emf,
        model_dir=args.model_dir,
        path=args.out,
    )

    print(f"model {model.name}: {robot.dof} joints, {model.layout.total_count} unknowns, "
          f"{model.meta.sample_count} samples")
    print("fit    unknowns  rank  condition   residual_rms")
    for joint, report in enumerate(model.meta.dynamic_reports, start=1):
        print(f"joint{joint:<2} {report.n_params:>8}  {report.rank:>4}  "
              f"{format_summary(report.condition_estimate):>9}   {format_summary(report.residual_rms)}")
    report = model.meta.power_report
    print(f"power   {report.n_params:>8}  {report.rank:>4}  "
          f"{format_summary(report.condition_estimate):>9}   {format_summary(report.residual_rms)}")

    if test_set is not None:
        reports = {
            "train": test_model(model, train_set, clamp=args.clamp)[0],
            "test": test_model(model, test_set, clamp=args.clamp)[0],
        }
        _print_report(reports)
        if args.report:
            write_report(args.report, reports)
    return EXIT_OK


def cmd_test(args) -> int:
    model = load_model(args.model, args.model_dir)
    dataset = load_dataset(args.dataset, model.dof)
    report, _, _ = test_model(model, dataset, clamp=args.clamp)
    write_report(args.report, {"test": report})
    _, prediction = predict_power_series(model, dataset, clamp=args.clamp)
    predictions = args.predictions or Path(args.report).with_name(f"{Path(args.report).stem}_predictions.csv")
    write_predictions(predictions, dataset.t, prediction, dataset.power)
    _print_report({"test": report})
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model, args.model_dir)
    q, dq, ddq = (parse_vector(value) for value in (args.q, args.dq, args.ddq))
    for label, vector in (("--q", q), ("--dq", dq), ("--ddq", ddq)):
        if vector.size != model.dof:
            raise UsageError(f"{label} has {vector.size} entries, model {model.name} has {model.dof} joints")
    power, meas = pc_model(model, JointState(q=q, dq=dq, ddq=ddq), clamp=args.clamp)
    unit = "A" if model.robot.sensor_kind.value == "current" else "N*m"
    print(f"power_W {power:.6f}")
    for joint, value in enumerate(meas, start=1):
        print(f"meas_{joint}_{unit} {value:.6f}")
    return EXIT_OK


def cmd_synth(args) -> int:
    robot = load_robot_description(args.robot)
    spec = load_sinusoid_spec(args.spec)
    layout = build_layout(robot, args.estimate_payload)
    if args.truth:
        truth_dynamic, truth_power = load_truth(args.truth, layout, robot.dof)
    else:
        truth_dynamic, truth_power = default_truth(robot, layout, args.seed)
    dataset = synth_generate(
        robot,
        truth_dynamic,
        truth_power,
        spec,
        seed=args.seed,
        noise_fraction=args.noise,
        back_emf=args.back_emf,
    )
    write_dataset(args.out, dataset)
    if args.truth_out:
        write_truth(args.truth_out, truth_dynamic, truth_power)
    print(f"wrote {dataset.n_samples} samples for {robot.name} to {args.out}")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    written = fixtures.export(args.out_dir)
    for path in written:
        print(path)
    return EXIT_OK


def _add_model_args(parser) -> None:
    parser.add_argument("model", help="model file path or name in the model store")
    parser.add_argument("--model-dir", default=None, help=f"model store (default {settings.MODEL_DIR})")


def _add_clamp(parser) -> None:
    parser.add_argument(
        "--clamp",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="clamp predicted power at zero (default on)",
    )


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="energy-model", description="Manipulator energy-consumption models")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        default=settings.LOG_LEVEL.upper(),
        help="logging level",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    train = subparsers.add_parser("gen-train", help="train and persist a model")
    train.add_argument("robot", help="robot description (JSON)")
    train.add_argument("dataset", help="operational dataset (CSV)")
    train.add_argument("--out", default=None, help="model file to write")
    train.add_argument("--name", default=None, help="model name (default: output stem or robot name)")
    train.add_argument("--model-dir", default=None, help=f"model store (default {settings.MODEL_DIR})")
    train.add_argument("--estimate-payload", action="store_true", help="identify the payload wrench")
    train.add_argument("--back-emf", type=BackEmfForm.parse, default=BackEmfForm.SIGNED,
                       help="back-EMF basis: signed or abs")
    train.add_argument("--holdout", type=_fraction, default=None,
                       help="fraction of trailing samples kept out of training and evaluated")
    train.add_argument("--report", default=None, help="report table for --holdout evaluation")
    _add_clamp(train)
    train.set_defaults(handler=cmd_gen_train)

    test = subparsers.add_parser("test", help="evaluate a model on a dataset")
    _add_model_args(test)
    test.add_argument("dataset", help="operational dataset (CSV)")
    test.add_argument("--report", required=True, help="report table to write")
    test.add_argument("--predictions", default=None, help="per-sample prediction export")
    _add_clamp(test)
    test.set_defaults(handler=cmd_test)

    predict = subparsers.add_parser("predict", help="predict power at one state")
    _add_model_args(predict)
    predict.add_argument("--q", required=True, help="joint positions, e.g. 0,0.5,-1")
    predict.add_argument("--dq", required=True, help="joint velocities")
    predict.add_argument("--ddq", required=True, help="joint accelerations")
    _add_clamp(predict)
    predict.set_defaults(handler=cmd_predict)

    synth = subparsers.add_parser("synth", help="generate a synthetic dataset")
    synth.add_argument("robot", help="robot description (JSON)")
    synth.add_argument("spec", help="sinusoid spec (JSON)")
    synth.add_argument("--truth", default=None, help="truth parameters (JSON); default parameters when omitted")
    synth.add_argument("--truth-out", default=None, help="write the truth parameters used")
    synth.add_argument("--out", required=True, help="dataset file to write")
    synth.add_argument("--seed", type=int, default=0, help="noise and default-truth seed")
    synth.add_argument("--noise", type=_non_negative, default=0.0,
                       help="Gaussian noise on meas and power as a fraction of channel RMS")
    synth.add_argument("--estimate-payload", action="store_true", help="truth includes the payload wrench")
    synth.add_argument("--back-emf", type=BackEmfForm.parse, default=BackEmfForm.SIGNED,
                       help="back-EMF form of the generated power")
    synth.set_defaults(handler=cmd_synth)

    fixture = subparsers.add_parser("fixtures", help="write the bundled fixtures")
    fixture.add_argument("out_dir", help="destination directory")
    fixture.set_defaults(handler=cmd_fixtures)
    return parser


def _fail(code: int, name: str, message) -> int:
    print(f"error: code={name} {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        return _fail(EXIT_USAGE, "usage", e)

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except (FileNotFoundError, IsADirectoryError) as e:
        return _fail(EXIT_INPUT, "missing-input", e)
    except (FileFormatError, SchemaError) as e:
        return _fail(EXIT_INPUT, "input", e)
    except (NumericalError, np.linalg.LinAlgError) as e:
        return _fail(EXIT_NUMERICAL, "numerical", e)
    except InvalidArgumentError as e:
        return _fail(EXIT_USAGE, "usage", e)
    except EnergyModelError as e:
        logger.exception(e)
        return _fail(EXIT_FAILURE, "error", e)
