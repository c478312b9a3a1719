"""
Readers and writers for robot descriptions, datasets, sinusoid specs and
truth-parameter files.

Writers go through a temporary file in the destination directory that is
renamed into place, so a failed run never leaves a partial output behind.
"""

import json
import logging
import math
import os
import re
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd

from config import settings
from energy_model.exceptions import FileFormatError, InvalidArgumentError, SchemaError
from energy_model.models.parameters import (
    DynamicParameters,
    ParameterLayout,
    PowerParameters,
    power_parameter_names,
)
from energy_model.models.robot import (
    DhRow,
    GravityConvention,
    MotorConstants,
    PayloadWrench,
    RobotDescription,
)
from energy_model.models.states import OperationalDataset, SinusoidSpec

logger = logging.getLogger(__name__)

ROBOT_FIELDS = {"name", "convention", "sensor_kind", "dh", "links", "payload", "motor_constants", "gravity", "notes"}
DH_FIELDS = {"d", "a", "alpha", "theta_offset", "static"}
SINUSOID_JOINT_FIELDS = ("theta0", "amplitude", "frequency", "phase")

_ANGLE = re.compile(
    r"^(?P<sign>[+-])?\s*(?:(?P<factor>\d+(?:\.\d*)?)\s*\*?\s*)?pi(?:\s*/\s*(?P<divisor>\d+(?:\.\d*)?))?$"
)


@contextmanager
def atomic_write(path, mode="w"):
    """Open a temporary sibling of ``path`` and rename it over ``path`` on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(handle, mode, newline="" if "b" not in mode else None) as stream:
            yield stream
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


def read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise FileFormatError(f"not UTF-8 text (byte offset {e.start})", path=path) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"invalid JSON: {e.msg}", path=path, line=e.lineno) from e
    if not isinstance(data, dict):
        raise FileFormatError("top-level JSON value must be an object", path=path, line=1)
    return data


def write_json(path, data: dict) -> None:
    with atomic_write(path) as stream:
        json.dump(data, stream, indent=2)
        stream.write("\n")


def parse_angle(value, field=None, path=None) -> float:
    """Angle in radians from a number or a literal such as ``"pi/2"`` or ``"-2*pi/3"``."""
    if isinstance(value, bool):
        raise FileFormatError(f"expected an angle, got {value!r}", path=path, field=field)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip().lower()
        match = _ANGLE.match(text)
        if match:
            angle = math.pi * float(match.group("factor") or 1.0)
            if match.group("divisor"):
                angle /= float(match.group("divisor"))
            return -angle if match.group("sign") == "-" else angle
        try:
            return float(text)
        except ValueError:
            pass
    raise FileFormatError(f"cannot read angle {value!r}", path=path, field=field)


def _number(value, field, path=None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FileFormatError(f"expected a number, got {value!r}", path=path, field=field)
    return float(value)


def _flag(value, field, path=None) -> bool:
    if not isinstance(value, bool):
        raise FileFormatError(f"expected true or false, got {value!r}", path=path, field=field)
    return value


def _numbers(value, field, path=None, length=None) -> list:
    if not isinstance(value, list):
        raise FileFormatError(f"expected a list of numbers, got {value!r}", path=path, field=field)
    numbers = [_number(item, f"{field}[{k}]", path) for k, item in enumerate(value)]
    if length is not None and len(numbers) != length:
        raise FileFormatError(f"expected {length} numbers, got {len(numbers)}", path=path, field=field)
    return numbers


def _reject_unknown(data: dict, allowed, where: str, path=None) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise FileFormatError(f"unknown field '{unknown[0]}' in {where}", path=path, field=unknown[0])


def _require(data: dict, key: str, where: str, path=None):
    if key not in data:
        raise FileFormatError(f"missing field '{key}' in {where}", path=path, field=key)
    return data[key]


def robot_from_dict(data: dict, path=None) -> RobotDescription:
    """Validated ``RobotDescription`` from its document form."""
    _reject_unknown(data, ROBOT_FIELDS, "robot description", path)
    dh = _require(data, "dh", "robot description", path)
    links = _require(data, "links", "robot description", path)
    if not isinstance(dh, list) or not isinstance(links, list):
        raise FileFormatError("'dh' and 'links' must be lists", path=path, field="dh")

    rows = []
    for k, entry in enumerate(dh):
        where = f"dh[{k}]"
        if not isinstance(entry, dict):
            raise FileFormatError(f"{where} must be an object", path=path, field=where)
        _reject_unknown(entry, DH_FIELDS, where, path)
        try:
            rows.append(
                DhRow(
                    d=_number(_require(entry, "d", where, path), f"{where}.d", path),
                    a=_number(_require(entry, "a", where, path), f"{where}.a", path),
                    alpha=parse_angle(_require(entry, "alpha", where, path), f"{where}.alpha", path),
                    theta_offset=parse_angle(entry.get("theta_offset", 0.0), f"{where}.theta_offset", path),
                    static=_flag(entry.get("static", False), f"{where}.static", path),
                )
            )
        except InvalidArgumentError as e:
            raise FileFormatError(str(e), path=path, field=where) from e

    masses, coms = [], []
    for k, entry in enumerate(links):
        where = f"links[{k}]"
        if not isinstance(entry, dict):
            raise FileFormatError(f"{where} must be an object", path=path, field=where)
        _reject_unknown(entry, {"mass", "com"}, where, path)
        masses.append(_number(_require(entry, "mass", where, path), f"{where}.mass", path))
        coms.append(_numbers(_require(entry, "com", where, path), f"{where}.com", path, 3))
    if len(masses) != len(rows):
        raise FileFormatError(
            f"robot has {len(rows)} DH rows but {len(masses)} links", path=path, field="links"
        )

    payload_data = data.get("payload", {})
    if not isinstance(payload_data, dict):
        raise FileFormatError("'payload' must be an object", path=path, field="payload")
    _reject_unknown(payload_data, {"mass", "force", "moment"}, "payload", path)
    try:
        payload = PayloadWrench(
            force=_numbers(payload_data.get("force", [0.0, 0.0, 0.0]), "payload.force", path, 3),
            moment=_numbers(payload_data.get("moment", [0.0, 0.0, 0.0]), "payload.moment", path, 3),
            mass=_number(payload_data.get("mass", 0.0), "payload.mass", path),
        )
        motors = None
        if data.get("motor_constants") is not None:
            motors = MotorConstants(k_m=_numbers(data["motor_constants"], "motor_constants", path))
        gravity = GravityConvention()
        if data.get("gravity") is not None:
            gravity = GravityConvention(g_vector=_numbers(data["gravity"], "gravity", path, 3))
        robot = RobotDescription(
            name=str(data.get("name", Path(path).stem if path else "robot")),
            dh_rows=rows,
            convention=data.get("convention", "traditional"),
            link_masses=masses,
            link_coms=coms,
            payload=payload,
            sensor_kind=data.get("sensor_kind", "current"),
            motor_constants=motors,
            gravity=gravity,
        )
    except InvalidArgumentError as e:
        raise FileFormatError(str(e), path=path) from e
    if motors is None:
        logger.warning(
            f"robot {robot.name} has no motor torque constants, using k_m = {settings.DEFAULT_TORQUE_CONSTANT}"
        )
    return robot


def load_robot_description(path) -> RobotDescription:
    robot = robot_from_dict(read_json(path), path=path)
    logger.info(f"loaded robot {robot.name}: {robot.dof} actuated joints, {robot.convention.name.lower()} DH")
    return robot


def write_robot_description(path, robot: RobotDescription) -> None:
    write_json(path, robot.to_dict())


def dataset_columns(dof: int, meas: bool = True, power: bool = True) -> list:
    groups = ["q", "dq", "ddq"] + (["meas"] if meas else [])
    columns = ["t"] + [f"{group}_{j}" for group in groups for j in range(1, dof + 1)]
    return columns + (["power"] if power else [])


def _group_width(header, group: str) -> int:
    width = 0
    while f"{group}_{width + 1}" in header:
        width += 1
    return width


def load_dataset(path, dof=None) -> OperationalDataset:
    """
    Read a dataset CSV. ``meas_*`` and ``power`` are optional column groups.

    Raises:
        FileFormatError: malformed file, missing columns or non-numeric cells
        SchemaError: channel width differs from ``dof``, non-finite values,
            non-increasing timestamps

    Row numbers on both errors are file lines, the header being line 1.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip", skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise FileFormatError("dataset file is empty", path=path, line=1) from e
    except pd.errors.ParserError as e:
        raise FileFormatError(f"cannot parse dataset: {e}", path=path) from e
    except UnicodeDecodeError as e:
        raise FileFormatError(f"dataset is not UTF-8 text (byte offset {e.start})", path=path) from e

    header = [str(column).strip() for column in frame.columns]
    frame.columns = header
    if "t" not in header:
        raise FileFormatError("missing column 't'", path=path, line=1, field="t")
    width = _group_width(header, "q")
    if dof is None:
        dof = width
    if dof == 0:
        raise SchemaError(f"{path}: missing channel 'q_1'", channel="q_1")
    if width != dof:
        channel = f"q_{min(width, dof) + 1}"
        raise SchemaError(
            f"{path}: dataset has {width} joint channels but the robot has {dof} actuated joints "
            f"(channel '{channel}')",
            channel=channel,
        )
    has_meas = "meas_1" in header
    expected = dataset_columns(dof, meas=has_meas, power="power" in header)
    for column in expected:
        if column not in header:
            raise SchemaError(f"{path}: missing channel '{column}'", channel=column)
    extra = [column for column in header if column not in expected]
    if extra:
        raise SchemaError(f"{path}: unexpected channel '{extra[0]}'", channel=extra[0])

    n = len(frame)
    values = {}
    for column in expected:
        series = frame[column]
        if n and not pd.api.types.is_numeric_dtype(series):
            series = pd.to_numeric(series, errors="coerce")
        bad = series.isna().to_numpy()
        if bad.any():
            row = int(np.argmax(bad))
            raise FileFormatError(
                f"non-numeric or missing value {frame[column].iloc[row]!r}",
                path=path,
                line=row + 2,
                field=column,
            )
        values[column] = series.to_numpy(dtype=float)

    def group(name):
        if not n:
            return np.zeros((0, dof))
        return np.column_stack([values[f"{name}_{j}"] for j in range(1, dof + 1)])

    try:
        dataset = OperationalDataset(
            t=values["t"],
            q=group("q"),
            dq=group("dq"),
            ddq=group("ddq"),
            meas=group("meas") if has_meas else None,
            power=values.get("power"),
        )
    except SchemaError as e:
        line = None if e.row is None else e.row + 2
        where = "" if line is None else f" (line {line})"
        raise SchemaError(f"{path}: {e}{where}", channel=e.channel, row=line) from e
    logger.info(f"loaded {dataset.n_samples} samples from {path}")
    return dataset


def dataset_frame(dataset: OperationalDataset) -> pd.DataFrame:
    dof = dataset.dof
    data = {"t": dataset.t}
    groups = [("q", dataset.q), ("dq", dataset.dq), ("ddq", dataset.ddq)]
    if dataset.meas is not None:
        groups.append(("meas", dataset.meas))
    for name, array in groups:
        for j in range(dof):
            data[f"{name}_{j + 1}"] = array[:, j]
    if dataset.power is not None:
        data["power"] = dataset.power
    return pd.DataFrame(data)


def write_frame(path, frame: pd.DataFrame) -> None:
    with atomic_write(path) as stream:
        frame.to_csv(stream, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")


def write_dataset(path, dataset: OperationalDataset) -> None:
    write_frame(path, dataset_frame(dataset))


def sinusoid_from_dict(data: dict, path=None) -> SinusoidSpec:
    _reject_unknown(data, {"duration", "sample_rate", "joints"}, "sinusoid spec", path)
    joints = _require(data, "joints", "sinusoid spec", path)
    if not isinstance(joints, list):
        raise FileFormatError("'joints' must be a list", path=path, field="joints")
    columns = {name: [] for name in SINUSOID_JOINT_FIELDS}
    for k, joint in enumerate(joints):
        where = f"joints[{k}]"
        if not isinstance(joint, dict):
            raise FileFormatError(f"{where} must be an object", path=path, field=where)
        _reject_unknown(joint, SINUSOID_JOINT_FIELDS, where, path)
        for name in SINUSOID_JOINT_FIELDS:
            reader = parse_angle if name in ("theta0", "amplitude", "phase") else _number
            columns[name].append(reader(_require(joint, name, where, path), f"{where}.{name}", path))
    return SinusoidSpec(
        duration=_number(_require(data, "duration", "sinusoid spec", path), "duration", path),
        sample_rate=_number(data.get("sample_rate", settings.DEFAULT_SAMPLE_RATE), "sample_rate", path),
        **columns,
    )


def load_sinusoid_spec(path) -> SinusoidSpec:
    return sinusoid_from_dict(read_json(path), path=path)


def write_sinusoid_spec(path, spec: SinusoidSpec) -> None:
    write_json(path, spec.to_dict())


def _keyed_vector(section: dict, names, where: str, path=None) -> np.ndarray:
    if not isinstance(section, dict):
        raise FileFormatError(f"'{where}' must be an object", path=path, field=where)
    _reject_unknown(section, names, where, path)
    return np.array([_number(_require(section, name, where, path), f"{where}.{name}", path) for name in names])


def load_truth(path, layout: ParameterLayout, dof: int):
    """
    Ground-truth parameters keyed by descriptor name.

    Returns:
        (DynamicParameters, PowerParameters)
    """
    data = read_json(path)
    _reject_unknown(data, {"format_version", "dynamic", "power"}, "truth file", path)
    version = data.get("format_version")
    if version != settings.TRUTH_FORMAT_VERSION:
        raise FileFormatError(f"unsupported truth format version {version!r}", path=path, field="format_version")
    dynamic = _keyed_vector(_require(data, "dynamic", "truth file", path), layout.names, "dynamic", path)
    power = _keyed_vector(_require(data, "power", "truth file", path), power_parameter_names(dof), "power", path)
    return DynamicParameters.from_global(layout, dynamic), PowerParameters(power)


def write_truth(path, dynamic: DynamicParameters, power: PowerParameters) -> None:
    write_json(
        path,
        {
            "format_version": settings.TRUTH_FORMAT_VERSION,
            "dynamic": dict(zip(dynamic.layout.names, dynamic.to_global().tolist())),
            "power": dict(zip(power.names, power.values.tolist())),
        },
    )
