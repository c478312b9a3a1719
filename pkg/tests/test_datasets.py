import json
import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from energy_model import fixtures
from energy_model.datasets import (
    differentiate,
    generate_sinusoid,
    load_dataset,
    load_robot_description,
    load_sinusoid_spec,
    load_truth,
    write_dataset,
    write_robot_description,
    write_sinusoid_spec,
    write_truth,
)
from energy_model.datasets.files import parse_angle
from energy_model.datasets.synthetic import default_truth, synth_generate
from energy_model.exceptions import FileFormatError, InvalidArgumentError, SchemaError
from energy_model.models.robot import DhConvention
from energy_model.models.states import OperationalDataset, SinusoidSpec
from energy_model.regressor import build_layout
from tests.conftest import short_spec


def _write(path, text):
    path.write_text(text)
    return path


def _csv(rows, header="t,q_1,dq_1,ddq_1,meas_1,power"):
    return header + "\n" + "\n".join(rows) + "\n"


def test_bundled_ur3e():
    robot = fixtures.load_robot("ur3e")
    assert robot.dof == 6
    assert_allclose([row.d for row in robot.dh_rows], [0.151, 0, 0, 0.131, 0.085, 0.092])
    assert_allclose(robot.dh_rows[0].alpha, np.pi / 2)
    assert robot.convention is DhConvention.TRADITIONAL


def test_bundled_fr3_and_gen3():
    fr3 = fixtures.load_robot("fr3")
    assert fr3.convention is DhConvention.MODIFIED
    assert fr3.dof == 7
    gen3 = fixtures.load_robot("gen3")
    assert gen3.n_links == 8
    assert gen3.dof == 7
    assert gen3.dh_rows[0].static


def test_bundled_specs_match_robots():
    for name in fixtures.ROBOTS:
        spec = fixtures.load_sinusoid(name)
        assert spec.dof == fixtures.load_robot(name).dof
        assert spec.n_samples == 50_000


def test_reference_results_are_bundled():
    results = fixtures.reference_results()
    assert "description" in results


def test_fixture_export(tmp_path):
    written = fixtures.export(tmp_path)
    assert {path.name for path in written} >= {"ur3e.json", "fr3_sinusoid.json", "reference_results.json"}
    assert load_robot_description(tmp_path / "gen3.json").dof == 7


@pytest.mark.parametrize(
    "text, expected",
    [("pi", np.pi), ("pi/2", np.pi / 2), ("-pi/2", -np.pi / 2), ("-2*pi/3", -2 * np.pi / 3), ("0", 0.0), (1.5, 1.5)],
)
def test_parse_angle(text, expected):
    assert parse_angle(text) == pytest.approx(expected)


def test_parse_angle_rejects_garbage():
    with pytest.raises(FileFormatError):
        parse_angle("half a turn")
    with pytest.raises(FileFormatError):
        parse_angle(True)


def test_robot_round_trip(tmp_path, fr3):
    write_robot_description(tmp_path / "fr3.json", fr3)
    again = load_robot_description(tmp_path / "fr3.json")
    assert again.to_dict() == fr3.to_dict()


def test_robot_mass_count_mismatch(tmp_path):
    data = json.loads(fixtures.robot_path("ur3e").read_text())
    data["links"] = data["links"][:5]
    with pytest.raises(FileFormatError) as excinfo:
        load_robot_description(_write(tmp_path / "bad.json", json.dumps(data)))
    assert excinfo.value.field == "links"


def test_robot_unknown_field(tmp_path):
    data = json.loads(fixtures.robot_path("ur3e").read_text())
    data["colour"] = "blue"
    with pytest.raises(FileFormatError) as excinfo:
        load_robot_description(_write(tmp_path / "bad.json", json.dumps(data)))
    assert excinfo.value.field == "colour"


def test_robot_invalid_json_reports_line(tmp_path):
    path = _write(tmp_path / "bad.json", '{\n  "name": "x",\n  "dh": [\n}')
    with pytest.raises(FileFormatError) as excinfo:
        load_robot_description(path)
    assert excinfo.value.line is not None


def test_robot_negative_mass(tmp_path):
    data = json.loads(fixtures.robot_path("ur3e").read_text())
    data["links"][2]["mass"] = -1
    with pytest.raises(FileFormatError):
        load_robot_description(_write(tmp_path / "bad.json", json.dumps(data)))


def test_robot_without_motor_constants_warns(tmp_path, caplog):
    caplog.set_level(logging.WARNING)
    data = json.loads(fixtures.robot_path("ur3e").read_text())
    del data["motor_constants"]
    robot = load_robot_description(_write(tmp_path / "plain.json", json.dumps(data)))
    assert_allclose(robot.torque_constants, np.ones(6))
    assert "no motor torque constants" in caplog.text


def test_load_dataset(tmp_path):
    path = _write(tmp_path / "d.csv", _csv(["0,0,1,0,0.5,40", "0.01,0.01,1,0,0.6,41", "0.02,0.02,1,0,0.7,42"]))
    dataset = load_dataset(path, dof=1)
    assert dataset.n_samples == 3
    assert_allclose(dataset.power, [40, 41, 42])
    assert_allclose(dataset.meas[:, 0], [0.5, 0.6, 0.7])


def test_dataset_optional_groups(tmp_path):
    path = _write(tmp_path / "d.csv", _csv(["0,0,1,0", "0.01,0.01,1,0"], header="t,q_1,dq_1,ddq_1"))
    dataset = load_dataset(path)
    assert dataset.meas is None
    assert dataset.power is None
    assert dataset.dof == 1


def test_dataset_duplicate_timestamp(tmp_path):
    path = _write(tmp_path / "d.csv", _csv(["0,0,1,0,0.5,40", "0.01,0,1,0,0.5,40", "0.01,0,1,0,0.5,40"]))
    with pytest.raises(SchemaError) as excinfo:
        load_dataset(path, dof=1)
    assert excinfo.value.row == 4
    assert excinfo.value.channel == "t"
    assert "line 4" in str(excinfo.value)


def test_dataset_nan_cell(tmp_path):
    path = _write(tmp_path / "d.csv", _csv(["0,0,1,0,0.5,40", "0.01,0,1,,0.5,40"]))
    with pytest.raises(FileFormatError) as excinfo:
        load_dataset(path, dof=1)
    assert excinfo.value.line == 3
    assert excinfo.value.field == "ddq_1"


def test_dataset_width_mismatch(tmp_path):
    path = _write(tmp_path / "d.csv", _csv(["0,0,1,0,0.5,40"]))
    with pytest.raises(SchemaError) as excinfo:
        load_dataset(path, dof=2)
    assert excinfo.value.channel == "q_2"


def test_dataset_missing_channel(tmp_path):
    path = _write(tmp_path / "d.csv", _csv(["0,0,0,0.5,40"], header="t,q_1,ddq_1,meas_1,power"))
    with pytest.raises(SchemaError) as excinfo:
        load_dataset(path, dof=1)
    assert excinfo.value.channel == "dq_1"


def test_dataset_missing_time_column(tmp_path):
    path = _write(tmp_path / "d.csv", _csv(["0,1,0"], header="q_1,dq_1,ddq_1"))
    with pytest.raises(FileFormatError):
        load_dataset(path)


def test_dataset_round_trip_is_exact(tmp_path, ur3e):
    layout = build_layout(ur3e)
    dynamic, power = default_truth(ur3e, layout, seed=1)
    dataset = synth_generate(ur3e, dynamic, power, short_spec(6, duration=0.5), seed=2, noise_fraction=0.01)
    write_dataset(tmp_path / "d.csv", dataset)
    again = load_dataset(tmp_path / "d.csv", dof=6)
    for name in ("t", "q", "dq", "ddq", "meas", "power"):
        assert np.array_equal(getattr(again, name), getattr(dataset, name)), name


def test_dataset_split():
    t = np.arange(10.0)
    dataset = OperationalDataset(t=t, q=np.zeros((10, 2)), dq=np.zeros((10, 2)), ddq=np.zeros((10, 2)))
    head, tail = dataset.split(0.7)
    assert head.n_samples == 7 and tail.n_samples == 3
    assert tail.t[0] == 7.0
    with pytest.raises(InvalidArgumentError):
        dataset.split(1.0)


def test_sinusoid_at_time_zero():
    spec = SinusoidSpec(theta0=[0.3], amplitude=[0.5], frequency=[2.0], phase=[0.0], duration=1.0, sample_rate=100.0)
    q, dq, ddq, t = generate_sinusoid(spec)
    assert t.size == 100
    assert q[0, 0] == pytest.approx(0.3)
    assert dq[0, 0] == pytest.approx(0.5 * 2 * np.pi * 2.0)
    assert ddq[0, 0] == pytest.approx(0.0)


def test_sinusoid_zero_amplitude():
    spec = SinusoidSpec(theta0=[0.3], amplitude=[0.0], frequency=[2.0], phase=[1.0], duration=1.0, sample_rate=10.0)
    q, dq, ddq, _ = generate_sinusoid(spec)
    assert_allclose(q, 0.3)
    assert_allclose(dq, 0.0)
    assert_allclose(ddq, 0.0)


def test_sinusoid_quarter_period():
    spec = SinusoidSpec(theta0=[0.0], amplitude=[1.0], frequency=[1.0], phase=[0.0], duration=1.0, sample_rate=4.0)
    q, dq, ddq, t = generate_sinusoid(spec)
    assert t[1] == 0.25
    assert q[1, 0] == pytest.approx(1.0)
    assert dq[1, 0] == pytest.approx(0.0, abs=1e-12)
    assert ddq[1, 0] == pytest.approx(-4 * np.pi ** 2)


def test_sinusoid_derivatives_are_consistent():
    spec = SinusoidSpec(theta0=[0.0], amplitude=[1.0], frequency=[0.5], phase=[0.2], duration=2.0, sample_rate=1000.0)
    q, dq, _, t = generate_sinusoid(spec)
    dt = 1e-3
    bound = dt ** 2 * (2 * np.pi * 0.5) ** 3
    assert np.max(np.abs(differentiate(q, t)[1:-1] - dq[1:-1])) < bound


def test_sinusoid_spec_validation(caplog):
    caplog.set_level(logging.WARNING)
    with pytest.raises(InvalidArgumentError):
        SinusoidSpec(theta0=[0], amplitude=[1], frequency=[1], phase=[0], duration=0.0, sample_rate=10.0)
    with pytest.raises(InvalidArgumentError):
        SinusoidSpec(theta0=[0], amplitude=[1], frequency=[1], phase=[0], duration=1.0, sample_rate=-1.0)
    SinusoidSpec(theta0=[0], amplitude=[1], frequency=[10], phase=[0], duration=1.0, sample_rate=15.0)
    assert "not above twice" in caplog.text


def test_sinusoid_spec_round_trip(tmp_path):
    spec = fixtures.load_sinusoid("fr3")
    write_sinusoid_spec(tmp_path / "spec.json", spec)
    assert load_sinusoid_spec(tmp_path / "spec.json").to_dict() == spec.to_dict()


def test_differentiate():
    t = np.linspace(0.0, 1.0, 11)
    assert_allclose(differentiate(2 * t, t), 2.0)
    assert_allclose(differentiate(np.full(11, 3.0), t), 0.0)
    fine = np.arange(1000) / 1000.0
    assert np.max(np.abs(differentiate(np.sin(2 * np.pi * fine), fine) - 2 * np.pi * np.cos(2 * np.pi * fine))) < 1e-1
    assert np.max(np.abs(differentiate(np.sin(2 * np.pi * fine), fine)[1:-1] - 2 * np.pi * np.cos(2 * np.pi * fine[1:-1]))) < 1e-4
    with pytest.raises(InvalidArgumentError):
        differentiate([1.0], [0.0])


def test_differentiate_non_uniform():
    t = np.array([0.0, 0.1, 0.3, 0.35, 0.9])
    assert_allclose(differentiate(np.column_stack([3 * t, -t]), t), [[3, -1]] * 5)


def test_synth_is_deterministic(ur3e):
    layout = build_layout(ur3e)
    dynamic, power = default_truth(ur3e, layout, seed=4)
    spec = short_spec(6, duration=0.5)
    a = synth_generate(ur3e, dynamic, power, spec, seed=9, noise={"q": 1e-3}, noise_fraction=0.01)
    b = synth_generate(ur3e, dynamic, power, spec, seed=9, noise={"q": 1e-3}, noise_fraction=0.01)
    c = synth_generate(ur3e, dynamic, power, spec, seed=10, noise={"q": 1e-3}, noise_fraction=0.01)
    assert np.array_equal(a.power, b.power)
    assert np.array_equal(a.q, b.q)
    assert not np.array_equal(a.power, c.power)


def test_synth_noiseless_channels(fr3):
    layout = build_layout(fr3)
    dynamic, power = default_truth(fr3, layout)
    spec = short_spec(7, duration=0.5)
    dataset = synth_generate(fr3, dynamic, power, spec)
    q, _, _, t = generate_sinusoid(spec)
    assert np.array_equal(dataset.q, q)
    assert np.array_equal(dataset.t, t)
    assert dataset.meas.shape == (50, 7)


def test_synth_rejects_mismatches(ur3e, fr3):
    layout = build_layout(ur3e)
    dynamic, power = default_truth(ur3e, layout)
    with pytest.raises(InvalidArgumentError):
        synth_generate(fr3, dynamic, power, short_spec(7))
    with pytest.raises(InvalidArgumentError):
        synth_generate(ur3e, dynamic, power, short_spec(7))
    with pytest.raises(InvalidArgumentError):
        synth_generate(ur3e, dynamic, power, short_spec(6), noise={"torque": 0.1})


def test_default_truth_is_plausible(gen3):
    layout = build_layout(gen3)
    dynamic, power = default_truth(gen3, layout, seed=3)
    vector = dynamic.to_global()
    for row in range(1, gen3.n_links):
        get = lambda c: vector[layout.index(f"link{row + 1}.{c}")]
        tensor = np.array([
            [get("Ixx"), get("Ixy"), get("Ixz")],
            [get("Ixy"), get("Iyy"), get("Iyz")],
            [get("Ixz"), get("Iyz"), get("Izz")],
        ])
        assert np.linalg.eigvalsh(tensor).min() > 0
    assert np.all(vector[[layout.index(f"joint{j}.k_v") for j in range(1, 8)]] > 0)
    assert power.dof == 7
    assert power.values.size == 29
    assert 30 <= power.P_c <= 60


def test_truth_round_trip(tmp_path, ur3e):
    layout = build_layout(ur3e, estimate_payload=True)
    dynamic, power = default_truth(ur3e, layout, seed=5)
    write_truth(tmp_path / "truth.json", dynamic, power)
    again_dynamic, again_power = load_truth(tmp_path / "truth.json", layout, 6)
    for a, b in zip(again_dynamic.joint_vectors, dynamic.joint_vectors):
        assert np.array_equal(a, b)
    assert np.array_equal(again_power.values, power.values)


def test_truth_rejects_wrong_layout(tmp_path, ur3e):
    dynamic, power = default_truth(ur3e, build_layout(ur3e), seed=5)
    write_truth(tmp_path / "truth.json", dynamic, power)
    with pytest.raises(FileFormatError):
        load_truth(tmp_path / "truth.json", build_layout(ur3e, estimate_payload=True), 6)


def test_dataset_errors_share_line_numbers(tmp_path):
    rows = ["0,0,1,0,0.5,40", "0.01,0,1,0,0.5,40", "0.02,0,1,0,0.5,40", "0.03,0,inf,0,0.5,40"]
    with pytest.raises(SchemaError) as non_finite:
        load_dataset(_write(tmp_path / "inf.csv", _csv(rows)), dof=1)
    rows[-1] = "0.03,0,,0,0.5,40"
    with pytest.raises(FileFormatError) as missing:
        load_dataset(_write(tmp_path / "gap.csv", _csv(rows)), dof=1)
    assert non_finite.value.channel == "dq"
    assert missing.value.field == "dq_1"
    assert non_finite.value.row == missing.value.line == 5


def test_dataset_not_utf8(tmp_path):
    path = tmp_path / "binary.csv"
    path.write_bytes(b"t,q_1,dq_1,ddq_1\n0,\xff,1,0\n")
    with pytest.raises(FileFormatError) as excinfo:
        load_dataset(path)
    assert excinfo.value.path == path


def test_robot_static_flag_must_be_boolean(tmp_path):
    data = fixtures.load_robot("gen3").to_dict()
    data["dh"][0]["static"] = "false"
    path = _write(tmp_path / "robot.json", json.dumps(data))
    with pytest.raises(FileFormatError) as excinfo:
        load_robot_description(path)
    assert excinfo.value.field == "dh[0].static"
