import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from energy_model import fixtures
from energy_model.datasets.synthetic import default_truth, synth_generate
from energy_model.exceptions import InvalidArgumentError, SchemaError
from energy_model.identification import (
    fit_least_squares,
    gen_train_model,
    load_model,
    train_dynamic_model,
    train_power_model,
)
from energy_model.models.parameters import BackEmfForm
from energy_model.models.states import OperationalDataset
from energy_model.regressor import build_layout, dynamic_design
from tests.conftest import short_spec


def _projection_error(theta, estimate, truth):
    """Relative difference of two parameter vectors on the identifiable subspace."""
    _, s, vt = np.linalg.svd(theta, full_matrices=False)
    basis = vt[s > s.max() * 1e-10]
    difference = basis @ (estimate - truth)
    return np.linalg.norm(difference) / max(np.linalg.norm(basis @ truth), 1e-300)


def _synthetic(robot, seed=0, **kwargs):
    layout = build_layout(robot, kwargs.pop("estimate_payload", False))
    dynamic, power = default_truth(robot, layout, seed=seed)
    spec = kwargs.pop("spec", None) or short_spec(robot.dof)
    return layout, dynamic, power, synth_generate(robot, dynamic, power, spec, seed=seed, **kwargs)


def test_fit_identity():
    report = fit_least_squares(np.eye(3), [1.0, 2.0, 3.0])
    assert_allclose(report.solution, [1, 2, 3])
    assert report.residual_rms == pytest.approx(0.0, abs=1e-15)
    assert report.rank == 3
    assert report.condition_estimate == pytest.approx(1.0)


def test_fit_two_points():
    report = fit_least_squares([[1.0], [1.0]], [1.0, 3.0])
    assert_allclose(report.solution, [2.0])
    assert report.residual_rms == pytest.approx(1.0)


def test_fit_recovers_known_solution():
    rng = np.random.default_rng(51)
    design = rng.normal(size=(1000, 10))
    truth = rng.normal(size=10)
    report = fit_least_squares(design, design @ truth)
    assert_allclose(report.solution, truth, rtol=1e-10)


def test_fit_residual_is_orthogonal():
    rng = np.random.default_rng(52)
    design = rng.normal(size=(300, 8))
    targets = rng.normal(size=300)
    report = fit_least_squares(design, targets)
    residual = targets - design @ report.solution
    assert np.max(np.abs(design.T @ residual)) <= 1e-8 * np.linalg.norm(targets)


def test_fit_is_idempotent_and_permutation_invariant():
    rng = np.random.default_rng(53)
    design = rng.normal(size=(200, 6))
    targets = rng.normal(size=200)
    first = fit_least_squares(design, targets).solution
    refit = fit_least_squares(design, design @ first).solution
    assert_allclose(refit, first, atol=1e-10)
    order = rng.permutation(200)
    assert_allclose(fit_least_squares(design[order], targets[order]).solution, first, atol=1e-10)


def test_fit_rank_deficient_returns_minimum_norm(caplog):
    caplog.set_level(logging.WARNING)
    design = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    report = fit_least_squares(design, [2.0, 4.0, 6.0], label="collinear")
    assert report.rank == 1
    assert report.rank_deficient
    assert math.isinf(report.condition_estimate) or report.condition_estimate > 1e8
    assert_allclose(report.solution, [1.0, 1.0])
    assert "collinear" in caplog.text


def test_fit_underdetermined_warns(caplog):
    caplog.set_level(logging.WARNING)
    report = fit_least_squares(np.ones((1, 3)), [3.0])
    assert report.underdetermined
    assert "underdetermined" in caplog.text


def test_fit_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        fit_least_squares([[np.nan]], [1.0])
    with pytest.raises(InvalidArgumentError):
        fit_least_squares(np.ones((3, 2)), [1.0, 2.0])
    with pytest.raises(InvalidArgumentError):
        fit_least_squares(np.ones((0, 2)), [])


def test_dynamic_recovery_on_planar_arm(planar):
    robot = planar.robot()
    layout, dynamic, power, dataset = _synthetic(robot, seed=2)
    params, reports = train_dynamic_model(robot, dataset, layout)
    design = dynamic_design(robot, dataset.state, layout)
    for joint, (offset, theta) in enumerate(design):
        assert _projection_error(theta, params.joint_vectors[joint], dynamic.joint_vectors[joint]) < 1e-6
        assert reports[joint].residual_rms < 1e-8


@pytest.mark.parametrize("name", ["ur3e", "fr3", "gen3"])
def test_dynamic_recovery_on_fixtures(name):
    robot = fixtures.load_robot(name)
    layout, dynamic, _, dataset = _synthetic(robot, seed=3)
    params, reports = train_dynamic_model(robot, dataset, layout)
    for joint, (offset, theta) in enumerate(dynamic_design(robot, dataset.state, layout)):
        reconstructed = offset + theta @ params.joint_vectors[joint]
        assert np.max(np.abs(reconstructed - dataset.meas[:, joint])) < 1e-8
        assert _projection_error(theta, params.joint_vectors[joint], dynamic.joint_vectors[joint]) < 1e-6


def test_payload_wrench_recovery(ur3e):
    layout, dynamic, _, dataset = _synthetic(ur3e, seed=4, estimate_payload=True)
    params, _ = train_dynamic_model(ur3e, dataset, layout)
    for joint, (offset, theta) in enumerate(dynamic_design(ur3e, dataset.state, layout)):
        assert np.max(np.abs(offset + theta @ params.joint_vectors[joint] - dataset.meas[:, joint])) < 1e-8


def test_rest_dataset_is_rank_deficient(ur3e):
    n = 40
    q = np.tile(np.linspace(-0.5, 0.5, 6), (n, 1))
    dataset = OperationalDataset(
        t=np.arange(n) * 0.01, q=q, dq=np.zeros_like(q), ddq=np.zeros_like(q), meas=np.ones_like(q)
    )
    _, reports = train_dynamic_model(ur3e, dataset, build_layout(ur3e))
    assert all(report.rank_deficient for report in reports)
    assert all(report.rank == 0 for report in reports)


def test_dynamic_training_needs_data(ur3e):
    layout = build_layout(ur3e)
    empty = OperationalDataset(t=[], q=np.zeros((0, 6)), dq=np.zeros((0, 6)), ddq=np.zeros((0, 6)))
    with pytest.raises(InvalidArgumentError):
        train_dynamic_model(ur3e, empty, layout)
    no_meas = OperationalDataset(t=[0.0], q=np.zeros((1, 6)), dq=np.zeros((1, 6)), ddq=np.zeros((1, 6)))
    with pytest.raises(SchemaError) as excinfo:
        train_dynamic_model(ur3e, no_meas, layout)
    assert excinfo.value.channel == "meas_1"


@pytest.mark.parametrize("back_emf", [BackEmfForm.SIGNED, BackEmfForm.ABS])
def test_power_recovery(ur3e, back_emf):
    _, _, power, dataset = _synthetic(ur3e, seed=5, back_emf=back_emf)
    params, report = train_power_model(ur3e, dataset, back_emf)
    assert report.rank == 25
    assert np.linalg.norm(params.values - power.values) <= 1e-6 * np.linalg.norm(power.values)


def test_power_recovery_torque_form(fr3):
    _, _, power, dataset = _synthetic(fr3, seed=6)
    params, _ = train_power_model(fr3, dataset)
    assert params.values.size == 29
    assert np.linalg.norm(params.values - power.values) <= 1e-6 * np.linalg.norm(power.values)


def test_idle_power_only_identifies_constant(ur3e):
    n = 30
    zeros = np.zeros((n, 6))
    power = 40.0 + np.linspace(-1.0, 1.0, n)
    dataset = OperationalDataset(t=np.arange(n) * 0.01, q=zeros, dq=zeros, ddq=zeros, meas=zeros, power=power)
    params, report = train_power_model(ur3e, dataset)
    assert report.rank == 1
    assert params.P_c == pytest.approx(power.mean())
    assert_allclose(params.values[1:], 0.0)


def test_power_training_needs_power_and_samples(ur3e):
    _, _, _, dataset = _synthetic(ur3e, seed=7, spec=short_spec(6, duration=0.2))
    stripped = OperationalDataset(t=dataset.t, q=dataset.q, dq=dataset.dq, ddq=dataset.ddq, meas=dataset.meas)
    with pytest.raises(SchemaError):
        train_power_model(ur3e, stripped)
    with pytest.raises(InvalidArgumentError):
        train_power_model(ur3e, dataset.subset(slice(0, 1)))


def test_gen_train_persists_and_reloads(ur3e, model_dir):
    _, _, _, dataset = _synthetic(ur3e, seed=8)
    model = gen_train_model(ur3e, dataset, "ur3e_synth", model_dir=model_dir)
    assert (model_dir / "ur3e_synth.json").is_file()
    again = load_model("ur3e_synth", model_dir)
    for a, b in zip(again.dynamic_params.joint_vectors, model.dynamic_params.joint_vectors):
        assert np.array_equal(a, b)
    assert np.array_equal(again.power_params.values, model.power_params.values)
    assert again.layout.same_as(model.layout)
    assert again.meta.sample_count == dataset.n_samples
    assert again.meta.power_report.rank == model.meta.power_report.rank
    assert again.robot.to_dict() == ur3e.to_dict()


def test_gen_train_schema_mismatch(fr3, ur3e, model_dir):
    _, _, _, dataset = _synthetic(ur3e, seed=9, spec=short_spec(6, duration=0.2))
    with pytest.raises(SchemaError) as excinfo:
        gen_train_model(fr3, dataset, "mismatch", model_dir=model_dir)
    assert excinfo.value.channel == "q_7"
    assert not list(model_dir.iterdir())


def test_gen_train_rejects_bad_names(ur3e, model_dir):
    _, _, _, dataset = _synthetic(ur3e, seed=9, spec=short_spec(6, duration=0.2))
    with pytest.raises(InvalidArgumentError):
        gen_train_model(ur3e, dataset, "../escape", model_dir=model_dir)


def test_load_model_missing(model_dir):
    with pytest.raises(FileNotFoundError):
        load_model("nothing", model_dir)


@pytest.mark.slow
@pytest.mark.parametrize("name", fixtures.ROBOTS)
def test_full_scale_noiseless_recovery(name, model_dir):
    """Bundled 50,000-sample excitation, noiseless: exact reconstruction and recovery"""
    robot = fixtures.load_robot(name)
    layout = build_layout(robot)
    dynamic, power = default_truth(robot, layout, seed=0)
    dataset = synth_generate(robot, dynamic, power, fixtures.load_sinusoid(name))
    assert dataset.n_samples == 50_000
    model = gen_train_model(robot, dataset, name, model_dir=model_dir)
    for joint, report in enumerate(model.meta.dynamic_reports):
        assert report.residual_rms < 1e-6
    assert model.power_params.values.size == 1 + 4 * robot.dof
    assert np.linalg.norm(model.power_params.values - power.values) <= 1e-6 * np.linalg.norm(power.values)
