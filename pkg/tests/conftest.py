import numpy as np
import pytest

from energy_model import fixtures
from energy_model.models.states import SinusoidSpec
from tests.oracles import PlanarArm


def short_spec(dof, duration=4.0, sample_rate=100.0, seed=7):
    """Fast, well-excited sinusoids: non-commensurate frequencies and random phases."""
    rng = np.random.default_rng(seed)
    return SinusoidSpec(
        theta0=rng.uniform(-0.5, 0.5, dof),
        amplitude=rng.uniform(0.6, 1.2, dof),
        frequency=0.37 + 0.213 * np.arange(dof) + rng.uniform(0.0, 0.05, dof),
        phase=rng.uniform(0.0, 2 * np.pi, dof),
        duration=duration,
        sample_rate=sample_rate,
    )


@pytest.fixture(params=fixtures.ROBOTS)
def fixture_robot(request):
    """Every bundled robot description"""
    return fixtures.load_robot(request.param)


@pytest.fixture
def ur3e():
    return fixtures.load_robot("ur3e")


@pytest.fixture
def fr3():
    return fixtures.load_robot("fr3")


@pytest.fixture
def gen3():
    return fixtures.load_robot("gen3")


@pytest.fixture
def planar():
    return PlanarArm()


@pytest.fixture
def model_dir(tmp_path):
    """Empty model store for one test"""
    path = tmp_path / "models"
    path.mkdir()
    return path
