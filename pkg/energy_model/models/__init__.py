from .robot import (
    DhConvention,
    DhRow,
    FrictionParameters,
    GravityConvention,
    LinkMassProperties,
    MotorConstants,
    PayloadWrench,
    RobotDescription,
    SensorKind,
)
from .states import JointState, OperationalDataset, SinusoidSpec
from .parameters import (
    BackEmfForm,
    DynamicParameters,
    ParameterLayout,
    PowerParameters,
    PowerRegressorRow,
    RegressorRow,
)
from .results import (
    EvaluationReport,
    LeastSquaresReport,
    PowerPrediction,
    TrainedModel,
    TrainingMeta,
)

__all__ = [
    "BackEmfForm",
    "DhConvention",
    "DhRow",
    "DynamicParameters",
    "EvaluationReport",
    "FrictionParameters",
    "GravityConvention",
    "JointState",
    "LeastSquaresReport",
    "LinkMassProperties",
    "MotorConstants",
    "OperationalDataset",
    "ParameterLayout",
    "PayloadWrench",
    "PowerParameters",
    "PowerPrediction",
    "PowerRegressorRow",
    "RegressorRow",
    "RobotDescription",
    "SensorKind",
    "SinusoidSpec",
    "TrainedModel",
    "TrainingMeta",
]
