"""
Trained-model documents.

Floats are written by ``json`` with their shortest round-trip representation,
so a model read back holds bitwise-identical parameters. Documents carry a
format version; unknown versions and unknown fields are rejected.
"""

import logging

import numpy as np

from config import settings
from energy_model.datasets.files import read_json, robot_from_dict, write_json
from energy_model.exceptions import FileFormatError, InvalidArgumentError
from energy_model.models.parameters import (
    BackEmfForm,
    DynamicParameters,
    ParameterLayout,
    PowerParameters,
)
from energy_model.models.results import LeastSquaresReport, TrainedModel, TrainingMeta

logger = logging.getLogger(__name__)


class LeastSquaresReportSerializer:
    """Serializer for fit diagnostics"""

    class Meta:
        fields = ('residual_rms', 'rank', 'condition_estimate', 'n_samples', 'n_params')

    def to_representation(self, report):
        return report.to_dict()

    def to_internal_value(self, data, where, path=None):
        _check_fields(data, self.Meta.fields, where, path)
        return LeastSquaresReport.from_dict(data)


class TrainingMetaSerializer:
    """Serializer for training metadata"""

    class Meta:
        fields = ('sample_count', 't_start', 't_end', 'dynamic_reports', 'power_report', 'underdetermined')
        read_only_fields = ('underdetermined',)

    def to_representation(self, meta):
        reports = LeastSquaresReportSerializer()
        return {
            'sample_count': int(meta.sample_count),
            't_start': float(meta.t_start),
            't_end': float(meta.t_end),
            'dynamic_reports': [reports.to_representation(r) for r in meta.dynamic_reports],
            'power_report': reports.to_representation(meta.power_report),
            'underdetermined': bool(meta.underdetermined),
        }

    def to_internal_value(self, data, path=None):
        _check_fields(data, self.Meta.fields, 'training', path)
        reports = LeastSquaresReportSerializer()
        return TrainingMeta(
            sample_count=int(data['sample_count']),
            t_start=float(data['t_start']),
            t_end=float(data['t_end']),
            dynamic_reports=tuple(
                reports.to_internal_value(r, f'training.dynamic_reports[{k}]', path)
                for k, r in enumerate(data['dynamic_reports'])
            ),
            power_report=reports.to_internal_value(data['power_report'], 'training.power_report', path),
        )


class TrainedModelSerializer:
    """Serializer for the TrainedModel document"""

    class Meta:
        fields = ('format_version', 'name', 'robot', 'estimate_payload', 'back_emf',
                  'layout', 'dynamic', 'power', 'training')
        optional_fields = ('training',)

    def to_representation(self, model):
        data = {
            'format_version': settings.MODEL_FORMAT_VERSION,
            'name': model.name,
            'robot': model.robot.to_dict(),
            'estimate_payload': bool(model.layout.estimate_payload),
            'back_emf': model.back_emf.value,
            'layout': {
                'global': list(model.layout.names),
                'joints': [columns.tolist() for columns in model.layout.joint_columns],
            },
            'dynamic': [vector.tolist() for vector in model.dynamic_params.joint_vectors],
            'power': model.power_params.values.tolist(),
        }
        if model.meta is not None:
            data['training'] = TrainingMetaSerializer().to_representation(model.meta)
        return data

    def to_internal_value(self, data, path=None):
        version = data.get('format_version')
        if version != settings.MODEL_FORMAT_VERSION:
            raise FileFormatError(
                f"unsupported model format version {version!r}", path=path, field='format_version'
            )
        _check_fields(data, self.Meta.fields, 'model', path, optional=self.Meta.optional_fields)
        _check_fields(data['layout'], ('global', 'joints'), 'layout', path)
        try:
            layout = ParameterLayout.from_dict(
                {**data['layout'], 'estimate_payload': data['estimate_payload']}
            )
            model = TrainedModel(
                name=str(data['name']),
                robot=robot_from_dict(data['robot'], path=path),
                layout=layout,
                dynamic_params=DynamicParameters(
                    layout, tuple(np.asarray(v, dtype=float) for v in data['dynamic'])
                ),
                power_params=PowerParameters(np.asarray(data['power'], dtype=float)),
                back_emf=BackEmfForm.parse(data['back_emf']),
                meta=(
                    TrainingMetaSerializer().to_internal_value(data['training'], path)
                    if 'training' in data else None
                ),
            )
        except (InvalidArgumentError, TypeError, KeyError) as e:
            raise FileFormatError(f"invalid model document: {e}", path=path) from e
        if model.layout.dof != model.robot.dof or model.power_params.dof != model.robot.dof:
            raise FileFormatError(
                f"model parameters do not match the {model.robot.dof} joints of {model.robot.name}",
                path=path,
            )
        return model


def _check_fields(data, fields, where, path=None, optional=()):
    if not isinstance(data, dict):
        raise FileFormatError(f"'{where}' must be an object", path=path, field=where)
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise FileFormatError(f"unknown field '{unknown[0]}' in {where}", path=path, field=unknown[0])
    missing = [name for name in fields if name not in data and name not in optional]
    if missing:
        raise FileFormatError(f"missing field '{missing[0]}' in {where}", path=path, field=missing[0])


def save_model(model: TrainedModel, path) -> None:
    write_json(path, TrainedModelSerializer().to_representation(model))
    logger.info(f"saved model {model.name} to {path}")


def read_model(path) -> TrainedModel:
    return TrainedModelSerializer().to_internal_value(read_json(path), path=path)
