"""
Data-driven energy-consumption models for serial manipulators.

A model is generated from a robot's Denavit-Hartenberg parameters, link masses
and centers of mass, then trained on operational data: joint motion, joint
currents or torques and total electrical power. The three entry points are
``gen_train_model`` (build and fit), ``test_model`` (evaluate on a dataset)
and ``pc_model`` (predict at a single state).
"""

from .identification import gen_train_model, load_model
from .metrics import pc_model, test_model

__all__ = ["gen_train_model", "load_model", "pc_model", "test_model"]
