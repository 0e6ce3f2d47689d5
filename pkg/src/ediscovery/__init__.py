"""Accountable multi-party e-discovery: label-verification protocols, CAL
simulation, strategic defendants and critical points for realizable data."""
from .core import (
    Document,
    EmptyInstanceError,
    Instance,
    LinearModel,
    OneDimInstance,
    ProtocolOutcome,
    UndefinedRecallError,
    classifier_error,
    nrd,
    optimal_threshold_report,
    optimal_threshold_true,
    recall,
    threshold_error,
)
from .parties import AliceLoss, AliceOracle, BobOracle, CourtOracle, alice_loss, best_response_search
from .protocols import (
    ClassifierReportConfig,
    LabelReportConfig,
    run_classifier_report,
    run_label_report,
    run_reveal_all,
)

__version__ = "0.1.0"

__all__ = [
    "AliceLoss",
    "AliceOracle",
    "BobOracle",
    "ClassifierReportConfig",
    "CourtOracle",
    "Document",
    "EmptyInstanceError",
    "Instance",
    "LabelReportConfig",
    "LinearModel",
    "OneDimInstance",
    "ProtocolOutcome",
    "UndefinedRecallError",
    "alice_loss",
    "best_response_search",
    "classifier_error",
    "nrd",
    "optimal_threshold_report",
    "optimal_threshold_true",
    "recall",
    "run_classifier_report",
    "run_label_report",
    "run_reveal_all",
    "threshold_error",
]
