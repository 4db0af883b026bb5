"""Python bindings for the harnack_lab simulation core."""

from ._core import (
    CylinderDomain,
    GridSpec,
    Subcylinder,
    check_hypothesis,
    counterexample_ratio,
    counterexample_scan,
    evaluate,
    harnack_ratio,
    residual_max,
    run_cli,
    simulate,
    solution_value,
)

__all__ = [
    "CylinderDomain",
    "GridSpec",
    "Subcylinder",
    "check_hypothesis",
    "counterexample_ratio",
    "counterexample_scan",
    "evaluate",
    "harnack_ratio",
    "residual_max",
    "run_cli",
    "simulate",
    "solution_value",
]
