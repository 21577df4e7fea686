"""Distances to complex zero sets and real closed sets, and separation fits."""

from .fit import (
    ExponentFit,
    SamplePlan,
    Verification,
    default_radii,
    fit_envelope,
    fit_separation,
    refit_constant,
    verify_separation,
    write_csv,
)
from .sets import Arc, ArcComponent, Origin, SetDescriptor, Subspace, dist_to_set, power_curve
from .variety import Branch, DistanceEstimate, VarietyDescriptor, dist_to_variety

__all__ = [
    "Arc",
    "ArcComponent",
    "Branch",
    "DistanceEstimate",
    "ExponentFit",
    "Origin",
    "SamplePlan",
    "SetDescriptor",
    "Subspace",
    "Verification",
    "VarietyDescriptor",
    "default_radii",
    "dist_to_set",
    "dist_to_variety",
    "fit_envelope",
    "fit_separation",
    "power_curve",
    "refit_constant",
    "verify_separation",
    "write_csv",
]
