"""Certified computation and verification for the overpartition function."""

from .constants import ConstantSet, constants_for
from .counts import OverpartitionTable, brute_force_count, build_table, load_table, save_table
from .interval import CertifiedInterval, PrecisionPolicy
from .verifier import (
    Status,
    VerificationReport,
    convergence_probe,
    verify_corollaries,
    verify_lemmas,
    verify_main1,
    verify_main2,
)

__version__ = "0.1.0"

__all__ = [
    "CertifiedInterval",
    "ConstantSet",
    "OverpartitionTable",
    "PrecisionPolicy",
    "Status",
    "VerificationReport",
    "brute_force_count",
    "build_table",
    "constants_for",
    "convergence_probe",
    "load_table",
    "save_table",
    "verify_corollaries",
    "verify_lemmas",
    "verify_main1",
    "verify_main2",
]
