"""Exact Fourier spectra and differential profiles of power maps on finite fields."""

from ._kernels import active_backend, set_backend
from .campaign import (CampaignConfig, CampaignReport, run_campaign,
                       run_single)
from .differential import diff_counts, diff_profile
from .errors import WeilscopeError
from .exponents import approx_class, enumerate_classes
from .gf import FieldSpec, FiniteField, build_field
from .spectrum import full_spectrum, spectrum_stats, weil_sum
from .table1 import reproduce_table1
from .valuation import val_report

__version__ = "0.1.0"

__all__ = [
    "CampaignConfig",
    "CampaignReport",
    "FieldSpec",
    "FiniteField",
    "WeilscopeError",
    "__version__",
    "active_backend",
    "approx_class",
    "build_field",
    "diff_counts",
    "diff_profile",
    "enumerate_classes",
    "full_spectrum",
    "reproduce_table1",
    "run_campaign",
    "run_single",
    "set_backend",
    "spectrum_stats",
    "val_report",
    "weil_sum",
]
