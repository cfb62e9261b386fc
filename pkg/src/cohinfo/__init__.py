"""Coherent information, entanglement fidelity and perfect error correction
for finite-dimensional quantum channels."""

from .channels import KrausChannel, UnitaryDilation, choi, compose
from .errcorr import CorrectionResult, construct_corrector, correctability_deficit
from .infotheory import (
    ChannelReport,
    DpiReport,
    coherent_information,
    dpi_report,
    entanglement_fidelity,
    entropy_exchange,
    report,
)
from .linalg import SubsystemLayout, binary_entropy, von_neumann_entropy
from .states import DensityOperator, Ensemble, PureState, purify

__version__ = "0.1.0"
