"""Attainable Cramer-Rao-type bounds for finite-dimensional quantum models."""

from .duallp import (
    Cut,
    DualCertificate,
    RecoveredMeasurement,
    dual_bound,
    oracle,
    qubit_certificate,
    recover_measurement,
)
from .errors import (
    DegenerateWeightError,
    InvalidInputError,
    InvalidModelError,
    ModelDegenerateError,
    NotPSDError,
    NumericalFailure,
    QCRBError,
)
from .lp import LPProblem, LPSolution, lp_solve
from .model import (
    FisherData,
    QuantumModel,
    build_model,
    check_weight,
    classical_model,
    conjugate,
    fisher,
    qubit_frame,
    qubit_full,
    submodel,
)
from .randbound import (
    BoundReport,
    Branch,
    RandomMeasurementPlan,
    bound_report,
    build_plan,
    limit_membership,
    limit_membership_2param,
    optimal_W,
    plan_covariance,
    random_bound,
    sld_bound,
)
from .randcheck import RandomnessReport, check_randomness, qubit_identity_check
from .sim import deviation, exact_covariance, exact_expectation, sample

__version__ = "0.1.0"
