"""Extremality of generalized POVMs, testers and measurements on sections of the state space.

Operators are passed and returned as complex numpy arrays.  Choi matrices and
tester elements use the output (x) input ordering.
"""

from ._core import (
    CrossCheckFailure,
    GeneralizedPOVM,
    GmeasError,
    ParseError,
    QubitReport,
    Section,
    SupportCertificate,
    Tester,
    Tolerances,
    Verdict,
    analyze,
    apply,
    channel_section,
    class_is_singleton,
    custom_section,
    digest,
    dimension_bound,
    equivalent,
    example5_tester,
    example5_vector,
    fixed_marginal_section,
    full_state_space,
    is_extremal_gpovm,
    is_extremal_measurement,
    is_in_pk,
    k_support,
    make_gpovm,
    make_tester,
    qubit_measurement_extremal,
    qubit_tester_extremal,
    random_tester,
    tester_to_gpovm,
    validate,
)

__version__ = "0.1.0"
