"""Equal phase-shift search: closed forms, dense simulation and sweeps."""
from .analytics import (
    Classification,
    DomainError,
    EpsilonRange,
    RecurrenceTrace,
    amplitude_factor,
    average_zero_point,
    average_zero_point_deviation,
    classify,
    deviation,
    deviation_gap,
    deviation_raw,
    epsilon_threshold,
    kappa,
    min_deviation_large_eps,
    phase_bound_for_delta,
    recurrence_trace,
    rho,
    success_probability,
    success_ratio,
    table3_deviation,
    zero_deviation_point,
)
from .simulator import (
    SearchInstance,
    SimulatorLimitError,
    crafted_instance,
    hadamard_instance,
    measured_failure,
    one_iteration,
    recursion_unitary,
    selective_phase,
)

__version__ = "0.1.0"
