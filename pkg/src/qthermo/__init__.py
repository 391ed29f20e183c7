"""Finite-time thermodynamics of driven qubits: slow driving, Carnot and Otto cycles, ancilla baths."""
__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    CycleConstructionError,
    DegeneracyError,
    DimensionError,
    DomainError,
    QThermoError,
)
from .qdyn import (
    check_density_matrix,
    evolve_vector,
    free_energy,
    gibbs_qubit,
    gibbs_state,
    ground_population,
    lindblad_generator,
    mutual_information,
    partial_trace,
    propagate_const,
    propagate_driven,
    qubit_hamiltonian,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)
from .dissipators import BathSpec, dissipator, jump_rates, sd_amplitude
from .protocols import ControlProtocol, random_protocol, smoothstep
from .slow_driving import dissipation_report, sd_expansion, sd_first_order, sd_residual
from .carnot import (
    cycle_report,
    optimal_rescaling,
    optimal_shape,
    quasi_otto_constants,
    shape_functional,
)
from .otto import OttoSpec, exact_power, reset_model_steady_cycle, symmetric_optimum
from .nonmarkov import (
    AncillaBathSpec,
    full_generator,
    optimal_coupling,
    otto_limit_cycle,
    otto_max_sweep,
    reduced_generator,
    relaxation_profile,
    sd_amplitude_numeric,
    sd_amplitude_resonant,
)
from .infoflow import blp_measure, blp_threshold, free_energy_trace
