"""cavdot: Lindblad dynamics of two plasmonically coupled quantum-dot qubits,
each in its own photonic cavity, with entanglement and photon-correlation
observables."""

__version__ = "0.1.0"

from .tensor import (  # noqa: F401
    DensityMatrix,
    QOperator,
    SubsystemLayout,
    adjoint,
    annihilation,
    embed,
    hermitian_eigenvalues,
    multiply,
    add_scaled,
    trace,
)
from .model import (  # noqa: F401
    LindbladChannel,
    Model,
    PulseSpec,
    SystemParams,
    build_channels,
    coupling_asymmetry,
    effective_xi,
    envelope,
    fluence,
    hamiltonian_drive,
    hamiltonian_static,
    purcell_rate,
)
from .propagator import IntegratorConfig, Trajectory, evolve, rhs, rk4_step  # noqa: F401
from .observables import (  # noqa: F401
    ObservableRecord,
    OscillationReport,
    analyze_oscillations,
    bell_fidelity_sq,
    concurrence,
    g2_same_time,
    partial_trace,
    photon_qubit_reduce,
    population,
)
from .limits import (  # noqa: F401
    DecayEstimateInputs,
    RestrictedFamilyParams,
    concurrence_decay_rate,
    g12_from_cph,
    g12_small_x,
    restricted_state,
    unnormalized_g12,
)
from .scenarios import ScenarioConfig, builtin_names, load_config  # noqa: F401
from .runner import RunSummary, compare_storage, read_csv, run  # noqa: F401
