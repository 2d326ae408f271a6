"""Classical one-way-communication simulation of two spin-s singlet correlations.

The protocol reproduces the measurement statistics of the total-spin-zero
state of two spin-s systems, for measurements of spin components along
arbitrary directions, using shared random unit vectors and
ceil(log2(s+1)) classical bits per run. Exact enumeration and a
quantum-mechanical reference implementation serve as independent oracles
for the Monte Carlo harness.
"""

from .backend import TrialArrays, active_backend, available_backends, simulate_trials
from .battery import BatteryCheck, run_battery
from .enumeration import (
    exact_correlation,
    exact_joint,
    exact_marginal,
    verify_recursion_identity,
)
from .protocol import (
    SharedRandomness,
    TrialOutcome,
    alice_output,
    bob_output,
    c_bit,
    draw_shared_randomness,
    f_bit,
    run_trial,
    run_trial_rotated,
)
from .quantum import (
    SingletState,
    SpinOperators,
    build_singlet,
    build_spin_operators,
    quantum_correlation,
    quantum_joint,
    rotation_operator,
)
from .randomness import (
    DEFAULT_SEED,
    Direction,
    RandomStream,
    cos_between,
    dot,
    sample_direction,
    sample_directions,
    sgn,
    split_stream,
    unit_direction,
)
from .spins import (
    BinaryChain,
    ChainStep,
    HalfInteger,
    RandomnessBudget,
    Spin,
    StepKind,
    build_chain,
    comm_cost,
    make_spin,
    outcome_support,
    parse_spin,
    randomness_budget,
)
from .stats import (
    CorrelationEstimate,
    OutcomeSums,
    UniformityReport,
    chi_square_sf,
    chi_square_uniform,
    estimate_correlation,
    z_test,
)
from .tables import DistributionTable, JointDistribution
from .verify import perturb_chain, verify_spins

__version__ = "0.1.0"
