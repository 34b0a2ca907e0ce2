"""Two-qubit polarization algebra, fidelities, Stokes observables and efficiency bookkeeping."""
from .budget import EfficiencyBudget, efficiency_matrix, hopping_comparison
from .fidelity import entangling_fidelity, entangling_fidelity_bound, fidelity_f_beta, memory_fidelity
from .polarimetry import StokesVector, stokes
from .states import GateState, NoiseModel, XiParams, compensate_single_qubit, output_state, truth_table
