"""Steady-state-manifold dynamics of strongly dissipative quantum systems.

Builds Liouvillian superoperators, computes the spectral projector onto
the steady-state manifold and the induced effective generators, and runs
the adiabatic-scale sweeps that verify the O(1/T) projection behaviour of
the exact evolution.
"""

__version__ = "0.1.0"

from .evolution import (FitResult, SweepRecord, default_t_grid, dyson_first_order,
                        loglog_fit, propagate, propagate_unitary_lift,
                        read_sweep_csv, run_sweep, theorem_distance,
                        write_sweep_csv, write_sweep_json)
from .liouville import (LiouvillianModel, ModelError, assemble,
                        hamiltonian_superop, kraus_generator, lindblad_superop,
                        liouvillian, relaxation_time)
from .model_config import ConfigError, load_config, load_model, parse_operator_expr
from .spin_ops import (AngularMomentumBlock, SpinRegister, collective_spin,
                       dfs_gate_hamiltonian, logical_basis_j0, site_pauli,
                       total_spin_blocks)
from .ssm_projection import (ClusterSeparationError, EigenspacePinching,
                             SpectralResolution, SsmData, commutant_projection,
                             commutator_kernel_pinching, effective_generator,
                             kernel_projector, lambda_group_projector,
                             reduced_resolvent, second_order_generator,
                             spectral_resolution)
from .tensor_core import (eig, expm, kron, svd_max, svd_max_power, unvec, vec)

__all__ = [name for name in dir() if not name.startswith("_")]
