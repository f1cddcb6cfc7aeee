from .hamiltonian import (AS_PRINTED, BUCK_SUKUMAR, DICKE, PRODUCT, SIGMA_Z_BLOCKS, BasisSpec, OperatorMatrix,
                          asymmetry, build_hamiltonian)
from .qpt import OrderSweep, default_coupling, ground_state, order_parameter_sweep
from .solve import (Spectrum, default_spin_rep, diagonalize, exact_thermo, sigma_z_analytic_finite_n,
                    sigma_z_large_n_report, thermal_report)

__all__ = [
    "AS_PRINTED", "BUCK_SUKUMAR", "DICKE", "PRODUCT", "SIGMA_Z_BLOCKS", "BasisSpec", "OperatorMatrix",
    "asymmetry", "build_hamiltonian", "OrderSweep", "default_coupling", "ground_state", "order_parameter_sweep",
    "Spectrum", "default_spin_rep", "diagonalize", "exact_thermo", "sigma_z_analytic_finite_n",
    "sigma_z_large_n_report", "thermal_report",
]
