"""Corner-to-corner state transfer on dimerised square lattices.

Lattice builders, analytic zero modes, the nine-level effective model,
coupling schedules and RK4 dynamics, plus an experiment runner that writes
CSV/SVG outputs.
"""

__version__ = "0.1.0"

from .dynamics import evolve, occupation, project_topo, spectral_flow
from .effective_model import (
    EffectiveCouplings,
    adiabaticity_integral,
    build_heff,
    dark_state,
    effective_couplings,
    heff_spectrum_closed_form,
)
from .errors import ConfigError, InputError, NumericalError, SingularRatioError
from .lattice import (
    Couplings,
    LatticeGeometry,
    Model,
    bond_amplitude,
    build_ctap_hamiltonian,
    build_ricemele_hamiltonian,
    bulk_bands,
)
from .numerics import SparseHamiltonian, rk4_propagate, sparse_apply, symmetric_eig
from .protocols import CtapSchedule, FrozenSchedule, RiceMeleSchedule
from .topo_states import LABELS, analytic_state, decay_ratios, normalization_set, overlap
