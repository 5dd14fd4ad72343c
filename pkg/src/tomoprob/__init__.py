"""Phase-space tomography: Wigner functions, optical and symplectic
tomograms, entropic and four-cut inequalities, quadratic dynamics and
simulated homodyne data."""

from .errors import TomoError
from .evolution import QuadraticHamiltonian, propagate_quadratic
from .homodyne import checked_inequalities, estimate_tomogram, sample_quadratures
from .inequalities import CutPoints, four_functionals, four_probs, subadditivity_check, wigner_subadditivity_check
from .phasespace import GridSpec, WignerGrid, rho_from_wigner, suggest_grid, wigner_from_rho
from .statekit import ClassicalDensity, FockDensityMatrix, StateSpec, build_state, catalog
from .statistics import InequalityReport, entropic_check, heisenberg_check, tomographic_moment
from .tomography import OpticalTomogram, optical_tomogram, rho_from_symplectic, symplectic_view

__version__ = "0.1.0"
