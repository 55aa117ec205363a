"""Fourth-order long-stencil finite difference solver for the 3-D
Cahn-Hilliard equation on a periodic cube, with a BDF2-type time stepper,
FFT-based elliptic inverse, and a verification harness (manufactured-solution
convergence study plus discrete-operator property suites)."""

from .grid import Grid3, Field, FieldStats, make_grid, sample, mean, field_stats
from .stencils import (
    apply_d1_4,
    apply_d2,
    apply_lap2,
    apply_lap4,
    grad_ip,
    grad4_norm_sq,
    ip,
    norm_inf,
    norm_p,
    sobolev_norms,
)
from .spectral import (
    SpectralField,
    SymbolTables,
    apply_lap4_spectral,
    bandlimited_ip_identity,
    check_lemma24_gap,
    extension_hm_norm,
    fft,
    hm1_norm,
    ifft,
    inv_neg_lap4,
    symbol_tables,
)
from .scheme import (
    EnergyReport,
    NewtonError,
    SchemeParams,
    StepState,
    bdf2_step,
    chem_potential,
    energy,
    ghost_init,
    modified_energy,
    run,
)
from .verify import (
    ManufacturedSolution,
    convergence_study,
    lemma_suite,
    random_smooth_field,
    stability_suite,
)

__version__ = "0.1.0"
