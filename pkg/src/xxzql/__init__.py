"""Quasilocal conserved operators of the spin-1/2 XXZ chain.

Dense constructions for open, periodic and flux-twisted chains, auxiliary-space
transfer operators and their locality certificates, Mazur/Drude lower bounds,
and boundary-driven steady states.
"""

import os as _os

# honored only if set before the first numpy import, hence before .chain
_threads = _os.environ.get("XXZQL_NUM_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .chain import (
    AnisotropyParams,
    BoundarySpec,
    build_hamiltonian,
    canonical_gauge,
    commutator,
    hs_inner,
    hs_norm,
    magnetization,
    parity_operator,
    shift_map,
    spin_current,
    standard_observables,
    uniform_flux_hamiltonian,
)
from .errors import (
    AccuracyError,
    ConfigError,
    DomainError,
    SizeCapError,
    SpectralPointError,
)

__version__ = "0.1.0"
