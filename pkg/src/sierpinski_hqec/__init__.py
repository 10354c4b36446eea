"""Exact holographic code of ququarts on a Sierpinski gasket: construction and verification."""

from .circuit import PrepCircuit, emit_prep_circuit, simulate, verify_prep
from .codespace import CodeSpace, CodeState, code_space, decode, encode, verify_isometry
from .duality import WedgeReport, compute_wedges, verify_complementary_recovery
from .lattice import BoundaryRegion, Lattice, build_lattice
from .patterns import CapabilityError, PsiSystem, psi_system
from .probes import (
    DistanceRecord,
    MinimalRecovery,
    connected_distance,
    minimal_recoveries,
    uberholography_fit,
    unrestricted_distance,
)
from .rt import RTResult, area_term, verify_rt

__all__ = [
    "BoundaryRegion",
    "CapabilityError",
    "CodeSpace",
    "CodeState",
    "DistanceRecord",
    "Lattice",
    "MinimalRecovery",
    "PrepCircuit",
    "PsiSystem",
    "RTResult",
    "WedgeReport",
    "area_term",
    "build_lattice",
    "code_space",
    "compute_wedges",
    "connected_distance",
    "decode",
    "emit_prep_circuit",
    "encode",
    "minimal_recoveries",
    "psi_system",
    "simulate",
    "uberholography_fit",
    "unrestricted_distance",
    "verify_complementary_recovery",
    "verify_isometry",
    "verify_prep",
    "verify_rt",
]
