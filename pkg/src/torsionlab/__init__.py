"""torsionlab: a numerical workbench for orthogonal connections with torsion.

Pointwise multilinear algebra, the three-way decomposition of torsion
tensors, Clifford/Dirac constructions, chart-based curvature with torsion on
a handful of closed 4-manifold presets, executable curvature identities,
heat-coefficient and spectral-action evaluation, and residuals of the
associated equations of motion.  Every nontrivial formula is backed by an
independent numerical oracle in the test suite.
"""

__version__ = "0.1.0"

from .multilinear import (
    InnerSpace,
    KForm,
    Tensor,
    basis_form,
    flat,
    form_inner,
    hodge_star,
    interior,
    sharp,
    tensor_inner,
    wedge,
)
from .torsion import (
    CartanComponents,
    TorsionTensor,
    c12_trace,
    decompose,
    invariants,
    recompose,
    sample_torsion,
)
from .clifford import (
    GammaRep,
    bochner_potential,
    build_rep,
    curvature_endos,
    dirac_torsion_endo,
    form_to_endo,
)

__all__ = [
    "InnerSpace",
    "Tensor",
    "KForm",
    "tensor_inner",
    "form_inner",
    "hodge_star",
    "interior",
    "wedge",
    "sharp",
    "flat",
    "basis_form",
    "TorsionTensor",
    "CartanComponents",
    "c12_trace",
    "invariants",
    "decompose",
    "recompose",
    "sample_torsion",
    "GammaRep",
    "build_rep",
    "form_to_endo",
    "dirac_torsion_endo",
    "curvature_endos",
    "bochner_potential",
]
