"""Exact-arithmetic Borcherds' method for hyperbolic lattices.

The package computes automorphism groups of K3 surfaces whose Neron-Severi
lattice embeds into the even unimodular lattice of signature (1, 25):
chamber walls, wall crossing, congruence, face enumeration, ADE orbit
decompositions, and a generators-and-relations presentation.  The bundled
instance is the Apery-Fermi K3 surface.
"""

from .errors import LatticeError
from .lattice import (DiscriminantForm, Isometry, Lattice, LatticeVector,
                      discriminant_form, glue_overlattice, inner_product,
                      orthogonal_complement, signature)

__version__ = "0.1.0"
__all__ = [
    "DiscriminantForm", "Isometry", "Lattice", "LatticeVector",
    "LatticeError", "discriminant_form", "glue_overlattice", "inner_product",
    "orthogonal_complement", "signature",
]
