"""Exact homological algebra over computable commutative rings.

Koszul complexes as DG algebras, DG modules and their extensions, the
descent equation systems S1-S4 with verification and reconstruction
certificates, and semidualizing/lifting/Ext checks at desk scale.
"""

from .rings import ZZ, QQ, Zmod, GF, poly_quotient, make_ring, RingHom, parse_element
from .matrices import Matrix

__all__ = [
    "ZZ", "QQ", "Zmod", "GF", "poly_quotient", "make_ring", "RingHom",
    "parse_element", "Matrix",
]
