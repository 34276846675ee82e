"""Exact computer algebra for column-finite infinite matrices over
commutative rings: lifting along surjective ring maps with verifiable
certificates, conjugator recovery for matrix-algebra automorphisms, and
desk-scale line-bundle cohomology checks on projective space."""

from . import cohomology, dense, homs, lifting, matrices, rings, skolem

__all__ = ["rings", "homs", "dense", "matrices", "lifting", "skolem",
           "cohomology"]
__version__ = "0.1.0"
