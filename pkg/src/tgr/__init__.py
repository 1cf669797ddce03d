"""Geometric rank, slice rank and determinantal varieties of small tensors, computed exactly."""

from .catalog import CatalogEntry, mm_gr_formula
from .groebner import DimReport, Ideal, MonomialOrder, affine_dimension, groebner_basis
from .polyring import FP, QQ, FieldSpec, Polynomial, Ring
from .tensor_core import LinearMatrix, Tensor, direct_sum

__version__ = "0.1.0"

__all__ = [
    "FP", "QQ", "FieldSpec", "Polynomial", "Ring",
    "DimReport", "Ideal", "MonomialOrder", "affine_dimension", "groebner_basis",
    "LinearMatrix", "Tensor", "direct_sum",
    "CatalogEntry", "mm_gr_formula",
]
