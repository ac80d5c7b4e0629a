"""Euclidean association schemes over finite fields, Kloosterman sums and walks."""

from .gf import FieldElement, FieldSpec, field_for_q, make_field
from .scheme import ZBAR, Distance, scheme_matrices

__all__ = ["FieldElement", "FieldSpec", "field_for_q", "make_field", "ZBAR", "Distance", "scheme_matrices"]
