"""mdimlab: exact desk-scale algorithmic information in Euclidean space."""

__version__ = "0.1.0"
