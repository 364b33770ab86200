"""Linear and homological algebra over GF(2)."""

from .bitmatrix import BitMatrix, in_rowspace, kernel_basis, rank, rref

__all__ = ["BitMatrix", "in_rowspace", "kernel_basis", "rank", "rref"]
