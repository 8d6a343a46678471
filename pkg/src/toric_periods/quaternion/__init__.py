"""Definite quaternion algebras over Q, their orders, and local order classification."""
from .algebra import QuaternionAlgebra, algebra_from_ramification, hilbert_symbol
from .orders import LocalCertificate, OrderBasis, maximal_order

__all__ = [
    "LocalCertificate",
    "OrderBasis",
    "QuaternionAlgebra",
    "algebra_from_ramification",
    "hilbert_symbol",
    "maximal_order",
]
