"""Entanglement distribution through an ancilla that never becomes entangled.

Numerical reproduction of the continuous-coupling model, the discrete
three-qubit protocol, and the composition of separable maps.
"""

__version__ = "0.1.0"
