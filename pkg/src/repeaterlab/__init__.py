"""Analytic model of a fault-tolerant quantum repeater with two qubits per node."""

__version__ = "0.1.0"
