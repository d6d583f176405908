"""Heisenberg-picture noise transfer for bosonic qubits."""
