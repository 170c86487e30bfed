"""
Service layer for qequil.

Submodules are imported directly (``from qequil.services import deviation``):
matkit for linear algebra, game_core for classical equilibria, quantum_state
for states and local operations, deviation for incentive programs,
constructions for game families, corrcomp for correlation complexity, plus
serialization, workflow and reproduce for the command-line front end.
"""
