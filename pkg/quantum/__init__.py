# Quantum module
