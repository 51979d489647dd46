"""ZenoSim engine: block non-Hermitian models, EWA effective Hamiltonians, fidelities and sweeps."""
