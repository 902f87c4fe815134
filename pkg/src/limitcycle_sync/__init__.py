"""limitcycle-sync - Quantum desynchronization of coupled limit-cycle oscillators."""

__version__ = "0.1.0"
