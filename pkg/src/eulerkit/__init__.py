"""Invariant-domain preserving compressible Euler solver kit for general
Mie-Gruneisen equations of state.

Subpackages: eos (thermodynamics), wavespeed (guaranteed Riemann wave-speed
bounds), scheme (graph-viscosity spatial update), timeloop (SSP-RK3 driver),
validate (invariant checkers), problems (shipped experiments), cli.
"""

from . import eos, problems, scheme, timeloop, validate, wavespeed

__version__ = "0.1.0"

__all__ = ["eos", "wavespeed", "scheme", "timeloop", "validate", "problems", "__version__"]
