"""Exact-diagonalization simulator for teleportation through a coupled
pair of random quartic-fermion systems prepared in a thermofield double."""

__version__ = "0.1.0"

from . import analysis, layout, models, protocol, qop, tfd  # noqa: F401
