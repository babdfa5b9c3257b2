"""Simulation and verification toolkit for the planar directed polymer's
Busemann process: update maps and their intertwining, geometric row
insertion, inverse-gamma invariant measures, the Poisson-process law of the
Busemann process across an edge, the zero-temperature coupling, competition
interfaces, and the discrete stochastic-heat-equation correspondence."""

__version__ = "0.1.0"
