"""Simulation core: linear algebra, gates, noise, readout, tomography and the search."""
