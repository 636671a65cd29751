"""Exact bound states of the Klein-Gordon equation with equal scalar and vector
Kratzer plus ring-shaped potentials, in D dimensions."""
