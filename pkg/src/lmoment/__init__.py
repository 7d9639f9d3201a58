"""Shifted fourth moments of Dirichlet L-functions mod a prime."""
