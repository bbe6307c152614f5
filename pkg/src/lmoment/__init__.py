"""Fourth and second moments of Dirichlet L-functions on the critical line."""

__version__ = "0.1.0"
