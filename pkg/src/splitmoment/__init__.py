"""Verification lab for weighted first moments of quadratic Dirichlet L-functions
whose conductors are built from primes splitting in a quadratic field."""

__version__ = "0.1.0"
