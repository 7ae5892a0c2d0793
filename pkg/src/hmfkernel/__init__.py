"""Exact q-expansions of Hilbert modular forms and a prime-by-prime comparison
of an analytic and a geometric kernel."""

__version__ = "0.1.0"
