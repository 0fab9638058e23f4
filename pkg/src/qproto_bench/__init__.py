"""Benchmarking suite for small-scale quantum network protocols.

Four protocols (quantum money, W-state anonymous transmission,
three-qubit verifiable blind computation, three-party digital
signatures) simulated on a dense density-matrix backend under
parametrized hardware noise, plus a genetic-algorithm search for the
minimal hardware improvements that meet a security target.
"""

__version__ = "0.1.0"
