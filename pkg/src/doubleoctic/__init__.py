"""Point counts, Frobenius traces and modularity checks for double octic Calabi-Yau threefolds."""

__version__ = "0.1.0"
