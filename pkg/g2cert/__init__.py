"""g2cert: exact certificates for purely coclosed G2-structures on nilpotent Lie algebras."""

__version__ = "0.1.0"
