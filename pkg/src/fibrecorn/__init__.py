"""fibrecorn: symbolic and combinatorial calculus on fibred corners."""

__version__ = "0.1.0"
