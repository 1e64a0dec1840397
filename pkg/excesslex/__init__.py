# excesslex: grammar-based compression and entropy analytics for texts

__version__ = "0.1.0"
