"""F-zips from splitting structures: exact construction, EO classification and
the surrounding stratification combinatorics."""

__version__ = "0.1.0"
