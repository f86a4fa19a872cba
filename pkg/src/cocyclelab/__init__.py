"""Numerical laboratory for circle-diffeomorphism cocycles over subshifts of finite type."""

__version__ = "0.1.0"
