"""
Fitting helpers for scirtm.
"""

from .fit import PowerFit, fit_powers, jackknife

__all__ = ["PowerFit", "fit_powers", "jackknife"]
