"""Shallow ReLU networks on the sphere with spherical-harmonic diagnostics."""

from sphere_spectra._core import *  # noqa: F401,F403
from sphere_spectra._core import __doc__  # noqa: F401
