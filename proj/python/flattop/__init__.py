"""Flat-top spectrum and bispectrum estimation."""

from ._flattop import *  # noqa: F401,F403
from ._flattop import __doc__  # noqa: F401
