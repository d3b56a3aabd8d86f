# -*- coding: utf-8 -*-

"""JISP package - Jacobi-operator time-fractional pseudo-parabolic direct and inverse
source problems
"""

import sys
if sys.version_info < (3, 8):
    raise RuntimeError("This package/program requires python 3.8+")

__version__ = '0.1.0'
