"""Quotient categories of coherent modules on affine charts.

Thin re-export of the native module; see the project README for the
session language and the CLI.
"""

from ._codimcat import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
