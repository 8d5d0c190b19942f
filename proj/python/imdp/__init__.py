"""Interval-MDP abstraction and robust controller synthesis.

Thin bindings over the C++ core; see the README for the workflow.
"""

from ._imdp import *  # noqa: F401,F403
from ._imdp import __doc__  # noqa: F401
