"""Python bindings for the dynamic campaign success tracker."""

from ._dct import *  # noqa: F401,F403
from ._dct import __version__  # noqa: F401
