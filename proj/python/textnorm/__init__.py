"""Text normalization and corpus quality toolkit."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __doc__  # noqa: F401
except ImportError:  # development layout: extension on PYTHONPATH
    from _core import *  # noqa: F401,F403
