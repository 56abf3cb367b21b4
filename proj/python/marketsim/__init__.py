"""Electricity market clearing and strategic bidding simulator."""

try:
    from ._marketsim import *  # noqa: F401,F403
    from ._marketsim import __doc__  # noqa: F401
except ImportError:  # development layout: extension on PYTHONPATH
    from _marketsim import *  # noqa: F401,F403
    from _marketsim import __doc__  # noqa: F401

__version__ = "0.1.0"
