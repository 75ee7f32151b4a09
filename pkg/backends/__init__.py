"""
Interpreting backends. Backend selection by name lives in backends.run.
"""

from .protocol import CollectingSink, CountingSink, RunStats, SinkAction
from .interpreters import get_interpreters
from .switch import run_switch
from .threaded import run_threaded
from .step import step

__all__ = ['CollectingSink', 'CountingSink', 'RunStats', 'SinkAction', 'get_interpreters', 'run_switch',
           'run_threaded', 'step']
