"""
Backend selection.
"""

from enum import Enum
from typing import Optional

from backends.interpreters import get_interpreters
from backends.protocol import RowSink, RunStats
from backends.switch import run_switch
from backends.threaded import run_threaded
from extractor.library import TemplateLibrary
from jit.config import JitConfig, JitMode
from jit.engine import run_jit
from storage.schema import Database
from vm.program import Program


class Backend(str, Enum):
    SWITCH = "switch"
    THREADED = "threaded"
    JIT = "jit"
    JIT_SPECIALIZED = "jit-specialized"


BACKEND_NAMES = [backend.value for backend in Backend]


def run_backend(backend: Backend | str, program: Program, db: Database, sink: RowSink,
                config: Optional[JitConfig] = None, library: Optional[TemplateLibrary] = None,
                count_instructions: bool = False) -> RunStats:
    """
    Run program on the named backend.

    Raises:
        ValueError: If the backend name is unknown
    """
    backend = Backend(backend)
    if backend is Backend.SWITCH:
        return run_switch(program, db, sink, count_instructions, get_interpreters(library))
    if backend is Backend.THREADED:
        return run_threaded(program, db, sink, count_instructions, get_interpreters(library))
    config = config or JitConfig.from_env()
    mode = JitMode.SPECIALIZED if backend is Backend.JIT_SPECIALIZED else JitMode.GENERIC
    return run_jit(program, db, sink, config.with_overrides(mode=mode), library, count_instructions)
