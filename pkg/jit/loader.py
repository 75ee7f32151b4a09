"""
Loading compiled regions and installing their entries.

A compiled module is executed in a fresh namespace pre-populated with the
engine's runtime symbols (Row, Exit, mem_compare, ...), which is how its
references to engine code are resolved. Loaded modules stay referenced in
a process-wide registry for the life of the process.
"""

import importlib.machinery
import importlib.util
import logging
import threading
from types import ModuleType
from typing import Callable

from errors import AlreadyInstalled, LoadFailed
from jit.compiler import CompiledModule
from jit.emitter import REGION_ENTRY
from vm.program import Program
from vm.runtime import EXPORTED_SYMBOLS

logger = logging.getLogger(__name__)

_REGISTRY_LOCK = threading.Lock()
_LOADED: dict[str, ModuleType] = {}


def load_region(compiled: CompiledModule) -> Callable:
    """
    Load a compiled region module and return its entry function.

    Raises:
        LoadFailed: If the module cannot be read or executed, or has no entry
    """
    loader = importlib.machinery.SourcelessFileLoader(compiled.name, str(compiled.module_path))
    spec = importlib.util.spec_from_loader(compiled.name, loader)
    try:
        module = importlib.util.module_from_spec(spec)
        module.__dict__.update(EXPORTED_SYMBOLS)
        loader.exec_module(module)
    except (ImportError, OSError, EOFError, ValueError, SyntaxError, NameError) as exc:
        raise LoadFailed(f"cannot load {compiled.module_path}: {exc}") from exc
    entry = getattr(module, REGION_ENTRY, None)
    if not callable(entry):
        raise LoadFailed(f"{compiled.module_path} defines no '{REGION_ENTRY}' entry")
    with _REGISTRY_LOCK:
        key = compiled.name
        suffix = 1
        while key in _LOADED:
            suffix += 1
            key = f"{compiled.name}#{suffix}"
        _LOADED[key] = module
    return entry


def install(program: Program, head: int, entry: Callable) -> None:
    """
    Make entry the compiled entry of the instruction at head.

    Raises:
        AlreadyInstalled: If head already has an entry
    """
    op = program.ops[head]
    with _REGISTRY_LOCK:
        if op.compiled_entry is not None:
            raise AlreadyInstalled(f"instruction {head} already has a compiled entry")
        op.compiled_entry = entry
    logger.debug("Installed region entry at %d", head)


def load_and_install(compiled: CompiledModule, program: Program, head: int) -> Callable:
    entry = load_region(compiled)
    install(program, head, entry)
    return entry


def loaded_modules() -> list[str]:
    with _REGISTRY_LOCK:
        return sorted(_LOADED)
