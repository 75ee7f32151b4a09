"""
Symbols generated code is linked against.

Rendered interpreters and compiled regions reference these names as
globals; the loader injects them into each generated module's namespace
before executing it.
"""

import linecache

from vm.opcodes import ErrorCode, Opcode
from vm.state import CONTINUE, Deopt, Error, Exit, Halted, Jumped, Row
from vm.values import MEM_INT, MEM_NULL, MEM_REAL, MEM_STR, mem_compare, mem_flags, null_compare

EXPORTED_SYMBOLS = {
    "Opcode": Opcode,
    "ErrorCode": ErrorCode,
    "CONTINUE": CONTINUE,
    "Row": Row,
    "Halted": Halted,
    "Error": Error,
    "Exit": Exit,
    "Deopt": Deopt,
    "Jumped": Jumped,
    "mem_flags": mem_flags,
    "mem_compare": mem_compare,
    "null_compare": null_compare,
    "MEM_NULL": MEM_NULL,
    "MEM_STR": MEM_STR,
    "MEM_INT": MEM_INT,
    "MEM_REAL": MEM_REAL,
}


def exec_generated(source: str, filename: str) -> dict:
    """
    Compile and execute generated source in a namespace linked against
    EXPORTED_SYMBOLS.

    The source is registered with linecache so tracebacks through generated
    code show its lines.

    Returns:
        The module namespace
    """
    namespace = dict(EXPORTED_SYMBOLS)
    namespace["__name__"] = filename
    linecache.cache[filename] = (len(source), None, source.splitlines(True), filename)
    exec(compile(source, filename, "exec"), namespace)
    return namespace
