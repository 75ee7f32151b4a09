"""
Control markers of the opcode-semantics language.

The semantics module is parsed by the template extractor, never executed,
so these functions only exist to keep it importable and lint-clean. Each
marker is rewritten into an explicit exit of the enclosing template.
"""


def _marker_only(name: str):
    raise NotImplementedError(f"{name}() is a semantics marker and is only meaningful to the template extractor")


def no_inline(func):
    """Keep the dispatch function out of line (stripped by the extractor)."""
    return func


def jump_to_p2():
    _marker_only("jump_to_p2")


def goto(name: str):
    _marker_only("goto")


def label(name: str):
    _marker_only("label")


def abort_due_to_error(code):
    _marker_only("abort_due_to_error")


def vdbe_return(code, *operands):
    _marker_only("vdbe_return")
