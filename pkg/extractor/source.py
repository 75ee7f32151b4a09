"""
Loading and checking the opcode-semantics source.

The source is ordinary Python restricted to a small subset (see
semantics/vdbe.py). Preprocessing strips imports and the no_inline
annotation; everything else is checked against the subset before any
template is extracted.
"""

import ast
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from errors import SemanticsParseError, SubsetViolation
from vm.opcodes import Opcode

logger = logging.getLogger(__name__)

STRIPPED_DECORATORS = {"no_inline"}

# Statements and expressions a case block may not contain.
FORBIDDEN_NODES = {
    ast.Match: "nested match",
    ast.For: "loop",
    ast.AsyncFor: "loop",
    ast.While: "loop",
    ast.Try: "try statement",
    ast.With: "with statement",
    ast.AsyncWith: "with statement",
    ast.FunctionDef: "nested function",
    ast.AsyncFunctionDef: "nested function",
    ast.ClassDef: "class definition",
    ast.Lambda: "lambda",
    ast.Return: "return (use a control marker)",
    ast.Continue: "continue",
    ast.Yield: "yield",
    ast.YieldFrom: "yield",
    ast.Await: "await",
    ast.Global: "global statement",
    ast.Nonlocal: "nonlocal statement",
    ast.Import: "import",
    ast.ImportFrom: "import",
    ast.Raise: "raise (use abort_due_to_error)",
}


@dataclass
class SemanticsSource:
    text: str
    sha256: str
    path: Optional[Path]
    function: ast.FunctionDef
    prologue: list[ast.stmt]
    dispatch: ast.Match
    interpret_only: tuple[Opcode, ...] = ()

    @property
    def name(self) -> str:
        return self.path.name if self.path else "<semantics>"


def semantics_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def opcode_from_node(node: ast.expr) -> Opcode:
    if (isinstance(node, ast.Attribute) and isinstance(node.value, ast.Name)
            and node.value.id == "Opcode" and node.attr in Opcode.__members__):
        return Opcode[node.attr]
    raise SubsetViolation(f"expected Opcode.<name>, got '{ast.unparse(node)}'", getattr(node, "lineno", 0))


def _interpret_only(node: ast.Assign) -> tuple[Opcode, ...]:
    if not isinstance(node.value, (ast.Tuple, ast.List)):
        raise SubsetViolation("INTERPRET_ONLY must be a tuple of opcodes", node.lineno)
    return tuple(opcode_from_node(element) for element in node.value.elts)


def _is_true(node: ast.expr) -> bool:
    return isinstance(node, ast.Constant) and node.value is True


def _binds_pc(stmt: ast.stmt) -> bool:
    return (isinstance(stmt, ast.Assign) and len(stmt.targets) == 1
            and isinstance(stmt.targets[0], ast.Name) and stmt.targets[0].id == "pc")


def check_case_body(body: list[ast.stmt], where: str) -> None:
    """
    Reject constructs outside the semantics subset.

    Raises:
        SubsetViolation: On the first forbidden construct
    """
    for stmt in body:
        for node in ast.walk(stmt):
            reason = FORBIDDEN_NODES.get(type(node))
            if reason is not None:
                raise SubsetViolation(f"{reason} is not allowed in {where}", getattr(node, "lineno", 0))
    # label() may only appear at the top level of a case block
    for stmt in body:
        if isinstance(stmt, ast.If):
            for node in ast.walk(stmt):
                if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                        and node.func.id == "label"):
                    raise SubsetViolation(f"label() must be at the top level of {where}", node.lineno)


def parse_semantics(text: str, path: Optional[Path] = None) -> SemanticsSource:
    """
    Parse and check an opcode-semantics source.

    Parameters:
        text: Source text
        path: Where the text came from (for messages)

    Returns:
        SemanticsSource with the dispatch construct located

    Raises:
        SemanticsParseError: If the text is empty or not valid Python
        SubsetViolation: If it uses constructs outside the subset
    """
    filename = str(path) if path else "<semantics>"
    if not text.strip():
        raise SemanticsParseError(f"{filename} is empty", 1, 0)
    try:
        module = ast.parse(text, filename=filename)
    except SyntaxError as exc:
        raise SemanticsParseError(f"{filename}: {exc.msg}", exc.lineno or 0, exc.offset or 0) from exc

    functions = []
    interpret_only: tuple[Opcode, ...] = ()
    for index, stmt in enumerate(module.body):
        if isinstance(stmt, (ast.Import, ast.ImportFrom)):
            continue
        if index == 0 and isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Constant):
            continue
        if isinstance(stmt, ast.Assign) and [ast.unparse(t) for t in stmt.targets] == ["INTERPRET_ONLY"]:
            interpret_only = _interpret_only(stmt)
            continue
        if isinstance(stmt, ast.FunctionDef):
            functions.append(stmt)
            continue
        raise SubsetViolation(f"unexpected top-level statement '{ast.unparse(stmt)[:40]}'", stmt.lineno)

    if len(functions) != 1:
        raise SubsetViolation(f"expected exactly one dispatch function, found {len(functions)}")
    function = functions[0]
    for decorator in function.decorator_list:
        if not (isinstance(decorator, ast.Name) and decorator.id in STRIPPED_DECORATORS):
            raise SubsetViolation(f"unsupported decorator '{ast.unparse(decorator)}'", decorator.lineno)
    function.decorator_list = []

    body = list(function.body)
    if body and isinstance(body[0], ast.Expr) and isinstance(body[0].value, ast.Constant):
        body = body[1:]
    if not body or not isinstance(body[-1], ast.While) or not _is_true(body[-1].test):
        raise SubsetViolation("dispatch function must end in a single 'while True' loop", function.lineno)
    loop = body[-1]
    prologue = []
    for stmt in body[:-1]:
        if not isinstance(stmt, ast.Assign):
            raise SubsetViolation("only assignments may precede the dispatch loop", stmt.lineno)
        if not _binds_pc(stmt):
            prologue.append(stmt)

    matches = [stmt for stmt in loop.body if isinstance(stmt, ast.Match)]
    if len(matches) != 1 or not isinstance(loop.body[-1], ast.Match):
        raise SubsetViolation("dispatch loop must end in exactly one match statement", loop.lineno)
    dispatch = matches[0]
    if ast.unparse(dispatch.subject) != "pOp.opcode":
        raise SubsetViolation("dispatch must match on pOp.opcode", dispatch.lineno)
    for stmt in loop.body[:-1]:
        if not (isinstance(stmt, ast.Assign) and ast.unparse(stmt) == "pOp = aOp[pc]"):
            raise SubsetViolation("the dispatch loop may only bind 'pOp = aOp[pc]' before matching",
                                  stmt.lineno)

    logger.debug("Parsed %s: %d case blocks", filename, len(dispatch.cases))
    return SemanticsSource(text=text, sha256=semantics_sha256(text), path=path, function=function,
                           prologue=prologue, dispatch=dispatch, interpret_only=interpret_only)


def load_semantics(path: Path | str) -> SemanticsSource:
    path = Path(path)
    return parse_semantics(path.read_text(encoding="utf-8"), path)
