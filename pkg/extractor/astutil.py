"""
AST helpers shared by the template rewrite, the specializer and every
renderer: marker recognition, exit normalization, parameter substitution
and constant folding.
"""

import ast
import copy
import operator
from dataclasses import dataclass, field
from typing import Mapping, Optional

from vm.values import FOLDABLE_CONSTANTS

EXIT_MARKERS = {"jump_to_p2", "goto", "abort_due_to_error", "vdbe_return"}


def name(identifier: str) -> ast.Name:
    return ast.Name(id=identifier, ctx=ast.Load())


def call(func: str, *args: ast.expr) -> ast.Call:
    return ast.Call(func=name(func), args=list(args), keywords=[])


def const(value) -> ast.Constant:
    return ast.Constant(value=value)


def assign(target: str, value: ast.expr) -> ast.Assign:
    return ast.Assign(targets=[ast.Name(id=target, ctx=ast.Store())], value=value, lineno=0)


def statements(text: str) -> list[ast.stmt]:
    return ast.parse(text).body


def marker_call(stmt: ast.stmt) -> Optional[tuple[str, list[ast.expr]]]:
    """(marker name, args) if stmt is a bare call of a plain function name."""
    if (isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call)
            and isinstance(stmt.value.func, ast.Name)):
        return stmt.value.func.id, stmt.value.args
    return None


def is_exit(stmt: ast.stmt) -> bool:
    if isinstance(stmt, (ast.Break, ast.Return)):
        return True
    marker = marker_call(stmt)
    return marker is not None and marker[0] in EXIT_MARKERS


def terminates(stmts: list[ast.stmt]) -> bool:
    """True when every path through stmts ends in an exit."""
    if not stmts:
        return False
    last = stmts[-1]
    if is_exit(last):
        return True
    if isinstance(last, ast.If):
        return terminates(last.body) and terminates(last.orelse)
    return False


def contains_exit(stmt: ast.stmt) -> bool:
    if isinstance(stmt, ast.If):
        return any(contains_exit(s) for s in stmt.body) or any(contains_exit(s) for s in stmt.orelse)
    return is_exit(stmt)


def normalize_exits(stmts: list[ast.stmt]) -> list[ast.stmt]:
    """
    Move every exit into tail position.

    Statements following an if that exits on some paths are pushed into the
    branches that do not exit (duplicated when both need them), and code
    after an unconditional exit is dropped as unreachable.
    """
    out = []
    for index, stmt in enumerate(stmts):
        if is_exit(stmt):
            out.append(stmt)
            return out
        if isinstance(stmt, ast.If) and contains_exit(stmt):
            rest = stmts[index + 1:]
            body = normalize_exits(stmt.body)
            orelse = normalize_exits(stmt.orelse)
            if rest:
                if not terminates(body):
                    body = normalize_exits(body + copy.deepcopy(rest))
                if not terminates(orelse):
                    orelse = normalize_exits(orelse + copy.deepcopy(rest))
            stmt.body = body or [ast.Pass()]
            stmt.orelse = orelse
            out.append(stmt)
            return out
        out.append(stmt)
    return out


class _Substituter(ast.NodeTransformer):
    def __init__(self, bindings: Mapping[str, ast.expr]):
        self.bindings = bindings

    def visit_Name(self, node: ast.Name):
        if isinstance(node.ctx, ast.Load) and node.id in self.bindings:
            return copy.deepcopy(self.bindings[node.id])
        return node


def substitute(stmts: list[ast.stmt], bindings: Mapping[str, ast.expr]) -> list[ast.stmt]:
    if not bindings:
        return stmts
    module = _Substituter(bindings).visit(ast.Module(body=stmts, type_ignores=[]))
    return module.body


def substitute_expr(node: ast.expr, bindings: Mapping[str, ast.expr]) -> ast.expr:
    return _Substituter(bindings).visit(copy.deepcopy(node))


_BINARY = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.BitOr: operator.or_, ast.BitAnd: operator.and_, ast.BitXor: operator.xor,
    ast.LShift: operator.lshift, ast.RShift: operator.rshift,
}
_COMPARE = {
    ast.Eq: operator.eq, ast.NotEq: operator.ne, ast.Lt: operator.lt, ast.LtE: operator.le,
    ast.Gt: operator.gt, ast.GtE: operator.ge, ast.Is: operator.is_, ast.IsNot: operator.is_not,
}
_UNARY = {ast.Not: operator.not_, ast.USub: operator.neg, ast.Invert: operator.invert}


class _ConstantFolder(ast.NodeTransformer):
    def __init__(self, names: Mapping[str, object]):
        self.names = names

    def visit_Name(self, node: ast.Name):
        if isinstance(node.ctx, ast.Load) and node.id in self.names:
            return ast.copy_location(const(self.names[node.id]), node)
        return node

    def visit_BinOp(self, node: ast.BinOp):
        self.generic_visit(node)
        fold = _BINARY.get(type(node.op))
        if fold and isinstance(node.left, ast.Constant) and isinstance(node.right, ast.Constant):
            return ast.copy_location(const(fold(node.left.value, node.right.value)), node)
        return node

    def visit_UnaryOp(self, node: ast.UnaryOp):
        self.generic_visit(node)
        fold = _UNARY.get(type(node.op))
        if fold and isinstance(node.operand, ast.Constant):
            return ast.copy_location(const(fold(node.operand.value)), node)
        return node

    def visit_Compare(self, node: ast.Compare):
        self.generic_visit(node)
        operands = [node.left, *node.comparators]
        if not all(isinstance(o, ast.Constant) for o in operands):
            return node
        result = True
        for op, left, right in zip(node.ops, operands, operands[1:]):
            result = result and _COMPARE[type(op)](left.value, right.value)
        return ast.copy_location(const(bool(result)), node)

    def visit_BoolOp(self, node: ast.BoolOp):
        self.generic_visit(node)
        if not all(isinstance(v, ast.Constant) for v in node.values):
            return node
        values = [v.value for v in node.values]
        result = all(values) if isinstance(node.op, ast.And) else any(values)
        return ast.copy_location(const(bool(result)), node)

    def visit_If(self, node: ast.If):
        self.generic_visit(node)
        if isinstance(node.test, ast.Constant):
            branch = node.body if node.test.value else node.orelse
            return branch or None
        if not node.body:
            node.body = [ast.Pass()]
        return node


def fold_constants(stmts: list[ast.stmt], names: Mapping[str, object] = FOLDABLE_CONSTANTS) -> list[ast.stmt]:
    """Evaluate constant subexpressions and drop branches decided by them."""
    module = _ConstantFolder(names).visit(ast.Module(body=stmts, type_ignores=[]))
    return module.body


def fold_expr(node: ast.expr, names: Mapping[str, object] = FOLDABLE_CONSTANTS) -> ast.expr:
    return _ConstantFolder(names).visit(node)


def reads_name(stmts: list[ast.stmt], identifier: str) -> bool:
    for stmt in stmts:
        for node in ast.walk(stmt):
            if isinstance(node, ast.Name) and node.id == identifier and isinstance(node.ctx, ast.Load):
                return True
    return False


# --------------------------------------------------------------- segments

@dataclass
class Segment:
    """Statements following one label of a template (label None is the entry)."""
    label: Optional[str]
    body: list[ast.stmt] = field(default_factory=list)


def label_of(stmt: ast.stmt) -> Optional[tuple[str | None]]:
    """
    Recognize label(L(pos)) and label(L(pos, 'name')).

    Returns:
        (None,) for the entry label, (name,) for a local label, or None
    """
    marker = marker_call(stmt)
    if marker is None or marker[0] != "label" or len(marker[1]) != 1:
        return None
    inner = marker[1][0]
    if not (isinstance(inner, ast.Call) and isinstance(inner.func, ast.Name) and inner.func.id == "L"):
        return None
    if len(inner.args) == 1:
        return (None,)
    return (inner.args[1].value,)


def split_segments(body: list[ast.stmt]) -> list[Segment]:
    segments: list[Segment] = []
    for stmt in body:
        found = label_of(stmt)
        if found is not None:
            segments.append(Segment(found[0]))
        elif segments:
            segments[-1].body.append(stmt)
        else:
            raise ValueError("template body must start with its entry label")
    return segments


def join_segments(segments: list[Segment]) -> list[ast.stmt]:
    """Inverse of split_segments."""
    body = []
    for segment in segments:
        target = [name("pos")] if segment.label is None else [name("pos"), const(segment.label)]
        body.append(ast.Expr(value=call("label", call("L", *target))))
        body.extend(segment.body)
    return body
