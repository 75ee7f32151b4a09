"""
Template instantiation.

Every backend is produced by the same procedure: take a template, decide
what its exits become in the target context (an ExitRenderer), substitute
the parameters and fold what became constant. Only the exit renderer and
the parameter bindings differ between the switch interpreter, the threaded
interpreter and compiled regions.
"""

import ast
import copy
from typing import Mapping, Optional

from extractor.astutil import (Segment, assign, const, fold_constants, fold_expr, marker_call, reads_name,
                               substitute, substitute_expr)
from extractor.transform import Template


class ExitRenderer:
    """What the exits of a template turn into in one rendering context."""

    def goto_op(self, target: ast.expr, is_next: bool) -> list[ast.stmt]:
        raise NotImplementedError

    def goto_local(self, label: str) -> list[ast.stmt]:
        raise NotImplementedError

    def on_return(self, stmt: ast.Return) -> list[ast.stmt]:
        return [stmt]


def _is_op_binding(stmt: ast.stmt) -> bool:
    return (isinstance(stmt, ast.Assign) and len(stmt.targets) == 1
            and isinstance(stmt.targets[0], ast.Name) and stmt.targets[0].id == "pOp")


def _resolve_exits(stmts: list[ast.stmt], bindings: Mapping[str, ast.expr],
                   exits: ExitRenderer) -> list[ast.stmt]:
    out = []
    for stmt in stmts:
        if isinstance(stmt, ast.If):
            stmt.body = _resolve_exits(stmt.body, bindings, exits)
            stmt.orelse = _resolve_exits(stmt.orelse, bindings, exits)
            out.append(stmt)
            continue
        if isinstance(stmt, ast.Return):
            out.extend(exits.on_return(stmt))
            continue
        marker = marker_call(stmt)
        if marker is not None and marker[0] == "goto":
            target_args = marker[1][0].args
            if len(target_args) == 2:
                out.extend(exits.goto_local(target_args[1].value))
            else:
                target = target_args[0]
                is_next = isinstance(target, ast.Name) and target.id == "next"
                out.extend(exits.goto_op(fold_expr(substitute_expr(target, bindings)), is_next))
            continue
        out.append(stmt)
    return out


def opcode_binding(template: Template) -> dict[str, ast.expr]:
    if template.opcode_const is None:
        return {}
    return {"OPCODE": const(int(template.opcode_const))}


def instantiate(template: Template, bindings: Mapping[str, ast.expr], exits: ExitRenderer,
                keep_op_binding: Optional[bool] = None) -> list[Segment]:
    """
    Expand a template in one rendering context.

    Parameters:
        template: Template to expand (an OPCODE bound by Template.bind is
            substituted as a constant)
        bindings: Expressions for the template parameters
        exits: Renderer for gotos and returns
        keep_op_binding: True keeps 'pOp = aOp[pos]', False drops it, None
            drops it when nothing reads pOp

    Returns:
        The template's segments with exits resolved, parameters
        substituted and constants folded
    """
    bindings = {**opcode_binding(template), **bindings}
    segments = []
    for segment in template.segments:
        body = _resolve_exits(segment.body, bindings, exits)
        body = fold_constants(substitute(body, bindings))
        if keep_op_binding is not True:
            rest = [stmt for stmt in body if not _is_op_binding(stmt)]
            if keep_op_binding is False or not reads_name(rest, "pOp"):
                body = rest
        segments.append(Segment(segment.label, body))
    return segments


def inline_segments(segments: list[Segment], selector: str, local_ids: Mapping[str, int]) -> list[ast.stmt]:
    """
    Lay the segments of one instruction out in a single statement list.

    The entry segment runs first; each local label becomes 'if <selector> ==
    id:' so a local goto (which assigns the selector) falls into it.
    """
    if len(segments) == 1:
        return segments[0].body
    body = [assign(selector, const(0)), *segments[0].body]
    for segment in segments[1:]:
        test = ast.Compare(left=ast.Name(id=selector, ctx=ast.Load()), ops=[ast.Eq()],
                           comparators=[const(local_ids[segment.label])])
        body.append(ast.If(test=test, body=copy.deepcopy(segment.body) or [ast.Pass()], orelse=[]))
    return body


def local_label_ids(template: Template, first: int = 1) -> dict[str, int]:
    labels = [segment.label for segment in template.segments[1:]]
    return {label: first + offset for offset, label in enumerate(labels)}
