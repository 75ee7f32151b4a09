"""
Integer-only variants of the comparison templates.

The generic comparison reads both operands' type flags, takes a Null
branch and calls the general three-way compare. The integer variant
guards once on both operands being Int (returning Deopt(pos) otherwise)
and compares them directly; the flags become the Int constant and the
emitter's folder removes the Null branch.
"""

import ast
import copy
from dataclasses import replace

from errors import ExtractorError
from extractor.astutil import const, fold_constants, join_segments, name, normalize_exits, split_segments
from extractor.transform import DEOPT_RETURN, Template, template_def, template_name
from vm.opcodes import COMPARISON_OPCODES
from vm.values import MEM_INT


def _flag_assignments(body: list[ast.stmt]) -> list[tuple[int, str, ast.expr]]:
    found = []
    for index, stmt in enumerate(body):
        if (isinstance(stmt, ast.Assign) and len(stmt.targets) == 1 and isinstance(stmt.targets[0], ast.Name)
                and isinstance(stmt.value, ast.Call) and isinstance(stmt.value.func, ast.Name)
                and stmt.value.func.id == "mem_flags" and len(stmt.value.args) == 1):
            found.append((index, stmt.targets[0].id, stmt.value.args[0]))
    return found


def _int_guard(operands: list[ast.expr]) -> ast.If:
    checks = [ast.Compare(left=ast.Call(func=name("type"), args=[copy.deepcopy(operand)], keywords=[]),
                          ops=[ast.IsNot()], comparators=[name("int")]) for operand in operands]
    test = checks[0] if len(checks) == 1 else ast.BoolOp(op=ast.Or(), values=checks)
    return ast.If(test=test, body=[ast.Return(value=ast.Call(func=name("Deopt"), args=[name("pos")], keywords=[]))],
                  orelse=[])


class _IntCompare(ast.NodeTransformer):
    """mem_compare(a, b) on two ints -> (a > b) - (a < b)."""

    def __init__(self, flag_names: set[str]):
        self.flag_names = flag_names

    def visit_Name(self, node: ast.Name):
        if isinstance(node.ctx, ast.Load) and node.id in self.flag_names:
            return ast.copy_location(const(MEM_INT), node)
        return node

    def visit_Call(self, node: ast.Call):
        self.generic_visit(node)
        if isinstance(node.func, ast.Name) and node.func.id == "mem_compare" and len(node.args) == 2:
            left, right = node.args
            greater = ast.Compare(left=left, ops=[ast.Gt()], comparators=[copy.deepcopy(right)])
            less = ast.Compare(left=copy.deepcopy(left), ops=[ast.Lt()], comparators=[right])
            return ast.copy_location(ast.BinOp(left=greater, op=ast.Sub(), right=less), node)
        return node


def specialize_template(template: Template) -> Template:
    """
    Derive the integer-only variant of one comparison template.

    Raises:
        ExtractorError: If the template does not read operand type flags
    """
    segments = split_segments(copy.deepcopy(template.tree.body))
    entry = segments[0].body
    flags = _flag_assignments(entry)
    if not flags:
        raise ExtractorError(f"{template.name} reads no operand type flags; nothing to specialize")

    first_index = flags[0][0]
    removed = {index for index, _, _ in flags}
    rest = [stmt for index, stmt in enumerate(entry) if index not in removed and index > first_index]
    rewriter = _IntCompare({flag_name for _, flag_name, _ in flags})
    rest = [rewriter.visit(stmt) for stmt in rest]
    guard = _int_guard([operand for _, _, operand in flags])
    entry = entry[:first_index] + [guard] + fold_constants(rest)
    segments[0].body = normalize_exits(entry)

    variant_name = template_name(template.opcodes[0].name, "int")
    tree = template_def(variant_name, join_segments(segments))
    return replace(template, name=variant_name, tree=tree, variant="int",
                   exit_kinds=template.exit_kinds | {DEOPT_RETURN}, opcode_const=None)


def specialize_comparisons(templates: list[Template]) -> list[Template]:
    """Integer variants of every comparison group among templates."""
    return [specialize_template(template) for template in templates
            if all(opcode in COMPARISON_OPCODES for opcode in template.opcodes)]
