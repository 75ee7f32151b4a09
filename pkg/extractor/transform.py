"""
Case block -> template rewrite.

A template is a function of (pos, next, P1, P2, P3, OPCODE) whose body
starts with its entry label and ends every path in an explicit exit:

    label(L(pos))                 entry of the instruction at pos
    pOp = aOp[pos]                instruction binding
    goto(L(P2)) / goto(L(next))   jump to another instruction
    goto(L(pos, 'name'))          jump to a block-local label
    return Row(...) / Halted(pos) / Error(code, pos)

Rewrite rules applied to a case block:

    entry label       label(L(pos)) prepended
    binding           pOp = aOp[pos] after the entry label
    error/row/halt    markers become returns of outcome objects
    p2 jump           jump_to_p2() -> goto(L(P2))
    local labels      'name' -> L(pos, 'name')
    fall-through      break -> goto(L(next))
    operands          pOp.p1/p2/p3/opcode -> P1/P2/P3/OPCODE,
                      Opcode.X -> its numeric code
"""

import ast
import copy
from dataclasses import dataclass, replace
from typing import Optional

from errors import SubsetViolation, UnrewritableJump
from extractor.astutil import (Segment, assign, call, const, join_segments, marker_call, name,
                               normalize_exits, split_segments, terminates)
from extractor.blocks import CaseBlock
from vm.opcodes import Opcode, ReturnCode

PARAMETERS = ("pos", "next", "P1", "P2", "P3", "OPCODE")
OPERAND_NAMES = {"p1": "P1", "p2": "P2", "p3": "P3", "opcode": "OPCODE"}

FALLTHROUGH_NEXT = "fallthrough_next"
JUMP_TO_P2 = "jump_to_p2"
ERROR_RETURN = "error_return"
HALT_RETURN = "halt_return"
ROW_RETURN = "row_return"
DEOPT_RETURN = "deopt_return"


@dataclass
class Template:
    """
    Parametric code of one opcode group.

    Group templates leave OPCODE free; per-opcode views (see bind) carry
    the opcode the renderers substitute for it.
    """
    name: str
    opcodes: tuple[Opcode, ...]
    tree: ast.FunctionDef
    exit_kinds: frozenset[str]
    semantics_sha256: str
    variant: str = "generic"
    opcode_const: Optional[Opcode] = None

    @property
    def text(self) -> str:
        return ast.unparse(ast.fix_missing_locations(self.tree))

    @property
    def segments(self) -> list[Segment]:
        return split_segments(copy.deepcopy(self.tree.body))

    def bind(self, opcode: Opcode) -> "Template":
        if opcode not in self.opcodes:
            raise ValueError(f"{self.name} does not implement {opcode.name}")
        return replace(self, opcode_const=opcode)


def template_def(template_name: str, body: list[ast.stmt]) -> ast.FunctionDef:
    tree = ast.parse(f"def {template_name}({', '.join(PARAMETERS)}):\n    pass").body[0]
    tree.body = body
    return ast.fix_missing_locations(tree)


def template_name(group: str, variant: str = "generic") -> str:
    suffix = "_INT" if variant == "int" else ""
    return f"{group.upper()}{suffix}_TEMPL"


def _goto(*target: ast.expr) -> ast.Expr:
    return ast.Expr(value=call("goto", call("L", *target)))


class _BlockRewriter(ast.NodeTransformer):
    def __init__(self, block: CaseBlock, labels: list[str], segment_index: int):
        self.block = block
        self.labels = labels
        self.segment_index = segment_index
        self.exit_kinds: set[str] = set()

    def visit_Break(self, node: ast.Break):
        self.exit_kinds.add(FALLTHROUGH_NEXT)
        return ast.copy_location(_goto(name("next")), node)

    def visit_Expr(self, node: ast.Expr):
        marker = marker_call(node)
        if marker is None:
            return self.generic_visit(node)
        marker_name, args = marker
        args = [self.visit(arg) for arg in args]
        if marker_name == "jump_to_p2":
            self.exit_kinds.add(JUMP_TO_P2)
            return ast.copy_location(_goto(name("P2")), node)
        if marker_name == "goto":
            return ast.copy_location(self._local_goto(args, node.lineno), node)
        if marker_name == "abort_due_to_error":
            self.exit_kinds.add(ERROR_RETURN)
            return ast.copy_location(ast.Return(value=call("Error", *args, name("pos"))), node)
        if marker_name == "vdbe_return":
            return ast.copy_location(self._vdbe_return(args, node.lineno), node)
        if marker_name == "label":
            raise SubsetViolation(f"label() must be at the top level of case {self.block.name}", node.lineno)
        return self.generic_visit(node)

    def _local_goto(self, args: list[ast.expr], line: int) -> ast.stmt:
        if len(args) != 1 or not isinstance(args[0], ast.Constant) or not isinstance(args[0].value, str):
            raise UnrewritableJump(f"goto() in case {self.block.name} (line {line}) needs a literal label name")
        target = args[0].value
        if target not in self.labels:
            raise UnrewritableJump(f"goto('{target}') in case {self.block.name} (line {line}) has no matching label")
        if self.labels.index(target) + 1 <= self.segment_index:
            raise UnrewritableJump(f"goto('{target}') in case {self.block.name} (line {line}) jumps backward")
        return _goto(name("pos"), const(target))

    def _vdbe_return(self, args: list[ast.expr], line: int) -> ast.stmt:
        code = ast.unparse(args[0]) if args else ""
        if code == f"ReturnCode.{ReturnCode.ROW.name}" and len(args) == 3:
            self.exit_kinds.add(ROW_RETURN)
            resume = ast.BinOp(left=name("pos"), op=ast.Add(), right=const(1))
            return ast.Return(value=call("Row", args[1], args[2], resume))
        if code == f"ReturnCode.{ReturnCode.HALT.name}" and len(args) == 1:
            self.exit_kinds.add(HALT_RETURN)
            return ast.Return(value=call("Halted", name("pos")))
        raise UnrewritableJump(f"vdbe_return({code}) in case {self.block.name} (line {line}) "
                               f"is not a known return kind")

    def visit_Attribute(self, node: ast.Attribute):
        if isinstance(node.value, ast.Name):
            if node.value.id == "pOp" and node.attr in OPERAND_NAMES:
                return ast.copy_location(name(OPERAND_NAMES[node.attr]), node)
            if node.value.id == "Opcode" and node.attr in Opcode.__members__:
                return ast.copy_location(const(int(Opcode[node.attr])), node)
        return self.generic_visit(node)


def _split_block(block: CaseBlock) -> list[Segment]:
    segments = [Segment(None)]
    for stmt in copy.deepcopy(block.body):
        found = marker_call(stmt)
        if found is not None and found[0] == "label":
            args = found[1]
            if len(args) != 1 or not isinstance(args[0], ast.Constant) or not isinstance(args[0].value, str):
                raise SubsetViolation(f"label() in case {block.name} needs a literal name", stmt.lineno)
            if any(segment.label == args[0].value for segment in segments):
                raise SubsetViolation(f"label '{args[0].value}' defined twice in case {block.name}", stmt.lineno)
            segments.append(Segment(args[0].value))
        else:
            segments[-1].body.append(stmt)
    return segments


def transform_block(block: CaseBlock, semantics_sha256: str) -> Template:
    """
    Rewrite one case block into its template.

    Parameters:
        block: Case block from the semantics source
        semantics_sha256: Hash of the source the block came from

    Returns:
        Template named <GROUP>_TEMPL

    Raises:
        SubsetViolation: If some path through the block reaches its end
            without a control marker
        UnrewritableJump: For local jumps without a label, backward local
            jumps and unknown return kinds
    """
    segments = _split_block(block)
    labels = [segment.label for segment in segments[1:]]
    exit_kinds: set[str] = set()
    for index, segment in enumerate(segments):
        body = normalize_exits(segment.body)
        where = "entry" if segment.label is None else f"label '{segment.label}'"
        if not terminates(body):
            raise SubsetViolation(f"case {block.name} ({where}) can reach its end without a control marker",
                                  block.line)
        rewriter = _BlockRewriter(block, labels, index)
        segment.body = [rewriter.visit(stmt) for stmt in body]
        exit_kinds |= rewriter.exit_kinds

    segments[0].body.insert(0, assign("pOp", ast.Subscript(value=name("aOp"), slice=name("pos"), ctx=ast.Load())))
    tree = template_def(template_name(block.name), join_segments(segments))
    return Template(name=tree.name, opcodes=block.opcodes, tree=tree,
                    exit_kinds=frozenset(exit_kinds), semantics_sha256=semantics_sha256)


def template_from_text(text: str, opcodes: tuple[Opcode, ...], semantics_sha256: str,
                       variant: str = "generic") -> Template:
    """Rebuild a template from its emitted text (see extractor.library)."""
    tree = ast.parse(text).body[0]
    if not isinstance(tree, ast.FunctionDef) or tuple(a.arg for a in tree.args.args) != PARAMETERS:
        raise SubsetViolation(f"'{text.splitlines()[0] if text else ''}' is not a template definition")
    kinds = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Return) and isinstance(node.value, ast.Call):
            kinds.add({"Row": ROW_RETURN, "Halted": HALT_RETURN, "Error": ERROR_RETURN,
                       "Deopt": DEOPT_RETURN}[node.value.func.id])
        marker = marker_call(node) if isinstance(node, ast.Expr) else None
        if marker and marker[0] == "goto" and len(marker[1][0].args) == 1:
            target = marker[1][0].args[0]
            kinds.add(JUMP_TO_P2 if isinstance(target, ast.Name) and target.id == "P2" else FALLTHROUGH_NEXT)
    return Template(name=tree.name, opcodes=opcodes, tree=tree, exit_kinds=frozenset(kinds),
                    semantics_sha256=semantics_sha256, variant=variant)


__all__ = ["Template", "transform_block", "template_from_text", "template_def", "template_name",
           "PARAMETERS"]
