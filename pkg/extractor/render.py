"""
Interpreters rendered from the template library.

The switch loop, the single-step function and the threaded handler
factories are all instantiations of the same templates the JIT uses; they
differ only in what the template exits become:

    switch loop     next -> pc += 1, jump -> pc = target
    hooked switch   like switch, but stops with Jumped(from, to) on a
                    backward jump or a jump onto a compiled region entry
    step            state.pc = target; return CONTINUE
    threaded        return H[target] (the pre-resolved next handler);
                    returns store the outcome on the state and end the
                    trampoline
"""

import ast
import textwrap
from typing import Callable, Mapping

from extractor.astutil import assign, const, name, statements
from extractor.instantiate import ExitRenderer, inline_segments, instantiate, local_label_ids
from extractor.library import TemplateLibrary
from vm.opcodes import Opcode

SWITCH_LOOP = "switch_loop"
STEP_FUNCTION = "vdbe_step"
THREADED_FACTORIES = "FACTORIES"
SEGMENT_SELECTOR = "_seg"


def _operand(field_name: str) -> ast.expr:
    return ast.Attribute(value=name("pOp"), attr=field_name, ctx=ast.Load())


def switch_bindings() -> dict[str, ast.expr]:
    return {
        "pos": name("pc"),
        "next": ast.BinOp(left=name("pc"), op=ast.Add(), right=const(1)),
        "P1": _operand("p1"),
        "P2": _operand("p2"),
        "P3": _operand("p3"),
        "OPCODE": _operand("opcode"),
    }


class _LocalGotos(ExitRenderer):
    def __init__(self, local_ids: Mapping[str, int]):
        self.local_ids = local_ids

    def goto_local(self, label: str) -> list[ast.stmt]:
        return [assign(SEGMENT_SELECTOR, const(self.local_ids[label]))]


class SwitchExits(_LocalGotos):
    def __init__(self, local_ids: Mapping[str, int], hooked: bool = False):
        super().__init__(local_ids)
        self.hooked = hooked

    def goto_op(self, target: ast.expr, is_next: bool) -> list[ast.stmt]:
        if is_next:
            return statements("pc += 1")
        target_text = ast.unparse(target)
        if not self.hooked:
            return statements(f"pc = {target_text}")
        return statements(
            f"if {target_text} < pc or aOp[{target_text}].compiled_entry is not None:\n"
            f"    state.pc = {target_text}\n"
            f"    return Jumped(pc, {target_text})\n"
            f"pc = {target_text}")


class StepExits(_LocalGotos):
    def goto_op(self, target: ast.expr, is_next: bool) -> list[ast.stmt]:
        return statements(f"state.pc = {ast.unparse(target)}\nreturn CONTINUE")


class ThreadedExits(_LocalGotos):
    def goto_op(self, target: ast.expr, is_next: bool) -> list[ast.stmt]:
        return statements(f"return H[{ast.unparse(target)}]")

    def on_return(self, stmt: ast.Return) -> list[ast.stmt]:
        return statements(f"state.outcome = {ast.unparse(stmt.value)}\nreturn None")


def _pattern(opcodes: tuple[Opcode, ...]) -> ast.pattern:
    values = [ast.MatchValue(value=ast.Attribute(value=name("Opcode"), attr=op.name, ctx=ast.Load()))
              for op in opcodes]
    return values[0] if len(values) == 1 else ast.MatchOr(patterns=values)


def render_dispatch(library: TemplateLibrary, make_exits: Callable[[dict], ExitRenderer]) -> str:
    """The match statement dispatching to every group's instantiated template."""
    cases = []
    for group in library.groups:
        local_ids = local_label_ids(group)
        segments = instantiate(group, switch_bindings(), make_exits(local_ids), keep_op_binding=False)
        body = inline_segments(segments, SEGMENT_SELECTOR, local_ids)
        cases.append(ast.match_case(pattern=_pattern(group.opcodes), guard=None, body=body))
    match = ast.Match(subject=_operand("opcode"), cases=cases)
    return ast.unparse(ast.fix_missing_locations(ast.Module(body=[match], type_ignores=[])))


def _prologue(library: TemplateLibrary) -> str:
    return "\n".join(ast.unparse(stmt) for stmt in library.prologue)


def _header(library: TemplateLibrary, what: str) -> str:
    return (f"# {what} rendered from {library.source_name}\n"
            f"SEMANTICS_SHA256 = {library.semantics_sha256!r}\n\n\n")


def render_switch_loop(library: TemplateLibrary, counting: bool = False, hooked: bool = False) -> str:
    dispatch = render_dispatch(library, lambda ids: SwitchExits(ids, hooked))
    loop_body = ("state.retired += 1\n" if counting else "") + dispatch
    return (
        _header(library, "Switch interpreter")
        + f"def {SWITCH_LOOP}(state, db, aOp):\n"
        + textwrap.indent(_prologue(library), " " * 4) + "\n"
        + "    pc = state.pc\n"
        + "    try:\n"
        + "        while True:\n"
        + "            pOp = aOp[pc]\n"
        + textwrap.indent(loop_body, " " * 12) + "\n"
        + "    except IndexError:\n"
        + "        return Error(ErrorCode.BAD_REGISTER, pc)\n"
    )


def render_step(library: TemplateLibrary) -> str:
    dispatch = render_dispatch(library, StepExits)
    return (
        _header(library, "Single-step interpreter")
        + f"def {STEP_FUNCTION}(state, db, aOp):\n"
        + textwrap.indent(_prologue(library), " " * 4) + "\n"
        + "    pc = state.pc\n"
        + "    try:\n"
        + "        pOp = aOp[pc]\n"
        + textwrap.indent(dispatch, " " * 8) + "\n"
        + "    except IndexError:\n"
        + "        return Error(ErrorCode.BAD_REGISTER, pc)\n"
    )


def render_threaded(library: TemplateLibrary, counting: bool = False) -> str:
    """
    One factory per opcode. A factory binds an instruction's position and
    operands and returns its handler; the handler returns the handler to
    run next, or None after storing an outcome on the state.
    """
    parts = [_header(library, "Threaded handler factories")]
    names = {}
    for opcode, template in library.generic.items():
        local_ids = local_label_ids(template)
        segments = instantiate(template, {}, ThreadedExits(local_ids))
        body = ast.unparse(ast.Module(body=inline_segments(segments, SEGMENT_SELECTOR, local_ids),
                                      type_ignores=[]))
        if counting:
            body = "state.retired += 1\n" + body
        factory = f"make_{opcode.name}"
        names[int(opcode)] = factory
        parts.append(
            f"def {factory}(state, db, aOp, H, pos, next, P1, P2, P3):\n"
            + textwrap.indent(_prologue(library), " " * 4) + "\n\n"
            + f"    def op_{opcode.name}():\n"
            + "        try:\n"
            + textwrap.indent(body, " " * 12) + "\n"
            + "        except IndexError:\n"
            + "            state.outcome = Error(ErrorCode.BAD_REGISTER, pos)\n"
            + "            return None\n"
            + f"    return op_{opcode.name}\n\n\n"
        )
    entries = ", ".join(f"{code}: {factory}" for code, factory in sorted(names.items()))
    parts.append(f"{THREADED_FACTORIES} = {{{entries}}}\n")
    return "".join(parts)
