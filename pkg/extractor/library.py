"""
Template library: extraction entry point, emitted artifacts and the
emitter table.

Artifacts written to an output directory:

    tmpl_<group>.inc        one template definition per opcode group
    tmpl_<group>_int.inc    integer-only comparison variant (specialize)
    emitter_table.gen       opcode -> (template, opcode code, file), the
                            dispatch prologue and SEMANTICS_SHA256
"""

import ast
import logging
import pprint
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional

from errors import MissingOpcode, MissingTemplate, SemanticsMismatch, UnsupportedOpcode
from extractor.blocks import extract_case_blocks
from extractor.instantiate import ExitRenderer, instantiate
from extractor.astutil import Segment, const
from extractor.source import SemanticsSource, load_semantics
from extractor.specialize import specialize_comparisons
from extractor.transform import Template, template_from_text, transform_block
from semantics import SEMANTICS_PATH
from vm.opcodes import Opcode
from vm.program import Op

logger = logging.getLogger(__name__)

TABLE_FILE = "emitter_table.gen"


def artifact_name(template: Template) -> str:
    suffix = "_int" if template.variant == "int" else ""
    return f"tmpl_{template.opcodes[0].name.lower()}{suffix}.inc"


@dataclass
class TemplateWriter:
    """Serializes invocations of one template for one opcode."""
    template: Template

    @property
    def opcode(self) -> Opcode:
        return self.template.opcode_const

    def invocation(self, op: Op, pos: int) -> str:
        return (f"{self.template.name}({pos}, {pos + 1}, {op.p1}, {op.p2}, {op.p3}, "
                f"{int(self.template.opcode_const)})")

    @staticmethod
    def bindings(op: Op, pos: int) -> dict[str, ast.expr]:
        return {"pos": const(pos), "next": const(pos + 1), "P1": const(op.p1), "P2": const(op.p2),
                "P3": const(op.p3)}

    def write(self, op: Op, pos: int, exits: ExitRenderer) -> list[Segment]:
        """Expand the template for the instruction op at pos with every operand constant."""
        return instantiate(self.template, self.bindings(op, pos), exits)


@dataclass
class TemplateLibrary:
    """
    Templates extracted from one semantics source.

    groups holds one template per case block (OPCODE free); generic and
    specialized map each opcode to its bound view.
    """
    semantics_sha256: str
    prologue: list[ast.stmt]
    groups: list[Template]
    specialized_groups: list[Template] = field(default_factory=list)
    interpret_only: frozenset[Opcode] = frozenset()
    source_name: str = "<semantics>"

    def __post_init__(self):
        self.generic = {op: group.bind(op) for group in self.groups for op in group.opcodes}
        self.specialized = {op: group.bind(op) for group in self.specialized_groups for op in group.opcodes}

    def template_for(self, opcode: Opcode, specialized: bool = False) -> Template:
        """
        Template implementing opcode.

        Raises:
            UnsupportedOpcode: If the opcode is interpret-only
            MissingTemplate: If no template exists for it
        """
        if opcode in self.interpret_only:
            raise UnsupportedOpcode(f"{opcode.name} is interpret-only")
        if specialized and opcode in self.specialized:
            return self.specialized[opcode]
        try:
            return self.generic[opcode]
        except KeyError:
            raise MissingTemplate(f"no template for {opcode.name}") from None

    def emitter_table(self, specialized: bool = False) -> dict[Opcode, TemplateWriter]:
        table = {op: TemplateWriter(template) for op, template in self.generic.items()}
        if specialized:
            table.update({op: TemplateWriter(template) for op, template in self.specialized.items()})
        return table


def build_template_library(source: SemanticsSource | Path | str = SEMANTICS_PATH,
                           specialize: bool = True, required: Iterable[Opcode] = tuple(Opcode)) -> TemplateLibrary:
    """
    Extract the templates of a semantics source.

    Parameters:
        source: Parsed semantics or a path to a semantics file
        specialize: Also derive integer-only comparison variants
        required: Opcodes that must have a case block

    Returns:
        TemplateLibrary

    Raises:
        SemanticsParseError, SubsetViolation, MissingOpcode, UnrewritableJump
    """
    if not isinstance(source, SemanticsSource):
        source = load_semantics(source)
    blocks = extract_case_blocks(source, required)
    groups = [transform_block(block, source.sha256) for block in blocks]
    specialized = specialize_comparisons(groups) if specialize else []
    logger.debug("Extracted %d templates (%d specialized) from %s", len(groups), len(specialized), source.name)
    return TemplateLibrary(semantics_sha256=source.sha256, prologue=source.prologue, groups=groups,
                           specialized_groups=specialized, interpret_only=frozenset(source.interpret_only),
                           source_name=source.name)


@lru_cache(maxsize=None)
def default_library() -> TemplateLibrary:
    """Templates of the shipped semantics, extracted once per process."""
    return build_template_library(SEMANTICS_PATH)


def _artifact_text(template: Template, sha: str) -> str:
    opcodes = ", ".join(op.name for op in template.opcodes)
    return (f"# {template.name}: {opcodes}\n"
            f"# variant: {template.variant}\n"
            f"# semantics sha256: {sha}\n"
            f"{template.text}\n")


def emit_template_library(library: TemplateLibrary, out_dir: Path | str) -> list[Path]:
    """
    Write the library's templates and emitter table to out_dir.

    Output is deterministic: emitting the same library twice produces
    byte-identical files.

    Returns:
        Paths written, table last

    Raises:
        MissingOpcode: If some opcode has no template
    """
    for opcode in Opcode:
        if opcode not in library.generic:
            raise MissingOpcode(opcode)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for template in [*library.groups, *library.specialized_groups]:
        path = out_dir / artifact_name(template)
        path.write_text(_artifact_text(template, library.semantics_sha256), encoding="utf-8")
        written.append(path)

    def entries(templates: dict[Opcode, Template]) -> dict[str, tuple]:
        return {op.name: (t.name, int(op), artifact_name(t)) for op, t in sorted(templates.items())}

    prologue = "\n".join(ast.unparse(stmt) for stmt in library.prologue)
    table = (
        f"# Emitter table generated from {library.source_name}; regenerate with\n"
        f"# `python main.py templates`.\n"
        f"SEMANTICS_SHA256 = {library.semantics_sha256!r}\n"
        f"PROLOGUE = {prologue!r}\n"
        f"INTERPRET_ONLY = {sorted(op.name for op in library.interpret_only)!r}\n"
        f"EMITTERS = {pprint.pformat(entries(library.generic), sort_dicts=False)}\n"
        f"SPECIALIZED = {pprint.pformat(entries(library.specialized), sort_dicts=False)}\n"
    )
    table_path = out_dir / TABLE_FILE
    table_path.write_text(table, encoding="utf-8")
    written.append(table_path)
    logger.info("Wrote %d template artifacts to %s", len(written), out_dir)
    return written


def _read_table(path: Path) -> dict:
    values = {}
    for stmt in ast.parse(path.read_text(encoding="utf-8")).body:
        if isinstance(stmt, ast.Assign) and isinstance(stmt.targets[0], ast.Name):
            values[stmt.targets[0].id] = ast.literal_eval(stmt.value)
    return values


def load_template_library(directory: Path | str, expected_sha256: Optional[str] = None) -> TemplateLibrary:
    """
    Load a library previously written by emit_template_library.

    Raises:
        SemanticsMismatch: If expected_sha256 is given and differs from the
            hash recorded in the artifacts
    """
    directory = Path(directory)
    table = _read_table(directory / TABLE_FILE)
    sha = table["SEMANTICS_SHA256"]
    if expected_sha256 is not None and sha != expected_sha256:
        raise SemanticsMismatch(f"templates in {directory} were built from semantics {sha[:12]}, "
                                f"engine runs {expected_sha256[:12]}")

    def load_groups(entries: dict, variant: str) -> list[Template]:
        by_file: dict[str, list[Opcode]] = {}
        for opcode_name, (_, code, file_name) in entries.items():
            by_file.setdefault(file_name, []).append(Opcode(code))
        groups = []
        for file_name, opcodes in by_file.items():
            text = (directory / file_name).read_text(encoding="utf-8")
            groups.append(template_from_text(text, tuple(opcodes), sha, variant))
        return groups

    prologue = ast.parse(table["PROLOGUE"]).body
    return TemplateLibrary(semantics_sha256=sha, prologue=prologue,
                           groups=load_groups(table["EMITTERS"], "generic"),
                           specialized_groups=load_groups(table["SPECIALIZED"], "int"),
                           interpret_only=frozenset(Opcode[n] for n in table["INTERPRET_ONLY"]),
                           source_name=str(directory))


def check_semantics_hashes(recorded: dict[str, str]) -> str:
    """
    Verify that every rendered artifact came from the same semantics.

    Parameters:
        recorded: Artifact name -> SEMANTICS_SHA256 it records

    Returns:
        The common hash

    Raises:
        SemanticsMismatch: If two artifacts disagree
    """
    hashes = set(recorded.values())
    if len(hashes) != 1:
        detail = ", ".join(f"{artifact}={sha[:12]}" for artifact, sha in sorted(recorded.items()))
        raise SemanticsMismatch(f"artifacts built from different semantics: {detail}")
    return hashes.pop()
