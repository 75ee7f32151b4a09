"""
Exception hierarchy for the query engine.

Input errors also derive from ValueError so callers that only know about
ValueError (the CLI, the benchmark harness) still catch them.
"""


class QjitError(Exception):
    """Base class for every error raised by the engine."""


# ---------------------------------------------------------------- query side

class QuerySyntaxError(QjitError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class PlanError(QjitError, ValueError):
    pass


class UnknownTableError(PlanError):
    pass


class UnknownColumnError(PlanError):
    pass


class NoLoopError(PlanError):
    pass


class ProgramValidationError(QjitError, ValueError):
    def __init__(self, report):
        lines = "; ".join(str(finding) for finding in report.findings)
        super().__init__(f"invalid program: {lines}")
        self.report = report


# ---------------------------------------------------------------------- VM

class VmRuntimeError(QjitError, RuntimeError):
    def __init__(self, code, pc: int):
        super().__init__(f"{code.name} at pc={pc}")
        self.code = code
        self.pc = pc


# ---------------------------------------------------------------- extractor

class ExtractorError(QjitError):
    pass


class SemanticsParseError(ExtractorError, ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SubsetViolation(ExtractorError, ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"{message} (line {line})" if line else message)
        self.line = line


class MissingOpcode(ExtractorError):
    def __init__(self, opcode):
        super().__init__(f"no case block for opcode {opcode.name}")
        self.opcode = opcode


class UnrewritableJump(ExtractorError):
    pass


class SemanticsMismatch(ExtractorError):
    pass


# ---------------------------------------------------------------------- JIT

class JitError(QjitError):
    pass


class MissingTemplate(JitError):
    pass


class UnsupportedOpcode(JitError):
    pass


class NonTerminatingRegion(JitError):
    pass


class ToolchainMissing(JitError):
    pass


class CompileFailed(JitError):
    def __init__(self, message: str, diagnostics: str = ""):
        super().__init__(message)
        self.diagnostics = diagnostics


class LoadFailed(JitError):
    pass


class AlreadyInstalled(JitError):
    pass


# ----------------------------------------------------------- storage, bench

class FormatError(QjitError, ValueError):
    pass


class CsvParseError(QjitError, ValueError):
    def __init__(self, message: str, row: int, column: int):
        super().__init__(f"{message} (row {row}, column {column})")
        self.row = row
        self.column = column


class BenchmarkMismatch(QjitError):
    pass
