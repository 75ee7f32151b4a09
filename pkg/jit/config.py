"""
JIT configuration.

Environment variables (explicit arguments win):

    QJIT_TOOLCHAIN       command prefix of the external compiler (shlex)
    QJIT_OPT             optimisation level token passed as '-o <level>'
    QJIT_THRESHOLD       backward jumps before a loop is compiled ('inf' = never)
    QJIT_TMPDIR          directory for emitted sources and compiled modules
    QJIT_KEEP_ARTIFACTS  '1' keeps emitted sources after loading
"""

import atexit
import logging
import math
import os
import shlex
import shutil
import sys
import tempfile
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional, Union

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 8
DEFAULT_OPT_LEVEL = "1"
OPT_LEVELS = ("0", "1", "2")


def default_toolchain() -> tuple[str, ...]:
    return (sys.executable, "-m", "compileall", "-q", "-f", "-b")


class JitMode(Enum):
    GENERIC = "generic"
    SPECIALIZED = "specialized"


def parse_threshold(text: Union[str, int, float]) -> Union[int, float]:
    """
    Parse a hotness threshold.

    Raises:
        ValueError: If the threshold is not an integer >= 1 or 'inf'
    """
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "never"):
        return math.inf
    if isinstance(text, float) and math.isinf(text):
        return math.inf
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise ValueError(f"Threshold must be an integer >= 1 or 'inf' (got {text!r})") from None
    if value < 1:
        raise ValueError(f"Threshold must be at least 1 (got {value})")
    return value


_SESSION_DIR: Optional[Path] = None


def _session_dir(keep: bool) -> Path:
    global _SESSION_DIR
    if _SESSION_DIR is None:
        _SESSION_DIR = Path(tempfile.mkdtemp(prefix="qjit-"))
        if not keep:
            atexit.register(shutil.rmtree, _SESSION_DIR, True)
        else:
            logger.info("Keeping JIT artifacts in %s", _SESSION_DIR)
    return _SESSION_DIR


@dataclass
class JitConfig:
    threshold: Union[int, float] = DEFAULT_THRESHOLD
    opt_level: str = DEFAULT_OPT_LEVEL
    toolchain_command: tuple[str, ...] = field(default_factory=default_toolchain)
    temp_dir: Optional[Path] = None
    keep_artifacts: bool = False
    mode: JitMode = JitMode.GENERIC
    compile_timeout: float = 60.0
    min_remaining_rows: int = 0

    def __post_init__(self):
        self.threshold = parse_threshold(self.threshold)
        self.opt_level = str(self.opt_level)
        if self.opt_level not in OPT_LEVELS:
            raise ValueError(f"Optimisation level must be one of {', '.join(OPT_LEVELS)} (got {self.opt_level!r})")
        if not self.toolchain_command:
            raise ValueError("Toolchain command must not be empty")
        self.toolchain_command = tuple(self.toolchain_command)
        if self.temp_dir is not None:
            self.temp_dir = Path(self.temp_dir)
        if isinstance(self.mode, str):
            self.mode = JitMode(self.mode)

    @property
    def specialized(self) -> bool:
        return self.mode is JitMode.SPECIALIZED

    def work_dir(self) -> Path:
        if self.temp_dir is not None:
            self.temp_dir.mkdir(parents=True, exist_ok=True)
            return self.temp_dir
        return _session_dir(self.keep_artifacts)

    def with_overrides(self, **overrides) -> "JitConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **overrides) -> "JitConfig":
        """
        Build a configuration from QJIT_* variables, then apply overrides
        whose value is not None.
        """
        environ = os.environ if environ is None else environ
        values = {}
        if environ.get("QJIT_TOOLCHAIN"):
            values["toolchain_command"] = tuple(shlex.split(environ["QJIT_TOOLCHAIN"]))
        if environ.get("QJIT_OPT"):
            values["opt_level"] = environ["QJIT_OPT"]
        if environ.get("QJIT_THRESHOLD"):
            values["threshold"] = environ["QJIT_THRESHOLD"]
        if environ.get("QJIT_TMPDIR"):
            values["temp_dir"] = Path(environ["QJIT_TMPDIR"])
        if environ.get("QJIT_KEEP_ARTIFACTS"):
            values["keep_artifacts"] = environ["QJIT_KEEP_ARTIFACTS"] not in ("0", "", "false")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
