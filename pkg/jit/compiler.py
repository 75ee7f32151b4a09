"""
External compilation of emitted regions.

The toolchain is a separate process (by default the interpreter's own
compileall with -o <level>) writing a bytecode module next to the source.
"""

import logging
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from errors import CompileFailed, ToolchainMissing
from jit.config import JitConfig

logger = logging.getLogger(__name__)


@dataclass
class CompiledModule:
    name: str
    module_path: Path
    source_path: Optional[Path]
    compile_ns: int


def compile_region(source: str, name: str, config: JitConfig) -> CompiledModule:
    """
    Write source to the work directory and compile it with the toolchain.

    Parameters:
        source: Emitted region source
        name: Module name (region_<programhash>_<head>_<tail>)
        config: Toolchain, optimisation level, directories

    Returns:
        CompiledModule with the path of the loadable module

    Raises:
        ToolchainMissing: If the toolchain executable cannot be started
        CompileFailed: If it exits non-zero, times out or produces nothing
    """
    build_dir = Path(tempfile.mkdtemp(prefix="build-", dir=config.work_dir()))
    source_path = build_dir / f"{name}.py"
    source_path.write_text(source, encoding="utf-8")
    module_path = source_path.with_suffix(".pyc")
    command = [*config.toolchain_command, "-o", config.opt_level, str(source_path)]

    logger.debug("Compiling %s: %s", name, " ".join(command))
    start = time.perf_counter_ns()
    try:
        completed = subprocess.run(command, capture_output=True, text=True, timeout=config.compile_timeout)
    except FileNotFoundError as exc:
        raise ToolchainMissing(f"toolchain '{config.toolchain_command[0]}' not found") from exc
    except PermissionError as exc:
        raise ToolchainMissing(f"toolchain '{config.toolchain_command[0]}' is not executable") from exc
    except subprocess.TimeoutExpired as exc:
        raise CompileFailed(f"compiling {name} timed out after {config.compile_timeout}s") from exc
    compile_ns = time.perf_counter_ns() - start

    diagnostics = (completed.stdout + completed.stderr).strip()
    if completed.returncode != 0:
        raise CompileFailed(f"compiling {name} failed with exit status {completed.returncode}", diagnostics)
    if not module_path.exists():
        raise CompileFailed(f"toolchain produced no module for {name}", diagnostics)

    kept_source: Optional[Path] = source_path
    if config.keep_artifacts:
        logger.info("Kept region source %s", source_path)
    else:
        source_path.unlink(missing_ok=True)
        kept_source = None
    logger.debug("Compiled %s in %.2f ms", name, compile_ns / 1e6)
    return CompiledModule(name=name, module_path=module_path, source_path=kept_source, compile_ns=compile_ns)
