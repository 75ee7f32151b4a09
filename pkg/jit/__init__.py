"""
Template JIT: hot-loop detection, region emission, compilation and loading.
"""

from .config import JitConfig, JitMode
from .detector import LoopDetector, Region
from .emitter import emit_region_source
from .compiler import compile_region
from .loader import load_region
from .engine import run_jit

__all__ = ['JitConfig', 'JitMode', 'LoopDetector', 'Region', 'emit_region_source', 'compile_region',
           'load_region', 'run_jit']
