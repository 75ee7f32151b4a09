"""
Opcode semantics source shipped with the engine.
"""

from pathlib import Path

SEMANTICS_PATH = Path(__file__).with_name("vdbe.py")

__all__ = ['SEMANTICS_PATH']
