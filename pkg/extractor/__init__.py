"""
Template extraction from the opcode semantics source.
"""

from .source import load_semantics, parse_semantics
from .blocks import extract_case_blocks
from .transform import Template, transform_block
from .specialize import specialize_template
from .library import (TemplateLibrary, build_template_library, default_library, emit_template_library,
                      load_template_library)

__all__ = [
    'load_semantics',
    'parse_semantics',
    'extract_case_blocks',
    'Template',
    'transform_block',
    'specialize_template',
    'TemplateLibrary',
    'build_template_library',
    'default_library',
    'emit_template_library',
    'load_template_library',
]
