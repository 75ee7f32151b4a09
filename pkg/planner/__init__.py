"""
Micro-SQL front end and plan generation.
"""

from .parser import QueryAst, format_query, parse_query
from .codegen import count_loop_ops, plan
from .benchgen import gen_bench_query, pairs_for_loop_ops

__all__ = ['QueryAst', 'format_query', 'parse_query', 'count_loop_ops', 'plan', 'gen_bench_query',
           'pairs_for_loop_ops']
