"""
Benchmark query generator.

Queries are a disjunction of k unsatisfiable range pairs, which make the
loop longer without producing rows:

    SELECT i FROM test WHERE (i<1 AND i>6) OR (i<101 AND i>106) OR ...

plus an optional satisfiable bound group (i<bound AND i>-1) that controls
how many rows come out. Each group adds two comparisons, so a plan has
2 * groups + 4 loop instructions.
"""

from typing import Optional

PAIR_STRIDE = 100
PAIR_WIDTH = 5
BASE_LOOP_OPS = 4


def pair_bounds(j: int) -> tuple[int, int]:
    low = PAIR_STRIDE * j + 1
    return low, low + PAIR_WIDTH


def gen_bench_query(pairs: int, bound: Optional[int] = None, table: str = "test", column: str = "i") -> str:
    """
    Build the benchmark query with the given number of unsatisfiable pairs.

    Parameters:
        pairs: Number of unsatisfiable pairs (k >= 0)
        bound: Upper bound of the satisfiable group, None for no such group
        table, column: Names used in the query

    Returns:
        Query text. With pairs == 0 and no bound the single group
        (i<0 AND i>1) keeps the WHERE clause non-empty.

    Raises:
        ValueError: If pairs is negative
    """
    if pairs < 0:
        raise ValueError(f"Number of pairs must be non-negative (got {pairs})")
    groups = []
    for j in range(pairs):
        low, high = pair_bounds(j)
        groups.append(f"({column}<{low} AND {column}>{high})")
    if bound is not None:
        groups.append(f"({column}<{bound} AND {column}>-1)")
    if not groups:
        groups.append(f"({column}<0 AND {column}>1)")
    return f"SELECT {column} FROM {table} WHERE " + " OR ".join(groups)


def loop_ops_for(pairs: int, with_bound: bool = False) -> int:
    groups = pairs + (1 if with_bound else 0)
    return 2 * max(groups, 1) + BASE_LOOP_OPS


def pairs_for_loop_ops(target: int, with_bound: bool = False) -> int:
    """
    Number of pairs whose plan comes closest to target loop instructions
    (ties go to the longer loop).

    Raises:
        ValueError: If target is below the shortest possible loop
    """
    shortest = loop_ops_for(0, with_bound)
    if target < shortest:
        raise ValueError(f"Loop length {target} is below the minimum of {shortest}")
    extra = 1 if with_bound else 0
    groups = round((target - BASE_LOOP_OPS) / 2 + 0.25)
    return max(groups - extra, 0)
