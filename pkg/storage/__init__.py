"""
Tables, synthetic data and table files.
"""

from .schema import ColumnDef, ColumnType, Database, Table, TableSchema
from .generate import generate_mixed_table, generate_table
from .fileformat import load_table, save_table
from .csv_import import import_csv

__all__ = [
    'ColumnDef',
    'ColumnType',
    'Database',
    'Table',
    'TableSchema',
    'generate_mixed_table',
    'generate_table',
    'load_table',
    'save_table',
    'import_csv',
]
