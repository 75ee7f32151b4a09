"""
Parser for the micro-SQL dialect:

    SELECT <column> FROM <table> [WHERE <predicate>]

    predicate := and_expr ('OR' and_expr)*
    and_expr  := atom ('AND' atom)*
    atom      := '(' predicate ')' | <column> <op> <integer>
    op        := '<' | '>' | '<=' | '>=' | '=' | '<>'

Keywords are case-insensitive. The predicate is normalized to a
disjunction of conjunctions of comparisons.
"""

import math
import re
from dataclasses import dataclass
from itertools import product
from typing import Optional, Union

from errors import QuerySyntaxError
from vm.values import INT64_MAX, INT64_MIN

KEYWORDS = {"SELECT", "FROM", "WHERE", "AND", "OR"}
OPERATORS = ("<=", ">=", "<>", "<", ">", "=")

# Upper bound on OR-groups after normalisation; ANDs of ORs multiply out.
MAX_DNF_GROUPS = 4096

_TOKEN = re.compile(r"\s*(?:(?P<number>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><=|>=|<>|[<>=()]))")


@dataclass(frozen=True)
class Comparison:
    column: str
    op: str
    value: int

    def __str__(self) -> str:
        return f"{self.column}{self.op}{self.value}"


@dataclass(frozen=True)
class And:
    terms: tuple


@dataclass(frozen=True)
class Or:
    terms: tuple


Predicate = Union[Comparison, And, Or]


@dataclass(frozen=True)
class QueryAst:
    column: str
    table: str
    # Disjunction of conjunctions; None means WHERE is absent (True).
    predicate: Optional[tuple[tuple[Comparison, ...], ...]]

    def atoms(self) -> list[Comparison]:
        return [atom for group in self.predicate or () for atom in group]


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    position = 0
    line_starts = [0] + [i + 1 for i, ch in enumerate(text) if ch == "\n"]

    def locate(offset: int) -> tuple[int, int]:
        line = max(i for i, start in enumerate(line_starts) if start <= offset)
        return line + 1, offset - line_starts[line] + 1

    while True:
        match = _TOKEN.match(text, position)
        if match is None:
            rest = text[position:]
            if rest.strip() in ("", ";"):
                break
            offset = position + len(rest) - len(rest.lstrip())
            raise QuerySyntaxError(f"unexpected character {text[offset]!r}", *locate(offset))
        kind = match.lastgroup
        start = match.start(kind)
        token_text = match.group(kind)
        if kind == "name" and token_text.upper() in KEYWORDS:
            kind, token_text = "keyword", token_text.upper()
        tokens.append(_Token(kind, token_text, *locate(start)))
        position = match.end()
    tokens.append(_Token("end", "", *locate(len(text.rstrip()))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def error(self, expected: str) -> QuerySyntaxError:
        token = self.current
        found = token.text or "end of input"
        return QuerySyntaxError(f"expected {expected}, found '{found}'", token.line, token.column)

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[_Token]:
        token = self.current
        if token.kind == kind and (text is None or token.text == text):
            self.index += 1
            return token
        return None

    def expect(self, kind: str, text: Optional[str] = None, what: Optional[str] = None) -> _Token:
        token = self.accept(kind, text)
        if token is None:
            raise self.error(what or text or kind)
        return token

    def query(self) -> QueryAst:
        self.expect("keyword", "SELECT")
        column = self.expect("name", what="column name").text
        self.expect("keyword", "FROM")
        table = self.expect("name", what="table name").text
        predicate = None
        where = self.accept("keyword", "WHERE")
        if where is not None:
            try:
                predicate = to_dnf(self.predicate())
            except OverflowError as exc:
                raise QuerySyntaxError(str(exc), where.line, where.column) from None
        if self.current.kind != "end":
            raise self.error("end of query")
        return QueryAst(column=column, table=table, predicate=predicate)

    def predicate(self) -> Predicate:
        terms = [self.conjunction()]
        while self.accept("keyword", "OR"):
            terms.append(self.conjunction())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def conjunction(self) -> Predicate:
        terms = [self.atom()]
        while self.accept("keyword", "AND"):
            terms.append(self.atom())
        return terms[0] if len(terms) == 1 else And(tuple(terms))

    def atom(self) -> Predicate:
        if self.accept("op", "("):
            inner = self.predicate()
            self.expect("op", ")")
            return inner
        column = self.expect("name", what="column name or '('").text
        op_token = self.current
        if op_token.kind != "op" or op_token.text not in OPERATORS:
            raise self.error("comparison operator")
        self.index += 1
        literal = self.expect("number", what="integer literal")
        value = int(literal.text)
        if not INT64_MIN <= value <= INT64_MAX:
            raise QuerySyntaxError(f"integer literal {literal.text} is out of 64-bit range",
                                   literal.line, literal.column)
        return Comparison(column, op_token.text, value)


def to_dnf(predicate: Predicate, max_groups: int = MAX_DNF_GROUPS) -> tuple[tuple[Comparison, ...], ...]:
    """
    Disjunctive normal form: OR of AND-groups, in source order.

    Raises:
        OverflowError: If the normal form has more than max_groups groups
    """
    if isinstance(predicate, Comparison):
        return ((predicate,),)
    if isinstance(predicate, Or):
        result = tuple(group for term in predicate.terms for group in to_dnf(term, max_groups))
    else:
        groups = [to_dnf(term, max_groups) for term in predicate.terms]
        if math.prod(len(options) for options in groups) > max_groups:
            raise OverflowError(f"predicate expands to more than {max_groups} OR-groups")
        result = tuple(tuple(atom for part in combination for atom in part) for combination in product(*groups))
    if len(result) > max_groups:
        raise OverflowError(f"predicate expands to more than {max_groups} OR-groups")
    return result


def parse_query(text: str) -> QueryAst:
    """
    Parse a micro-SQL query.

    Raises:
        QuerySyntaxError: With the line and column of the offending token
    """
    return _Parser(text).query()


def format_query(query: QueryAst) -> str:
    text = f"SELECT {query.column} FROM {query.table}"
    if query.predicate:
        groups = [" AND ".join(str(atom) for atom in group) for group in query.predicate]
        text += " WHERE " + " OR ".join(f"({group})" for group in groups)
    return text
