"""Typed AST for the query subset. Every node carries a source position."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .items import AtomicValue

Pos = tuple  # (line, col)


@dataclass
class Expr:
    pos: Pos = field(default=(0, 0), kw_only=True)


@dataclass
class Literal(Expr):
    value: AtomicValue


@dataclass
class VarRef(Expr):
    name: str
    # set by the resolver: "local" | "external"
    binding: Optional[str] = None


@dataclass
class ContextItemRef(Expr):
    pass


@dataclass
class Comparison(Expr):
    op: str  # eq ne lt le gt ge
    left: Expr
    right: Expr


@dataclass
class Arithmetic(Expr):
    op: str  # + - * div idiv mod
    left: Expr
    right: Expr


@dataclass
class BoolOp(Expr):
    op: str  # and | or
    left: Expr
    right: Expr


@dataclass
class NotExpr(Expr):
    operand: Expr


@dataclass
class RangeTo(Expr):
    lo: Expr
    hi: Expr


@dataclass
class IfThenElse(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass
class ObjectConstructor(Expr):
    pairs: "list[tuple[Expr, Expr]]"


@dataclass
class MergedObjectConstructor(Expr):
    source: Expr


@dataclass
class ArrayConstructor(Expr):
    members: "list[Expr]"


@dataclass
class SequenceExpr(Expr):
    """Parenthesized unit: `()` is the empty sequence, `(e)` is `e`."""

    inner: Optional[Expr]


@dataclass
class Predicate(Expr):
    base: Expr
    condition: Expr


@dataclass
class ObjectLookup(Expr):
    base: Expr
    key: str


@dataclass
class StaticFunctionCall(Expr):
    name: str
    args: "list[Expr]"
    # set by the resolver: ("user", FunctionDecl) | ("builtin", key)
    target: Any = None


@dataclass
class DynamicFunctionCall(Expr):
    callee: Expr
    args: "list[Expr]"


@dataclass
class NamedFunctionRef(Expr):
    name: str
    arity: int
    target: Any = None


@dataclass
class ForClause:
    var: str
    pos_var: Optional[str]
    source: Expr
    pos: Pos = (0, 0)


@dataclass
class LetClause:
    var: str
    value: Expr
    pos: Pos = (0, 0)


@dataclass
class WhereClause:
    condition: Expr
    pos: Pos = (0, 0)


@dataclass
class OrderByClause:
    key: Expr
    descending: bool = False
    pos: Pos = (0, 0)


Clause = Any  # ForClause | LetClause | WhereClause | OrderByClause


@dataclass
class FLWOR(Expr):
    clauses: "list[Clause]"
    return_expr: Expr


@dataclass
class FunctionDecl:
    name: str
    params: "list[str]"
    param_types: "list[Optional[str]]"
    return_type: Optional[str]
    body: Expr
    pos: Pos = (0, 0)

    @property
    def key(self) -> str:
        return f"{self.name}#{len(self.params)}"


@dataclass
class SourceModule:
    prolog: "list[FunctionDecl]"
    body: Expr


def walk(node):
    """Yield every Expr node of a subtree, including clause expressions."""
    if node is None:
        return
    if isinstance(node, SourceModule):
        for decl in node.prolog:
            yield from walk(decl.body)
        yield from walk(node.body)
        return
    if not isinstance(node, Expr):
        return
    yield node
    if isinstance(node, (Comparison, Arithmetic, BoolOp)):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, NotExpr):
        yield from walk(node.operand)
    elif isinstance(node, RangeTo):
        yield from walk(node.lo)
        yield from walk(node.hi)
    elif isinstance(node, IfThenElse):
        yield from walk(node.cond)
        yield from walk(node.then)
        yield from walk(node.orelse)
    elif isinstance(node, ObjectConstructor):
        for k, v in node.pairs:
            yield from walk(k)
            yield from walk(v)
    elif isinstance(node, MergedObjectConstructor):
        yield from walk(node.source)
    elif isinstance(node, ArrayConstructor):
        for m in node.members:
            yield from walk(m)
    elif isinstance(node, SequenceExpr):
        yield from walk(node.inner)
    elif isinstance(node, Predicate):
        yield from walk(node.base)
        yield from walk(node.condition)
    elif isinstance(node, ObjectLookup):
        yield from walk(node.base)
    elif isinstance(node, StaticFunctionCall):
        for a in node.args:
            yield from walk(a)
    elif isinstance(node, DynamicFunctionCall):
        yield from walk(node.callee)
        for a in node.args:
            yield from walk(a)
    elif isinstance(node, FLWOR):
        for cl in node.clauses:
            if isinstance(cl, ForClause):
                yield from walk(cl.source)
            elif isinstance(cl, LetClause):
                yield from walk(cl.value)
            elif isinstance(cl, WhereClause):
                yield from walk(cl.condition)
            elif isinstance(cl, OrderByClause):
                yield from walk(cl.key)
        yield from walk(node.return_expr)
