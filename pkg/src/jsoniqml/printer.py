"""AST pretty-printer. `parse(print_module(m))` is structurally `m`."""

from __future__ import annotations

from .ast_nodes import (
    ArrayConstructor,
    Arithmetic,
    BoolOp,
    Comparison,
    ContextItemRef,
    DynamicFunctionCall,
    FLWOR,
    ForClause,
    IfThenElse,
    LetClause,
    Literal,
    MergedObjectConstructor,
    NamedFunctionRef,
    NotExpr,
    ObjectConstructor,
    ObjectLookup,
    OrderByClause,
    Predicate,
    RangeTo,
    SequenceExpr,
    SourceModule,
    StaticFunctionCall,
    VarRef,
    WhereClause,
)
from .items import AtomicValue, render_decimal, render_double


def _print_literal(value: AtomicValue) -> str:
    kind = value.kind
    if kind == "string":
        escaped = value.value.replace("\\", "\\\\").replace('"', '\\"')
        escaped = escaped.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return f'"{escaped}"'
    if kind == "integer":
        return str(value.value)
    if kind == "decimal":
        return render_decimal(value.value)
    if kind == "double":
        text = render_double(value.value)
        # double literals need an exponent marker to lex as doubles
        return text if "e" in text or "E" in text else text + "e0"
    if kind == "boolean":
        return "true" if value.value else "false"
    if kind == "null":
        return "null"
    raise ValueError(f"kind {kind} has no literal form")


def print_expr(node) -> str:
    if isinstance(node, Literal):
        return _print_literal(node.value)
    if isinstance(node, VarRef):
        return f"${node.name}"
    if isinstance(node, ContextItemRef):
        return "$$"
    if isinstance(node, Comparison):
        return f"({print_expr(node.left)} {node.op} {print_expr(node.right)})"
    if isinstance(node, Arithmetic):
        return f"({print_expr(node.left)} {node.op} {print_expr(node.right)})"
    if isinstance(node, BoolOp):
        return f"({print_expr(node.left)} {node.op} {print_expr(node.right)})"
    if isinstance(node, NotExpr):
        return f"(not {print_expr(node.operand)})"
    if isinstance(node, RangeTo):
        return f"({print_expr(node.lo)} to {print_expr(node.hi)})"
    if isinstance(node, IfThenElse):
        # parenthesized so a trailing operator cannot bind into the else branch
        return (
            f"(if ({print_expr(node.cond)}) then {print_expr(node.then)} "
            f"else {print_expr(node.orelse)})"
        )
    if isinstance(node, ObjectConstructor):
        pairs = ", ".join(f"{print_expr(k)} : {print_expr(v)}" for k, v in node.pairs)
        return "{" + (f" {pairs} " if pairs else "") + "}"
    if isinstance(node, MergedObjectConstructor):
        return "{| " + print_expr(node.source) + " |}"
    if isinstance(node, ArrayConstructor):
        return "[" + ", ".join(print_expr(m) for m in node.members) + "]"
    if isinstance(node, SequenceExpr):
        return "()" if node.inner is None else f"({print_expr(node.inner)})"
    if isinstance(node, Predicate):
        return f"{_print_postfix_base(node.base)}[{print_expr(node.condition)}]"
    if isinstance(node, ObjectLookup):
        return f"{_print_postfix_base(node.base)}.{node.key}"
    if isinstance(node, StaticFunctionCall):
        return f"{node.name}({', '.join(print_expr(a) for a in node.args)})"
    if isinstance(node, DynamicFunctionCall):
        return f"{_print_postfix_base(node.callee)}({', '.join(print_expr(a) for a in node.args)})"
    if isinstance(node, NamedFunctionRef):
        return f"{node.name}#{node.arity}"
    if isinstance(node, FLWOR):
        parts = []
        for clause in node.clauses:
            if isinstance(clause, ForClause):
                at = f" at ${clause.pos_var}" if clause.pos_var else ""
                parts.append(f"for ${clause.var}{at} in {print_expr(clause.source)}")
            elif isinstance(clause, LetClause):
                parts.append(f"let ${clause.var} := {print_expr(clause.value)}")
            elif isinstance(clause, WhereClause):
                parts.append(f"where {print_expr(clause.condition)}")
            elif isinstance(clause, OrderByClause):
                direction = " descending" if clause.descending else ""
                parts.append(f"order by {print_expr(clause.key)}{direction}")
        parts.append(f"return {print_expr(node.return_expr)}")
        return "(" + " ".join(parts) + ")"
    raise AssertionError(f"unhandled node {type(node).__name__}")


def _print_postfix_base(node) -> str:
    """Postfix bases must stay postfix-tight, so wrap loose expressions."""
    if isinstance(
        node,
        (Literal, VarRef, ContextItemRef, SequenceExpr, ObjectLookup, Predicate,
         DynamicFunctionCall, StaticFunctionCall, ObjectConstructor, ArrayConstructor),
    ):
        return print_expr(node)
    return f"({print_expr(node)})"


def print_module(module: SourceModule) -> str:
    parts = []
    for decl in module.prolog:
        params = []
        for name, ptype in zip(decl.params, decl.param_types):
            params.append(f"${name}" + (f" as {ptype}" if ptype else ""))
        ret = f" as {decl.return_type}" if decl.return_type else ""
        parts.append(
            f"declare function {decl.name}({', '.join(params)}){ret} "
            + "{ "
            + print_expr(decl.body)
            + " }"
        )
    parts.append(print_expr(module.body))
    return "\n".join(parts)
