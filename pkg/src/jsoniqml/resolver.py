"""Static name resolution.

Binds every static call to a prolog declaration or a builtin, every variable
reference to an enclosing binder, and classifies unbound variables as
externally bound (supplied by the driver). A reference to a variable that is
only bound *later* in the same FLWOR is a cyclic/forward use and errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast_nodes import (
    ArrayConstructor,
    Arithmetic,
    BoolOp,
    Comparison,
    ContextItemRef,
    DynamicFunctionCall,
    FLWOR,
    ForClause,
    FunctionDecl,
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
from .errors import ResolutionError


@dataclass
class ResolvedModule:
    module: SourceModule
    functions: "dict[str, FunctionDecl]"
    external_vars: "set[str]"
    # (node kind, name, binding) triples in traversal order; resolution must
    # be deterministic, so two runs produce identical tables.
    binding_table: "list[tuple[str, str, str]]" = field(default_factory=list)


def resolve(module: SourceModule, builtin_keys: "set[str]") -> ResolvedModule:
    functions = {decl.key: decl for decl in module.prolog}
    resolved = ResolvedModule(module, functions, set())

    for decl in module.prolog:
        _resolve_expr(decl.body, set(decl.params), frozenset(), False, resolved, builtin_keys)
    _resolve_expr(module.body, set(), frozenset(), False, resolved, builtin_keys)
    return resolved


def _resolve_expr(node, scope, pending, in_predicate, resolved, builtin_keys):
    """Walk `node`; `scope` holds visible variables, `pending` the names bound
    later in an enclosing FLWOR (hit one and it is a forward/cyclic use)."""
    if isinstance(node, Literal):
        return
    if isinstance(node, VarRef):
        if node.name in scope:
            node.binding = "local"
        elif node.name in pending:
            raise ResolutionError(
                "UNDEFINED_VARIABLE",
                f"${node.name} is used before its binding in the same FLWOR",
                node.pos,
            )
        else:
            node.binding = "external"
            resolved.external_vars.add(node.name)
        resolved.binding_table.append(("var", node.name, node.binding))
        return
    if isinstance(node, ContextItemRef):
        if not in_predicate:
            raise ResolutionError(
                "UNDEFINED_VARIABLE", "$$ is only defined inside a predicate", node.pos
            )
        resolved.binding_table.append(("context", "$$", "predicate"))
        return
    if isinstance(node, (Comparison, Arithmetic, BoolOp)):
        _resolve_expr(node.left, scope, pending, in_predicate, resolved, builtin_keys)
        _resolve_expr(node.right, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, NotExpr):
        _resolve_expr(node.operand, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, RangeTo):
        _resolve_expr(node.lo, scope, pending, in_predicate, resolved, builtin_keys)
        _resolve_expr(node.hi, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, IfThenElse):
        for child in (node.cond, node.then, node.orelse):
            _resolve_expr(child, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, ObjectConstructor):
        for key, value in node.pairs:
            _resolve_expr(key, scope, pending, in_predicate, resolved, builtin_keys)
            _resolve_expr(value, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, MergedObjectConstructor):
        _resolve_expr(node.source, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, ArrayConstructor):
        for member in node.members:
            _resolve_expr(member, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, SequenceExpr):
        if node.inner is not None:
            _resolve_expr(node.inner, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, Predicate):
        _resolve_expr(node.base, scope, pending, in_predicate, resolved, builtin_keys)
        _resolve_expr(node.condition, scope, pending, True, resolved, builtin_keys)
        return
    if isinstance(node, ObjectLookup):
        _resolve_expr(node.base, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, StaticFunctionCall):
        key = f"{node.name}#{len(node.args)}"
        if key in resolved.functions:
            node.target = ("user", resolved.functions[key])
            resolved.binding_table.append(("call", key, "user"))
        elif key in builtin_keys:
            node.target = ("builtin", key)
            resolved.binding_table.append(("call", key, "builtin"))
        else:
            raise ResolutionError(
                "UNKNOWN_FUNCTION", f"unknown function {node.name}#{len(node.args)}", node.pos
            )
        for arg in node.args:
            _resolve_expr(arg, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, DynamicFunctionCall):
        _resolve_expr(node.callee, scope, pending, in_predicate, resolved, builtin_keys)
        for arg in node.args:
            _resolve_expr(arg, scope, pending, in_predicate, resolved, builtin_keys)
        return
    if isinstance(node, NamedFunctionRef):
        key = f"{node.name}#{node.arity}"
        if key in resolved.functions:
            node.target = ("user", resolved.functions[key])
            resolved.binding_table.append(("fnref", key, "user"))
        elif key in builtin_keys:
            node.target = ("builtin", key)
            resolved.binding_table.append(("fnref", key, "builtin"))
        else:
            raise ResolutionError(
                "UNKNOWN_FUNCTION", f"unknown function {node.name}#{node.arity}", node.pos
            )
        return
    if isinstance(node, FLWOR):
        inner = set(scope)
        binders: list[str] = []
        for clause in node.clauses:
            if isinstance(clause, ForClause):
                binders.append(clause.var)
                if clause.pos_var:
                    binders.append(clause.pos_var)
            elif isinstance(clause, LetClause):
                binders.append(clause.var)
        remaining = list(binders)
        for clause in node.clauses:
            if isinstance(clause, ForClause):
                remaining.remove(clause.var)
                if clause.pos_var:
                    remaining.remove(clause.pos_var)
                clause_pending = (pending | set(remaining)) - inner
                _resolve_expr(clause.source, inner, clause_pending, in_predicate, resolved, builtin_keys)
                inner = inner | {clause.var}
                if clause.pos_var:
                    inner = inner | {clause.pos_var}
            elif isinstance(clause, LetClause):
                remaining.remove(clause.var)
                clause_pending = (pending | set(remaining) | {clause.var}) - inner
                _resolve_expr(clause.value, inner, clause_pending, in_predicate, resolved, builtin_keys)
                inner = inner | {clause.var}
            elif isinstance(clause, WhereClause):
                _resolve_expr(clause.condition, inner, pending, in_predicate, resolved, builtin_keys)
            elif isinstance(clause, OrderByClause):
                _resolve_expr(clause.key, inner, pending, in_predicate, resolved, builtin_keys)
        _resolve_expr(node.return_expr, inner, pending, in_predicate, resolved, builtin_keys)
        return
    raise AssertionError(f"unhandled node {type(node).__name__}")
