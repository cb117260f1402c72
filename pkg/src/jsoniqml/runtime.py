"""Tree-of-iterators evaluator.

Execution starts at the root iterator and recursively pulls from children.
Each iterator produces its result in the representation its inferred mode
dictates: single items directly, local sequences as lazy pull streams, and
columnar results as frames. Streams are materialized (under the cap) only at
binding points: let clauses, user-function arguments, order-by collection,
and array construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any, Callable, Optional

from .ast_nodes import ForClause, LetClause, OrderByClause, WhereClause
from .errors import DynamicError, MaterializationCapError
from .frame import frame_filter
from .items import (
    ArrayItem,
    AtomicValue,
    FunctionItem,
    INTEGER_KINDS,
    Item,
    NUMERIC_KINDS,
    ObjectItem,
    SequenceValue,
    effective_boolean_value,
    object_item,
    render_atomic,
)
from .modes import CompiledTree, FRAME_MODE, FunctionInfo, RuntimeIterator

DEFAULT_CAP = 1_000_000


@dataclass
class NativeHandle:
    """Registry-backed body of a builtin function item.

    The tag names which builtin the item wraps ("transformer:Tokenizer",
    "model:LinearSVC", "builtin:count#1", ...). `invoke` receives the
    evaluator, the already-evaluated arguments, and the call position.
    """

    tag: str
    shape: str  # "transformer" | "estimator" | "builtin"
    invoke: Callable
    params: dict = field(default_factory=dict)
    artifact: Any = None


class DynamicContext:
    """Lexically scoped variable bindings plus the predicate context item."""

    __slots__ = ("bindings", "parent", "context_item")

    def __init__(self, bindings=None, parent=None, context_item=None):
        self.bindings = bindings or {}
        self.parent = parent
        self.context_item = context_item

    def push(self, bindings, context_item=None) -> "DynamicContext":
        return DynamicContext(
            bindings, self, context_item if context_item is not None else self.context_item
        )

    def lookup(self, name: str) -> Optional[SequenceValue]:
        ctx = self
        while ctx is not None:
            value = ctx.bindings.get(name)
            if value is not None:
                return value
            ctx = ctx.parent
        return None


class Evaluator:
    def __init__(
        self,
        tree: CompiledTree,
        catalog: dict,
        external: "dict[str, Item]",
        cap: int = DEFAULT_CAP,
    ):
        self.tree = tree
        self.catalog = catalog
        self.external = external
        self.cap = cap

    # -- plumbing -------------------------------------------------------------

    def run(self) -> SequenceValue:
        return self.evaluate(self.tree.root, DynamicContext())

    def evaluate(self, it: RuntimeIterator, ctx: DynamicContext) -> SequenceValue:
        handler = _HANDLERS[it.kind]
        try:
            return handler(self, it, ctx)
        except DynamicError as err:
            if err.position is None:
                err.position = it.node.pos
            raise

    def bind_value(self, seq: SequenceValue) -> SequenceValue:
        """Pin a sequence for (re)use as a variable: frames and singles stay
        as they are, streams materialize under the cap."""
        if seq.representation == SequenceValue.STREAM and not isinstance(seq._payload, list):
            return SequenceValue.from_list(seq.materialize(self.cap))
        if seq.representation == SequenceValue.STREAM and len(seq._payload) > self.cap:
            raise MaterializationCapError(self.cap)
        return seq

    def ebv(self, it: RuntimeIterator, ctx: DynamicContext) -> bool:
        return effective_boolean_value(self.evaluate(it, ctx))

    def single_atomic(self, seq: SequenceValue, what: str) -> Optional[AtomicValue]:
        """First of at most one item, which must be atomic; None when empty."""
        items = seq.iter_items()
        first = next(items, None)
        if first is None:
            return None
        if next(items, None) is not None:
            raise DynamicError("TYPE_ERROR", f"{what} requires at most one item")
        if not isinstance(first, AtomicValue):
            raise DynamicError("TYPE_ERROR", f"{what} requires an atomic value")
        return first

    # -- function invocation ---------------------------------------------------

    def invoke_function(self, fn: FunctionItem, args: "list[SequenceValue]", pos) -> SequenceValue:
        if fn.arity != len(args):
            raise DynamicError(
                "ARITY_MISMATCH",
                f"function expects {fn.arity} arguments, got {len(args)}",
                pos,
            )
        if fn.native is not None:
            return fn.native.invoke(self, args, pos)
        info: FunctionInfo = fn.body
        bindings = {
            name: self.bind_value(value) for name, value in zip(fn.param_names, args)
        }
        ctx = DynamicContext(bindings, parent=fn.captured_env)
        return self.evaluate(info.body, ctx)

    def user_function_item(self, info: FunctionInfo) -> FunctionItem:
        decl = info.decl
        return FunctionItem(
            name=decl.name,
            param_names=tuple(decl.params),
            signature=tuple(decl.param_types) + (decl.return_type,),
            body=info,
            captured_env=None,
        )


# ---------------------------------------------------------------------------
# Node handlers
# ---------------------------------------------------------------------------


def _eval_literal(ev, it, ctx):
    return SequenceValue.single(it.node.value)


def _eval_var(ev, it, ctx):
    node = it.node
    if node.binding == "external":
        if node.name not in ev.external:
            raise DynamicError(
                "UNDEFINED_VARIABLE", f"external variable ${node.name} is not bound", node.pos
            )
        return SequenceValue.single(ev.external[node.name])
    value = ctx.lookup(node.name)
    if value is None:
        raise DynamicError("UNDEFINED_VARIABLE", f"${node.name} is not bound", node.pos)
    return value


def _eval_context(ev, it, ctx):
    if ctx.context_item is None:
        raise DynamicError("UNDEFINED_VARIABLE", "$$ is not bound here", it.node.pos)
    return SequenceValue.single(ctx.context_item)


def _eval_seq(ev, it, ctx):
    if not it.children:
        return SequenceValue.empty()
    return ev.evaluate(it.children[0], ctx)


def _eval_if(ev, it, ctx):
    if ev.ebv(it.children[0], ctx):
        return ev.evaluate(it.children[1], ctx)
    return ev.evaluate(it.children[2], ctx)


def _eval_boolop(ev, it, ctx):
    left = ev.ebv(it.children[0], ctx)
    if it.node.op == "and":
        value = left and ev.ebv(it.children[1], ctx)
    else:
        value = left or ev.ebv(it.children[1], ctx)
    return SequenceValue.single(AtomicValue("boolean", value))


def _eval_not(ev, it, ctx):
    return SequenceValue.single(AtomicValue("boolean", not ev.ebv(it.children[0], ctx)))


# -- comparisons -------------------------------------------------------------

_ORDER_OPS = {"lt": "<", "le": "<=", "gt": ">", "ge": ">="}


def _compare_values(op: str, a: AtomicValue, b: AtomicValue) -> bool:
    if a.kind == "null" or b.kind == "null":
        if op == "eq":
            return a.kind == "null" and b.kind == "null"
        if op == "ne":
            return not (a.kind == "null" and b.kind == "null")
        raise DynamicError("TYPE_ERROR", f"cannot order null with {op}")
    if a.kind in NUMERIC_KINDS and b.kind in NUMERIC_KINDS:
        av, bv = a.value, b.value
        # int/float compare exactly in Python; only Decimal-vs-float promotes
        if isinstance(av, Decimal) and isinstance(bv, float):
            av = float(av)
        elif isinstance(av, float) and isinstance(bv, Decimal):
            bv = float(bv)
    elif a.kind == b.kind and a.kind in ("string", "boolean", "date", "dateTime"):
        av, bv = a.value, b.value
    else:
        raise DynamicError("TYPE_ERROR", f"cannot compare {a.kind} with {b.kind}")
    if op == "eq":
        return av == bv
    if op == "ne":
        return av != bv
    if op == "lt":
        return av < bv
    if op == "le":
        return av <= bv
    if op == "gt":
        return av > bv
    return av >= bv


def _eval_comparison(ev, it, ctx):
    left = ev.single_atomic(ev.evaluate(it.children[0], ctx), "comparison")
    right = ev.single_atomic(ev.evaluate(it.children[1], ctx), "comparison")
    if left is None or right is None:
        return SequenceValue.empty()
    result = _compare_values(it.node.op, left, right)
    return SequenceValue.single(AtomicValue("boolean", result))


# -- arithmetic ---------------------------------------------------------------


def _trunc_div(a, b) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _ieee_div(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or math.isnan(a):
            return float("nan")
        negative = math.copysign(1.0, a) * math.copysign(1.0, b) < 0
        return float("-inf") if negative else float("inf")
    return a / b


def _eval_arithmetic(ev, it, ctx):
    op = it.node.op
    left = ev.single_atomic(ev.evaluate(it.children[0], ctx), "arithmetic")
    right = ev.single_atomic(ev.evaluate(it.children[1], ctx), "arithmetic")
    if left is None or right is None:
        return SequenceValue.empty()
    if left.kind not in NUMERIC_KINDS or right.kind not in NUMERIC_KINDS:
        raise DynamicError(
            "TYPE_ERROR", f"arithmetic on {left.kind} and {right.kind}", it.node.pos
        )
    a, b = left.value, right.value
    if op == "div":
        return SequenceValue.single(AtomicValue("double", _ieee_div(float(a), float(b))))
    if op == "idiv":
        if float(b) == 0.0:
            raise DynamicError("DIVISION_BY_ZERO", "idiv by zero", it.node.pos)
        if isinstance(a, float) or isinstance(b, float):
            value = math.trunc(float(a) / float(b))
        elif isinstance(a, Decimal) or isinstance(b, Decimal):
            value = _trunc_div(a if isinstance(a, Decimal) else Decimal(a),
                               b if isinstance(b, Decimal) else Decimal(b))
            value = int(value)
        else:
            value = _trunc_div(a, b)
        return SequenceValue.single(AtomicValue("integer", int(value)))
    if op == "mod":
        if float(b) == 0.0:
            raise DynamicError("DIVISION_BY_ZERO", "mod by zero", it.node.pos)
        if isinstance(a, float) or isinstance(b, float):
            return SequenceValue.single(AtomicValue("double", math.fmod(float(a), float(b))))
        if isinstance(a, Decimal) or isinstance(b, Decimal):
            da = a if isinstance(a, Decimal) else Decimal(a)
            db = b if isinstance(b, Decimal) else Decimal(b)
            return SequenceValue.single(AtomicValue("decimal", da % db))
        return SequenceValue.single(AtomicValue("integer", a - b * _trunc_div(a, b)))
    # + - *
    py_op = {"+": lambda x, y: x + y, "-": lambda x, y: x - y, "*": lambda x, y: x * y}[op]
    if isinstance(a, float) or isinstance(b, float):
        return SequenceValue.single(AtomicValue("double", py_op(float(a), float(b))))
    if isinstance(a, Decimal) or isinstance(b, Decimal):
        da = a if isinstance(a, Decimal) else Decimal(a)
        db = b if isinstance(b, Decimal) else Decimal(b)
        return SequenceValue.single(AtomicValue("decimal", py_op(da, db)))
    return SequenceValue.single(AtomicValue("integer", py_op(a, b)))


def _eval_range(ev, it, ctx):
    lo = ev.single_atomic(ev.evaluate(it.children[0], ctx), "range")
    hi = ev.single_atomic(ev.evaluate(it.children[1], ctx), "range")
    if lo is None or hi is None:
        return SequenceValue.empty()
    if lo.kind not in INTEGER_KINDS or hi.kind not in INTEGER_KINDS:
        raise DynamicError("TYPE_ERROR", "range bounds must be integers", it.node.pos)
    start, stop = lo.value, hi.value

    def gen():
        for v in range(start, stop + 1):
            yield AtomicValue("integer", v)

    return SequenceValue.from_iter(gen())


# -- constructors --------------------------------------------------------------


def _eval_object(ev, it, ctx):
    node = it.node
    pairs = []
    for i in range(len(node.pairs)):
        key_it = it.children[2 * i]
        val_it = it.children[2 * i + 1]
        key_atom = ev.single_atomic(ev.evaluate(key_it, ctx), "object key")
        if key_atom is None:
            raise DynamicError("TYPE_ERROR", "object key must not be empty", key_it.node.pos)
        key = key_atom.value if key_atom.kind == "string" else render_atomic(key_atom)
        value_seq = ev.evaluate(val_it, ctx)
        items = value_seq.iter_items()
        first = next(items, None)
        if first is None:
            value = AtomicValue("null", None)
        else:
            if next(items, None) is not None:
                raise DynamicError(
                    "TYPE_ERROR", "object value must be a single item", val_it.node.pos
                )
            value = first
        pairs.append((key, value))
    return SequenceValue.single(object_item(pairs))


def _eval_merged(ev, it, ctx):
    source = ev.evaluate(it.children[0], ctx)
    pairs: dict = {}
    for item in source.iter_items():
        if not isinstance(item, ObjectItem):
            raise DynamicError(
                "TYPE_ERROR", "merged object constructor requires objects", it.node.pos
            )
        for key, value in item.pairs.items():
            if key in pairs:
                raise DynamicError(
                    "DUPLICATE_KEY_IN_MERGE", f"duplicate key {key!r} in merge", it.node.pos
                )
            pairs[key] = value
    return SequenceValue.single(ObjectItem(pairs))


def _eval_array(ev, it, ctx):
    members: list = []
    for child in it.children:
        for item in ev.evaluate(child, ctx).iter_items():
            if len(members) >= ev.cap:
                raise MaterializationCapError(ev.cap)
            members.append(item)
    return SequenceValue.single(ArrayItem(members))


# -- postfix -------------------------------------------------------------------


def _eval_lookup(ev, it, ctx):
    key = it.node.key
    base = ev.evaluate(it.children[0], ctx)

    def gen():
        for item in base.iter_items():
            if isinstance(item, ObjectItem):
                value = item.pairs.get(key)
                if value is not None:
                    yield value

    return SequenceValue.from_iter(gen())


def _eval_predicate(ev, it, ctx):
    base = ev.evaluate(it.children[0], ctx)
    cond = it.children[1]
    if it.frame_lowered and base.is_frame():
        def row_pred(row):
            return effective_boolean_value(ev.evaluate(cond, ctx.push({}, context_item=row)))

        return SequenceValue.from_frame(frame_filter(base.frame, row_pred))

    def gen():
        for item in base.iter_items():
            inner = ctx.push({}, context_item=item)
            if effective_boolean_value(ev.evaluate(cond, inner)):
                yield item

    return SequenceValue.from_iter(gen())


# -- calls ---------------------------------------------------------------------


def _eval_static_call(ev, it, ctx):
    target_kind, target = it.node.target
    if target_kind == "builtin":
        spec = ev.catalog[target]
        args = [ev.evaluate(child, ctx) for child in it.children]
        return spec.fn(ev, it, ctx, args)
    info = ev.tree.functions[target.key]
    args = [ev.bind_value(ev.evaluate(child, ctx)) for child in it.children]
    fn = ev.user_function_item(info)
    return ev.invoke_function(fn, args, it.node.pos)


def _eval_fnref(ev, it, ctx):
    target_kind, target = it.node.target
    if target_kind == "user":
        info = ev.tree.functions[target.key]
        return SequenceValue.single(ev.user_function_item(info))
    spec = ev.catalog[target]
    name, _, arity = target.rpartition("#")

    def invoke(inner_ev, args, pos):
        return spec.fn(inner_ev, it, DynamicContext(), args)

    fn = FunctionItem(
        name=name,
        param_names=tuple(f"arg{i}" for i in range(int(arity))),
        signature=(None,) * int(arity) + (None,),
        native=NativeHandle(tag=f"builtin:{target}", shape="builtin", invoke=invoke),
    )
    return SequenceValue.single(fn)


def _eval_dynamic_call(ev, it, ctx):
    target_seq = ev.evaluate(it.children[0], ctx)
    items = target_seq.iter_items()
    fn = next(items, None)
    if fn is None or next(items, None) is not None or not isinstance(fn, FunctionItem):
        raise DynamicError(
            "NOT_A_FUNCTION", "dynamic call target is not a single function item", it.node.pos
        )
    args = [ev.bind_value(ev.evaluate(child, ctx)) for child in it.children[1:]]
    result = ev.invoke_function(fn, args, it.node.pos)

    if it.call_assumption == "estimator":
        out = result.iter_items()
        first = next(out, None)
        if first is None or next(out, None) is not None:
            raise DynamicError(
                "MODE_ASSUMPTION_VIOLATED",
                "call was compiled for a single-item result, got a sequence",
                it.node.pos,
            )
        return SequenceValue.single(first)
    if it.call_assumption == "transformer-frame":
        if not result.is_frame():
            raise DynamicError(
                "MODE_ASSUMPTION_VIOLATED",
                "call was compiled for a frame result, got a local sequence",
                it.node.pos,
            )
        return result
    if result.is_frame() and it.mode != FRAME_MODE:
        return SequenceValue.from_iter(result.frame.iter_items())
    return result


# -- FLWOR -----------------------------------------------------------------------

_SORT_CLASSES = {
    "string": "s",
    "boolean": "b",
    "date": "d",
    "dateTime": "t",
}


def _sort_key(ev, atom: Optional[AtomicValue], pos):
    if atom is None:
        raise DynamicError("TYPE_ERROR", "order-by key must not be empty", pos)
    if atom.kind in NUMERIC_KINDS:
        value = float(atom.value)
        if math.isnan(value):
            raise DynamicError("TYPE_ERROR", "order-by key is NaN", pos)
        return ("n", value)
    cls = _SORT_CLASSES.get(atom.kind)
    if cls is None:
        raise DynamicError("TYPE_ERROR", f"cannot order by {atom.kind}", pos)
    return (cls, atom.value)


def _eval_flwor(ev, it, ctx):
    if it.frame_lowered:
        return _eval_flwor_frame(ev, it, ctx)

    tuples = iter((ctx,))
    for clause, child in it.clause_iters:
        tuples = _apply_clause(ev, clause, child, tuples)

    def results():
        for tctx in tuples:
            yield from ev.evaluate(it.return_iter, tctx).iter_items()

    return SequenceValue.from_iter(results())


def _apply_clause(ev, clause, child, tuples):
    if isinstance(clause, ForClause):
        def gen_for():
            for tctx in tuples:
                source = ev.evaluate(child, tctx)
                position = 0
                for item in source.iter_items():
                    position += 1
                    bindings = {clause.var: SequenceValue.single(item)}
                    if clause.pos_var:
                        bindings[clause.pos_var] = SequenceValue.single(
                            AtomicValue("integer", position)
                        )
                    yield tctx.push(bindings)

        return gen_for()
    if isinstance(clause, LetClause):
        def gen_let():
            for tctx in tuples:
                value = ev.bind_value(ev.evaluate(child, tctx))
                yield tctx.push({clause.var: value})

        return gen_let()
    if isinstance(clause, WhereClause):
        def gen_where():
            for tctx in tuples:
                if ev.ebv(child, tctx):
                    yield tctx

        return gen_where()
    if isinstance(clause, OrderByClause):
        def gen_order():
            collected = []
            for tctx in tuples:
                if len(collected) >= ev.cap:
                    raise MaterializationCapError(ev.cap)
                atom = ev.single_atomic(ev.evaluate(child, tctx), "order-by key")
                collected.append((_sort_key(ev, atom, clause.pos), tctx))
            classes = {key[0] for key, _ in collected}
            if len(classes) > 1:
                raise DynamicError("TYPE_ERROR", "mixed-type order-by keys", clause.pos)
            collected.sort(key=lambda pair: pair[0][1], reverse=clause.descending)
            for _, tctx in collected:
                yield tctx

        return gen_order()
    raise AssertionError(type(clause))


def _eval_flwor_frame(ev, it, ctx):
    for_clause, source_iter = next(
        (c, ch) for c, ch in it.clause_iters if isinstance(c, ForClause)
    )
    wheres = [(c, ch) for c, ch in it.clause_iters if isinstance(c, WhereClause)]
    base = ev.evaluate(source_iter, ctx)
    if not base.is_frame():
        raise DynamicError("NOT_A_FRAME", "frame-lowered FLWOR over a local sequence", it.node.pos)
    frame = base.frame
    if not wheres:
        return SequenceValue.from_frame(frame)
    _, cond = wheres[0]

    def row_pred(row):
        inner = ctx.push({for_clause.var: SequenceValue.single(row)})
        return effective_boolean_value(ev.evaluate(cond, inner))

    return SequenceValue.from_frame(frame_filter(frame, row_pred))


_HANDLERS = {
    "literal": _eval_literal,
    "var": _eval_var,
    "context": _eval_context,
    "seq": _eval_seq,
    "if": _eval_if,
    "boolop": _eval_boolop,
    "not": _eval_not,
    "comparison": _eval_comparison,
    "arithmetic": _eval_arithmetic,
    "range": _eval_range,
    "object": _eval_object,
    "merged": _eval_merged,
    "array": _eval_array,
    "lookup": _eval_lookup,
    "predicate": _eval_predicate,
    "static-call": _eval_static_call,
    "fnref": _eval_fnref,
    "dynamic-call": _eval_dynamic_call,
    "flwor": _eval_flwor,
}
