"""Item data model: atomic values, objects, arrays, function items, sequences.

Everything an expression produces is a sequence of items. A sequence has one
logical meaning and one of three physical representations: a single item, a
pull stream, or a columnar frame. Items are immutable after construction and
safe to share; stream payloads backed by a raw iterator are single-consumer.
"""

from __future__ import annotations

import math
import re
import struct
from dataclasses import dataclass
from datetime import date, datetime
from decimal import Decimal
from typing import Any, Iterable, Iterator, Optional, Union

from .errors import DynamicError, MaterializationCapError

# ---------------------------------------------------------------------------
# Atomic kinds
# ---------------------------------------------------------------------------

ATOMIC_KINDS = frozenset(
    {
        "string",
        "boolean",
        "null",
        "byte",
        "short",
        "int",
        "integer",
        "long",
        "decimal",
        "double",
        "float",
        "date",
        "dateTime",
        "hexBinary",
    }
)

INTEGER_KINDS = frozenset({"byte", "short", "int", "long", "integer"})
NUMERIC_KINDS = INTEGER_KINDS | {"decimal", "double", "float"}

_INT_BOUNDS = {
    "byte": (-(2**7), 2**7 - 1),
    "short": (-(2**15), 2**15 - 1),
    "int": (-(2**31), 2**31 - 1),
    "long": (-(2**63), 2**63 - 1),
}


def _f32(value: float) -> float:
    """Round a double to 32-bit float precision."""
    return struct.unpack("<f", struct.pack("<f", value))[0]


@dataclass(frozen=True)
class AtomicValue:
    kind: str
    value: Any

    def __post_init__(self):
        kind, value = self.kind, self.value
        if kind not in ATOMIC_KINDS:
            raise ValueError(f"unknown atomic kind {kind!r}")
        if kind == "null":
            if value is not None:
                raise ValueError("null carries no payload")
        elif kind == "boolean":
            if not isinstance(value, bool):
                raise ValueError("boolean expects a bool")
        elif kind in INTEGER_KINDS:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"{kind} expects an int")
            bounds = _INT_BOUNDS.get(kind)
            if bounds is not None and not bounds[0] <= value <= bounds[1]:
                raise ValueError(f"{value} out of range for {kind}")
        elif kind in ("double", "float"):
            if not isinstance(value, float):
                raise ValueError(f"{kind} expects a float")
        elif kind == "decimal":
            if not isinstance(value, Decimal):
                raise ValueError("decimal expects a Decimal")
        elif kind == "string":
            if not isinstance(value, str):
                raise ValueError("string expects a str")
        elif kind == "date":
            if not isinstance(value, date) or isinstance(value, datetime):
                raise ValueError("date expects a datetime.date")
        elif kind == "dateTime":
            if not isinstance(value, datetime):
                raise ValueError("dateTime expects a datetime.datetime")
            if value.tzinfo is not None:
                raise ValueError("timezones are unsupported")
        elif kind == "hexBinary":
            if not isinstance(value, bytes):
                raise ValueError("hexBinary expects bytes")


NULL = AtomicValue("null", None)
TRUE = AtomicValue("boolean", True)
FALSE = AtomicValue("boolean", False)


@dataclass
class ObjectItem:
    """Object with unique string keys; construction order is preserved."""

    pairs: "dict[str, Item]"

    def keys(self):
        return self.pairs.keys()

    def get(self, key: str) -> "Optional[Item]":
        return self.pairs.get(key)


@dataclass
class ArrayItem:
    members: "list[Item]"


@dataclass
class FunctionItem:
    """First-class callable: a user closure or a native (registry) handle.

    Natives carry a registry tag naming the builtin they wrap; closures carry
    the declaration and the environment captured at creation.
    """

    name: Optional[str]
    param_names: tuple
    signature: tuple  # (param type strings or None ..., return type or None)
    body: Any = None  # resolved declaration for closures
    captured_env: Any = None
    native: Any = None  # NativeHandle for builtins / transformers / models

    @property
    def arity(self) -> int:
        return len(self.param_names)


Item = Union[AtomicValue, ObjectItem, ArrayItem, FunctionItem]


def object_item(pairs: "Iterable[tuple[str, Item]]") -> ObjectItem:
    """Build an object, raising DUPLICATE_OBJECT_KEY on a repeated key."""
    out: dict = {}
    for key, val in pairs:
        if key in out:
            raise DynamicError("DUPLICATE_OBJECT_KEY", f"duplicate object key {key!r}")
        out[key] = val
    return ObjectItem(out)


def from_py(value: Any) -> Item:
    """Map plain Python data onto items (None/bool/int/float/str/dict/list)."""
    if value is None:
        return NULL
    if isinstance(value, bool):
        return AtomicValue("boolean", value)
    if isinstance(value, int):
        return AtomicValue("integer", value)
    if isinstance(value, float):
        return AtomicValue("double", value)
    if isinstance(value, Decimal):
        return AtomicValue("decimal", value)
    if isinstance(value, str):
        return AtomicValue("string", value)
    if isinstance(value, dict):
        return object_item((k, from_py(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return ArrayItem([from_py(v) for v in value])
    raise TypeError(f"no item mapping for {type(value).__name__}")


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


class SequenceValue:
    """Logical sequence of items with a single/stream/frame representation."""

    SINGLE = "single"
    STREAM = "stream"
    FRAME = "frame"

    __slots__ = ("representation", "_payload", "_spent", "static_type")

    def __init__(self, representation: str, payload: Any, static_type=None):
        self.representation = representation
        self._payload = payload
        self._spent = False
        self.static_type = static_type

    # -- constructors -------------------------------------------------------

    @classmethod
    def single(cls, item: Item, static_type=None) -> "SequenceValue":
        return cls(cls.SINGLE, item, static_type)

    @classmethod
    def from_list(cls, items: "list[Item]") -> "SequenceValue":
        return cls(cls.STREAM, list(items))

    @classmethod
    def from_iter(cls, iterator: "Iterator[Item] | Iterable[Item]") -> "SequenceValue":
        return cls(cls.STREAM, iter(iterator))

    @classmethod
    def from_frame(cls, frame) -> "SequenceValue":
        return cls(cls.FRAME, frame)

    @classmethod
    def empty(cls) -> "SequenceValue":
        return cls(cls.STREAM, [])

    # -- accessors -----------------------------------------------------------

    @property
    def frame(self):
        if self.representation != self.FRAME:
            raise ValueError("not a frame-backed sequence")
        return self._payload

    def is_frame(self) -> bool:
        return self.representation == self.FRAME

    def iter_items(self) -> "Iterator[Item]":
        if self.representation == self.SINGLE:
            return iter((self._payload,))
        if self.representation == self.FRAME:
            return self._payload.iter_items()
        if isinstance(self._payload, list):
            return iter(self._payload)
        if self._spent:
            raise RuntimeError("stream already consumed")
        self._spent = True
        return self._payload

    def materialize(self, cap: int) -> "list[Item]":
        """Collect into a list, raising once more than `cap` items appear."""
        if self.representation == self.SINGLE:
            return [self._payload]
        if isinstance(self._payload, list) and self.representation == self.STREAM:
            if len(self._payload) > cap:
                raise MaterializationCapError(cap)
            return self._payload
        out: list = []
        for item in self.iter_items():
            if len(out) >= cap:
                raise MaterializationCapError(cap)
            out.append(item)
        return out

    def count(self) -> int:
        if self.representation == self.SINGLE:
            return 1
        if self.representation == self.FRAME:
            return self._payload.nrows
        if isinstance(self._payload, list):
            return len(self._payload)
        return sum(1 for _ in self.iter_items())

    def first(self) -> "Optional[Item]":
        if self.representation == self.SINGLE:
            return self._payload
        return next(self.iter_items(), None)


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------

_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


def _escape_string(s: str) -> str:
    out = []
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def render_double(value: float) -> str:
    """Shortest round-trip decimal form; NaN/INF/-INF as bare tokens."""
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "INF" if value > 0 else "-INF"
    return repr(value)


def render_decimal(value: Decimal) -> str:
    # Scale-preserving, no exponent: 0.0 stays "0.0", casts from ints stay bare.
    text = format(value, "f")
    return "0" if text == "-0" else text


def render_atomic(av: AtomicValue) -> str:
    """Unquoted canonical text of an atomic (the string() form)."""
    kind, value = av.kind, av.value
    if kind == "string":
        return value
    if kind == "boolean":
        return "true" if value else "false"
    if kind == "null":
        return "null"
    if kind in INTEGER_KINDS:
        return str(value)
    if kind in ("double", "float"):
        return render_double(value)
    if kind == "decimal":
        return render_decimal(value)
    if kind == "date":
        return value.isoformat()
    if kind == "dateTime":
        return value.isoformat()
    if kind == "hexBinary":
        return value.hex().upper()
    raise AssertionError(kind)


def canonical_serialize(item: Item) -> str:
    """Deterministic textual JSON form; function items are not serializable."""
    if isinstance(item, AtomicValue):
        if item.kind in ("string", "date", "dateTime", "hexBinary"):
            return _escape_string(render_atomic(item))
        return render_atomic(item)
    if isinstance(item, ObjectItem):
        parts = ", ".join(
            f"{_escape_string(k)}: {canonical_serialize(v)}" for k, v in item.pairs.items()
        )
        return "{" + parts + "}"
    if isinstance(item, ArrayItem):
        return "[" + ", ".join(canonical_serialize(m) for m in item.members) + "]"
    if isinstance(item, FunctionItem):
        raise DynamicError("SERIALIZE_FUNCTION", "function items cannot be serialized")
    raise AssertionError(type(item))


# ---------------------------------------------------------------------------
# Canonical-text parsing (round-trip oracle, CLI JSON variable binding)
# ---------------------------------------------------------------------------

_NUM_RE = re.compile(r"-?(?:0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?")
_WS = " \t\n\r"


class _TextParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise DynamicError("ITEM_PARSE_ERROR", f"{msg} at offset {self.pos}")

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in _WS:
            self.pos += 1

    def parse(self) -> Item:
        self.skip_ws()
        item = self.parse_value()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing content")
        return item

    def parse_value(self) -> Item:
        t = self.text
        if self.pos >= len(t):
            self.error("unexpected end of input")
        ch = t[self.pos]
        if ch == "{":
            return self.parse_object()
        if ch == "[":
            return self.parse_array()
        if ch == '"':
            return AtomicValue("string", self.parse_string())
        for word, item in (
            ("true", TRUE),
            ("false", FALSE),
            ("null", NULL),
            ("NaN", AtomicValue("double", float("nan"))),
            ("-INF", AtomicValue("double", float("-inf"))),
            ("INF", AtomicValue("double", float("inf"))),
        ):
            if t.startswith(word, self.pos):
                self.pos += len(word)
                return item
        m = _NUM_RE.match(t, self.pos)
        if m:
            self.pos = m.end()
            if m.group(1) or m.group(2):
                return AtomicValue("double", float(m.group(0)))
            return AtomicValue("integer", int(m.group(0)))
        self.error(f"unexpected character {ch!r}")

    def parse_string(self) -> str:
        t = self.text
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(t):
                self.error("unterminated string")
            ch = t[self.pos]
            if ch == '"':
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                self.pos += 1
                esc = t[self.pos : self.pos + 1]
                if esc in '"\\/':
                    out.append(esc)
                elif esc in "bfnrt":
                    out.append({"b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}[esc])
                elif esc == "u":
                    out.append(chr(int(t[self.pos + 1 : self.pos + 5], 16)))
                    self.pos += 4
                else:
                    self.error(f"bad escape {esc!r}")
                self.pos += 1
            else:
                out.append(ch)
                self.pos += 1

    def parse_object(self) -> Item:
        self.pos += 1
        pairs = []
        self.skip_ws()
        if self.text.startswith("}", self.pos):
            self.pos += 1
            return object_item(pairs)
        while True:
            self.skip_ws()
            if not self.text.startswith('"', self.pos):
                self.error("expected object key")
            key = self.parse_string()
            self.skip_ws()
            if not self.text.startswith(":", self.pos):
                self.error("expected ':'")
            self.pos += 1
            self.skip_ws()
            pairs.append((key, self.parse_value()))
            self.skip_ws()
            if self.text.startswith(",", self.pos):
                self.pos += 1
                continue
            if self.text.startswith("}", self.pos):
                self.pos += 1
                return object_item(pairs)
            self.error("expected ',' or '}'")

    def parse_array(self) -> Item:
        self.pos += 1
        members = []
        self.skip_ws()
        if self.text.startswith("]", self.pos):
            self.pos += 1
            return ArrayItem(members)
        while True:
            self.skip_ws()
            members.append(self.parse_value())
            self.skip_ws()
            if self.text.startswith(",", self.pos):
                self.pos += 1
                continue
            if self.text.startswith("]", self.pos):
                self.pos += 1
                return ArrayItem(members)
            self.error("expected ',' or ']'")


def parse_canonical(text: str) -> Item:
    """Parse the canonical JSON text form back into an item."""
    return _TextParser(text).parse()


# ---------------------------------------------------------------------------
# Equality, effective boolean value
# ---------------------------------------------------------------------------


def _numeric_value(av: AtomicValue):
    return av.value


def deep_equal(a: Item, b: Item) -> bool:
    """Structural equality with numeric promotion; function items never equal.

    Integer/float pairs compare exactly (no precision loss, so equality stays
    transitive at any magnitude); NaN equals NaN. Decimals compared against
    floats promote to double, which is what the canonical text form preserves.
    """
    if isinstance(a, AtomicValue) and isinstance(b, AtomicValue):
        if a.kind in NUMERIC_KINDS and b.kind in NUMERIC_KINDS:
            av, bv = a.value, b.value
            if isinstance(av, float) and math.isnan(av):
                return isinstance(bv, float) and math.isnan(bv)
            if isinstance(bv, float) and math.isnan(bv):
                return False
            if isinstance(av, Decimal) and isinstance(bv, float):
                return float(av) == bv
            if isinstance(av, float) and isinstance(bv, Decimal):
                return av == float(bv)
            return av == bv
        return a.kind == b.kind and a.value == b.value
    if isinstance(a, ObjectItem) and isinstance(b, ObjectItem):
        if set(a.pairs.keys()) != set(b.pairs.keys()):
            return False
        return all(deep_equal(v, b.pairs[k]) for k, v in a.pairs.items())
    if isinstance(a, ArrayItem) and isinstance(b, ArrayItem):
        if len(a.members) != len(b.members):
            return False
        return all(deep_equal(x, y) for x, y in zip(a.members, b.members))
    return False


def effective_boolean_value(seq: SequenceValue) -> bool:
    """Empty is false; a single atomic follows its kind; anything else errors."""
    it = seq.iter_items()
    first = next(it, None)
    if first is None:
        return False
    if next(it, None) is not None:
        raise DynamicError("EBV_ERROR", "effective boolean value of a multi-item sequence")
    if not isinstance(first, AtomicValue):
        raise DynamicError("EBV_ERROR", "effective boolean value of an object, array, or function")
    kind, value = first.kind, first.value
    if kind == "boolean":
        return value
    if kind == "string":
        return len(value) > 0
    if kind == "null":
        return False
    if kind in NUMERIC_KINDS:
        if isinstance(value, float) and math.isnan(value):
            return False
        return value != 0
    raise DynamicError("EBV_ERROR", f"effective boolean value of a {kind}")


# ---------------------------------------------------------------------------
# Atomic casts
# ---------------------------------------------------------------------------

_DOUBLE_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_INTEGER_RE = re.compile(r"[+-]?\d+")
_DECIMAL_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)")


def _cast_error(code: str, msg: str):
    raise DynamicError(code, msg)


def _parse_double(text: str) -> float:
    t = text.strip()
    if t == "NaN":
        return float("nan")
    if t == "INF":
        return float("inf")
    if t == "-INF":
        return float("-inf")
    if not _DOUBLE_RE.fullmatch(t):
        _cast_error("LEXICAL_ERROR", f"cannot parse {text!r} as double")
    return float(t)


def _to_int(value, target_kind: str) -> int:
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            _cast_error("RANGE_ERROR", f"cannot cast {value} to {target_kind}")
        result = math.trunc(value)
    elif isinstance(value, Decimal):
        result = int(value.to_integral_value(rounding="ROUND_DOWN"))
    else:
        result = int(value)
    bounds = _INT_BOUNDS.get(target_kind)
    if bounds is not None and not bounds[0] <= result <= bounds[1]:
        _cast_error("RANGE_ERROR", f"{result} out of range for {target_kind}")
    return result


def atomic_cast(av: AtomicValue, target_kind: str) -> AtomicValue:
    """Cast between atomic kinds per the engine's cast table.

    Supported routes: identity, numeric widening/narrowing, string to and
    from numbers, booleans, and ISO-8601 dates. Anything else is NO_CAST_RULE.
    """
    if target_kind not in ATOMIC_KINDS:
        raise DynamicError("NO_CAST_RULE", f"unknown target kind {target_kind!r}")
    kind = av.kind
    if kind == target_kind:
        return av
    if kind == "null" or target_kind == "null":
        _cast_error("NO_CAST_RULE", f"no cast from {kind} to {target_kind}")

    if kind in NUMERIC_KINDS:
        if target_kind in INTEGER_KINDS:
            return AtomicValue(target_kind, _to_int(av.value, target_kind))
        if target_kind == "double":
            return AtomicValue("double", float(av.value))
        if target_kind == "float":
            return AtomicValue("float", _f32(float(av.value)))
        if target_kind == "decimal":
            v = av.value
            if isinstance(v, float):
                if math.isnan(v) or math.isinf(v):
                    _cast_error("RANGE_ERROR", f"cannot cast {v} to decimal")
                return AtomicValue("decimal", Decimal(repr(v)))
            return AtomicValue("decimal", Decimal(v))
        if target_kind == "string":
            return AtomicValue("string", render_atomic(av))
        _cast_error("NO_CAST_RULE", f"no cast from {kind} to {target_kind}")

    if kind == "string":
        text = av.value
        if target_kind == "double":
            return AtomicValue("double", _parse_double(text))
        if target_kind == "float":
            return AtomicValue("float", _f32(_parse_double(text)))
        if target_kind == "decimal":
            t = text.strip()
            if not _DECIMAL_RE.fullmatch(t):
                _cast_error("LEXICAL_ERROR", f"cannot parse {text!r} as decimal")
            return AtomicValue("decimal", Decimal(t))
        if target_kind in INTEGER_KINDS:
            t = text.strip()
            if not _INTEGER_RE.fullmatch(t):
                _cast_error("LEXICAL_ERROR", f"cannot parse {text!r} as {target_kind}")
            return AtomicValue(target_kind, _to_int(int(t), target_kind))
        if target_kind == "boolean":
            t = text.strip()
            if t in ("true", "1"):
                return TRUE
            if t in ("false", "0"):
                return FALSE
            _cast_error("LEXICAL_ERROR", f"cannot parse {text!r} as boolean")
        if target_kind == "date":
            try:
                return AtomicValue("date", date.fromisoformat(text.strip()))
            except ValueError:
                _cast_error("LEXICAL_ERROR", f"cannot parse {text!r} as date")
        if target_kind == "dateTime":
            try:
                parsed = datetime.fromisoformat(text.strip())
            except ValueError:
                _cast_error("LEXICAL_ERROR", f"cannot parse {text!r} as dateTime")
            if parsed.tzinfo is not None:
                _cast_error("LEXICAL_ERROR", "timezones are unsupported")
            return AtomicValue("dateTime", parsed)
        _cast_error("NO_CAST_RULE", f"no cast from string to {target_kind}")

    if kind == "boolean" and target_kind == "string":
        return AtomicValue("string", "true" if av.value else "false")
    if kind in ("date", "dateTime") and target_kind == "string":
        return AtomicValue("string", render_atomic(av))

    _cast_error("NO_CAST_RULE", f"no cast from {kind} to {target_kind}")
    raise AssertionError  # unreachable
