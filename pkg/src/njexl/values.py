"""Runtime value model: numeric tower, collection algebra, ordering, text forms.

Python scalars stand in directly for guest scalars (None, bool, int, float,
str).  Two tags need their own carriers: BigInt (surface name INT) is an int
subclass so an explicitly widened integer stays widened, and BigDec (surface
name DEC) is decimal.Decimal.  A plain int outside the signed 64-bit range
counts as BigInt as well; arithmetic that overflows 64 bits widens instead of
wrapping.

Equality is value-based across numeric tags (1 == 1.0 == DEC('1')), multiset
oriented on lists, and reflexive for every value.  All of it is routed through
one canonical-key function so that sets, map keys, equality, and multiset
containment can never disagree with each other.
"""

import datetime
import math
from collections import Counter
from decimal import Decimal, localcontext
from fractions import Fraction

from .errors import NjexlError

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

# digits kept by inexact BigDec division
DEC_DIV_PRECISION = 64


class BigInt(int):
    """Arbitrary-precision integer tag (surface type INT)."""

    __slots__ = ()


class Range:
    """Lazy half-open integer progression start, start+step, ... (< end)."""

    __slots__ = ("start", "end", "step")

    def __init__(self, start, end, step=1, line=None, col=None):
        if step == 0:
            raise NjexlError("TypeError", "range step must not be zero", line, col)
        self.start = start
        self.end = end
        self.step = step

    def length(self):
        if self.step > 0:
            span = self.end - self.start
        else:
            span = self.start - self.end
        if span <= 0:
            return 0
        return -(-span // abs(self.step))

    def __iter__(self):
        return iter(range(self.start, self.end, self.step))

    def hits(self, x):
        if self.step > 0:
            inside = self.start <= x < self.end
        else:
            inside = self.end < x <= self.start
        return inside and (x - self.start) % self.step == 0


class Pair:
    """Exactly-two tuple; produced by minmax, #clock, and map iteration."""

    __slots__ = ("first", "second")

    def __init__(self, first, second):
        self.first = first
        self.second = second

    def __iter__(self):
        yield self.first
        yield self.second

    def __eq__(self, other):
        if isinstance(other, (Pair, tuple)) and len(tuple(other)) == 2:
            a, b = other
            return self.first == a and self.second == b
        return NotImplemented

    def __hash__(self):
        return hash((self.first, self.second))

    def __repr__(self):
        return f"Pair({self.first!r}, {self.second!r})"


class XSet:
    """Insertion-order set deduplicating by guest value equality."""

    __slots__ = ("_items",)

    def __init__(self, values=()):
        self._items = {}
        for v in values:
            self.add(v)

    def add(self, value):
        k = canonical_key(value)
        if k not in self._items:
            self._items[k] = value

    def contains(self, value):
        return canonical_key(value) in self._items

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items.values())


class XMap:
    """Insertion-order map keyed by guest value equality; keys must be immutable."""

    __slots__ = ("_items",)

    def __init__(self):
        self._items = {}

    def set(self, key, value, line=None, col=None):
        self._items[map_key(key, line, col)] = (key, value)

    def get(self, key):
        hit = self._items.get(map_key(key))
        return hit if hit is None else hit[1]

    def has(self, key):
        try:
            return map_key(key) in self._items
        except NjexlError:
            return False

    def keys(self):
        return (k for k, _ in self._items.values())

    def items(self):
        return iter(self._items.values())

    def __len__(self):
        return len(self._items)


class LazySeq:
    """A one-shot pull source, e.g. the line iterator from lines()."""

    __slots__ = ("_it",)

    def __init__(self, iterator):
        self._it = iter(iterator)

    def __iter__(self):
        return self._it


class Function:
    __slots__ = ("name", "params", "body", "scope")

    def __init__(self, name, params, body, scope):
        self.name = name
        self.params = params
        self.body = body
        self.scope = scope


class NativeFunction:
    __slots__ = ("name", "fn")

    def __init__(self, name, fn):
        self.name = name
        self.fn = fn


class Module:
    __slots__ = ("path", "bindings")

    def __init__(self, path, bindings):
        self.path = path
        self.bindings = bindings


class ErrorValue:
    """A caught error as a first-class value (fields kind/message/cause)."""

    __slots__ = ("kind", "message", "cause")

    def __init__(self, kind, message, cause=None):
        self.kind = kind
        self.message = message
        self.cause = cause


_DATE_TYPES = (datetime.datetime, datetime.date)


def tag(v):
    """Human-readable type tag used in error messages."""
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, BigInt):
        return "INT"
    if isinstance(v, int):
        return "int" if INT_MIN <= v <= INT_MAX else "INT"
    if isinstance(v, float):
        return "float"
    if isinstance(v, Decimal):
        return "DEC"
    if isinstance(v, str):
        return "str"
    if isinstance(v, Range):
        return "range"
    if isinstance(v, list):
        return "list"
    if isinstance(v, XSet):
        return "set"
    if isinstance(v, XMap):
        return "map"
    if isinstance(v, Pair):
        return "pair"
    if isinstance(v, LazySeq):
        return "iterator"
    if isinstance(v, Function):
        return "function"
    if isinstance(v, NativeFunction):
        return "builtin"
    if isinstance(v, Module):
        return "module"
    if isinstance(v, ErrorValue):
        return "error"
    if isinstance(v, datetime.datetime):
        return "datetime"
    if isinstance(v, datetime.date):
        return "date"
    return type(v).__name__


def is_numeric(v):
    return isinstance(v, (int, float, Decimal)) and not isinstance(v, bool)


def is_int_tier(v):
    return isinstance(v, int) and not isinstance(v, bool)


def is_big(v):
    return isinstance(v, BigInt) or (
        is_int_tier(v) and not INT_MIN <= v <= INT_MAX
    )


def int_result(x):
    """Tag an exact integer result: stays Int while it fits 64 bits."""
    if INT_MIN <= x <= INT_MAX:
        return int(x)
    return BigInt(x)


def classify_decimal_literal(text):
    """Literal with '.'/exponent: Float when repr keeps every digit, else BigDec."""
    f = float(text)
    if math.isinf(f):
        return Decimal(text)
    if Decimal(repr(f)) == Decimal(text):
        return f
    return Decimal(text)


def float_to_decimal(f):
    """Bridge a Float into the decimal world via its shortest round-trip form."""
    return Decimal(repr(f))


def _exact_value(v):
    """Exact rational for cross-tag numeric equality/order (floats via repr)."""
    if isinstance(v, bool):
        raise TypeError("bool is not numeric")
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        if math.isinf(v):
            return v
        return Fraction(float_to_decimal(v))
    if v.is_infinite():
        return math.inf if v > 0 else -math.inf
    return Fraction(v)


def canonical_key(v, _seen=None):
    """Hashable, totally-comparable-within-tag key defining value equality."""
    if v is None:
        return ("null",)
    if isinstance(v, bool):
        return ("bool", v)
    if isinstance(v, int):
        return ("num", v)
    if isinstance(v, float):
        if math.isnan(v):
            return ("nan",)
        if math.isinf(v):
            return ("inf", 1 if v > 0 else -1)
        return ("num", _exact_value(v))
    if isinstance(v, Decimal):
        if v.is_nan():
            return ("nan",)
        if v.is_infinite():
            return ("inf", 1 if v > 0 else -1)
        return ("num", _exact_value(v))
    if isinstance(v, str):
        return ("str", v)
    if isinstance(v, _DATE_TYPES):
        return ("date", v.isoformat())
    if isinstance(v, ErrorValue):
        return ("error", (v.kind, v.message))
    if isinstance(v, Range):
        if v.length() == 0:
            return ("range", ())
        return ("range", (v.start, v.step, v.length()))
    if isinstance(v, Pair):
        return ("pair", (canonical_key(v.first, _seen), canonical_key(v.second, _seen)))
    if isinstance(v, (list, XSet, XMap)):
        if _seen is None:
            _seen = set()
        if id(v) in _seen:
            raise NjexlError("TypeError", "cyclic value has no identity")
        _seen = _seen | {id(v)}
        if isinstance(v, list):
            return ("list", tuple(sorted(canonical_key(e, _seen) for e in v)))
        if isinstance(v, XSet):
            return ("set", tuple(sorted(canonical_key(e, _seen) for e in v)))
        pairs = sorted(
            (canonical_key(k, _seen), canonical_key(val, _seen)) for k, val in v.items()
        )
        return ("map", tuple(pairs))
    # functions, builtins, modules, iterators compare by identity
    return ("obj", id(v))


_KEYABLE = {"null", "bool", "num", "nan", "inf", "str", "date"}


def _keyable(k):
    if k[0] in _KEYABLE:
        return True
    if k[0] == "pair":
        return _keyable(k[1][0]) and _keyable(k[1][1])
    return False


def map_key(v, line=None, col=None):
    """Canonical key for map use; rejects mutable values as keys."""
    k = canonical_key(v)
    if _keyable(k):
        return k
    raise NjexlError("TypeError", f"{tag(v)} cannot be a map key", line, col)


def values_equal(a, b):
    return canonical_key(a) == canonical_key(b)


def order_compare(a, b, line=None, col=None):
    """Total order over comparable tags; -1/0/1. Incomparable tags raise."""
    if is_numeric(a) and is_numeric(b):
        for v in (a, b):
            if isinstance(v, float) and math.isnan(v):
                raise NjexlError("TypeError", "NaN is unordered", line, col)
            if isinstance(v, Decimal) and v.is_nan():
                raise NjexlError("TypeError", "NaN is unordered", line, col)
        x, y = _exact_value(a), _exact_value(b)
        return (x > y) - (x < y)
    if isinstance(a, str) and isinstance(b, str):
        return (a > b) - (a < b)
    if isinstance(a, bool) and isinstance(b, bool):
        return (a > b) - (a < b)
    if isinstance(a, _DATE_TYPES) and isinstance(b, _DATE_TYPES):
        if isinstance(a, datetime.datetime) != isinstance(b, datetime.datetime):
            raise NjexlError("TypeError", "cannot order date and datetime", line, col)
        return (a > b) - (a < b)
    raise NjexlError("TypeError", f"cannot order {tag(a)} and {tag(b)}", line, col)


def truthiness(v):
    """False for null, false, and numeric zero; everything else is true."""
    if v is None or v is False:
        return False
    if v is True:
        return True
    if is_numeric(v):
        if isinstance(v, Decimal):
            return not v.is_zero()
        return v != 0
    return True


def _counts(values):
    return Counter(canonical_key(e) for e in values)


def sub_collection(a, b, line=None, col=None):
    """Containment: multiset on lists, subset on sets, submap on maps."""
    if isinstance(a, list) and isinstance(b, list):
        need = _counts(a)
        have = _counts(b)
        return all(have[k] >= n for k, n in need.items())
    if isinstance(a, XSet) and isinstance(b, XSet):
        return all(b.contains(e) for e in a)
    if isinstance(a, XMap) and isinstance(b, XMap):
        for k, v in a.items():
            if not b.has(k):
                return False
            if not values_equal(b.get(k), v):
                return False
        return True
    raise NjexlError(
        "TypeError", f"cannot test containment between {tag(a)} and {tag(b)}", line, col
    )


def is_collection(v):
    return isinstance(v, (list, XSet, XMap))


def membership(x, c, line=None, col=None):
    """The @ operator: element of list/set, key of map, substring, range hit."""
    if isinstance(c, list):
        kx = canonical_key(x)
        return any(canonical_key(e) == kx for e in c)
    if isinstance(c, XSet):
        return c.contains(x)
    if isinstance(c, XMap):
        return c.has(x)
    if isinstance(c, str):
        return isinstance(x, str) and x in c
    if isinstance(c, Range):
        if not is_numeric(x):
            return False
        exact = _exact_value(x)
        if isinstance(exact, Fraction) and exact.denominator != 1:
            return False
        return c.hits(int(exact))
    raise NjexlError("TypeError", f"{tag(c)} is not a container", line, col)


def cardinality(v, line=None, col=None):
    if isinstance(v, str):
        return len(v)
    if isinstance(v, list):
        return len(v)
    if isinstance(v, (XSet, XMap)):
        return len(v)
    if isinstance(v, Range):
        return v.length()
    if isinstance(v, Pair):
        return 2
    raise NjexlError("TypeError", f"{tag(v)} has no size", line, col)


def project(v, i, line=None, col=None):
    """Positional component access for pairs, lists, and strings."""
    if not is_int_tier(i):
        raise NjexlError("TypeError", f"index must be an integer, got {tag(i)}", line, col)
    if isinstance(v, Pair):
        if i == 0:
            return v.first
        if i == 1:
            return v.second
        raise NjexlError("IndexError", f"pair index {i} out of range", line, col)
    if isinstance(v, list):
        if 0 <= i < len(v):
            return v[i]
        raise NjexlError("IndexError", f"list index {i} out of range {len(v)}", line, col)
    if isinstance(v, str):
        if 0 <= i < len(v):
            return v[i]
        raise NjexlError("IndexError", f"string index {i} out of range {len(v)}", line, col)
    raise NjexlError("TypeError", f"{tag(v)} is not indexable", line, col)


def enumerate_value(v, line=None, col=None):
    """Iteration order used by for-loops and the higher-order builtins."""
    if isinstance(v, list):
        return iter(v)
    if isinstance(v, XSet):
        return iter(v)
    if isinstance(v, XMap):
        return (Pair(k, val) for k, val in v.items())
    if isinstance(v, Range):
        return iter(v)
    if isinstance(v, str):
        return iter(v)
    if isinstance(v, Pair):
        return iter(v)
    if isinstance(v, LazySeq):
        return iter(v)
    raise NjexlError("TypeError", f"{tag(v)} is not iterable", line, col)


# ---------------------------------------------------------------------------
# arithmetic


def _dec_digits(d):
    return len(d.as_tuple().digits)


def _dec_exact(op, a, b):
    """+,-,* on decimals with enough precision to stay exact."""
    if op == "*":
        prec = _dec_digits(a) + _dec_digits(b) + 2
    else:
        ta, tb = a.as_tuple(), b.as_tuple()
        hi = max(len(ta.digits) + ta.exponent, len(tb.digits) + tb.exponent)
        lo = min(ta.exponent, tb.exponent)
        prec = hi - lo + 2
    with localcontext() as cx:
        cx.prec = max(prec, 28)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        return a * b


def _as_decimal(v):
    if isinstance(v, Decimal):
        return v
    if isinstance(v, float):
        return float_to_decimal(v)
    return Decimal(int(v))


def _trunc_div(a, b):
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def arith(op, a, b, line=None, col=None):
    """Evaluate a numeric or collection-extending binary +,-,*,/,%."""
    if op == "+":
        if isinstance(a, list):
            a.append(b)
            return a
        if isinstance(a, XSet):
            a.add(b)
            return a
        if isinstance(a, str) or isinstance(b, str):
            return stringify(a) + stringify(b)
    if not (is_numeric(a) and is_numeric(b)):
        raise NjexlError(
            "TypeError", f"cannot apply {op} to {tag(a)} and {tag(b)}", line, col
        )

    if isinstance(a, Decimal) or isinstance(b, Decimal):
        return _arith_dec(op, _as_decimal(a), _as_decimal(b), line, col)
    if isinstance(a, float) or isinstance(b, float):
        return _arith_float(op, float(a), float(b))
    big = is_big(a) or is_big(b)
    return _arith_int(op, a, b, big, line, col)


def _arith_int(op, a, b, big, line, col):
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    elif op == "/":
        if b == 0:
            raise NjexlError("DivideByZero", "integer division by zero", line, col)
        if big and a % b != 0:
            return _arith_dec("/", Decimal(a), Decimal(b), line, col)
        r = _trunc_div(a, b)
    else:
        if b == 0:
            raise NjexlError("DivideByZero", "integer remainder by zero", line, col)
        r = a - _trunc_div(a, b) * b
    return BigInt(r) if big else int_result(r)


def _arith_float(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0.0:
            if a == 0.0 or math.isnan(a):
                return math.nan
            return math.copysign(math.inf, a) * math.copysign(1.0, b)
        return a / b
    if b == 0.0:
        return math.nan
    return math.fmod(a, b)


def _arith_dec(op, a, b, line, col):
    if op in "+-*":
        return _dec_exact(op, a, b)
    if b.is_zero():
        raise NjexlError(
            "DivideByZero",
            "decimal division by zero" if op == "/" else "decimal remainder by zero",
            line,
            col,
        )
    with localcontext() as cx:
        cx.prec = DEC_DIV_PRECISION
        if op == "/":
            return a / b
        return a % b


def negate(v, line=None, col=None):
    if isinstance(v, BigInt):
        return BigInt(-v)
    if is_int_tier(v):
        return int_result(-v)
    if isinstance(v, (float, Decimal)):
        return -v
    raise NjexlError("TypeError", f"cannot negate {tag(v)}", line, col)


# ---------------------------------------------------------------------------
# canonical text form (shared by print, the REPL, and string concatenation)


def stringify(v, _seen=None):
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return repr(v)
    if isinstance(v, Decimal):
        return str(v)
    if isinstance(v, str):
        return v
    if isinstance(v, Range):
        if v.step == 1:
            return f"[{v.start}:{v.end}]"
        return f"[{v.start}:{v.end}:{v.step}]"
    if isinstance(v, (list, XSet, XMap)):
        if _seen is None:
            _seen = set()
        if id(v) in _seen:
            return "[...]" if isinstance(v, list) else "{...}"
        _seen = _seen | {id(v)}
        if isinstance(v, list):
            return "[" + ", ".join(stringify(e, _seen) for e in v) + "]"
        if isinstance(v, XSet):
            return "{" + ", ".join(stringify(e, _seen) for e in v) + "}"
        entries = (f"{stringify(k, _seen)} : {stringify(val, _seen)}" for k, val in v.items())
        return "{" + ", ".join(entries) + "}"
    if isinstance(v, Pair):
        return f"({stringify(v.first, _seen)}, {stringify(v.second, _seen)})"
    if isinstance(v, LazySeq):
        return "iterator"
    if isinstance(v, Function):
        name = v.name or ""
        return f"def {name}({', '.join(v.params)})"
    if isinstance(v, NativeFunction):
        return f"builtin({v.name})"
    if isinstance(v, Module):
        return f"module({v.path})"
    if isinstance(v, ErrorValue):
        return f"{v.kind}: {v.message}"
    if isinstance(v, _DATE_TYPES):
        return v.isoformat()
    return str(v)
