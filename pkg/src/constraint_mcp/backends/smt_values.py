"""Typed SMT model values, model-block parsing and a ground-term evaluator.

Values are plain Python where possible: ``bool``, ``int``,
``fractions.Fraction`` for reals, plus :class:`BitVec` and
:class:`ArrayValue`. The evaluator covers the quantifier-free
boolean / integer / real / bitvector / array fragment and is what the
witness checks use to confirm a solver model against the assertions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .sexpr import SExpr, symbol_name


@dataclass(frozen=True, order=True)
class BitVec:
    width: int
    value: int  # unsigned magnitude

    def __post_init__(self):
        if self.width < 1 or not 0 <= self.value < (1 << self.width):
            raise ValueError(f"bitvector value {self.value} does not fit width {self.width}")

    @property
    def signed(self) -> int:
        return self.value - (1 << self.width) if self.value >> (self.width - 1) else self.value


@dataclass
class ArrayValue:
    default: Any
    entries: dict = field(default_factory=dict)

    def select(self, key):
        return self.entries.get(key, self.default)

    def store(self, key, value) -> "ArrayValue":
        e = dict(self.entries)
        e[key] = value
        return ArrayValue(self.default, e)

    def __eq__(self, other):
        if not isinstance(other, ArrayValue):
            return NotImplemented
        # extensional equality over the finitely many keys that differ
        keys = set(self.entries) | set(other.entries)
        return self.default == other.default and all(self.select(k) == other.select(k) for k in keys)

    __hash__ = None


def sort_tag(v) -> str:
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, int):
        return "integer"
    if isinstance(v, Fraction):
        return "real"
    if isinstance(v, BitVec):
        return f"bitvector({v.width})"
    if isinstance(v, ArrayValue):
        return "array"
    raise TypeError(f"not an SMT value: {v!r}")


def to_json(v):
    """Canonical JSON-compatible rendering."""
    if isinstance(v, bool) or isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    if isinstance(v, BitVec):
        return {"width": v.width, "value": v.value}
    if isinstance(v, ArrayValue):
        return {
            "default": to_json(v.default),
            "entries": [{"index": to_json(k), "value": to_json(x)} for k, x in _sorted_items(v.entries)],
        }
    raise TypeError(f"not an SMT value: {v!r}")


def _sorted_items(d: dict):
    try:
        return sorted(d.items())
    except TypeError:
        return list(d.items())


# --- literal parsing ---------------------------------------------------------

class ValueShapeError(ValueError):
    pass


def parse_literal(tok: str):
    if tok == "true":
        return True
    if tok == "false":
        return False
    if tok.isdigit():
        return int(tok)
    if tok.startswith("#b") and len(tok) > 2 and set(tok[2:]) <= {"0", "1"}:
        return BitVec(len(tok) - 2, int(tok[2:], 2))
    if tok.startswith("#x") and len(tok) > 2:
        try:
            return BitVec(4 * (len(tok) - 2), int(tok[2:], 16))
        except ValueError:
            pass
    if tok.count(".") == 1 and tok.replace(".", "").isdigit():
        return Fraction(tok)
    raise ValueShapeError(f"not a literal: {tok}")


def _indexed_bv(e: SExpr):
    # (_ bvN w)
    if e.head == "_" and len(e) == 3 and e[1].is_atom and e[1].atom.startswith("bv") and e[1].atom[2:].isdigit():
        return BitVec(int(e[2].atom), int(e[1].atom[2:]) % (1 << int(e[2].atom)))
    return None


def parse_value(e: SExpr, functions: dict | None = None):
    """Interpret a model value term. `functions` maps names of
    auxiliary model functions (for ``(_ as-array f)``) to their definitions."""
    if e.is_atom:
        return parse_literal(e.atom)
    bv = _indexed_bv(e)
    if bv is not None:
        return bv
    head = e.head
    if head == "-" and len(e) == 2:
        v = parse_value(e[1], functions)
        if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
            return -v
    if head == "/" and len(e) == 3:
        a, b = parse_value(e[1], functions), parse_value(e[2], functions)
        if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)) and b != 0:
            return Fraction(a) / Fraction(b)
    if head == "store" and len(e) == 4:
        arr = parse_value(e[1], functions)
        if isinstance(arr, ArrayValue):
            return arr.store(parse_value(e[2], functions), parse_value(e[3], functions))
    if head == "_" and len(e) == 3 and e[1].atom == "as-array" and functions:
        fn = functions.get(symbol_name(e[2].atom))
        if fn is not None:
            params, body = fn
            return _function_as_array(params, body, functions)
    if head == "lambda" and len(e) == 3 and len(e[1]) == 1:
        return _function_as_array([e[1][0][0].atom], e[2], functions)
    # ((as const (Array S T)) v)
    if not e[0].is_atom and e[0].head == "as" and len(e[0]) == 3 and e[0][1].atom == "const" and len(e) == 2:
        return ArrayValue(parse_value(e[1], functions))
    raise ValueShapeError(f"unrecognized value shape: {e}")


def _function_as_array(params, body: SExpr, functions):
    # (ite (= x k) v rest) chains ending in a default value
    if len(params) != 1:
        raise ValueShapeError("as-array of a function with arity != 1")
    x = symbol_name(params[0])
    entries = {}
    while body.head == "ite" and len(body) == 4:
        cond = body[1]
        if cond.head != "=" or len(cond) != 3:
            raise ValueShapeError(f"unsupported array function condition: {cond}")
        a, b = cond[1], cond[2]
        key_term = b if (a.is_atom and symbol_name(a.atom) == x) else a
        key = parse_value(key_term, functions)
        entries.setdefault(key, parse_value(body[2], functions))
        body = body[3]
    return ArrayValue(parse_value(body, functions), entries)


def parse_model(block: SExpr) -> tuple[dict[str, Any], list[str]]:
    """Read zero-ary ``define-fun`` entries out of a get-model response.

    Returns (values, problems); entries whose value cannot be read are
    skipped and described in `problems`.
    """
    entries = block.children or []
    if entries and entries[0].is_atom and entries[0].atom == "model":
        entries = entries[1:]
    functions = {}
    zero_ary = []
    for d in entries:
        if d.head != "define-fun" or len(d) != 5:
            continue
        name = symbol_name(d[1].atom)
        params = [p[0].atom for p in d[2].children or []]
        if params:
            functions[name] = (params, d[4])
        else:
            zero_ary.append((name, d[4]))
    values, problems = {}, []
    for name, term in zero_ary:
        try:
            values[name] = parse_value(term, functions)
        except (ValueShapeError, ValueError, IndexError, TypeError) as exc:
            problems.append(f"{name}: {exc}")
    return values, problems


def parse_get_value(block: SExpr) -> dict[str, Any]:
    """((x 5) (y true)) -> {x: 5, y: True}"""
    out = {}
    for pair in block.children or []:
        if len(pair) == 2 and pair[0].is_atom:
            out[symbol_name(pair[0].atom)] = parse_value(pair[1])
    return out


# --- evaluation --------------------------------------------------------------

class NotGround(Exception):
    """Term is outside the evaluator's fragment (quantifiers, unknown ops)."""


def _mask(w):
    return (1 << w) - 1


def _bv(w, x):
    return BitVec(w, x & _mask(w))


def _int_div(a, b):
    # SMT-LIB: a = b*q + r with 0 <= r < |b|
    if b == 0:
        raise NotGround("integer division by zero is uninterpreted")
    q = a // b if b > 0 else -(a // -b)
    return q, a - b * q


def _chain(args, rel):
    return all(rel(a, b) for a, b in zip(args, args[1:]))


def _bv_binop(op, a: BitVec, b: BitVec) -> BitVec:
    w, x, y = a.width, a.value, b.value
    if op == "bvadd":
        return _bv(w, x + y)
    if op == "bvsub":
        return _bv(w, x - y)
    if op == "bvmul":
        return _bv(w, x * y)
    if op == "bvand":
        return BitVec(w, x & y)
    if op == "bvor":
        return BitVec(w, x | y)
    if op == "bvxor":
        return BitVec(w, x ^ y)
    if op == "bvnand":
        return _bv(w, ~(x & y))
    if op == "bvnor":
        return _bv(w, ~(x | y))
    if op == "bvxnor":
        return _bv(w, ~(x ^ y))
    if op == "bvudiv":
        return BitVec(w, _mask(w) if y == 0 else x // y)
    if op == "bvurem":
        return BitVec(w, x if y == 0 else x % y)
    if op == "bvshl":
        return _bv(w, x << y) if y < w else BitVec(w, 0)
    if op == "bvlshr":
        return BitVec(w, x >> y) if y < w else BitVec(w, 0)
    if op == "bvashr":
        return _bv(w, a.signed >> min(y, w))
    if op in ("bvsdiv", "bvsrem", "bvsmod"):
        s, t = a.signed, b.signed
        if op == "bvsdiv":
            if t == 0:
                return BitVec(w, 1 if s < 0 else _mask(w))
            q = abs(s) // abs(t)
            return _bv(w, q if (s < 0) == (t < 0) else -q)
        if op == "bvsrem":
            if t == 0:
                return a
            r = abs(s) % abs(t)
            return _bv(w, -r if s < 0 else r)
        if t == 0:
            return a
        return _bv(w, s - t * (s // t))  # sign follows divisor
    raise NotGround(op)


_BV_CMP = {
    "bvult": lambda a, b: a.value < b.value,
    "bvule": lambda a, b: a.value <= b.value,
    "bvugt": lambda a, b: a.value > b.value,
    "bvuge": lambda a, b: a.value >= b.value,
    "bvslt": lambda a, b: a.signed < b.signed,
    "bvsle": lambda a, b: a.signed <= b.signed,
    "bvsgt": lambda a, b: a.signed > b.signed,
    "bvsge": lambda a, b: a.signed >= b.signed,
}


class Evaluator:
    """Evaluate ground terms under an assignment of constants.

    `functions` maps defined function names to (param names, body).
    """

    def __init__(self, env: dict[str, Any], functions: dict | None = None):
        self.env = dict(env)
        self.functions = dict(functions or {})

    def eval(self, e: SExpr, scope: dict | None = None):
        scope = scope or {}
        if e.is_atom:
            name = symbol_name(e.atom)
            if name in scope:
                return scope[name]
            if name in self.env:
                return self.env[name]
            if name in self.functions and not self.functions[name][0]:
                return self.eval(self.functions[name][1])
            try:
                return parse_literal(e.atom)
            except ValueShapeError:
                raise NotGround(f"no value for symbol {name}") from None
        bv = _indexed_bv(e)
        if bv is not None:
            return bv
        head_expr = e[0]
        if not head_expr.is_atom:
            return self._indexed_app(head_expr, [self.eval(a, scope) for a in e.children[1:]])
        op = head_expr.atom
        if op in ("forall", "exists"):
            raise NotGround("quantified term")
        if op == "let":
            inner = dict(scope)
            for b in e[1].children:
                inner[symbol_name(b[0].atom)] = self.eval(b[1], scope)
            return self.eval(e[2], inner)
        if op == "!":
            return self.eval(e[1], scope)
        if op == "ite":
            return self.eval(e[2], scope) if self.eval(e[1], scope) else self.eval(e[3], scope)
        if op == "and":  # short-circuit keeps partial functions out of the way
            return all(self.eval(a, scope) for a in e.children[1:])
        if op == "or":
            return any(self.eval(a, scope) for a in e.children[1:])
        args = [self.eval(a, scope) for a in e.children[1:]]
        return self._apply(op, args)

    def _apply(self, op, args):
        name = symbol_name(op)
        if name in self.functions:
            params, body = self.functions[name]
            if len(params) != len(args):
                raise NotGround(f"arity mismatch calling {name}")
            return self.eval(body, dict(zip(params, args)))
        if op == "not":
            return not args[0]
        if op == "xor":
            if args and isinstance(args[0], bool):
                acc = False
                for a in args:
                    acc ^= a
                return acc
        if op == "=>":
            acc = args[-1]
            for a in reversed(args[:-1]):
                acc = (not a) or acc
            return acc
        if op == "=":
            return _chain(args, lambda a, b: a == b)
        if op == "distinct":
            return all(args[i] != args[j] for i in range(len(args)) for j in range(i + 1, len(args)))
        if op in ("+", "*") and not any(isinstance(a, BitVec) for a in args):
            acc = 0 if op == "+" else 1
            for a in args:
                acc = acc + a if op == "+" else acc * a
            return acc
        if op == "-":
            if len(args) == 1:
                return -args[0]
            acc = args[0]
            for a in args[1:]:
                acc = acc - a
            return acc
        if op == "/":
            acc = Fraction(args[0])
            for a in args[1:]:
                if a == 0:
                    raise NotGround("real division by zero is uninterpreted")
                acc /= a
            return acc
        if op in ("div", "mod"):
            q, r = _int_div(args[0], args[1])
            return q if op == "div" else r
        if op == "abs":
            return abs(args[0])
        if op in ("<", "<=", ">", ">="):
            rel = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
                   ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}[op]
            return _chain(args, rel)
        if op == "to_real":
            return Fraction(args[0])
        if op == "to_int":
            return int(args[0] // 1)
        if op == "is_int":
            return Fraction(args[0]).denominator == 1
        if op == "select":
            return args[0].select(args[1])
        if op == "store":
            return args[0].store(args[1], args[2])
        if op in _BV_CMP:
            return _BV_CMP[op](args[0], args[1])
        if op == "bvnot":
            return _bv(args[0].width, ~args[0].value)
        if op == "bvneg":
            return _bv(args[0].width, -args[0].value)
        if op == "concat":
            acc = args[0]
            for b in args[1:]:
                acc = BitVec(acc.width + b.width, (acc.value << b.width) | b.value)
            return acc
        if op == "bvcomp":
            return BitVec(1, int(args[0] == args[1]))
        if op.startswith("bv"):
            acc = args[0]
            for b in args[1:]:
                acc = _bv_binop(op, acc, b)
            return acc
        raise NotGround(f"unsupported operator {op}")

    def _indexed_app(self, head: SExpr, args):
        if head.head == "_" and len(head) >= 3:
            op = head[1].atom
            idx = [int(h.atom) for h in head.children[2:]]
            x = args[0]
            if op == "extract":
                hi, lo = idx
                return BitVec(hi - lo + 1, (x.value >> lo) & _mask(hi - lo + 1))
            if op == "zero_extend":
                return BitVec(x.width + idx[0], x.value)
            if op == "sign_extend":
                return _bv(x.width + idx[0], x.signed)
            if op == "repeat":
                out = BitVec(x.width * idx[0], 0)
                v = 0
                for _ in range(idx[0]):
                    v = (v << x.width) | x.value
                return BitVec(out.width, v)
            if op in ("rotate_left", "rotate_right"):
                w, r = x.width, idx[0] % x.width
                if op == "rotate_right":
                    r = (w - r) % w
                return _bv(w, (x.value << r) | (x.value >> (w - r)))
        if head.head == "as" and len(head) == 3 and head[1].atom == "const":
            return ArrayValue(args[0])
        raise NotGround(f"unsupported indexed operator {head}")
