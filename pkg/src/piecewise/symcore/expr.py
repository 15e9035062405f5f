"""Width-annotated symbolic bit-vector expressions.

Nodes are hash-consed: building the same expression twice returns the same
object, so equality is identity and shared subterms are stored once.  Build
nodes through the ``mk_*`` constructors, which simplify as they go.
"""

from __future__ import annotations

import weakref
from typing import Iterable, Sequence

UN_OPS = ("not", "neg", "redand", "redor", "redxor")
BIN_OPS = ("add", "sub", "mul", "udiv", "urem", "and", "or", "xor", "shl", "lshr", "eq", "ult", "ule")
PREDICATES = ("eq", "ult", "ule")

_table: "weakref.WeakValueDictionary[tuple, SExpr]" = weakref.WeakValueDictionary()


def mask(width: int) -> int:
    return (1 << width) - 1


class SExpr:
    __slots__ = ("width", "_key", "__weakref__")
    width: int

    def __new__(cls, *args):
        key = cls._intern_key(*args)
        hit = _table.get(key)
        if hit is not None:
            return hit
        obj = object.__new__(cls)
        obj._init(*args)
        obj._key = key
        _table[key] = obj
        return obj

    def __reduce__(self):
        return (type(self), self._args())

    def _args(self) -> tuple:
        raise NotImplementedError

    @property
    def children(self) -> tuple["SExpr", ...]:
        return ()

    def __repr__(self) -> str:
        from .printing import sexpr_str

        return sexpr_str(self)


class Sym(SExpr):
    __slots__ = ("name",)

    @staticmethod
    def _intern_key(name: str, width: int):
        return ("sym", name, width)

    def _init(self, name: str, width: int):
        if width < 1:
            raise ValueError("symbol width must be positive")
        self.name = name
        self.width = width

    def _args(self):
        return (self.name, self.width)


class Const(SExpr):
    __slots__ = ("value",)

    @staticmethod
    def _intern_key(value: int, width: int):
        return ("const", value & mask(width), width)

    def _init(self, value: int, width: int):
        if width < 1:
            raise ValueError("constant width must be positive")
        self.value = value & mask(width)
        self.width = width

    def _args(self):
        return (self.value, self.width)


class UnOp(SExpr):
    __slots__ = ("op", "a")

    @staticmethod
    def _intern_key(op: str, a: SExpr):
        return ("un", op, id(a))

    def _init(self, op: str, a: SExpr):
        assert op in UN_OPS, op
        self.op = op
        self.a = a
        self.width = a.width if op in ("not", "neg") else 1

    def _args(self):
        return (self.op, self.a)

    @property
    def children(self):
        return (self.a,)


class BinOp(SExpr):
    __slots__ = ("op", "a", "b")

    @staticmethod
    def _intern_key(op: str, a: SExpr, b: SExpr):
        return ("bin", op, id(a), id(b))

    def _init(self, op: str, a: SExpr, b: SExpr):
        assert op in BIN_OPS, op
        if a.width != b.width:
            raise ValueError(f"{op} operands differ in width: {a.width} vs {b.width}")
        self.op = op
        self.a = a
        self.b = b
        self.width = 1 if op in PREDICATES else a.width

    def _args(self):
        return (self.op, self.a, self.b)

    @property
    def children(self):
        return (self.a, self.b)


class Ite(SExpr):
    __slots__ = ("c", "t", "f")

    @staticmethod
    def _intern_key(c, t, f):
        return ("ite", id(c), id(t), id(f))

    def _init(self, c: SExpr, t: SExpr, f: SExpr):
        if c.width != 1:
            raise ValueError("ite condition must be 1 bit")
        if t.width != f.width:
            raise ValueError("ite arms differ in width")
        self.c, self.t, self.f = c, t, f
        self.width = t.width

    def _args(self):
        return (self.c, self.t, self.f)

    @property
    def children(self):
        return (self.c, self.t, self.f)


class Slice(SExpr):
    __slots__ = ("a", "hi", "lo")

    @staticmethod
    def _intern_key(a, hi, lo):
        return ("slice", id(a), hi, lo)

    def _init(self, a: SExpr, hi: int, lo: int):
        if not 0 <= lo <= hi < a.width:
            raise ValueError(f"bad slice [{hi}:{lo}] of width {a.width}")
        self.a, self.hi, self.lo = a, hi, lo
        self.width = hi - lo + 1

    def _args(self):
        return (self.a, self.hi, self.lo)

    @property
    def children(self):
        return (self.a,)


class Concat(SExpr):
    """Most significant part first."""

    __slots__ = ("parts",)

    @staticmethod
    def _intern_key(parts):
        return ("concat",) + tuple(id(p) for p in parts)

    def _init(self, parts: tuple[SExpr, ...]):
        if len(parts) < 2:
            raise ValueError("concat needs at least two parts")
        self.parts = tuple(parts)
        self.width = sum(p.width for p in parts)

    def _args(self):
        return (self.parts,)

    @property
    def children(self):
        return self.parts


class Extend(SExpr):
    __slots__ = ("a", "signed")

    @staticmethod
    def _intern_key(a, width, signed=False):
        return ("ext", id(a), width, signed)

    def _init(self, a: SExpr, width: int, signed: bool = False):
        if width <= a.width:
            raise ValueError("extension must widen")
        self.a, self.signed = a, signed
        self.width = width

    def _args(self):
        return (self.a, self.width, self.signed)

    @property
    def children(self):
        return (self.a,)


TRUE = Const(1, 1)
FALSE = Const(0, 1)


def const(value: int, width: int) -> Const:
    return Const(value, width)


# -- smart constructors -----------------------------------------------------


def _ones(e: SExpr) -> bool:
    return isinstance(e, Const) and e.value == mask(e.width)


def _zero(e: SExpr) -> bool:
    return isinstance(e, Const) and e.value == 0


def _is_not_of(a: SExpr, b: SExpr) -> bool:
    return isinstance(a, UnOp) and a.op == "not" and a.a is b


def fold_un(op: str, v: int, w: int) -> int:
    m = mask(w)
    if op == "not":
        return ~v & m
    if op == "neg":
        return -v & m
    if op == "redand":
        return int(v == m)
    if op == "redor":
        return int(v != 0)
    if op == "redxor":
        return bin(v).count("1") & 1
    raise ValueError(op)


def fold_bin(op: str, a: int, b: int, w: int) -> int:
    m = mask(w)
    if op == "add":
        return (a + b) & m
    if op == "sub":
        return (a - b) & m
    if op == "mul":
        return (a * b) & m
    if op == "udiv":
        return a // b if b else m
    if op == "urem":
        return a % b if b else a
    if op == "and":
        return a & b
    if op == "or":
        return a | b
    if op == "xor":
        return a ^ b
    if op == "shl":
        return (a << b) & m if b < w else 0
    if op == "lshr":
        return a >> b if b < w else 0
    if op == "eq":
        return int(a == b)
    if op == "ult":
        return int(a < b)
    if op == "ule":
        return int(a <= b)
    raise ValueError(op)


def mk_un(op: str, a: SExpr) -> SExpr:
    if isinstance(a, Const):
        return Const(fold_un(op, a.value, a.width), a.width if op in ("not", "neg") else 1)
    if op in ("not", "neg") and isinstance(a, UnOp) and a.op == op:
        return a.a
    if op in ("redand", "redor", "redxor") and a.width == 1:
        return a
    if op == "redor" and isinstance(a, Extend):
        return mk_un("redor", a.a)
    if op == "not" and a.width == 1 and isinstance(a, BinOp) and a.op == "ult":
        return BinOp("ule", a.b, a.a)
    return UnOp(op, a)


def mk_bin(op: str, a: SExpr, b: SExpr) -> SExpr:
    if op not in ("shl", "lshr"):
        w = max(a.width, b.width)
        a, b = zext(a, w), zext(b, w)
    w = a.width
    if op in ("shl", "lshr"):
        if isinstance(b, Const):
            if b.value == 0:
                return a
            if b.value >= w:
                return Const(0, w)
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(fold_bin(op, a.value, b.value, w), w)
        if _zero(a):
            return a
        return _shift_node(op, a, b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(fold_bin(op, a.value, b.value, w), 1 if op in PREDICATES else w)
    if op in ("and", "or", "xor", "add", "mul", "eq") and isinstance(a, Const):
        a, b = b, a  # constants on the right
    if op == "and":
        if _zero(b):
            return b
        if _ones(b) or a is b:
            return a
        if _is_not_of(a, b) or _is_not_of(b, a):
            return Const(0, w)
    elif op == "or":
        if _zero(b) or a is b:
            return a
        if _ones(b):
            return b
        if _is_not_of(a, b) or _is_not_of(b, a):
            return Const(mask(w), w)
    elif op == "xor":
        if a is b:
            return Const(0, w)
        if _zero(b):
            return a
        if _ones(b):
            return mk_un("not", a)
    elif op == "add":
        if _zero(b):
            return a
    elif op == "sub":
        if _zero(b):
            return a
        if a is b:
            return Const(0, w)
    elif op == "mul":
        if _zero(b):
            return b
        if isinstance(b, Const) and b.value == 1:
            return a
    elif op == "udiv":
        if isinstance(b, Const) and b.value == 1:
            return a
    elif op == "urem":
        if isinstance(b, Const) and b.value == 1:
            return Const(0, w)
    elif op == "eq":
        if a is b:
            return TRUE
        if w == 1 and isinstance(b, Const):
            return a if b.value else mk_un("not", a)
    elif op == "ult":
        if a is b or _zero(b):
            return FALSE
    elif op == "ule":
        if a is b or _zero(a) or _ones(b):
            return TRUE
    return BinOp(op, a, b)


def _shift_node(op: str, a: SExpr, b: SExpr) -> SExpr:
    # Shift amounts keep their own width; widen the narrower side so the node
    # is well formed, then cut back to the operand width.
    if b.width == a.width:
        return BinOp(op, a, b)
    if b.width < a.width:
        return BinOp(op, a, zext(b, a.width))
    wide = BinOp(op, zext(a, b.width), b)
    return mk_slice(wide, a.width - 1, 0)


def mk_ite(c: SExpr, t: SExpr, f: SExpr) -> SExpr:
    c = to_bool(c)
    w = max(t.width, f.width)
    t, f = zext(t, w), zext(f, w)
    if isinstance(c, Const):
        return t if c.value else f
    if t is f:
        return t
    if w == 1 and isinstance(t, Const) and isinstance(f, Const):
        return c if t.value else mk_un("not", c)
    if isinstance(c, UnOp) and c.op == "not":
        return mk_ite(c.a, f, t)
    return Ite(c, t, f)


def mk_slice(a: SExpr, hi: int, lo: int) -> SExpr:
    if lo == 0 and hi == a.width - 1:
        return a
    if isinstance(a, Const):
        return Const(a.value >> lo, hi - lo + 1)
    if isinstance(a, Slice):
        return mk_slice(a.a, a.lo + hi, a.lo + lo)
    if isinstance(a, Extend) and not a.signed:
        inner = a.a.width
        if hi < inner:
            return mk_slice(a.a, hi, lo)
        if lo >= inner:
            return Const(0, hi - lo + 1)
        return zext(mk_slice(a.a, inner - 1, lo), hi - lo + 1)
    if isinstance(a, Concat):
        pos = a.width
        picked = []
        for p in a.parts:
            top, bot = pos - 1, pos - p.width
            pos = bot
            if bot > hi or top < lo:
                continue
            picked.append(mk_slice(p, min(top, hi) - bot, max(bot, lo) - bot))
        return mk_concat(picked)
    return Slice(a, hi, lo)


def mk_concat(parts: Iterable[SExpr]) -> SExpr:
    flat: list[SExpr] = []
    for p in parts:
        items = p.parts if isinstance(p, Concat) else (p,)
        for q in items:
            if flat and isinstance(q, Const) and isinstance(flat[-1], Const):
                prev = flat.pop()
                q = Const((prev.value << q.width) | q.value, prev.width + q.width)
            flat.append(q)
    if not flat:
        raise ValueError("empty concatenation")
    if len(flat) == 1:
        return flat[0]
    if isinstance(flat[0], Const) and flat[0].value == 0:
        rest = flat[1:]
        return zext(rest[0] if len(rest) == 1 else Concat(tuple(rest)), sum(p.width for p in flat))
    return Concat(tuple(flat))


def zext(a: SExpr, width: int) -> SExpr:
    if width == a.width:
        return a
    if width < a.width:
        raise ValueError("zext cannot narrow")
    if isinstance(a, Const):
        return Const(a.value, width)
    if isinstance(a, Extend) and not a.signed:
        return Extend(a.a, width, False)
    return Extend(a, width, False)


def resize(a: SExpr, width: int) -> SExpr:
    """Truncate or zero-extend to ``width`` (assignment semantics)."""
    if width < a.width:
        return mk_slice(a, width - 1, 0)
    return zext(a, width)


def to_bool(a: SExpr) -> SExpr:
    return a if a.width == 1 else mk_un("redor", a)


def mk_not1(a: SExpr) -> SExpr:
    return mk_un("not", to_bool(a))


def mk_and1(items: Sequence[SExpr]) -> SExpr:
    out = TRUE
    for x in items:
        out = mk_bin("and", out, to_bool(x))
    return out


def mk_or1(items: Sequence[SExpr]) -> SExpr:
    out = FALSE
    for x in items:
        out = mk_bin("or", out, to_bool(x))
    return out


def mk_eq(a: SExpr, b: SExpr) -> SExpr:
    return mk_bin("eq", a, b)


def simplify(e: SExpr) -> SExpr:
    """Rebuild ``e`` bottom-up through the simplifying constructors."""
    memo: dict[int, SExpr] = {}

    def go(x: SExpr) -> SExpr:
        hit = memo.get(id(x))
        if hit is not None:
            return hit
        out = rebuild(x, [go(c) for c in x.children])
        memo[id(x)] = out
        return out

    return go(e)


def rebuild(x: SExpr, kids: list[SExpr]) -> SExpr:
    if isinstance(x, (Sym, Const)):
        return x
    if isinstance(x, UnOp):
        return mk_un(x.op, kids[0])
    if isinstance(x, BinOp):
        return mk_bin(x.op, kids[0], kids[1])
    if isinstance(x, Ite):
        return mk_ite(*kids)
    if isinstance(x, Slice):
        return mk_slice(kids[0], x.hi, x.lo)
    if isinstance(x, Concat):
        return mk_concat(kids)
    if isinstance(x, Extend):
        return Extend(kids[0], x.width, True) if x.signed else zext(kids[0], x.width)
    raise TypeError(type(x).__name__)
