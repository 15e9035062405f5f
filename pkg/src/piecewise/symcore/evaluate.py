"""Concrete and vectorised evaluation, substitution and symbol queries."""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from .expr import BinOp, Concat, Const, Extend, Ite, SExpr, Slice, Sym, UnOp, fold_bin, fold_un, mask, rebuild


def evaluate(e: SExpr, env: Mapping[str, int]) -> int:
    """Value of ``e`` with each symbol bound by name in ``env``."""
    memo: dict[int, int] = {}

    def go(x: SExpr) -> int:
        hit = memo.get(id(x))
        if hit is not None:
            return hit
        if isinstance(x, Sym):
            v = env[x.name] & mask(x.width)
        elif isinstance(x, Const):
            v = x.value
        elif isinstance(x, UnOp):
            v = fold_un(x.op, go(x.a), x.a.width)
        elif isinstance(x, BinOp):
            v = fold_bin(x.op, go(x.a), go(x.b), x.a.width)
        elif isinstance(x, Ite):
            v = go(x.t) if go(x.c) else go(x.f)
        elif isinstance(x, Slice):
            v = (go(x.a) >> x.lo) & mask(x.width)
        elif isinstance(x, Concat):
            v = 0
            for p in x.parts:
                v = (v << p.width) | go(p)
        elif isinstance(x, Extend):
            v = go(x.a)
            if x.signed and v >> (x.a.width - 1):
                v |= mask(x.width) ^ mask(x.a.width)
        else:
            raise TypeError(type(x).__name__)
        memo[id(x)] = v
        return v

    return go(e)


def _u(width: int, value: int):
    return np.uint64(value) if width <= 64 else value


def _obj(arr):
    if isinstance(arr, np.ndarray) and arr.dtype != object:
        return np.array([int(v) for v in arr.ravel()], dtype=object).reshape(arr.shape)
    if isinstance(arr, np.integer):
        return int(arr)
    return arr


def _narrow(arr, width: int):
    """Convert an object array whose values fit ``width`` <= 64 back to uint64."""
    if isinstance(arr, np.ndarray) and arr.dtype == object:
        return np.array([int(v) for v in arr.ravel()], dtype=np.uint64).reshape(arr.shape)
    if isinstance(arr, int):
        return np.uint64(arr)
    return arr


def evaluate_vec(e: SExpr, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate ``e`` elementwise over equally shaped arrays of symbol values.

    Widths up to 64 bits use ``uint64``; wider nodes fall back to object arrays
    of Python integers.
    """
    memo: dict[int, object] = {}
    shape = None
    for v in env.values():
        shape = np.shape(v)
        break

    def go(x: SExpr):
        hit = memo.get(id(x))
        if hit is not None:
            return hit
        w = x.width
        m = _u(w, mask(w))
        if isinstance(x, Sym):
            v = env[x.name]
            v = _narrow(v, w) if w <= 64 else _obj(v)
        elif isinstance(x, Const):
            v = _u(w, x.value)
        elif isinstance(x, UnOp):
            a = go(x.a)
            aw = x.a.width
            am = _u(aw, mask(aw))
            if x.op == "not":
                v = ~a & m if aw <= 64 else (am - a)
            elif x.op == "neg":
                v = (~a + np.uint64(1)) & m if aw <= 64 else (-a) & m
            elif x.op == "redand":
                v = (a == am).astype(np.uint64) if isinstance(a, np.ndarray) else np.uint64(a == am)
            elif x.op == "redor":
                v = (a != 0).astype(np.uint64) if isinstance(a, np.ndarray) else np.uint64(a != 0)
            else:
                if aw <= 64:
                    v = (np.bitwise_count(np.asarray(a, dtype=np.uint64)) & 1).astype(np.uint64)
                else:
                    v = np.vectorize(lambda t: bin(int(t)).count("1") & 1, otypes=[np.uint64])(a)
        elif isinstance(x, BinOp):
            v = _binop(x.op, go(x.a), go(x.b), x.a.width)
        elif isinstance(x, Ite):
            c = go(x.c)
            t, f = go(x.t), go(x.f)
            v = np.where(np.asarray(c) != 0, t, f)
            if w <= 64:
                v = v.astype(np.uint64)
        elif isinstance(x, Slice):
            a = go(x.a)
            if x.a.width <= 64:
                v = (a >> np.uint64(x.lo)) & m
            else:
                v = (a >> x.lo) & mask(w)
                if w <= 64:
                    v = _narrow(v, w)
        elif isinstance(x, Concat):
            if w <= 64:
                v = np.uint64(0)
                for p in x.parts:
                    v = (v << np.uint64(p.width)) | _narrow(go(p), p.width)
            else:
                v = 0
                for p in x.parts:
                    v = (_obj(v) << p.width) | _obj(go(p))
        elif isinstance(x, Extend):
            a = go(x.a)
            v = a if w <= 64 else _obj(a)
            if x.signed:
                aw = x.a.width
                fill = mask(w) ^ mask(aw)
                if w <= 64:
                    v = np.where((v >> np.uint64(aw - 1)) & np.uint64(1), v | np.uint64(fill), v)
                else:
                    v = np.where((v >> (aw - 1)) & 1, v | fill, v)
        else:
            raise TypeError(type(x).__name__)
        memo[id(x)] = v
        return v

    with np.errstate(over="ignore"):  # modular wraparound is intended
        out = go(e)
    if shape is not None:
        out = np.broadcast_to(out, shape)
    return out


def _binop(op: str, a, b, w: int):
    if w > 64:
        a, b = _obj(a), _obj(b)
        m = mask(w)
        fn = np.frompyfunc(lambda p, q: fold_bin(op, int(p), int(q), w), 2, 1)
        out = fn(a, b)
        return _narrow(out, 1) if op in ("eq", "ult", "ule") else out
    m = np.uint64(mask(w))
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    with np.errstate(over="ignore"):
        if op == "add":
            return (a + b) & m
        if op == "sub":
            return (a - b) & m
        if op == "mul":
            return (a * b) & m
        if op == "udiv":
            safe = np.where(b == 0, np.uint64(1), b)
            return np.where(b == 0, m, a // safe).astype(np.uint64)
        if op == "urem":
            safe = np.where(b == 0, np.uint64(1), b)
            return np.where(b == 0, a, a % safe).astype(np.uint64)
        if op == "and":
            return a & b
        if op == "or":
            return a | b
        if op == "xor":
            return a ^ b
        if op in ("shl", "lshr"):
            amt = np.minimum(b, np.uint64(63))
            shifted = ((a << amt) & m) if op == "shl" else (a >> amt)
            return np.where(b < np.uint64(w), shifted, np.uint64(0)).astype(np.uint64)
        if op == "eq":
            return (a == b).astype(np.uint64)
        if op == "ult":
            return (a < b).astype(np.uint64)
        if op == "ule":
            return (a <= b).astype(np.uint64)
    raise ValueError(op)


def transform(e: SExpr, leaf: Callable[[SExpr], SExpr | None]) -> SExpr:
    """Rebuild ``e`` replacing nodes for which ``leaf`` returns a value."""
    memo: dict[int, SExpr] = {}

    def go(x: SExpr) -> SExpr:
        hit = memo.get(id(x))
        if hit is not None:
            return hit
        rep = leaf(x)
        if rep is None:
            kids = x.children
            if kids:
                new = [go(c) for c in kids]
                rep = x if all(n is o for n, o in zip(new, kids)) else rebuild(x, new)
            else:
                rep = x
        memo[id(x)] = rep
        return rep

    return go(e)


def substitute(e: SExpr, mapping: Mapping[str, SExpr]) -> SExpr:
    """Replace symbols by name; replacement widths must match."""
    if not mapping:
        return e

    def leaf(x: SExpr):
        if isinstance(x, Sym):
            rep = mapping.get(x.name)
            if rep is not None:
                if rep.width != x.width:
                    raise ValueError(f"substitution for {x.name} has width {rep.width}, expected {x.width}")
                return rep
        return None

    return transform(e, leaf)


def free_symbols(e: SExpr) -> dict[str, int]:
    """Symbol name -> width for every symbol occurring in ``e``."""
    out: dict[str, int] = {}
    seen: set[int] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        if isinstance(x, Sym):
            out[x.name] = x.width
        else:
            stack.extend(x.children)
    return out


def dag_size(e: SExpr) -> int:
    seen: set[int] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if id(x) not in seen:
            seen.add(id(x))
            stack.extend(x.children)
    return len(seen)
