from __future__ import annotations

from .expr import BinOp, Concat, Const, Extend, Ite, SExpr, Slice, Sym, UnOp

_INFIX = {
    "add": "+", "sub": "-", "mul": "*", "udiv": "/", "urem": "%", "and": "&", "or": "|",
    "xor": "^", "shl": "<<", "lshr": ">>", "eq": "==", "ult": "<", "ule": "<=",
}
_PREFIX = {"not": "~", "neg": "-", "redand": "&", "redor": "|", "redxor": "^"}


def sexpr_str(e: SExpr, limit: int = 400) -> str:
    """Readable infix rendering; truncated past ``limit`` characters."""
    out = _render(e, {})
    return out if len(out) <= limit else out[: limit - 3] + "..."


def _render(e: SExpr, memo: dict[int, str]) -> str:
    hit = memo.get(id(e))
    if hit is not None:
        return hit
    if isinstance(e, Sym):
        s = e.name
    elif isinstance(e, Const):
        s = f"{e.width}'d{e.value}"
    elif isinstance(e, UnOp):
        s = f"{_PREFIX[e.op]}{_render(e.a, memo)}"
    elif isinstance(e, BinOp):
        s = f"({_render(e.a, memo)} {_INFIX[e.op]} {_render(e.b, memo)})"
    elif isinstance(e, Ite):
        s = f"({_render(e.c, memo)} ? {_render(e.t, memo)} : {_render(e.f, memo)})"
    elif isinstance(e, Slice):
        inner = _render(e.a, memo)
        s = f"{inner}[{e.hi}]" if e.hi == e.lo else f"{inner}[{e.hi}:{e.lo}]"
    elif isinstance(e, Concat):
        s = "{" + ", ".join(_render(p, memo) for p in e.parts) + "}"
    elif isinstance(e, Extend):
        s = f"{'sext' if e.signed else 'zext'}{e.width}({_render(e.a, memo)})"
    else:
        s = type(e).__name__
    if len(s) > 4000:
        s = s[:3997] + "..."
    memo[id(e)] = s
    return s
