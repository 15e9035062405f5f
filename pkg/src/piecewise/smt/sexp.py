from __future__ import annotations

from typing import Union

SExp = Union[str, list["SExp"]]


def tokenize(text: str) -> list[str]:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            out.append(ch)
            i += 1
        elif ch == "|":
            j = text.index("|", i + 1)
            out.append(text[i : j + 1])
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            out.append(text[i : j + 1])
            i = j + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()|";':
                j += 1
            out.append(text[i:j])
            i = j
    return out


def parse_all(text: str) -> list[SExp]:
    toks = tokenize(text)
    pos = 0
    out = []

    def one() -> SExp:
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t == "(":
            items = []
            while toks[pos] != ")":
                items.append(one())
            pos += 1
            return items
        if t == ")":
            raise ValueError("unbalanced ')'")
        return t

    while pos < len(toks):
        out.append(one())
    return out


def paren_depth(text: str) -> int:
    """Net open parentheses outside quoted symbols and strings."""
    depth = 0
    in_bar = in_str = False
    for ch in text:
        if in_bar:
            in_bar = ch != "|"
        elif in_str:
            in_str = ch != '"'
        elif ch == "|":
            in_bar = True
        elif ch == '"':
            in_str = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
    return depth


def bv_value(term: SExp) -> tuple[int, int] | None:
    """(value, width) of a bit-vector literal, or None."""
    if isinstance(term, str):
        if term.startswith("#b"):
            return int(term[2:], 2), len(term) - 2
        if term.startswith("#x"):
            return int(term[2:], 16), 4 * (len(term) - 2)
        return None
    if len(term) == 3 and term[0] == "_" and isinstance(term[1], str) and term[1].startswith("bv"):
        return int(term[1][2:]), int(term[2])
    return None


def unquote(sym: str) -> str:
    return sym[1:-1] if sym.startswith("|") and sym.endswith("|") else sym


def parse_model(text: str) -> dict[str, int]:
    """Constant bit-vector definitions of a ``(get-model)`` reply."""
    model: dict[str, int] = {}
    for top in parse_all(text):
        items = top if isinstance(top, list) else []
        if items and items[0] == "model":
            items = items[1:]
        for d in items:
            if not (isinstance(d, list) and len(d) == 5 and d[0] == "define-fun" and d[2] == []):
                continue
            lit = bv_value(d[4])
            if lit is not None:
                model[unquote(d[1])] = lit[0]
    return model
