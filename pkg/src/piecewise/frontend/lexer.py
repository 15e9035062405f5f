from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import SyntaxError_, UnsupportedConstruct

KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "integer", "genvar",
    "parameter", "localparam", "assign", "always", "posedge", "negedge", "or", "begin", "end",
    "if", "else", "case", "casex", "casez", "endcase", "default", "for", "initial", "generate",
    "endgenerate", "function", "endfunction", "task", "endtask", "signed", "while", "repeat",
    "forever", "logic", "tri", "supply0", "supply1", "real", "time", "always_ff", "always_comb",
    "assert", "property", "wait", "fork", "join", "deassign", "force", "release", "disable",
}

# Order matters: longest operators first.
_OPS = [
    "<<<", ">>>", "===", "!==", "|->", "~&", "~|", "~^", "^~", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "+:", "-:", "**", "(", ")", "[", "]", "{", "}", ";", ",", ".", ":", "?", "@", "#",
    "=", "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "<", ">",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<directive>`[A-Za-z_]\w*[^\n]*)
  | (?P<based>(?:\d[\d_]*)?\s*'[sS]?[bBoOdDhH]\s*[0-9a-fA-FxXzZ?_]+)
  | (?P<number>\d[\d_]*)
  | (?P<sysname>\$[A-Za-z_]\w*)
  | (?P<ident>[A-Za-z_][\w$]*)
  | (?P<op>"""
    + "|".join(re.escape(o) for o in _OPS)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "kw" | "number" | "op" | "eof"
    text: str
    line: int
    col: int
    end_line: int
    end_col: int
    value: object = None  # (value, width) for numbers


_BASES = {"b": 2, "o": 8, "d": 10, "h": 16}


def _parse_based(text: str, line: int, col: int) -> tuple[int, int | None]:
    m = re.fullmatch(r"(\d[\d_]*)?\s*'([sS]?)([bBoOdDhH])\s*([0-9a-fA-FxXzZ?_]+)", text)
    assert m is not None
    size, signed, base, digits = m.groups()
    if signed:
        raise UnsupportedConstruct("signed literal", line, col)
    digits = digits.replace("_", "")
    if re.search(r"[xXzZ?]", digits):
        raise UnsupportedConstruct("x/z literal", line, col)
    try:
        value = int(digits, _BASES[base.lower()])
    except ValueError:
        raise SyntaxError_(f"bad literal {text!r}", line, col) from None
    width = int(size.replace("_", "")) if size else None
    if width is not None:
        if width < 1:
            raise SyntaxError_(f"zero-width literal {text!r}", line, col)
        value &= (1 << width) - 1
    return value, width


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise SyntaxError_(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        start_line = line
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        end_col = (m.end() - line_start) + 1 if newlines else col + len(text)
        pos = m.end()
        if kind in ("ws", "nl", "lcomment", "bcomment"):
            continue
        if kind == "directive":
            if text.startswith("`timescale"):
                continue
            raise UnsupportedConstruct("compiler directive " + text.split()[0], start_line, col)
        if kind == "sysname":
            raise UnsupportedConstruct("system task " + text, start_line, col)
        if kind == "based":
            tokens.append(Token("number", text, start_line, col, line, end_col, _parse_based(text, start_line, col)))
        elif kind == "number":
            tokens.append(Token("number", text, start_line, col, line, end_col, (int(text.replace("_", "")), None)))
        elif kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, start_line, col, line, end_col))
        else:
            tokens.append(Token("op", text, start_line, col, line, end_col))
    tokens.append(Token("eof", "", line, pos - line_start + 1, line, pos - line_start + 1))
    return tokens
