"""Recursive-descent parser for the supported Verilog-2005 subset."""

from __future__ import annotations

from ..errors import SyntaxError_, UnsupportedConstruct
from . import ast as A
from .lexer import Token, tokenize

BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4, "^~": 4, "~^": 4,
    "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "<<<": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
UNARY_OPS = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"}

_UNSUPPORTED_ITEMS = {
    "initial": "initial block",
    "generate": "generate block",
    "function": "function",
    "task": "task",
    "inout": "inout port",
    "always_ff": "SystemVerilog always_ff",
    "always_comb": "SystemVerilog always_comb",
    "logic": "SystemVerilog logic",
    "real": "real variable",
    "time": "time variable",
    "tri": "tri net",
    "supply0": "supply net",
    "supply1": "supply net",
}
_UNSUPPORTED_STMTS = {
    "casex": "casex statement",
    "casez": "casez statement",
    "while": "while loop",
    "repeat": "repeat loop",
    "forever": "forever loop",
    "wait": "wait statement",
    "fork": "fork/join",
    "force": "force statement",
    "release": "release statement",
    "deassign": "deassign statement",
    "disable": "disable statement",
}


class Parser:
    def __init__(self, source: str, allow_hierarchical: bool = False):
        self.toks = tokenize(source)
        self.pos = 0
        self.allow_hier = allow_hierarchical

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    @property
    def prev(self) -> Token:
        return self.toks[self.pos - 1]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, *texts: str) -> Token:
        if self.at(*texts):
            return self.advance()
        self.error(f"unexpected {self.describe(self.tok)}", texts)

    def expect_ident(self) -> Token:
        if self.tok.kind == "ident":
            return self.advance()
        self.error(f"unexpected {self.describe(self.tok)}", ("identifier",))

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def error(self, msg: str, expected=()):
        raise SyntaxError_(msg, self.tok.line, self.tok.col, tuple(expected))

    def unsupported(self, what: str, t: Token | None = None):
        t = t or self.tok
        raise UnsupportedConstruct(what, t.line, t.col)

    def span_from(self, start: Token) -> A.Span:
        end = self.prev
        return A.Span(start.line, start.col, end.end_line, end.end_col)

    # -- design --------------------------------------------------------------

    def parse_design(self) -> A.DesignAst:
        start = self.tok
        modules = []
        while self.tok.kind != "eof":
            modules.append(self.parse_module())
        span = self.span_from(start) if modules else A.Span(1, 1, 1, 1)
        return A.DesignAst(tuple(modules), span=span)

    def parse_module(self) -> A.ModuleDecl:
        start = self.expect("module")
        name = self.expect_ident().text
        items: list[A.Node] = []
        port_order: list[str] = []
        ansi = True
        if self.accept("#"):
            self.expect("(")
            if not self.at(")"):
                items.extend(self.parse_param_port_list())
            self.expect(")")
        if self.accept("("):
            if self.at("input", "output", "inout"):
                ports = self.parse_ansi_ports()
                items.extend(ports)
                port_order = [p.name for p in ports]
            elif not self.at(")"):
                ansi = False
                port_order.append(self.expect_ident().text)
                while self.accept(","):
                    port_order.append(self.expect_ident().text)
            self.expect(")")
        self.expect(";")
        while not self.at("endmodule"):
            if self.tok.kind == "eof":
                self.error("unexpected end of input", ("endmodule",))
            items.extend(self.parse_item())
        self.expect("endmodule")
        return A.ModuleDecl(name, tuple(port_order), ansi, tuple(items), span=self.span_from(start))

    def parse_param_port_list(self) -> list[A.ParamDecl]:
        out = []
        while True:
            self.accept("parameter")
            if self.at("["):
                self.parse_range()
            start = self.tok
            pname = self.expect_ident().text
            self.expect("=")
            value = self.parse_expr()
            out.append(A.ParamDecl(pname, value, False, span=self.span_from(start)))
            if not self.accept(","):
                return out

    def parse_ansi_ports(self) -> list[A.Port]:
        ports = []
        direction, is_reg, rng = None, False, None
        while True:
            start = self.tok
            if self.at("inout"):
                self.unsupported("inout port")
            if self.at("input", "output"):
                direction = self.advance().text
                is_reg = False
                rng = None
                if self.at("wire"):
                    self.advance()
                elif self.at("reg"):
                    self.advance()
                    is_reg = True
                if self.at("signed"):
                    self.unsupported("signed net")
                if self.at("["):
                    rng = self.parse_range()
            name = self.expect_ident().text
            init = None
            if self.accept("="):
                init = self.parse_expr()
            ports.append(A.Port(name, direction, rng, is_reg, init, span=self.span_from(start)))
            if not self.accept(","):
                return ports

    def parse_range(self) -> A.Range:
        start = self.expect("[")
        msb = self.parse_expr()
        self.expect(":")
        lsb = self.parse_expr()
        self.expect("]")
        return A.Range(msb, lsb, span=self.span_from(start))

    def parse_item(self) -> list[A.Node]:
        t = self.tok
        if t.kind == "kw" and t.text in _UNSUPPORTED_ITEMS:
            self.unsupported(_UNSUPPORTED_ITEMS[t.text])
        if self.at("input", "output"):
            return self.parse_port_decl()
        if self.at("wire", "reg"):
            return self.parse_net_decl()
        if self.at("integer", "genvar"):
            kind = self.advance().text
            out = []
            while True:
                s = self.tok
                out.append(A.NetDecl(kind, self.expect_ident().text, span=self.span_from(s)))
                if not self.accept(","):
                    break
            self.expect(";")
            return out
        if self.at("parameter", "localparam"):
            local = self.advance().text == "localparam"
            if self.at("signed"):
                self.unsupported("signed parameter")
            if self.at("["):
                self.parse_range()
            out = []
            while True:
                s = self.tok
                pname = self.expect_ident().text
                self.expect("=")
                out.append(A.ParamDecl(pname, self.parse_expr(), local, span=self.span_from(s)))
                if not self.accept(","):
                    break
            self.expect(";")
            return out
        if self.at("assign"):
            self.advance()
            out = []
            while True:
                s = self.tok
                lhs = self.parse_lvalue()
                self.expect("=")
                rhs = self.parse_expr()
                out.append(A.ContAssign(lhs, rhs, span=self.span_from(s)))
                if not self.accept(","):
                    break
            self.expect(";")
            return out
        if self.at("always"):
            return [self.parse_always()]
        if t.kind == "ident":
            return self.parse_instances()
        if self.at("assert"):
            self.unsupported("inline assertion")
        self.error(f"unexpected {self.describe(t)}", ("module item",))

    def parse_port_decl(self) -> list[A.Node]:
        start = self.tok
        direction = self.advance().text
        is_reg = False
        if self.at("wire"):
            self.advance()
        elif self.at("reg"):
            self.advance()
            is_reg = True
        if self.at("signed"):
            self.unsupported("signed net")
        rng = self.parse_range() if self.at("[") else None
        out = []
        while True:
            s = self.tok if out else start
            name = self.expect_ident().text
            init = self.parse_expr() if self.accept("=") else None
            out.append(A.Port(name, direction, rng, is_reg, init, span=self.span_from(s)))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def parse_net_decl(self) -> list[A.Node]:
        start = self.tok
        kind = self.advance().text
        if self.at("signed"):
            self.unsupported("signed net")
        rng = self.parse_range() if self.at("[") else None
        out = []
        while True:
            s = self.tok if out else start
            name = self.expect_ident().text
            if self.at("["):
                self.unsupported("memory declaration")
            init = self.parse_expr() if self.accept("=") else None
            out.append(A.NetDecl(kind, name, rng, init, span=self.span_from(s)))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def parse_always(self) -> A.Always:
        start = self.expect("always")
        if not self.at("@"):
            self.unsupported("always block without sensitivity list")
        self.advance()
        if self.at("*"):
            self.unsupported("level-sensitive always block")
        self.expect("(")
        if self.at("*"):
            self.unsupported("level-sensitive always block")
        if self.at("negedge"):
            self.unsupported("negedge sensitivity")
        if not self.at("posedge"):
            self.unsupported("level-sensitive always block")
        self.advance()
        clock = self.expect_ident().text
        if self.at("or", ","):
            self.unsupported("multiple edges in sensitivity list")
        self.expect(")")
        body = self.parse_stmt()
        return A.Always(clock, body, "posedge", span=self.span_from(start))

    def parse_instances(self) -> list[A.Instance]:
        start = self.tok
        module = self.expect_ident().text
        params: list[A.ParamOverride] = []
        if self.accept("#"):
            self.expect("(")
            if not self.at(")"):
                while True:
                    s = self.tok
                    if self.accept("."):
                        pname = self.expect_ident().text
                        self.expect("(")
                        val = self.parse_expr()
                        self.expect(")")
                        params.append(A.ParamOverride(pname, val, span=self.span_from(s)))
                    else:
                        params.append(A.ParamOverride(None, self.parse_expr(), span=self.span_from(s)))
                    if not self.accept(","):
                        break
            self.expect(")")
        out = []
        while True:
            s = self.tok if out else start
            name = self.expect_ident().text
            if self.at("["):
                self.unsupported("instance array")
            self.expect("(")
            conns = []
            if not self.at(")"):
                while True:
                    cs = self.tok
                    if not self.at("."):
                        self.unsupported("positional port connection")
                    self.advance()
                    port = self.expect_ident().text
                    self.expect("(")
                    expr = None if self.at(")") else self.parse_expr()
                    self.expect(")")
                    conns.append(A.Connection(port, expr, span=self.span_from(cs)))
                    if not self.accept(","):
                        break
            self.expect(")")
            out.append(A.Instance(module, name, tuple(params), tuple(conns), span=self.span_from(s)))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    # -- statements ----------------------------------------------------------

    def parse_stmt(self) -> A.Stmt:
        t = self.tok
        if t.kind == "kw" and t.text in _UNSUPPORTED_STMTS:
            self.unsupported(_UNSUPPORTED_STMTS[t.text])
        if self.at("#"):
            self.unsupported("delay control")
        if self.at("@"):
            self.unsupported("event control inside procedural code")
        if self.at("begin"):
            self.advance()
            label = None
            if self.accept(":"):
                label = self.expect_ident().text
            stmts = []
            while not self.at("end"):
                if self.tok.kind == "eof":
                    self.error("unexpected end of input", ("end",))
                stmts.append(self.parse_stmt())
            self.expect("end")
            return A.Block(tuple(stmts), label, span=self.span_from(t))
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt()
            else_ = self.parse_stmt() if self.accept("else") else None
            return A.If(cond, then, else_, span=self.span_from(t))
        if self.at("case"):
            return self.parse_case()
        if self.at("for"):
            self.advance()
            self.expect("(")
            var = self.expect_ident().text
            self.expect("=")
            init = self.parse_expr()
            self.expect(";")
            cond = self.parse_expr()
            self.expect(";")
            var2 = self.expect_ident()
            if var2.text != var:
                raise UnsupportedConstruct("for loop stepping a different variable", var2.line, var2.col)
            self.expect("=")
            step = self.parse_expr()
            self.expect(")")
            body = self.parse_stmt()
            return A.For(var, init, cond, step, body, span=self.span_from(t))
        if self.accept(";"):
            return A.NullStmt(span=self.span_from(t))
        if t.kind == "ident" or self.at("{"):
            lhs = self.parse_lvalue()
            if self.at("<="):
                self.advance()
                if self.at("#"):
                    self.unsupported("intra-assignment delay")
                rhs = self.parse_expr()
                self.expect(";")
                return A.ProcAssign(lhs, rhs, False, span=self.span_from(t))
            if self.at("="):
                self.advance()
                if self.at("#"):
                    self.unsupported("intra-assignment delay")
                rhs = self.parse_expr()
                self.expect(";")
                return A.ProcAssign(lhs, rhs, True, span=self.span_from(t))
            self.error(f"unexpected {self.describe(self.tok)}", ("<=", "="))
        self.error(f"unexpected {self.describe(t)}", ("statement",))

    def parse_case(self) -> A.Case:
        start = self.expect("case")
        self.expect("(")
        selector = self.parse_expr()
        self.expect(")")
        items = []
        default = None
        while not self.at("endcase"):
            s = self.tok
            if self.at("default"):
                self.advance()
                self.accept(":")
                if default is not None:
                    self.error("duplicate default arm")
                default = self.parse_stmt()
                continue
            labels = [self.parse_expr()]
            while self.accept(","):
                labels.append(self.parse_expr())
            self.expect(":")
            body = self.parse_stmt()
            items.append(A.CaseItem(tuple(labels), body, span=self.span_from(s)))
        self.expect("endcase")
        return A.Case(selector, tuple(items), default, span=self.span_from(start))

    def parse_lvalue(self) -> A.Expr:
        if self.at("{"):
            self.unsupported("concatenation on left-hand side")
        start = self.tok
        name = self.expect_ident().text
        return self.parse_selects(A.Ident(name, span=self.span_from(start)), start)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> A.Expr:
        start = self.tok
        cond = self.parse_binary(1)
        if self.accept("?"):
            then = self.parse_expr()
            self.expect(":")
            else_ = self.parse_expr()
            return A.Ternary(cond, then, else_, span=self.span_from(start))
        return cond

    def parse_binary(self, min_prec: int) -> A.Expr:
        start = self.tok
        left = self.parse_unary()
        while True:
            t = self.tok
            if t.kind != "op":
                return left
            if t.text == "**":
                self.unsupported("power operator")
            prec = BINARY_PRECEDENCE.get(t.text)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            right = self.parse_binary(prec + 1)
            left = A.Binary(t.text, left, right, span=self.span_from(start))

    def parse_unary(self) -> A.Expr:
        t = self.tok
        if t.kind == "op" and t.text in UNARY_OPS:
            self.advance()
            operand = self.parse_unary()
            return A.Unary(t.text, operand, span=self.span_from(t))
        return self.parse_primary()

    def parse_primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "number":
            self.advance()
            value, width = t.value
            return A.Number(value, width, span=self.span_from(t))
        if t.kind == "ident":
            self.advance()
            name = t.text
            while self.at(".") and self.peek().kind == "ident":
                if not self.allow_hier:
                    self.unsupported("hierarchical reference")
                self.advance()
                name += "." + self.advance().text
            return self.parse_selects(A.Ident(name, span=self.span_from(t)), t)
        if self.accept("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        if self.accept("{"):
            first = self.parse_expr()
            if self.at("{"):
                self.advance()
                parts = [self.parse_expr()]
                while self.accept(","):
                    parts.append(self.parse_expr())
                self.expect("}")
                self.expect("}")
                return A.Repeat(first, tuple(parts), span=self.span_from(t))
            parts = [first]
            while self.accept(","):
                parts.append(self.parse_expr())
            self.expect("}")
            return A.Concat(tuple(parts), span=self.span_from(t))
        self.error(f"unexpected {self.describe(t)}", ("expression",))

    def parse_selects(self, base: A.Expr, start: Token) -> A.Expr:
        if not self.at("["):
            return base
        self.advance()
        first = self.parse_expr()
        if self.accept(":"):
            lsb = self.parse_expr()
            self.expect("]")
            node = A.PartSelect(base, first, lsb, span=self.span_from(start))
        elif self.at("+:", "-:"):
            op = self.advance().text
            width = self.parse_expr()
            self.expect("]")
            one = A.Number(1, None)
            if op == "+:":
                msb = A.Binary("-", A.Binary("+", first, width), one)
                node = A.PartSelect(base, msb, first, span=self.span_from(start))
            else:
                lsb = A.Binary("+", A.Binary("-", first, width), one)
                node = A.PartSelect(base, first, lsb, span=self.span_from(start))
        else:
            self.expect("]")
            node = A.Index(base, first, span=self.span_from(start))
        if self.at("["):
            self.unsupported("multi-dimensional select")
        return node

    def at_eof(self) -> bool:
        return self.tok.kind == "eof"


def parse_design(source_text: str) -> A.DesignAst:
    """Parse Verilog source text into a :class:`DesignAst`."""
    return Parser(source_text).parse_design()


def parse_expression(text: str, allow_hierarchical: bool = True) -> A.Expr:
    p = Parser(text, allow_hierarchical)
    e = p.parse_expr()
    if not p.at_eof():
        p.error(f"unexpected {p.describe(p.tok)}", ("end of expression",))
    return e
