"""Source printer for the AST.  Output re-parses to a structurally equal tree."""

from __future__ import annotations

from . import ast as A


def expr_str(e: A.Expr) -> str:
    if isinstance(e, A.Ident):
        return e.name
    if isinstance(e, A.Number):
        return str(e.value) if e.width is None else f"{e.width}'d{e.value}"
    if isinstance(e, A.Unary):
        return f"({e.op}{expr_str(e.operand)})"
    if isinstance(e, A.Binary):
        return f"({expr_str(e.left)} {e.op} {expr_str(e.right)})"
    if isinstance(e, A.Ternary):
        return f"({expr_str(e.cond)} ? {expr_str(e.then)} : {expr_str(e.else_)})"
    if isinstance(e, A.Index):
        return f"{expr_str(e.base)}[{expr_str(e.index)}]"
    if isinstance(e, A.PartSelect):
        return f"{expr_str(e.base)}[{expr_str(e.msb)}:{expr_str(e.lsb)}]"
    if isinstance(e, A.Concat):
        return "{" + ", ".join(expr_str(p) for p in e.parts) + "}"
    if isinstance(e, A.Repeat):
        return "{" + expr_str(e.count) + "{" + ", ".join(expr_str(p) for p in e.parts) + "}}"
    raise TypeError(type(e).__name__)


def _range(r: A.Range | None) -> str:
    return f"[{expr_str(r.msb)}:{expr_str(r.lsb)}] " if r is not None else ""


def stmt_lines(s: A.Stmt, indent: int = 1) -> list[str]:
    pad = "    " * indent
    if isinstance(s, A.Block):
        head = f"{pad}begin" + (f" : {s.label}" if s.label else "")
        body = [line for st in s.stmts for line in stmt_lines(st, indent + 1)]
        return [head, *body, f"{pad}end"]
    if isinstance(s, A.If):
        out = [f"{pad}if ({expr_str(s.cond)})", *stmt_lines(s.then, indent + 1)]
        if s.else_ is not None:
            out += [f"{pad}else", *stmt_lines(s.else_, indent + 1)]
        return out
    if isinstance(s, A.Case):
        out = [f"{pad}case ({expr_str(s.selector)})"]
        for item in s.items:
            out.append(pad + "    " + ", ".join(expr_str(lbl) for lbl in item.labels) + " :")
            out += stmt_lines(item.body, indent + 2)
        if s.default is not None:
            out.append(pad + "    default :")
            out += stmt_lines(s.default, indent + 2)
        out.append(f"{pad}endcase")
        return out
    if isinstance(s, A.For):
        head = f"{pad}for ({s.var} = {expr_str(s.init)}; {expr_str(s.cond)}; {s.var} = {expr_str(s.step)})"
        return [head, *stmt_lines(s.body, indent + 1)]
    if isinstance(s, A.ProcAssign):
        op = "=" if s.blocking else "<="
        return [f"{pad}{expr_str(s.lhs)} {op} {expr_str(s.rhs)};"]
    if isinstance(s, A.NullStmt):
        return [f"{pad};"]
    raise TypeError(type(s).__name__)


def module_str(m: A.ModuleDecl) -> str:
    lines = []
    header = f"module {m.name}"
    # Parameters ahead of every port came from a ``#(...)`` header.
    lead = 0
    while lead < len(m.items) and isinstance(m.items[lead], A.ParamDecl) and not m.items[lead].local:
        lead += 1
    if lead and m.ports:
        header += " #(" + ", ".join(f"parameter {p.name} = {expr_str(p.value)}" for p in m.items[:lead]) + ")"
    else:
        lead = 0
    if m.ansi and m.ports:
        decls = []
        for p in m.ports:
            kind = "reg " if p.is_reg else ""
            init = f" = {expr_str(p.init)}" if p.init is not None else ""
            decls.append(f"    {p.direction} {kind}{_range(p.range)}{p.name}{init}")
        header += " (\n" + ",\n".join(decls) + "\n)"
    elif m.port_order:
        header += " (" + ", ".join(m.port_order) + ")"
    lines.append(header + ";")
    for item in m.items[lead:]:
        if isinstance(item, A.Port):
            if m.ansi:
                continue
            kind = "reg " if item.is_reg else ""
            init = f" = {expr_str(item.init)}" if item.init is not None else ""
            lines.append(f"    {item.direction} {kind}{_range(item.range)}{item.name}{init};")
        elif isinstance(item, A.NetDecl):
            if item.kind in ("integer", "genvar"):
                lines.append(f"    {item.kind} {item.name};")
            else:
                init = f" = {expr_str(item.init)}" if item.init is not None else ""
                lines.append(f"    {item.kind} {_range(item.range)}{item.name}{init};")
        elif isinstance(item, A.ParamDecl):
            kw = "localparam" if item.local else "parameter"
            lines.append(f"    {kw} {item.name} = {expr_str(item.value)};")
        elif isinstance(item, A.ContAssign):
            lines.append(f"    assign {expr_str(item.lhs)} = {expr_str(item.rhs)};")
        elif isinstance(item, A.Always):
            lines.append(f"    always @(posedge {item.clock})")
            lines.extend(stmt_lines(item.body, 2))
        elif isinstance(item, A.Instance):
            ov = ""
            if item.params:
                parts = [
                    (f".{p.name}({expr_str(p.value)})" if p.name is not None else expr_str(p.value))
                    for p in item.params
                ]
                ov = " #(" + ", ".join(parts) + ")"
            conns = ", ".join(
                f".{c.port}({expr_str(c.expr) if c.expr is not None else ''})" for c in item.connections
            )
            lines.append(f"    {item.module}{ov} {item.name} ({conns});")
    lines.append("endmodule")
    return "\n".join(lines)


def design_str(d: A.DesignAst) -> str:
    return "\n\n".join(module_str(m) for m in d.modules) + "\n"
