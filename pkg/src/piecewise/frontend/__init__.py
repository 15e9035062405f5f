"""Parsing and elaboration of the supported Verilog subset."""

from .assertions import AssertionSpec, parse_assertions
from .ast import DesignAst, ModuleDecl
from .elaborate import (
    AlwaysBlock,
    CombAssign,
    ElaboratedDesign,
    InstanceInfo,
    PortBinding,
    Signal,
    elaborate,
    self_width,
)
from .parser import parse_design, parse_expression
from .printer import design_str, expr_str

__all__ = [
    "AlwaysBlock",
    "AssertionSpec",
    "CombAssign",
    "DesignAst",
    "ElaboratedDesign",
    "InstanceInfo",
    "ModuleDecl",
    "PortBinding",
    "Signal",
    "design_str",
    "elaborate",
    "expr_str",
    "parse_assertions",
    "parse_design",
    "parse_expression",
    "self_width",
]
