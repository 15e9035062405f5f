"""Symbolic execution of Verilog RTL with piecewise composition."""
