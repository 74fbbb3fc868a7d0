"""Validation-gated constraint modeling over MCP, with MiniZinc, SAT and SMT backends."""

__version__ = "0.1.0"
