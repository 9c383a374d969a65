"""Exact enumeration of small Clifford groups, their Cayley graphs and state reachability quotients."""

__version__ = "0.1.0"
