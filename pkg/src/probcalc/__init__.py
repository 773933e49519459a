"""probcalc: an exact-arithmetic workbench for propositional probability logics."""

__version__ = "0.1.0"
