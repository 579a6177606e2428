"""Figures from benchmark CSVs: one line per detector series, plus a sidecar.

The sidecar is a plain-text echo of every plotted value, so two renders of the
same CSV can be diffed byte for byte and any plotted number can be traced back
to its source row.
"""

from .figures import FIGURES, SchemaError, load_rows, render

__all__ = ["FIGURES", "SchemaError", "load_rows", "render"]
