"""Plotting layer for eiv-gibbs experiment outputs.

Reads the summary/ACF CSVs emitted by ``eiv-gibbs experiment`` and renders
one SVG per panel. No statistics are recomputed here; the CSVs are the
single source of truth.
"""

__version__ = "0.1.0"
