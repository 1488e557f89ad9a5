"""Classification of nice nilpotent Lie algebras."""

from __future__ import annotations

__version__ = "0.1.0"
