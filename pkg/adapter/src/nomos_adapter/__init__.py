"""Standalone model adapter for the newline-delimited JSON predict protocol.

Deliberately self-contained: model loading and inference are implemented
here from scratch so the adapter doubles as a second, independent
implementation of the shared model file format.
"""

from .models import load_model, predict_values
from .serve import serve

__version__ = "0.1.0"

__all__ = ["load_model", "predict_values", "serve"]
