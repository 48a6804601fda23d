"""Interfaces (ABCs) implemented by model packages."""

from __future__ import annotations

from sfw_core.interfaces.gradient_model import GradientModel

__all__ = [
    "GradientModel",
]
