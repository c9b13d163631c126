"""Centered finite differences used to cross-check analytic derivatives."""

from __future__ import annotations

__all__ = ["central_first", "central_second"]


def central_first(fn, x: float, step: float):
    """(f(x+h) - f(x-h)) / 2h; works for scalar or array-valued fn."""
    return (fn(x + step) - fn(x - step)) / (2.0 * step)


def central_second(fn, x: float, step: float):
    """(f(x+h) - 2 f(x) + f(x-h)) / h^2; works for scalar or array-valued fn."""
    return (fn(x + step) - 2.0 * fn(x) + fn(x - step)) / (step * step)
