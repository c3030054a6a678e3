"""Small shared helpers: bracketed maximisation and deterministic CSV output."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence, TextIO

from .core import SystemConfig, config_hash, config_items

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f: Callable[[float], float], a: float, b: float,
               xtol: float) -> tuple[float, float]:
    """Golden-section maximisation of f on [a, b] down to bracket width xtol."""
    if b < a:
        a, b = b, a
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    while (b - a) > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    x_best, f_best = (x1, f1) if f1 >= f2 else (x2, f2)
    return x_best, f_best


def scan_then_refine(f: Callable[[float], float], grid: Sequence[float],
                     xtol_rel: float = 1e-6) -> tuple[float, float]:
    """Coarse scan over ``grid`` followed by golden-section refinement.

    ``f`` must accept scalars; grid values are assumed sorted ascending.
    Returns (argmax, max).  The refinement bracket is the pair of grid
    neighbours around the best coarse sample, so the result is only
    guaranteed for traces that are unimodal near their peak.
    """
    values = [f(t) for t in grid]
    best = max(range(len(grid)), key=values.__getitem__)
    lo = grid[best - 1] if best > 0 else grid[best]
    hi = grid[best + 1] if best < len(grid) - 1 else grid[best]
    if hi <= lo:
        return grid[best], values[best]
    x, fx = golden_max(f, lo, hi, xtol=xtol_rel * max(hi - lo, abs(hi)))
    if fx >= values[best]:
        return x, fx
    return grid[best], values[best]


def fmt(value: float) -> str:
    """17-significant-digit formatting; round-trips every float64."""
    return format(float(value), ".17g")


def write_csv(stream: TextIO, columns: Sequence[str],
              rows: Iterable[Sequence], config: SystemConfig | None = None,
              extra_header: Sequence[tuple[str, str]] = ()) -> None:
    """Write a CSV with '#' comment headers embedding version and config.

    Output is byte-identical for identical inputs: fixed float formatting,
    fixed key order, no timestamps.
    """
    from . import __version__

    stream.write(f"# chiralwg {__version__}\n")
    if config is not None:
        stream.write(f"# config_hash = {config_hash(config)}\n")
        for key, value in config_items(config):
            stream.write(f"# config.{key} = {fmt(value)}\n")
    for key, value in extra_header:
        stream.write(f"# {key} = {value}\n")
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(cell if isinstance(cell, str) else fmt(cell)
                              for cell in row) + "\n")
