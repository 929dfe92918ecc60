"""Numeric backends: native doubles and software extended precision.

Every scalar kernel in :mod:`renyi_combining.core` is written against the
small surface exposed here (``num``, ``log``, ``exp``, ``log1p``, ``expm1`` and the usual
arithmetic operators), so the same code runs on Python floats or on mpmath
numbers living in a private context.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable

import mpmath

EXTENDED_DPS = 60
ENV_VAR = "RENYI_PRECISION"


@dataclass(frozen=True)
class Precision:
    """A numeric realization (double or extended) plus its tolerances."""

    name: str
    num: Callable[[Any], Any]
    log: Callable[[Any], Any]
    exp: Callable[[Any], Any]
    log1p: Callable[[Any], Any]
    expm1: Callable[[Any], Any]
    sqrt: Callable[[Any], Any]
    ln2: Any
    root_tol: float
    # absolute slack accepted when validating entropies / K-values against
    # their closed ranges
    range_slack: float
    csv_digits: int
    ctx: Any = field(default=None, repr=False, compare=False)

    @property
    def is_extended(self) -> bool:
        return self.ctx is not None

    def to_float(self, x) -> float:
        return float(x)

    def fmt(self, x) -> str:
        """Format a number with the backend's CSV digit count."""
        if self.ctx is not None:
            return self.ctx.nstr(x, self.csv_digits, strip_zeros=False)
        return f"{float(x):.{self.csv_digits}g}"


DOUBLE = Precision(
    name="double",
    num=float,
    log=math.log,
    exp=math.exp,
    log1p=math.log1p,
    expm1=math.expm1,
    sqrt=math.sqrt,
    ln2=math.log(2.0),
    root_tol=1e-14,
    range_slack=1e-12,
    csv_digits=17,
)


def _make_extended(dps: int = EXTENDED_DPS) -> Precision:
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return Precision(
        name="extended",
        num=ctx.mpf,
        log=ctx.log,
        exp=ctx.exp,
        log1p=ctx.log1p,
        expm1=ctx.expm1,
        sqrt=ctx.sqrt,
        ln2=ctx.log(2),
        root_tol=1e-30,
        range_slack=1e-40,
        csv_digits=40,
        ctx=ctx,
    )


EXTENDED = _make_extended()

_BY_NAME = {"double": DOUBLE, "extended": EXTENDED}


def get_precision(prec: Precision | str | None = None) -> Precision:
    """Resolve a backend by object, by name, or from ``RENYI_PRECISION``."""
    if isinstance(prec, Precision):
        return prec
    if prec is None:
        prec = os.environ.get(ENV_VAR, "double") or "double"
    try:
        return _BY_NAME[prec.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown precision {prec!r}; expected 'double' or 'extended'"
        ) from None
