"""Scalar kernels for binary Renyi entropies and their k-transforms.

All entropies are in nats.  Functions accept an optional ``prec`` argument
(:class:`~renyi_combining.precision.Precision` or its name) selecting the
numeric backend; results are Python floats in double mode and mpmath numbers
in extended mode.

The Renyi order is handled through :class:`Alpha`.  ``alpha == 1`` always
routes to the Shannon closed form and ``alpha == inf`` to the min-entropy
form, never through a ``1/(1-alpha)`` division.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Callable

from .errors import DomainError, UnsupportedOrderError
from .precision import Precision, get_precision

INF = math.inf


class EntropyKind(str, enum.Enum):
    """Selector among the conditional entropies."""

    A = "A"  # Arimoto
    H = "H"  # Hayashi / Skoric
    J = "J"  # Jizba-Arimitsu
    C = "C"  # Cachin
    SHANNON = "shannon"
    MIN = "min"

    @classmethod
    def parse(cls, kind: "EntropyKind | str") -> "EntropyKind":
        if isinstance(kind, cls):
            return kind
        text = str(kind).strip()
        for member in cls:
            if text == member.value or text.lower() == member.value.lower():
                return member
        if text.lower() in ("minentropy", "min-entropy", "inf"):
            return cls.MIN
        raise ValueError(f"unknown entropy kind {kind!r}")


class KKKind(str, enum.Enum):
    """Which bivariate combining function: k^A-based, k^H-based, or h-based."""

    KK_A = "kkA"
    KK_H = "kkH"
    HH = "hh"

    @classmethod
    def parse(cls, kind: "KKKind | str") -> "KKKind":
        if isinstance(kind, cls):
            return kind
        text = str(kind).strip()
        aliases = {"kka": cls.KK_A, "kk_a": cls.KK_A, "a": cls.KK_A,
                   "kkh": cls.KK_H, "kk_h": cls.KK_H, "h": cls.KK_H,
                   "hh": cls.HH, "c": cls.HH}
        try:
            return aliases[text.lower()]
        except KeyError:
            raise ValueError(f"unknown kk kind {kind!r}") from None


@dataclass(frozen=True)
class Alpha:
    """Renyi order: a positive real or infinity.

    ``text`` keeps the decimal literal the order was parsed from, so extended
    precision evaluates e.g. ``1.581`` exactly instead of its binary neighbour.
    """

    value: float
    text: str | None = None

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v <= 0:
            raise DomainError(f"Renyi order must be positive or inf, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, alpha: "Alpha | float | str") -> "Alpha":
        if isinstance(alpha, Alpha):
            return alpha
        if isinstance(alpha, str):
            text = alpha.strip()
            if text.lower() in ("inf", "infinity", "+inf", "∞"):
                return cls(INF, "inf")
            try:
                Decimal(text)
            except Exception:
                raise DomainError(f"cannot parse Renyi order {alpha!r}") from None
            return cls(float(text), text)
        if isinstance(alpha, Decimal):
            return cls(float(alpha), str(alpha))
        return cls(float(alpha))

    @property
    def is_shannon(self) -> bool:
        return self.value == 1.0

    @property
    def is_min(self) -> bool:
        return math.isinf(self.value)

    def as_num(self, prec: Precision):
        if self.is_min:
            return prec.num("inf") if prec.is_extended else INF
        if prec.is_extended and self.text is not None:
            return prec.num(self.text)
        return prec.num(self.value)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.is_min:
            return "inf"
        return self.text if self.text is not None else repr(self.value)


def _prob(p, P: Precision, name: str = "p"):
    x = P.num(p)
    if not (0 <= x <= 1):
        raise DomainError(f"{name}={p!r} is not a probability")
    return x


def _is_inf(x) -> bool:
    try:
        return math.isinf(float(x))
    except OverflowError:
        return True


# ---------------------------------------------------------------------------
# root finding


def monotone_root(fun: Callable, dfun: Callable | None, target, lo, hi, tol,
                  max_iter: int = 4000, floor: float = 1e-300):
    """Solve ``fun(x) == target`` for monotone ``fun`` on ``[lo, hi]``.

    Safeguarded Newton iteration: a Newton step is taken when it stays inside
    the current bracket and shrinks faster than bisection would, otherwise the
    bracket is halved.  ``dfun`` may return ``inf``/raise near singular
    endpoints; such points fall back to bisection.

    The step tolerance is relative, ``tol * max(|x|, floor)``, so roots close
    to zero of steep functions (h_alpha near 0 for alpha < 1) are resolved in
    value and not only to ``tol`` absolutely.
    """
    f_lo = fun(lo) - target
    f_hi = fun(hi) - target
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    sign = 1 if f_lo < f_hi else -1
    # orient so that F(lo) < 0 < F(hi)
    if sign * f_lo > 0:
        return lo
    if sign * f_hi < 0:
        return hi

    def F(x):
        return sign * (fun(x) - target)

    def dF(x):
        if dfun is None:
            return None
        try:
            d = dfun(x)
        except (ZeroDivisionError, OverflowError, ValueError):
            return None
        if _is_inf(d) or d != d:
            return None
        return sign * d

    dx_old = hi - lo
    dx = dx_old
    x = lo + (hi - lo) / 2
    f = F(x)
    df = dF(x)
    for _ in range(max_iter):
        if f == 0:
            return x
        use_bisect = (
            df is None
            or df == 0
            or ((x - hi) * df - f) * ((x - lo) * df - f) > 0
            or abs(2 * f) > abs(dx_old * df)
        )
        if use_bisect:
            dx_old = dx
            dx = (hi - lo) / 2
            x = lo + dx
            if x == lo or x == hi:
                return x
        else:
            dx_old = dx
            dx = f / df
            prev = x
            x = x - dx
            if x == prev:
                return x
        if abs(dx) < tol * max(abs(x), floor):
            return x
        f = F(x)
        df = dF(x)
        if f < 0:
            lo = x
        else:
            hi = x
    return x


# ---------------------------------------------------------------------------
# binary Renyi entropy


def _shannon(p, P: Precision):
    # symmetric, so evaluate on the lower half where log1p keeps small-p accuracy
    q = min(p, 1 - p)
    if q <= 0:
        return P.num(0)
    return -q * P.log(q) - (1 - q) * P.log1p(-q)


def binary_renyi(p, alpha, prec=None):
    """Binary Renyi entropy h_alpha(p) in nats."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    p = _prob(p, P)
    q = min(p, 1 - p)
    if a.is_min:
        return -P.log1p(-q)
    if a.is_shannon:
        return _shannon(p, P)
    al = a.as_num(P)
    # p^a + (1-p)^a - 1 without cancellation for small q
    s = q**al + P.expm1(al * P.log1p(-q)) if q > 0 else P.num(0)
    return P.log1p(s) / (1 - al)


def _hprime_any(x, a: Alpha, P: Precision):
    # derivative of binary_renyi on (0, 1/2]
    if a.is_shannon:
        return P.log((1 - x) / x)
    al = a.as_num(P)
    return al / (1 - al) * (x ** (al - 1) - (1 - x) ** (al - 1)) / (x**al + (1 - x) ** al)


def binary_renyi_inverse(h, alpha, prec=None):
    """The unique p in [0, 1/2] with ``binary_renyi(p, alpha) == h``."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    h = P.num(h)
    if h < -P.range_slack or h > P.ln2 + P.range_slack:
        raise DomainError(f"entropy {h} outside [0, ln 2]")
    half = P.num(1) / 2
    if h <= 0:
        return P.num(0)
    if h >= P.ln2:
        return half
    if a.is_min:
        return -P.expm1(-h)
    return monotone_root(
        lambda x: binary_renyi(x, a, P),
        lambda x: _hprime_any(x, a, P),
        h, P.num(0), half, P.root_tol,
    )


def convolve(a, b):
    """Binary convolution a*b = a(1-b) + (1-a)b."""
    return a * (1 - b) + (1 - a) * b


# ---------------------------------------------------------------------------
# k-transforms


def _k_kind(kind) -> EntropyKind:
    k = EntropyKind.parse(kind)
    if k not in (EntropyKind.A, EntropyKind.H):
        raise ValueError(f"k-transform kind must be A or H, got {kind!r}")
    return k


def _check_k_order(a: Alpha, kind: EntropyKind):
    if a.is_shannon:
        raise UnsupportedOrderError("K-values degenerate to 1 at alpha=1")
    if a.is_min and kind is EntropyKind.H:
        raise UnsupportedOrderError("k^H has no alpha=inf form")


def delta_const(alpha, kind, prec=None):
    """K-value of the uniform bit: 2^((1-a)/a) for A, 2^(1-a) for H."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    kind = _k_kind(kind)
    _check_k_order(a, kind)
    two = P.num(2)
    if a.is_min:
        return two**-1
    al = a.as_num(P)
    if kind is EntropyKind.A:
        return two ** ((1 - al) / al)
    return two ** (1 - al)


def k_value(p, alpha, kind, prec=None):
    """k^A_alpha(p) = (p^a + (1-p)^a)^(1/a) or k^H_alpha(p) = p^a + (1-p)^a."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    kind = _k_kind(kind)
    _check_k_order(a, kind)
    p = _prob(p, P)
    if a.is_min:
        return max(p, 1 - p)
    al = a.as_num(P)
    s = p**al + (1 - p) ** al
    if kind is EntropyKind.A:
        return s ** (1 / al)
    return s


def _k_prime(x, a: Alpha, kind: EntropyKind, P: Precision):
    al = a.as_num(P)
    f = x ** (al - 1) - (1 - x) ** (al - 1)
    if kind is EntropyKind.H:
        return al * f
    s = x**al + (1 - x) ** al
    return s ** (1 / al - 1) * f


def k_inverse(k, alpha, kind, prec=None):
    """The unique p in [0, 1/2] with ``k_value(p, alpha, kind) == k``."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    kind = _k_kind(kind)
    d = delta_const(a, kind, P)
    k = P.num(k)
    lo, hi = min(1, d), max(1, d)
    if k < lo - P.range_slack or k > hi + P.range_slack:
        raise DomainError(f"K-value {k} outside [{lo}, {hi}]")
    half = P.num(1) / 2
    if a.is_min:
        return min(max(1 - k, P.num(0)), half)
    # endpoints in the oriented sense: k=1 <-> p=0, k=delta <-> p=1/2
    if (d < 1 and k >= 1) or (d > 1 and k <= 1):
        return P.num(0)
    if (d < 1 and k <= d) or (d > 1 and k >= d):
        return half
    return monotone_root(
        lambda x: k_value(x, a, kind, P),
        lambda x: _k_prime(x, a, kind, P),
        k, P.num(0), half, P.root_tol,
    )


def k_from_entropy(h, alpha, kind, prec=None):
    """Map an entropy to its K-value: exp(((1-a)/a) h) for A, exp((1-a) h) for H/J."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    kind = EntropyKind.parse(kind)
    if a.is_shannon:
        raise UnsupportedOrderError("K-values degenerate to 1 at alpha=1")
    h = P.num(h)
    if kind is EntropyKind.A:
        if a.is_min:
            return P.exp(-h)
        al = a.as_num(P)
        return P.exp((1 - al) / al * h)
    if kind in (EntropyKind.H, EntropyKind.J):
        if a.is_min:
            raise UnsupportedOrderError("no alpha=inf K-value for kinds H/J")
        al = a.as_num(P)
        return P.exp((1 - al) * h)
    raise ValueError(f"no K-value for kind {kind.value}")


def entropy_from_k(k, alpha, kind, prec=None):
    """Inverse of :func:`k_from_entropy`."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    kind = EntropyKind.parse(kind)
    if a.is_shannon:
        raise UnsupportedOrderError("K-values degenerate to 1 at alpha=1")
    k = P.num(k)
    if kind is EntropyKind.A:
        if a.is_min:
            return -P.log(k)
        al = a.as_num(P)
        return al / (1 - al) * P.log(k)
    if kind in (EntropyKind.H, EntropyKind.J):
        if a.is_min:
            raise UnsupportedOrderError("no alpha=inf K-value for kinds H/J")
        al = a.as_num(P)
        return P.log(k) / (1 - al)
    raise ValueError(f"no K-value for kind {kind.value}")


def kk_maps(kind, alpha, prec=None) -> tuple[Callable[[Any], Any], Callable[[Any], Any], Any, Any]:
    """Forward map, inverse map and value range ``(lo, hi)`` for a kk-function.

    The forward map sends a probability in [0, 1/2] to the transformed
    coordinate (K-value or entropy); the inverse goes back.
    """
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    kind = KKKind.parse(kind)
    if kind is KKKind.HH:
        return (lambda p: binary_renyi(p, a, P),
                lambda v: binary_renyi_inverse(v, a, P),
                P.num(0), P.ln2)
    ek = EntropyKind.A if kind is KKKind.KK_A else EntropyKind.H
    d = delta_const(a, ek, P)
    return (lambda p: k_value(p, a, ek, P),
            lambda v: k_inverse(v, a, ek, P),
            min(P.num(1), d), max(P.num(1), d))


def kk(x, y, alpha, kind, prec=None):
    """Bivariate combining function, e.g. k^A(k^A^-1(x) * k^A^-1(y)).

    ``kind`` selects k^A (``KK_A``), k^H (``KK_H``) or the binary entropy
    itself (``HH``, where x and y are entropies in [0, ln 2]).
    """
    fwd, inv, _, _ = kk_maps(kind, alpha, prec)
    return fwd(convolve(inv(x), inv(y)))


# ---------------------------------------------------------------------------
# kernels used in the convexity analysis


def appendix_f(x, alpha, prec=None):
    """f(x) = x^(a-1) - (1-x)^(a-1); singular at the endpoints when a < 1."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    if a.is_min:
        raise UnsupportedOrderError("f is undefined at alpha=inf")
    x = _prob(x, P, "x")
    al = a.as_num(P)
    if al < 1 and (x == 0 or x == 1):
        raise DomainError("f is singular at x in {0, 1} for alpha < 1")
    return x ** (al - 1) - (1 - x) ** (al - 1)


def appendix_hprime(x, alpha, prec=None):
    """Closed-form derivative of binary_renyi: (a/(1-a)) f(x) / k^H_a(x)."""
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    if a.is_shannon or a.is_min:
        raise UnsupportedOrderError("closed form requires finite alpha != 1")
    x = P.num(x)
    if not (0 < x < 1):
        raise DomainError("x must lie in the open interval (0, 1)")
    al = a.as_num(P)
    return al / (1 - al) * appendix_f(x, a, P) / k_value(x, a, EntropyKind.H, P)


def appendix_g(y, x, c, alpha, prec=None):
    """The auxiliary function g^x_alpha(y) whose extremum at y=x decides convexity.

    At x = 1/2 the ratio f(x*c)/f(x) is 0/0; its limit (1-2c) is used.
    """
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    if a.is_shannon or a.is_min:
        raise UnsupportedOrderError("g requires finite alpha != 1")
    x = P.num(x)
    y = P.num(y)
    c = _prob(c, P, "c")
    if not (0 < x < 1 and 0 < y < 1):
        raise DomainError("x and y must lie in (0, 1)")
    xc = convolve(x, c)
    fx = appendix_f(x, a, P)
    # f is odd about 1/2, so the ratio is (1-2c) + O((x-1/2)^2) there
    near_half = abs(x - P.num(1) / 2) < (P.num("1e-25") if P.is_extended else 1e-8)
    if near_half:
        ratio = 1 - 2 * c
    elif fx == 0:
        raise DomainError(f"singular ratio at x={x}")
    else:
        ratio = appendix_f(xc, a, P) / fx
    kH = lambda t: k_value(t, a, EntropyKind.H, P)  # noqa: E731
    return (kH(convolve(y, c)) - kH(y) * (1 - 2 * c) * ratio) / kH(xc)


def closed_form_k23(y, c, order: int):
    """Polynomial forms of k^H_2(y*c) and k^H_3(y*c)."""
    s = y * (1 - y) * (1 - 2 * c) ** 2
    if order == 2:
        return (1 - c) ** 2 + c**2 - 2 * s
    if order == 3:
        return 1 - 3 * c + 3 * c**2 - 3 * s
    raise ValueError("order must be 2 or 3")
