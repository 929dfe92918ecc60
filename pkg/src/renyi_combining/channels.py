"""Binary-input channels, joint distributions and conditional Renyi entropies.

Channels and joints may carry an output *multiplicity* vector: an output with
multiplicity ``n`` stands for ``n`` identical output symbols.  Every entropy
here is a sum over output symbols, so this representation is exact for all
kinds (including J, which is not invariant under merging *distinct* outputs).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from . import core
from .core import Alpha, EntropyKind
from .errors import ChannelParseError, DomainError, UnsupportedOrderError

SUM_TOL = 1e-12
MERGE_RTOL = 1e-10


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BinaryChannel:
    """Finite-output binary-input channel given by likelihoods W(y|0), W(y|1)."""

    w0: np.ndarray
    w1: np.ndarray
    mult: np.ndarray | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        w0 = _readonly(self.w0).reshape(-1)
        w1 = _readonly(self.w1).reshape(-1)
        if w0.shape != w1.shape or w0.size == 0:
            raise DomainError("channel needs a nonempty list of (w0, w1) pairs")
        mult = None
        if self.mult is not None:
            mult = _readonly(self.mult).reshape(-1)
            if mult.shape != w0.shape or np.any(mult <= 0):
                raise DomainError("multiplicities must be positive, one per output")
        if not (np.all(np.isfinite(w0)) and np.all(np.isfinite(w1))):
            raise DomainError("likelihoods must be finite")
        if np.any(w0 < 0) or np.any(w1 < 0):
            raise DomainError("likelihoods must be nonnegative")
        c = np.ones_like(w0) if mult is None else mult
        for name, w in (("w0", w0), ("w1", w1)):
            s = float(np.dot(c, w))
            if abs(s - 1.0) > SUM_TOL * max(1.0, math.sqrt(w0.size)):
                raise DomainError(f"sum of {name} is {s!r}, not 1")
        if self.labels is not None and len(self.labels) != w0.size:
            raise DomainError("labels must match the number of outputs")
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "mult", mult)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]], labels=None) -> "BinaryChannel":
        arr = np.asarray(list(pairs), dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("expected a list of (w0, w1) pairs")
        return cls(arr[:, 0], arr[:, 1], labels=labels)

    @property
    def counts(self) -> np.ndarray:
        return np.ones_like(self.w0) if self.mult is None else self.mult

    @property
    def n_outputs(self) -> int:
        """Number of output symbols, counting multiplicities."""
        return int(round(float(self.counts.sum())))

    def pairs(self) -> list[tuple[float, float]]:
        """Likelihood pairs with multiplicities expanded."""
        reps = np.rint(self.counts).astype(int)
        return [(float(a), float(b))
                for a, b, n in zip(self.w0, self.w1, reps) for _ in range(n)]

    def __len__(self) -> int:
        return self.w0.size

    def __repr__(self) -> str:
        return f"BinaryChannel(n_outputs={self.n_outputs}, distinct={len(self)})"


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Table p(x, y); rows index x, columns index y.

    Two rows (binary X) is the main case, but any number of rows is accepted
    so that product variables such as (X1, X2) can be represented.
    """

    table: np.ndarray
    mult: np.ndarray | None = None

    def __post_init__(self):
        t = _readonly(self.table)
        if t.ndim != 2 or t.shape[1] == 0:
            raise DomainError("joint table must be a nonempty 2-D array")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise DomainError("joint probabilities must be finite and nonnegative")
        mult = None
        if self.mult is not None:
            mult = _readonly(self.mult).reshape(-1)
            if mult.shape != (t.shape[1],) or np.any(mult <= 0):
                raise DomainError("multiplicities must be positive, one per column")
        c = np.ones(t.shape[1]) if mult is None else mult
        total = float(np.dot(t.sum(axis=0), c))
        if abs(total - 1.0) > SUM_TOL * max(1.0, math.sqrt(t.size)):
            raise DomainError(f"total mass is {total!r}, not 1")
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "mult", mult)

    @property
    def counts(self) -> np.ndarray:
        return np.ones(self.table.shape[1]) if self.mult is None else self.mult

    @property
    def p_y(self) -> np.ndarray:
        return self.table.sum(axis=0)

    @property
    def p_x(self) -> np.ndarray:
        return self.table @ self.counts

    def support(self) -> "JointDistribution":
        """Drop zero-mass outputs."""
        keep = self.p_y > 0
        if keep.all():
            return self
        return JointDistribution(self.table[:, keep],
                                 None if self.mult is None else self.mult[keep])


# ---------------------------------------------------------------------------
# constructors


def make_bsc(p: float) -> BinaryChannel:
    """Binary symmetric channel with crossover probability p."""
    if not 0 <= p <= 1:
        raise DomainError(f"crossover probability {p!r} not in [0, 1]")
    return BinaryChannel.from_pairs([(1 - p, p), (p, 1 - p)])


def make_bec(eps: float) -> BinaryChannel:
    """Binary erasure channel; the third output is the erasure."""
    if not 0 <= eps <= 1:
        raise DomainError(f"erasure probability {eps!r} not in [0, 1]")
    return BinaryChannel.from_pairs([(1 - eps, 0.0), (0.0, 1 - eps), (eps, eps)])


def random_channel(rng: np.random.Generator, n_outputs: int | None = None,
                   max_outputs: int = 6) -> BinaryChannel:
    """Channel with Dirichlet(1) likelihood columns; alphabet size 2..max_outputs."""
    m = n_outputs if n_outputs is not None else int(rng.integers(2, max_outputs + 1))
    w = rng.dirichlet(np.ones(m), size=2)
    return BinaryChannel(w[0], w[1])


def random_joint(rng: np.random.Generator, n_x: int = 2, n_y: int | None = None,
                 max_outputs: int = 6) -> JointDistribution:
    m = n_y if n_y is not None else int(rng.integers(2, max_outputs + 1))
    t = rng.dirichlet(np.ones(n_x * m)).reshape(n_x, m)
    return JointDistribution(t)


def channel_to_joint(W: BinaryChannel, px0: float = 0.5) -> JointDistribution:
    """p(x, y) = p(x) W(y|x); uniform input by default."""
    if not 0 <= px0 <= 1:
        raise DomainError("px0 must be a probability")
    return JointDistribution(np.vstack([px0 * W.w0, (1 - px0) * W.w1]), W.mult)


def joint_to_channel(j: JointDistribution) -> BinaryChannel:
    """Recover W(y|x) from a binary-input joint with full input support."""
    if j.table.shape[0] != 2:
        raise DomainError("joint_to_channel needs binary X")
    px = j.p_x
    if np.any(px <= 0):
        raise DomainError("both inputs need positive probability")
    return BinaryChannel(j.table[0] / px[0], j.table[1] / px[1], j.mult)


def product_joint(j1: JointDistribution, j2: JointDistribution) -> JointDistribution:
    """Joint of independent pairs: X = (X1, X2), Y = (Y1, Y2)."""
    t = np.einsum("ab,cd->acbd", j1.table, j2.table)
    nx = j1.table.shape[0] * j2.table.shape[0]
    mult = None
    if j1.mult is not None or j2.mult is not None:
        mult = np.outer(j1.counts, j2.counts).reshape(-1)
    return JointDistribution(t.reshape(nx, -1), mult)


# ---------------------------------------------------------------------------
# conditional entropies


def _posterior_logs(j: JointDistribution):
    j = j.support()
    py = j.p_y
    with np.errstate(divide="ignore"):
        log_r = np.log(j.table) - np.log(py)
    return j, py, log_r


def _lse_rows(v: np.ndarray, axis: int = 0) -> np.ndarray:
    # log sum exp ignoring -inf entries (0^alpha = 0)
    return logsumexp(v, axis=axis)


def cond_entropy(j: JointDistribution, alpha, kind) -> float:
    """Conditional entropy of X given Y for the selected definition, in nats.

    Kinds A, H, J, C reduce to Shannon at alpha=1.  Only kind A (and the
    dedicated min-entropy kind) is defined at alpha=inf.
    """
    kind = EntropyKind.parse(kind)
    if kind is EntropyKind.MIN:
        return _min_entropy(j)
    a = Alpha.parse(alpha)
    if kind is EntropyKind.SHANNON or a.is_shannon:
        return _shannon_cond(j)
    if a.is_min:
        if kind is EntropyKind.A:
            return _min_entropy(j)
        raise UnsupportedOrderError(f"kind {kind.value} has no alpha=inf limit")
    al = a.value
    j, py, log_r = _posterior_logs(j)
    c = j.counts
    if kind is EntropyKind.A:
        # per-y log of the l_alpha norm of the posterior, scaled by its max
        m = log_r.max(axis=0)
        norm = m + _lse_rows(al * (log_r - m)) / al
        return float(al / (1 - al) * logsumexp(norm, b=c * py))
    if kind is EntropyKind.H:
        inner = _lse_rows(al * log_r)
        return float(logsumexp(inner, b=c * py) / (1 - al))
    if kind is EntropyKind.J:
        with np.errstate(divide="ignore"):
            log_t = np.log(j.table)
            log_py = np.log(py)
        joint = logsumexp((al * log_t).reshape(-1), b=np.broadcast_to(c, j.table.shape).reshape(-1))
        marg = logsumexp(al * log_py, b=c)
        return float((joint - marg) / (1 - al))
    if kind is EntropyKind.C:
        inner = _lse_rows(al * log_r)
        return float(np.dot(c * py, inner) / (1 - al))
    raise ValueError(f"unsupported kind {kind!r}")


def _shannon_cond(j: JointDistribution) -> float:
    j, py, log_r = _posterior_logs(j)
    t = j.table
    with np.errstate(invalid="ignore"):
        terms = np.where(t > 0, t * log_r, 0.0)
    return float(-np.dot(terms.sum(axis=0), j.counts))


def _min_entropy(j: JointDistribution) -> float:
    return float(-np.log(np.dot(j.table.max(axis=0), j.counts)))


def tilt(dist, alpha) -> np.ndarray:
    """Tilted distribution p(y)^alpha / sum p(y)^alpha."""
    a = Alpha.parse(alpha)
    if a.is_min:
        raise UnsupportedOrderError("tilting needs a finite order")
    p = np.asarray(dist, dtype=float)
    if np.any(p < 0) or not np.any(p > 0):
        raise DomainError("tilt needs a nonnegative, nonzero vector")
    w = np.where(p > 0, p, 0.0) ** a.value
    return w / w.sum()


def k_cond(j: JointDistribution, alpha, kind) -> float:
    """Conditional K-value: the exponential reparametrization of the entropy."""
    kind = EntropyKind.parse(kind)
    if kind not in (EntropyKind.A, EntropyKind.H, EntropyKind.J):
        raise ValueError("k_cond kinds are A, H, J")
    a = Alpha.parse(alpha)
    if a.is_shannon:
        raise UnsupportedOrderError("K-values degenerate to 1 at alpha=1")
    return float(core.k_from_entropy(cond_entropy(j, a, kind), a, kind))


def k_cond_decomposed(j: JointDistribution, alpha, kind) -> float:
    """K-value as a (tilted, for J) average of per-output K-values.

    Independent of :func:`cond_entropy`; used as an oracle for it.
    """
    kind = EntropyKind.parse(kind)
    a = Alpha.parse(alpha)
    if a.is_shannon:
        raise UnsupportedOrderError("K-values degenerate to 1 at alpha=1")
    j = j.support()
    py = j.p_y
    c = j.counts
    post = j.table / py
    if kind is EntropyKind.A:
        if a.is_min:
            per_y = post.max(axis=0)
        else:
            per_y = np.array([(col**a.value).sum() ** (1 / a.value) for col in post.T])
        return float(np.dot(c * py, per_y))
    per_y = np.array([(col**a.value).sum() for col in post.T])
    if kind is EntropyKind.H:
        return float(np.dot(c * py, per_y))
    if kind is EntropyKind.J:
        w = c * py**a.value
        return float(np.dot(w / w.sum(), per_y))
    raise ValueError("decomposition kinds are A, H, J")


def cond_entropy_decomposed(j: JointDistribution, alpha, kind) -> float:
    """Entropy recovered from :func:`k_cond_decomposed`."""
    return float(core.entropy_from_k(k_cond_decomposed(j, alpha, kind), alpha, kind))


def channel_entropy(W: BinaryChannel, alpha, kind, px0: float = 0.5) -> float:
    """Conditional entropy of the channel input given its output."""
    return cond_entropy(channel_to_joint(W, px0), alpha, kind)


# ---------------------------------------------------------------------------
# output reduction


def merge_equivalent_outputs(W: BinaryChannel, rtol: float = MERGE_RTOL) -> BinaryChannel:
    """Merge outputs with proportional likelihood pairs (identical posteriors).

    Preserves Shannon, A, H, C and min-entropy; changes J in general.
    Zero-mass outputs are dropped.
    """
    c = W.counts
    w0 = W.w0 * c
    w1 = W.w1 * c
    mass = w0 + w1
    keep = mass > 0
    w0, w1, mass = w0[keep], w1[keep], mass[keep]
    order = np.argsort(w0 / mass, kind="stable")
    out0: list[float] = []
    out1: list[float] = []
    ref = None
    for i in order:
        a, b = w0[i], w1[i]
        if ref is not None:
            ra, rb = ref
            if abs(a * rb - ra * b) <= rtol * (a + b) * (ra + rb):
                out0[-1] += a
                out1[-1] += b
                continue
        out0.append(a)
        out1.append(b)
        ref = (a, b)
    return BinaryChannel(np.array(out0), np.array(out1))


def compress_identical_outputs(W: BinaryChannel) -> BinaryChannel:
    """Collapse bitwise-identical likelihood pairs into multiplicities.

    Exact for every entropy kind, including J.
    """
    pairs = np.stack([W.w0, W.w1], axis=1)
    uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
    if len(uniq) == len(pairs):
        return W
    mult = np.bincount(inverse.reshape(-1), weights=W.counts, minlength=len(uniq))
    return BinaryChannel(uniq[:, 0], uniq[:, 1], mult)


# ---------------------------------------------------------------------------
# serialization


def parse_shorthand(text: str) -> BinaryChannel | None:
    """``bsc:<p>`` or ``bec:<eps>``; returns None for anything else."""
    head, sep, tail = text.partition(":")
    if not sep or head.lower() not in ("bsc", "bec"):
        return None
    try:
        x = float(tail)
    except ValueError:
        raise ChannelParseError(f"bad shorthand parameter in {text!r}") from None
    try:
        return make_bsc(x) if head.lower() == "bsc" else make_bec(x)
    except DomainError as exc:
        raise ChannelParseError(f"{text!r}: {exc}") from None


def _build(rows: list[tuple[float, float]], where: str) -> BinaryChannel:
    if not rows:
        raise ChannelParseError(f"{where}: no outputs")
    for i, (a, b) in enumerate(rows):
        if not (math.isfinite(a) and math.isfinite(b)) or a < 0 or b < 0:
            raise ChannelParseError(f"{where}: row {i}: likelihoods must be finite and >= 0")
    try:
        return BinaryChannel.from_pairs(rows)
    except DomainError as exc:
        raise ChannelParseError(f"{where}: {exc}") from None


def loads_channel(text: str, fmt: str = "json", where: str = "<string>") -> BinaryChannel:
    """Parse a channel from JSON (``{"outputs": [{"w0":..,"w1":..}]}``) or CSV text."""
    rows: list[tuple[float, float]] = []
    if fmt == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ChannelParseError(f"{where}: invalid JSON: {exc}") from None
        outputs = doc.get("outputs") if isinstance(doc, dict) else None
        if not isinstance(outputs, list):
            raise ChannelParseError(f"{where}: missing 'outputs' list")
        for i, item in enumerate(outputs):
            try:
                rows.append((float(item["w0"]), float(item["w1"])))
            except (KeyError, TypeError, ValueError):
                raise ChannelParseError(f"{where}: row {i}: expected numeric 'w0' and 'w1'") from None
    elif fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["w0", "w1"]:
            raise ChannelParseError(f"{where}: CSV header must be 'w0,w1'")
        for i, rec in enumerate(reader):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != 2:
                raise ChannelParseError(f"{where}: row {i}: expected 2 fields")
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except ValueError:
                raise ChannelParseError(f"{where}: row {i}: non-numeric field") from None
    else:
        raise ChannelParseError(f"unknown channel format {fmt!r}")
    return _build(rows, where)


def dumps_channel(W: BinaryChannel, fmt: str = "json") -> str:
    pairs = W.pairs()
    if fmt == "json":
        return json.dumps({"outputs": [{"w0": a, "w1": b} for a, b in pairs]}, indent=1) + "\n"
    if fmt == "csv":
        return "w0,w1\n" + "".join(f"{a!r},{b!r}\n" for a, b in pairs)
    raise ChannelParseError(f"unknown channel format {fmt!r}")


def _infer_format(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    return "csv" if path.suffix.lower() == ".csv" else "json"


def load_channel(spec: str | os.PathLike, fmt: str | None = None) -> BinaryChannel:
    """Load a channel from a shorthand (``bsc:0.11``) or a JSON/CSV file."""
    if isinstance(spec, str):
        sh = parse_shorthand(spec)
        if sh is not None:
            return sh
    path = Path(spec)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ChannelParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads_channel(text, _infer_format(path, fmt), str(path))


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_channel(W: BinaryChannel, path: str | os.PathLike, fmt: str | None = None) -> None:
    atomic_write_text(path, dumps_channel(W, _infer_format(Path(path), fmt)))
