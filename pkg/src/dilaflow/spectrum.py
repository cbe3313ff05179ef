"""Resonance structure of a diagonal spectrum.

For alpha = (alpha_1, .., alpha_n) with all real parts negative, a
resonance is a pair (j, k) with |k| >= 2 and (alpha, k) = alpha_j.  The
distortion index lambda = max|Re alpha| / min|Re alpha| bounds the
order of any resonance, so the enumeration below is finite.  A "pure
real" resonance matches real parts only; those are the obstructions
that break propagation of linearity along a semigroup.

Tolerances are relative: a divisor counts as zero when its modulus is
below tol * max|alpha_j|.  Gaps between tol and NEAR_BAND are reported
as warnings so callers can see how close they sail to a resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError

DEFAULT_TOL = 1e-9
NEAR_BAND = 1e-3  # divisors inside (tol, NEAR_BAND] produce warnings


@dataclass(frozen=True)
class Resonance:
    target: int  # 1-based component j
    exponents: tuple

    def order(self) -> int:
        return sum(self.exponents)

    def to_json_dict(self) -> dict:
        return {"j": self.target, "k": list(self.exponents)}


def _as_alpha(alpha) -> tuple:
    out = tuple(complex(a) for a in alpha)
    if not out:
        raise ValidationError("spectrum must be non-empty")
    if any(not (math.isfinite(a.real) and math.isfinite(a.imag)) for a in out):
        raise ValidationError("spectrum entries must be finite")
    return out


def _require_dilation(alpha: tuple):
    if any(a.real >= 0 for a in alpha):
        raise ValidationError("not a dilation spectrum: some Re alpha_j >= 0")


def lambda_index(alpha: Sequence[complex]) -> float:
    """Spectrum distortion max|Re alpha| / min|Re alpha|.

    Hyperbolicity is required: a zero real part makes the index
    meaningless and raises.
    """
    a = _as_alpha(alpha)
    res = [abs(x.real) for x in a]
    if min(res) == 0.0:
        raise ValidationError("lambda index undefined: some Re alpha_j = 0")
    return max(res) / min(res)


def _multi_indices(n: int, total: int):
    """All exponent tuples of length n with the given total, lex order."""
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _multi_indices(n - 1, total - first):
            yield (first,) + rest


def _enumerate(alpha: tuple, tol: float, condition: str):
    """Shared scan behind resonances() and pure_real_resonances().

    condition 'full' matches (alpha,k) = alpha_j, 'pure_real' matches
    real parts while the full values differ.  Returns (hits, warnings);
    warnings only apply to the 'full' scan.
    """
    n = len(alpha)
    scale = max(abs(a) for a in alpha)
    bound = math.floor(lambda_index(alpha) + 1e-12)
    hits = []
    warnings = []
    for total in range(2, bound + 1):
        for k in _multi_indices(n, total):
            ak = sum(ki * ai for ki, ai in zip(k, alpha))
            for j in range(1, n + 1):
                div = ak - alpha[j - 1]
                if condition == "full":
                    if abs(div) <= tol * scale:
                        hits.append(Resonance(j, k))
                    elif abs(div) <= NEAR_BAND * scale:
                        warnings.append(
                            {"j": j, "k": list(k), "gap": abs(div) / scale}
                        )
                else:
                    if abs(div.real) <= tol * scale and abs(div) > tol * scale:
                        hits.append(Resonance(j, k))
    hits.sort(key=lambda r: (r.target, sum(r.exponents), r.exponents))
    warnings.sort(key=lambda w: (w["j"], sum(w["k"]), tuple(w["k"])))
    return hits, warnings


def resonances(alpha: Sequence[complex], tol: float = DEFAULT_TOL) -> list:
    """All resonances (j, k), |k| >= 2, sorted by (j, graded lex k).

    The order of any resonance is at most floor(lambda_index), which
    caps the scan.  Results refer to the caller's coordinate order.
    """
    a = _as_alpha(alpha)
    _require_dilation(a)
    hits, _ = _enumerate(a, tol, "full")
    return hits


def pure_real_resonances(alpha: Sequence[complex], tol: float = DEFAULT_TOL) -> list:
    """Pairs (j, k) where only the real parts resonate.

    The real-part identity Re(alpha,k) = Re alpha_j obeys the same
    order bound as a full resonance, so the same scan range applies.
    """
    a = _as_alpha(alpha)
    _require_dilation(a)
    hits, _ = _enumerate(a, tol, "pure_real")
    return hits


def M_values(alpha: Sequence[complex], tol: float = DEFAULT_TOL) -> tuple[tuple, int]:
    """Per-component maximal resonance orders (M_1..M_n) and their max.

    M_j = 0 when no resonance targets component j; the overall value is
    0 for a non-resonant spectrum.
    """
    a = _as_alpha(alpha)
    res = resonances(a, tol)
    m = [0] * len(a)
    for r in res:
        m[r.target - 1] = max(m[r.target - 1], r.order())
    return tuple(m), max(m, default=0)


def discrete_resonances(beta: Sequence[complex], tol: float = DEFAULT_TOL) -> list:
    """Multiplicative resonances beta^k = beta_j, |k| >= 2, for |beta_j| < 1.

    |beta^k| <= max|beta|^{|k|} must reach down to min|beta|, which
    bounds |k| by log(min|beta|) / log(max|beta|).  The comparison is
    absolute: moduli live below 1 so no extra scale is meaningful.
    """
    b = tuple(complex(x) for x in beta)
    if not b:
        raise ValidationError("beta must be non-empty")
    mods = [abs(x) for x in b]
    if any(m <= 0 or m >= 1 for m in mods):
        raise ValidationError("discrete spectrum must satisfy 0 < |beta_j| < 1")
    bound = int(math.ceil(math.log(min(mods)) / math.log(max(mods)) + 1e-12))
    hits = []
    n = len(b)
    for total in range(2, bound + 1):
        for k in _multi_indices(n, total):
            bk = 1.0 + 0j
            for ki, bi in zip(k, b):
                if ki:
                    bk *= bi ** ki
            for j in range(1, n + 1):
                if abs(bk - b[j - 1]) <= tol:
                    hits.append(Resonance(j, k))
    hits.sort(key=lambda r: (r.target, sum(r.exponents), r.exponents))
    return hits


@dataclass(frozen=True)
class SpectrumReport:
    """Everything the resonance scan knows about one spectrum.

    ``permutation`` records the relabeling that sorts alpha by
    descending real part (positions are 1-based); all listed data stays
    in the caller's coordinates.  It is intentionally absent from the
    JSON form, whose schema is fixed.
    """

    alpha: tuple
    is_dilation: bool
    lambda_index: float
    resonances: tuple
    M: tuple
    M_alpha: int
    pure_real: tuple
    warnings: tuple
    permutation: tuple

    def to_json_dict(self) -> dict:
        return {
            "is_dilation": self.is_dilation,
            "lambda_index": self.lambda_index,
            "resonances": [r.to_json_dict() for r in self.resonances],
            "M": list(self.M),
            "M_alpha": self.M_alpha,
            "pure_real": [r.to_json_dict() for r in self.pure_real],
            "warnings": list(self.warnings),
        }


def analyze(alpha: Sequence[complex], tol: float = DEFAULT_TOL) -> SpectrumReport:
    """Full report for one spectrum; requires hyperbolicity only.

    For a non-dilation (but hyperbolic) spectrum the resonance lists
    are left empty and is_dilation is False.
    """
    a = _as_alpha(alpha)
    lam = lambda_index(a)
    perm = tuple(sorted(range(1, len(a) + 1), key=lambda i: -a[i - 1].real))
    if not all(x.real < 0 for x in a):
        return SpectrumReport(a, False, lam, (), tuple([0] * len(a)), 0, (), (), perm)
    hits, warns = _enumerate(a, tol, "full")
    pure, _ = _enumerate(a, tol, "pure_real")
    m = [0] * len(a)
    for r in hits:
        m[r.target - 1] = max(m[r.target - 1], r.order())
    return SpectrumReport(
        a, True, lam, tuple(hits), tuple(m), max(m, default=0), tuple(pure),
        tuple(warns), perm,
    )
