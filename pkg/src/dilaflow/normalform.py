"""Degree-by-degree normalization of a dilation-type field.

``solve`` conjugates f = A z + g(z) to its polynomial normal form: a
change of variable w = h(z), tangent to the identity, after which only
resonant monomials survive in the field.  At each degree m the
homological operator acts diagonally on monomials, sending e_j z^k to
((alpha,k) - alpha_j) e_j z^k, so a non-resonant coefficient c dies by
adding -c / ((alpha,k) - alpha_j) e_j z^k to the correction h_m.  The
field is then re-conjugated by id + h_m with full truncation before
the next degree is touched.

Resonant coefficients of each correction are left at zero (the free
parameters of the construction), which pins h uniquely.

Two refusal paths guard the divisors.  A term inside the resonance
tolerance that is not an exact match (beyond double noise) raises
NearResonanceError unless force_keep moves it into the normal field.
A term classified non-resonant whose divisor still sits inside the
tolerance raises SmallDivisorError: that combination means the true
resonance order exceeded the enumeration bound and the classification
cannot be trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import PolyMap, VectorField, _sorted_terms
from .errors import NearResonanceError, SmallDivisorError, ValidationError
from . import spectrum

DEFAULT_DEGREE = 8
# divisors below NOISE_FLOOR * max|alpha| count as exact resonances
NOISE_FLOOR = 1e-14


@dataclass(frozen=True)
class NormalFormResult:
    h: PolyMap
    h_inverse: PolyMap
    normal_field: VectorField
    removed_terms: int
    small_divisor_min: float | None

    def to_json_dict(self) -> dict:
        return {
            "h": self.h.to_json_dict(),
            "h_inverse": self.h_inverse.to_json_dict(),
            "normal_field": self.normal_field.to_json_dict(),
            "removed_terms": self.removed_terms,
            "small_divisor_min": self.small_divisor_min,
        }


def solve(
    field: VectorField,
    degree: int = DEFAULT_DEGREE,
    tol: float = spectrum.DEFAULT_TOL,
    force_keep: bool = False,
) -> NormalFormResult:
    """Normalize ``field`` through total degree ``degree``.

    Returns the conjugator h (identity linear part), its formal
    inverse, the normal field (same alpha, resonant terms only), the
    number of killed monomials and the smallest divisor met while
    killing them.
    """
    if degree < 2:
        raise ValidationError("degree must be at least 2")
    if not field.is_dilation:
        raise ValidationError("normal form solver expects a dilation-type field")
    n = field.dimension
    alpha = field.alpha
    scale = max(abs(a) for a in alpha)
    resonant = {(r.target, r.exponents) for r in spectrum.resonances(alpha, tol)}

    current = field.as_polymap(degree)
    h = PolyMap.identity(n, degree)
    removed = 0
    min_divisor = None

    for m in range(2, degree + 1):
        part = current.homogeneous_part(m)
        kill = {}
        for (j, k), c in _sorted_terms(part.terms):
            divisor = sum(ki * ai for ki, ai in zip(k, alpha)) - alpha[j - 1]
            if (j, k) in resonant:
                if abs(divisor) > NOISE_FLOOR * scale and not force_keep:
                    raise NearResonanceError(j, k, divisor)
                continue  # stays in the field, ends up in the normal form
            if abs(divisor) <= tol * scale:
                raise SmallDivisorError(j, k, divisor)
            kill[(j, k)] = -c / divisor
            removed += 1
            if min_divisor is None or abs(divisor) < min_divisor:
                min_divisor = abs(divisor)
        if not kill:
            continue
        g = PolyMap.identity(n, degree) + PolyMap(n, degree, kill)
        g_inv = g.inverse(degree)
        current = g.jacobian_apply(current, degree).compose(g_inv, degree)
        h = g.compose(h, degree)
        # The killed coefficients cancel analytically; drop the floating
        # residue so the surviving table is exactly the resonant one.
        cleaned = {}
        for key, c in current.terms.items():
            if sum(key[1]) == m and key in kill:
                if abs(c) > 1e-5 * max(1.0, part.max_coefficient()):
                    raise ValidationError(
                        "internal consistency failure at degree %d, term %s" % (m, key)
                    )
                continue
            cleaned[key] = c
        current = PolyMap(n, degree, cleaned)

    higher_terms = {key: c for key, c in current.terms.items() if sum(key[1]) >= 2}
    for (j, k) in higher_terms:
        if (j, k) not in resonant:
            raise ValidationError(
                "internal consistency failure: surviving term (j=%d, k=%s) "
                "is not resonant" % (j, k)
            )
    normal = VectorField(alpha, PolyMap(n, degree, higher_terms), field.radius)
    h_inv = h.inverse(degree)
    return NormalFormResult(h, h_inv, normal, removed, min_divisor)


def schroder_residual(
    h: PolyMap,
    field: VectorField,
    a_target: Sequence[complex],
    truncate_to: int,
) -> PolyMap:
    """The map dh_z f(z) - A h(z) truncated to total degree.

    Identically zero exactly when h solves the differential form of
    the linearization equation with target diagonal A.
    """
    if len(a_target) != h.dimension:
        raise ValidationError("a_target length mismatch")
    lhs = h.jacobian_apply(field.as_polymap(truncate_to), truncate_to)
    rhs = h.diag_scale([complex(a) for a in a_target]).truncated(truncate_to)
    return lhs - rhs


def conjugation_residual(
    h: PolyMap,
    h_inv: PolyMap,
    field: VectorField,
    normal_field: VectorField,
    truncate_to: int,
) -> float:
    """How far h is from conjugating ``field`` onto ``normal_field``.

    Measured both ways: the largest coefficient of dh f - fhat(h) and
    of dh_inv fhat - f(h_inv).  Zero for an exact conjugation.
    """
    fwd = h.jacobian_apply(field.as_polymap(truncate_to), truncate_to) - (
        normal_field.as_polymap(truncate_to).compose(h, truncate_to)
    )
    bwd = h_inv.jacobian_apply(normal_field.as_polymap(truncate_to), truncate_to) - (
        field.as_polymap(truncate_to).compose(h_inv, truncate_to)
    )
    return max(fwd.max_coefficient(), bwd.max_coefficient())
