"""Rigidity checks: commutation, linear-element propagation, coincidence.

Everything here turns an exact statement about semigroups into a
finite battery of numerical probes over small (t, z) grids, with the
grids and deviations recorded in the reports so a run can be replayed.

Coefficient curves track how one monomial coefficient of the time-t
map evolves: component j, multi-index k, derivative a at t = 0.  When
(alpha, k) = alpha_j the coefficient grows like a t e^{alpha_j t};
otherwise it is a combination of the two exponentials vanishing at
t = 0.  The composition law of the semigroup forces the cocycle
p(t+s) = e^{alpha_j t} p(s) + p(t) e^{(alpha,k) s}, which is what the
uniqueness arguments exploit; ``cocycle_check`` verifies it.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import PolyMap, VectorField
from .errors import ValidationError
from . import flow as _flow
from . import koenigs as _koenigs
from . import spectrum

DEFAULT_T_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_Z_COUNT = 16
DEFAULT_Z_RADIUS = 0.1

PROBE_DELTA = 0.1
PROBE_RTOL = 1e-12
PROBE_ATOL = 1e-14
LINEARITY_THRESHOLD = 1e-6

# consistency bands for a declared CoefficientCurve kind, relative to
# the spectrum scale
_RESONANT_BAND = 1e-6
_NONRESONANT_FLOOR = 1e-12


def polydisc_grid(
    dimension: int,
    count: int = DEFAULT_Z_COUNT,
    radius: float = DEFAULT_Z_RADIUS,
    seed: int = 0,
) -> tuple:
    """Seeded quasi-uniform sample of the closed polydisc of the given radius."""
    if dimension < 1 or count < 1 or radius <= 0:
        raise ValidationError("polydisc_grid needs dimension, count >= 1 and radius > 0")
    rng = np.random.default_rng(seed)
    u = rng.random((count, dimension, 2))
    points = []
    for row in u:
        point = tuple(
            radius * math.sqrt(r) * cmath.exp(2j * math.pi * th) for r, th in row
        )
        points.append(point)
    return tuple(points)


def monomial_coefficient(
    map_eval: Callable[[Sequence[complex]], Sequence[complex]],
    dimension: int,
    j: int,
    k: Sequence[int],
    radius: float = 0.05,
    nodes: int = 12,
) -> complex:
    """Taylor coefficient of component j at multi-index k via Cauchy integrals.

    Tensor-product trapezoid rule on the torus |w_q| = radius; exact
    for polynomial maps of per-variable degree < nodes, spectrally
    accurate for maps analytic past the torus.
    """
    k = tuple(int(v) for v in k)
    if not 1 <= j <= dimension:
        raise ValidationError("component index out of range")
    if len(k) != dimension or any(v < 0 for v in k):
        raise ValidationError("multi-index must have one entry >= 0 per variable")
    if radius <= 0:
        raise ValidationError("radius must be positive")
    if nodes < 2 or nodes <= max(k):
        raise ValidationError("nodes must exceed every multi-index entry")
    roots = [cmath.exp(2j * math.pi * m / nodes) for m in range(nodes)]
    total = 0.0 + 0.0j
    for multi in itertools.product(range(nodes), repeat=dimension):
        w = [radius * roots[m] for m in multi]
        val = map_eval(w)[j - 1]
        phase = 1.0 + 0.0j
        for q in range(dimension):
            phase *= roots[multi[q]] ** k[q]
        total += val / phase
    return total / (nodes**dimension * radius ** sum(k))


# ---------------------------------------------------------------------------
# commutation


@dataclass(frozen=True)
class CommutationReport:
    passed: bool
    max_deviation: float
    tol: float
    t_grid: tuple
    z_grid: tuple
    deviations: tuple  # rows per t, columns per z

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "t_grid": [float(t) for t in self.t_grid],
            "z_grid": [
                [x for v in z for x in (v.real, v.imag)] for z in self.z_grid
            ],
            "deviations": [[float(d) for d in row] for row in self.deviations],
        }


def check_commutation(
    psi,
    field: VectorField,
    t_grid: Sequence[float] | None = None,
    z_grid: Sequence[Sequence[complex]] | None = None,
    tol: float = 1e-8,
    rtol: float = PROBE_RTOL,
    atol: float = PROBE_ATOL,
    seed: int = 0,
) -> CommutationReport:
    """Does psi commute with the flow of ``field`` on the grid?

    ``psi`` is a PolyMap or any callable point -> point.  Deviation is
    the sup norm of psi(phi_t(z)) - phi_t(psi(z)) per sample.
    """
    n = field.dimension
    if isinstance(psi, PolyMap):
        if psi.dimension != n:
            raise ValidationError("psi dimension does not match the field")
        psi_eval = psi.evaluate
    elif callable(psi):
        psi_eval = psi
    else:
        raise ValidationError("psi must be a PolyMap or a callable")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    t_grid = tuple(float(t) for t in (t_grid if t_grid is not None else DEFAULT_T_GRID))
    if z_grid is None:
        z_grid = polydisc_grid(n, seed=seed)
    z_grid = tuple(tuple(complex(v) for v in z) for z in z_grid)
    if not t_grid or not z_grid:
        raise ValidationError("grids must be nonempty")
    if any(t < 0 for t in t_grid):
        raise ValidationError("t grid must be nonnegative")
    rows = []
    worst = 0.0
    for t in t_grid:
        row = []
        for z in z_grid:
            left = np.asarray(
                psi_eval(_flow.flow_at(field, z, t, rtol=rtol, atol=atol)),
                dtype=complex,
            )
            right = _flow.flow_at(field, psi_eval(z), t, rtol=rtol, atol=atol)
            dev = float(np.max(np.abs(left - np.asarray(right, dtype=complex))))
            row.append(dev)
            worst = max(worst, dev)
        rows.append(tuple(row))
    return CommutationReport(worst <= tol, worst, tol, t_grid, z_grid, tuple(rows))


# ---------------------------------------------------------------------------
# unique linearizability of a discrete diagonal map


@dataclass(frozen=True)
class UniquenessReport:
    unique: bool
    witnesses: tuple  # spectrum.Resonance entries
    beta: tuple
    tol: float

    def to_json_dict(self) -> dict:
        return {
            "unique": self.unique,
            "witnesses": [w.to_json_dict() for w in self.witnesses],
            "beta": [[v.real, v.imag] for v in self.beta],
            "tol": self.tol,
        }


def unique_linearizability(
    beta: Sequence[complex], tol: float = spectrum.DEFAULT_TOL
) -> UniquenessReport:
    """A diagonal contraction diag(beta) is uniquely linearizable iff
    no multiplicative relation beta^k = beta_j with |k| >= 2 holds."""
    beta = tuple(complex(b) for b in beta)
    witnesses = tuple(spectrum.discrete_resonances(beta, tol))
    return UniquenessReport(not witnesses, witnesses, beta, tol)


# ---------------------------------------------------------------------------
# coefficient curves


@dataclass(frozen=True)
class CoefficientCurve:
    """Evolution data for one monomial coefficient of the time-t maps.

    a is the t-derivative of the coefficient at t = 0 (the generator
    coefficient); kind says whether (alpha, k) equals alpha_j, which
    switches the closed form.
    """

    j: int
    k: tuple
    a: complex
    alpha: tuple
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "alpha", tuple(complex(v) for v in self.alpha))
        n = len(self.alpha)
        if n == 0:
            raise ValidationError("alpha must be nonempty")
        if not 1 <= self.j <= n:
            raise ValidationError("component index out of range")
        if len(self.k) != n or any(v < 0 for v in self.k):
            raise ValidationError("multi-index must have one entry >= 0 per variable")
        if sum(self.k) < 2:
            raise ValidationError("coefficient curves need |k| >= 2")
        if self.kind not in ("resonant", "nonresonant"):
            raise ValidationError("kind must be 'resonant' or 'nonresonant'")
        scale = max(abs(v) for v in self.alpha)
        gap = abs(self.divisor)
        if self.kind == "resonant" and gap > _RESONANT_BAND * scale:
            raise ValidationError(
                "declared resonant but (alpha,k) - alpha_j = %g" % gap
            )
        if self.kind == "nonresonant" and gap <= _NONRESONANT_FLOOR * scale:
            raise ValidationError(
                "declared nonresonant but (alpha,k) - alpha_j = %g; "
                "the closed form would divide by it" % gap
            )

    @property
    def divisor(self) -> complex:
        ak = sum(ki * ai for ki, ai in zip(self.k, self.alpha))
        return ak - self.alpha[self.j - 1]

    @property
    def effective_ak(self) -> complex:
        """(alpha, k), snapped to alpha_j exactly for resonant curves."""
        if self.kind == "resonant":
            return self.alpha[self.j - 1]
        return sum(ki * ai for ki, ai in zip(self.k, self.alpha))

    @classmethod
    def classify(
        cls, j: int, k: Sequence[int], a: complex, alpha: Sequence[complex],
        tol: float = spectrum.DEFAULT_TOL,
    ) -> "CoefficientCurve":
        alpha = tuple(complex(v) for v in alpha)
        k = tuple(int(v) for v in k)
        ak = sum(ki * ai for ki, ai in zip(k, alpha))
        scale = max(abs(v) for v in alpha) if alpha else 1.0
        kind = "resonant" if abs(ak - alpha[j - 1]) <= tol * scale else "nonresonant"
        return cls(j, k, a, alpha, kind)

    def to_json_dict(self) -> dict:
        return {
            "j": self.j,
            "k": list(self.k),
            "a": [self.a.real, self.a.imag],
            "alpha": [[v.real, v.imag] for v in self.alpha],
            "kind": self.kind,
        }


def coefficient_evolution(curve: CoefficientCurve, t: float) -> complex:
    """Closed-form coefficient value at time t; 0 at t = 0."""
    aj = curve.alpha[curve.j - 1]
    if curve.kind == "resonant":
        return curve.a * t * cmath.exp(aj * t)
    ak = curve.effective_ak
    return curve.a * (cmath.exp(ak * t) - cmath.exp(aj * t)) / (ak - aj)


def cocycle_check(
    curve: CoefficientCurve, t: float, s: float, tol: float = 1e-12
) -> bool:
    """p(t+s) = e^{alpha_j t} p(s) + p(t) e^{(alpha,k) s} within tol."""
    aj = curve.alpha[curve.j - 1]
    ak = curve.effective_ak
    lhs = coefficient_evolution(curve, t + s)
    rhs = cmath.exp(aj * t) * coefficient_evolution(curve, s) + coefficient_evolution(
        curve, t
    ) * cmath.exp(ak * s)
    return abs(lhs - rhs) <= tol


# ---------------------------------------------------------------------------
# linearity probes


def linearity_probe(
    map_eval: Callable[[Sequence[complex]], Sequence[complex]],
    dimension: int,
    delta: float = PROBE_DELTA,
) -> float:
    """Scaled curvature of a map near the origin.

    Second differences along each axis and each coordinate 2-plane,
    divided by delta^2; exactly 0 for affine maps, and approximately
    the largest second-derivative entry otherwise.
    """
    if delta <= 0:
        raise ValidationError("delta must be positive")
    n = dimension
    base = np.asarray(map_eval([0.0] * n), dtype=complex)
    singles = []
    worst = 0.0
    for p in range(n):
        e1 = [0.0] * n
        e1[p] = delta
        e2 = [0.0] * n
        e2[p] = 2.0 * delta
        f1 = np.asarray(map_eval(e1), dtype=complex)
        f2 = np.asarray(map_eval(e2), dtype=complex)
        singles.append(f1)
        worst = max(worst, float(np.max(np.abs(f2 - 2.0 * f1 + base))))
    for p in range(n):
        for q in range(p + 1, n):
            e = [0.0] * n
            e[p] = delta
            e[q] = delta
            f = np.asarray(map_eval(e), dtype=complex)
            worst = max(
                worst, float(np.max(np.abs(f - singles[p] - singles[q] + base)))
            )
    return worst / (delta * delta)


def flow_linearity(
    field: VectorField,
    t: float,
    delta: float = PROBE_DELTA,
    rtol: float = PROBE_RTOL,
    atol: float = PROBE_ATOL,
) -> float:
    """Scaled curvature of the time-t map of the field."""
    if t < 0:
        raise ValidationError("t must be nonnegative")
    if 2.0 * delta > field.radius:
        raise ValidationError("probe points 2*delta exceed the field radius")

    def mp(z):
        return _flow.flow_at(field, z, t, rtol=rtol, atol=atol)

    return linearity_probe(mp, field.dimension, delta)


@dataclass(frozen=True)
class LinearElementReport:
    t0: float
    t0_curvature: float
    t0_is_linear: bool
    threshold: float
    no_pure_real: bool
    pure_real_witnesses: tuple
    precheck_passed: bool
    precheck_explanation: str
    discrete_nonresonant: bool
    discrete_witnesses: tuple
    hypothesis_holds: bool
    grid: tuple  # (t, curvature, is_linear) triples
    verdict: str
    explanation: str

    def to_json_dict(self) -> dict:
        return {
            "t0": self.t0,
            "t0_curvature": self.t0_curvature,
            "t0_is_linear": self.t0_is_linear,
            "threshold": self.threshold,
            "hypotheses": {
                "no_pure_real_resonance": self.no_pure_real,
                "pure_real_witnesses": [w.to_json_dict() for w in self.pure_real_witnesses],
                "normal_linearizability_precheck": self.precheck_passed,
                "precheck_explanation": self.precheck_explanation,
                "discrete_nonresonant_at_t0": self.discrete_nonresonant,
                "discrete_witnesses": [w.to_json_dict() for w in self.discrete_witnesses],
                "any_holds": self.hypothesis_holds,
            },
            "grid": [
                {"t": t, "curvature": c, "is_linear": lin} for t, c, lin in self.grid
            ],
            "verdict": self.verdict,
            "explanation": self.explanation,
        }


def linear_element_check(
    field: VectorField,
    t0: float,
    threshold: float = LINEARITY_THRESHOLD,
    t_grid: Sequence[float] | None = None,
    delta: float = PROBE_DELTA,
    rtol: float = PROBE_RTOL,
    atol: float = PROBE_ATOL,
    tol: float = spectrum.DEFAULT_TOL,
) -> LinearElementReport:
    """Probe whether linearity of the time-t0 map propagates to all t.

    Verdicts: ``all-linear`` (t0 linear, a sufficient hypothesis
    holds, grid confirms), ``counterexample`` (t0 linear, every
    hypothesis fails, some other element is visibly nonlinear),
    ``nonlinear-element`` (t0 itself fails the probe), ``inconclusive``
    (t0 linear, no hypothesis, grid shows nothing), and
    ``propagation-violated`` (should not occur; reported if the grid
    contradicts a hypothesis that held).
    """
    if t0 <= 0:
        raise ValidationError("t0 must be positive")
    if not field.is_dilation:
        raise ValidationError("linear-element check expects a dilation field")
    curv0 = flow_linearity(field, t0, delta, rtol, atol)
    t0_linear = curv0 < threshold

    pure_real = tuple(spectrum.pure_real_resonances(field.alpha, tol))
    no_pure_real = not pure_real
    pre_ok, pre_msg = _koenigs.normal_linearizability_precheck(field)
    beta = tuple(cmath.exp(a * t0) for a in field.alpha)
    disc = tuple(spectrum.discrete_resonances(beta, tol))
    disc_ok = not disc
    hypothesis_holds = no_pure_real or pre_ok or disc_ok

    grid = []
    verdict = "nonlinear-element"
    if t0_linear:
        ts = tuple(float(t) for t in (t_grid if t_grid is not None else DEFAULT_T_GRID))
        if not ts or any(t <= 0 for t in ts):
            raise ValidationError("t grid must be positive and nonempty")
        for t in ts:
            c = flow_linearity(field, t, delta, rtol, atol)
            grid.append((t, c, c < threshold))
        all_linear = all(lin for _, _, lin in grid)
        if all_linear:
            verdict = "all-linear" if hypothesis_holds else "inconclusive"
        elif hypothesis_holds:
            verdict = "propagation-violated"
        else:
            verdict = "counterexample"

    if verdict == "nonlinear-element":
        explanation = (
            "the time-%g map fails the linearity probe (curvature %.3g); " % (t0, curv0)
        )
        if hypothesis_holds:
            explanation += (
                "a sufficient hypothesis holds, so linearity of any single "
                "element would propagate to all of them"
            )
        else:
            explanation += "no sufficient hypothesis holds"
    elif verdict == "all-linear":
        explanation = (
            "the time-%g map is linear, a sufficient hypothesis holds, and "
            "every sampled element passes the probe" % t0
        )
    elif verdict == "counterexample":
        worst = max((c for _, c, lin in grid if not lin), default=0.0)
        explanation = (
            "the time-%g map is linear yet other elements are not "
            "(curvature up to %.3g); every sufficient hypothesis fails, "
            "so this is the expected rigidity counterexample" % (t0, worst)
        )
    elif verdict == "inconclusive":
        explanation = (
            "the time-%g map and all sampled elements look linear, but no "
            "sufficient hypothesis holds, so nothing is concluded" % t0
        )
    else:
        explanation = (
            "a sufficient hypothesis holds but the grid contains a nonlinear "
            "element; this contradicts propagation and points at a numerical "
            "or modeling problem"
        )

    return LinearElementReport(
        float(t0),
        curv0,
        t0_linear,
        threshold,
        no_pure_real,
        pure_real,
        pre_ok,
        pre_msg,
        disc_ok,
        disc,
        hypothesis_holds,
        tuple(grid),
        verdict,
        explanation,
    )


# ---------------------------------------------------------------------------
# coincidence of commuting semigroups


@dataclass(frozen=True)
class CoincidenceReport:
    verdict: str
    coincide: bool
    hypotheses_met: bool
    commutation: CommutationReport
    uniqueness: UniquenessReport
    lambda_below_two: bool
    s0: float
    max_flow_deviation: float
    tol: float
    t_grid: tuple
    z_grid: tuple

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "coincide": self.coincide,
            "hypotheses_met": self.hypotheses_met,
            "commutation": self.commutation.to_json_dict(),
            "uniqueness": self.uniqueness.to_json_dict(),
            "lambda_below_two": self.lambda_below_two,
            "s0": self.s0,
            "max_flow_deviation": self.max_flow_deviation,
            "tol": self.tol,
            "t_grid": [float(t) for t in self.t_grid],
            "z_grid": [
                [x for v in z for x in (v.real, v.imag)] for z in self.z_grid
            ],
        }


def semigroups_coincide(
    f1: VectorField,
    f2: VectorField,
    s0: float = 1.0,
    t_grid: Sequence[float] | None = None,
    z_grid: Sequence[Sequence[complex]] | None = None,
    tol: float = 1e-8,
    rtol: float = PROBE_RTOL,
    atol: float = PROBE_ATOL,
    seed: int = 0,
) -> CoincidenceReport:
    """Two flows with the same linear part: do they agree everywhere?

    Hypotheses checked: the time-s0 element of the second flow
    commutes with the first flow, and either diag(e^{alpha s0}) is
    uniquely linearizable or the distortion index is below 2.  The
    flow deviation over the grid is reported regardless, so a failed
    hypothesis still comes with the observed disagreement.
    """
    if f1.dimension != f2.dimension:
        raise ValidationError("fields must share a dimension")
    scale = max(abs(v) for v in f1.alpha)
    gap = max(abs(a - b) for a, b in zip(f1.alpha, f2.alpha))
    if gap > 1e-12 * scale:
        raise ValidationError(
            "fields must share the linear part; spectra differ by %g" % gap
        )
    if s0 <= 0:
        raise ValidationError("s0 must be positive")
    n = f1.dimension
    t_grid = tuple(float(t) for t in (t_grid if t_grid is not None else DEFAULT_T_GRID))
    if z_grid is None:
        z_grid = polydisc_grid(n, seed=seed)
    z_grid = tuple(tuple(complex(v) for v in z) for z in z_grid)

    def psi_s0(z):
        return _flow.flow_at(f2, z, s0, rtol=rtol, atol=atol)

    comm = check_commutation(
        psi_s0, f1, t_grid=t_grid, z_grid=z_grid, tol=tol, rtol=rtol, atol=atol
    )
    beta = tuple(cmath.exp(a * s0) for a in f1.alpha)
    uniq = unique_linearizability(beta)
    lam_ok = spectrum.lambda_index(f1.alpha) < 2.0
    hypotheses_met = comm.passed and (uniq.unique or lam_ok)

    worst = 0.0
    for t in t_grid:
        for z in z_grid:
            a = _flow.flow_at(f1, z, t, rtol=rtol, atol=atol)
            b = _flow.flow_at(f2, z, t, rtol=rtol, atol=atol)
            worst = max(worst, float(np.max(np.abs(a - b))))
    coincide = worst <= tol

    if not hypotheses_met:
        verdict = "hypotheses not met"
    elif coincide:
        verdict = "coincide"
    else:
        verdict = "deviation-exceeds-tol"
    return CoincidenceReport(
        verdict,
        coincide,
        hypotheses_met,
        comm,
        uniq,
        lam_ok,
        float(s0),
        worst,
        tol,
        t_grid,
        z_grid,
    )
