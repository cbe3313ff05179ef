"""Flow evaluation: adaptive integration and closed forms.

``integrate`` advances dz/dt = f(z) with the Dormand-Prince 5(4)
embedded pair.  The state is kept as a plain list of Python complex
numbers: for the dimensions this package targets (n <= 4 in practice)
that beats array machinery by a wide margin, and the complex equation
is literally the same computation as the doubled real system.  Dense
output uses the classical quartic interpolant of the pair, which
matches values and derivatives at both step ends (a degree-4 Hermite
interpolant), so caller-requested times cost nothing extra.

Every accepted step is checked against the field's polydisc radius;
leaving it raises with an exit time bracketed on the interpolant.

``triangular_flow`` builds the exact flow of a triangular field whose
higher terms are all resonant: component by component the equation
reduces to integrating a polynomial in t, which keeps the group
polynomial in t and of bounded degree in z.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import PolyMap, VectorField, grlex_key, _check_keys, _check_int, _check_complex_pair
from .errors import (
    NumericsError,
    PolydiscExitError,
    StepSizeUnderflowError,
    ValidationError,
)
from . import spectrum

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# b5 - b4: weights of the embedded error estimate
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# Quartic dense-output polynomial, Horner coefficients per stage.
_BI = (
    (1.0, -183 / 64, 37 / 12, -145 / 128),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 1500 / 371, -1000 / 159, 1000 / 371),
    (0.0, -125 / 32, 125 / 12, -375 / 64),
    (0.0, 9477 / 3392, -729 / 106, 25515 / 6784),
    (0.0, -11 / 7, 11 / 3, -55 / 28),
    (0.0, 3 / 2, -4.0, 5 / 2),
)

_MAX_STEPS = 1_000_000


@dataclass
class Trajectory:
    """Sampled solution of one initial value problem.

    ``times`` starts at 0 and increases; ``points`` rows match it.
    ``max_local_error`` is the largest embedded error estimate (sup
    norm, absolute) among accepted steps.
    """

    times: np.ndarray
    points: np.ndarray
    n_accepted: int
    n_rejected: int
    max_local_error: float

    def final(self) -> np.ndarray:
        return self.points[-1]

    def to_csv(self) -> str:
        n = self.points.shape[1]
        header = ["t"]
        for j in range(1, n + 1):
            header += ["re_z%d" % j, "im_z%d" % j]
        lines = [",".join(header)]
        for t, row in zip(self.times, self.points):
            cells = ["%.17g" % t]
            for v in row:
                cells += ["%.17g" % v.real, "%.17g" % v.imag]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _error_norm(delta, y0, y1, rtol, atol) -> float:
    acc = 0.0
    n = len(delta)
    for i in range(n):
        sc = atol + rtol * max(abs(y0[i]), abs(y1[i]))
        d = abs(delta[i])
        if d == 0.0:
            continue
        if sc == 0.0:
            return math.inf
        acc += (d / sc) ** 2
    return math.sqrt(acc / n)


def _dense_eval(y0, ks, h, theta):
    out = list(y0)
    for i, row in enumerate(_BI):
        poly = theta * (row[0] + theta * (row[1] + theta * (row[2] + theta * row[3])))
        if poly == 0.0:
            continue
        coeff = h * poly
        ki = ks[i]
        for q in range(len(out)):
            out[q] += coeff * ki[q]
    return out


def _refine_exit_time(y0, ks, h, t0, radius):
    """Bisect the dense interpolant for the first crossing of the polydisc."""
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        y = _dense_eval(y0, ks, h, mid)
        if max(abs(v) for v in y) > radius:
            hi = mid
        else:
            lo = mid
    return t0 + hi * h


def integrate(
    field: VectorField,
    z0: Sequence[complex],
    t_end: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    t_eval: Sequence[float] | None = None,
) -> Trajectory:
    """Solve dz/dt = field(z) from z(0)=z0 up to t_end >= 0.

    With ``t_eval`` the trajectory is sampled at exactly those times
    (0 is prepended when missing) through the dense interpolant;
    otherwise the accepted step points are returned.  atol=0 switches
    to purely relative control, which keeps errors proportional to the
    decaying solution; components that are exactly zero stay exact
    under the scheme so this is safe for the fields handled here.
    """
    n = field.dimension
    z = [complex(v) for v in np.asarray(z0, dtype=complex).reshape(n)]
    if not math.isfinite(t_end) or t_end < 0:
        raise ValidationError("t_end must be a finite non-negative real")
    if rtol <= 0 or atol < 0:
        raise ValidationError("need rtol > 0 and atol >= 0")
    radius = field.radius
    if max(abs(v) for v in z) > radius:
        raise ValidationError("initial point lies outside the polydisc of radius %g" % radius)

    want_eval = t_eval is not None
    if want_eval:
        req = [float(t) for t in t_eval]
        if any(not math.isfinite(t) or t < 0 or t > t_end + 1e-12 for t in req):
            raise ValidationError("t_eval entries must lie in [0, t_end]")
        if sorted(req) != req:
            raise ValidationError("t_eval must be sorted increasingly")
        if not req or req[0] > 0.0:
            req = [0.0] + req
    else:
        req = []

    f = field.rhs()
    out_t = [0.0]
    out_z = [list(z)]
    next_req = 1 if want_eval else None  # req[0] == 0 already emitted

    if t_end == 0.0:
        times = np.array(out_t)
        pts = np.array(out_z, dtype=complex)
        return Trajectory(times, pts, 0, 0, 0.0)

    k1 = f(z)
    # initial step size: small probe balancing |z| and |f(z)|
    d0 = max((abs(v) for v in z), default=0.0)
    d1 = max((abs(v) for v in k1), default=0.0)
    h = 1e-6 if d1 == 0 else min(0.1 * t_end, 0.01 * max(d0, atol + rtol) / d1, 1.0)
    h = max(h, 1e-8)

    t = 0.0
    accepted = 0
    rejected = 0
    max_err_abs = 0.0
    steps = 0

    while t < t_end:
        if steps > _MAX_STEPS:
            raise NumericsError("step budget exhausted at t=%.6g" % t)
        steps += 1
        h = min(h, t_end - t)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflowError(t, h)

        ks = [k1]
        for s in range(1, 7):
            ys = list(z)
            arow = _A[s]
            for q in range(n):
                acc = 0j
                for m, a in enumerate(arow):
                    if a:
                        acc += a * ks[m][q]
                ys[q] += h * acc
            ks.append(f(ys))

        y1 = list(z)
        for q in range(n):
            acc = 0j
            for m, b in enumerate(_B5):
                if b:
                    acc += b * ks[m][q]
            y1[q] += h * acc

        delta = []
        for q in range(n):
            acc = 0j
            for m, e in enumerate(_E):
                if e:
                    acc += e * ks[m][q]
            delta.append(h * acc)

        err = _error_norm(delta, z, y1, rtol, atol)
        if err <= 1.0:
            # accepted step
            accepted += 1
            max_err_abs = max(max_err_abs, max((abs(d) for d in delta), default=0.0))
            t_new = t + h
            if max(abs(v) for v in y1) > radius:
                raise PolydiscExitError(_refine_exit_time(z, ks, h, t, radius), radius)
            if want_eval:
                while next_req < len(req) and req[next_req] <= t_new + 1e-13 * max(1.0, t_new):
                    theta = min(1.0, max(0.0, (req[next_req] - t) / h))
                    out_t.append(req[next_req])
                    out_z.append(_dense_eval(z, ks, h, theta))
                    next_req += 1
            else:
                out_t.append(t_new)
                out_z.append(list(y1))
            z = y1
            t = t_new
            k1 = ks[6]  # first-same-as-last
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= factor
        else:
            rejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)

    if want_eval and next_req is not None and next_req < len(req):
        # times equal to t_end within round-off
        for idx in range(next_req, len(req)):
            out_t.append(req[idx])
            out_z.append(list(z))

    times = np.array(out_t)
    pts = np.array(out_z, dtype=complex)
    return Trajectory(times, pts, accepted, rejected, max_err_abs)


def flow_at(
    field: VectorField,
    z0: Sequence[complex],
    t: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    """Convenience endpoint evaluation of the flow."""
    if t == 0.0:
        return np.asarray(z0, dtype=complex).copy()
    return integrate(field, z0, t, rtol=rtol, atol=atol).final()


def estimate_generator(
    flow_eval: Callable[[float, Sequence[complex]], Sequence[complex]],
    z: Sequence[complex],
    h_step: float = 1e-3,
) -> tuple[np.ndarray, float]:
    """Infer f(z) from the flow by extrapolated forward differences.

    Forward differences (phi_h(z) - z)/h at h, h/2 and h/4 feed two
    Richardson levels, cancelling the O(h) and O(h^2) terms; a single
    level is not accurate enough to reach 1e-8 at the default step.
    Returns (estimate, error_estimate).
    """
    if h_step <= 0:
        raise ValidationError("h_step must be positive")
    zv = np.asarray(z, dtype=complex)

    def diff(h):
        return (np.asarray(flow_eval(h, zv), dtype=complex) - zv) / h

    d1 = diff(h_step)
    d2 = diff(h_step / 2)
    d3 = diff(h_step / 4)
    r1 = 2.0 * d2 - d1
    r2 = 2.0 * d3 - d2
    value = (4.0 * r2 - r1) / 3.0
    err = float(np.max(np.abs(value - r2)))
    return value, err


# ---------------------------------------------------------------------------
# closed-form flows of resonant triangular fields


@dataclass(frozen=True)
class TriangularFlow:
    """Polynomial flow group of a resonant triangular field.

    Component j evaluates to e^{alpha_j t} (z_j + sum_k p_{j,k}(t) z^k)
    where every stored exponent k is a resonance for alpha_j and the
    polynomials p vanish at t=0.  ``coeffs`` maps (j, k) to the list of
    t-polynomial coefficients in increasing powers of t.
    """

    alpha: tuple
    coeffs: dict

    @property
    def dimension(self) -> int:
        return len(self.alpha)

    def evaluate(self, t: float, z: Sequence[complex]) -> np.ndarray:
        """The group element at any real t (negative values invert)."""
        n = self.dimension
        zv = np.asarray(z, dtype=complex)
        if zv.shape != (n,):
            raise ValidationError("point has shape %s, expected (%d,)" % (zv.shape, n))
        zt = [complex(v) for v in zv]
        out = []
        for j in range(1, n + 1):
            val = zt[j - 1]
            for (jj, k), poly in sorted(self.coeffs.items(), key=lambda kv: grlex_key(kv[0][1])):
                if jj != j:
                    continue
                p = 0j
                for c in reversed(poly):
                    p = p * t + c
                mono = 1.0 + 0j
                for i, ki in enumerate(k):
                    if ki:
                        mono *= zt[i] ** ki
                val += p * mono
            out.append(cmath.exp(self.alpha[j - 1] * t) * val)
        return np.array(out, dtype=complex)

    def polynomial_degree(self, j: int) -> int:
        """z-degree of the non-linear part of component j (0 if linear)."""
        return max((sum(k) for (jj, k) in self.coeffs if jj == j), default=0)

    def to_json_dict(self) -> dict:
        entries = []
        for (j, k), poly in sorted(self.coeffs.items(), key=lambda kv: (kv[0][0],) + grlex_key(kv[0][1])):
            entries.append(
                {
                    "j": j,
                    "k": list(k),
                    "t_poly": [[c.real, c.imag] for c in poly],
                }
            )
        return {
            "alpha": [[a.real, a.imag] for a in self.alpha],
            "terms": entries,
        }

    @classmethod
    def from_json_dict(cls, data) -> "TriangularFlow":
        _check_keys(data, {"alpha", "terms"}, "TriangularFlow")
        if not isinstance(data["alpha"], list) or not data["alpha"]:
            raise ValidationError("alpha must be a non-empty list")
        alpha = tuple(_check_complex_pair(a, "alpha entry") for a in data["alpha"])
        coeffs = {}
        if not isinstance(data["terms"], list):
            raise ValidationError("terms must be a list")
        for entry in data["terms"]:
            _check_keys(entry, {"j", "k", "t_poly"}, "term")
            j = _check_int(entry["j"], "j")
            k = entry["k"]
            if not isinstance(k, list) or any(not isinstance(e, int) for e in k):
                raise ValidationError("k must be a list of ints")
            poly = entry["t_poly"]
            if not isinstance(poly, list):
                raise ValidationError("t_poly must be a list")
            coeffs[(j, tuple(k))] = [_check_complex_pair(c, "t_poly entry") for c in poly]
        return cls(alpha, coeffs)


def _tpoly_mul(a: list, b: list) -> list:
    out = [0j] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for q, cb in enumerate(b):
            out[i + q] += ca * cb
    return out


def _tpoly_integrate(a: list) -> list:
    return [0j] + [c / (i + 1) for i, c in enumerate(a)]


def triangular_flow(field: VectorField, tol: float = spectrum.DEFAULT_TOL) -> TriangularFlow:
    """Exact flow of a field whose higher part is resonant and triangular.

    Requires every higher term (j, k) to satisfy k_j = .. = k_n = 0 and
    (alpha, k) = alpha_j within tol (relative).  Working up the
    components, substituting the already-built lower flows into the
    inhomogeneity makes e^{(alpha,k) t} cancel against e^{alpha_j t},
    leaving a polynomial in t to integrate termwise.
    """
    alpha = field.alpha
    n = field.dimension
    if not field.is_dilation:
        raise ValidationError("triangular_flow expects a dilation field")
    scale = max(abs(a) for a in alpha)
    for (j, k), _ in field.higher.terms.items():
        if any(k[i] for i in range(j - 1, n)):
            raise ValidationError(
                "field is not triangular: component %d uses variable %d"
                % (j, next(i + 1 for i in range(j - 1, n) if k[i]))
            )
        div = sum(ki * ai for ki, ai in zip(k, alpha)) - alpha[j - 1]
        if abs(div) > tol * scale:
            raise ValidationError(
                "non-resonant term (j=%d, k=%s) with divisor %.3e; "
                "triangular_flow handles exactly resonant fields" % (j, k, abs(div))
            )

    # phi[j] represents z-monomial -> t-polynomial for the factor
    # e^{-alpha_j t} (flow component j); the base term z_j has poly [1].
    phi: list[dict] = []
    zero = tuple(0 for _ in range(n))
    for j in range(1, n + 1):
        base_key = tuple(1 if i == j - 1 else 0 for i in range(n))
        comp = {base_key: [1.0 + 0j]}
        for (jj, k), c in sorted(field.higher.terms.items(), key=lambda kv: grlex_key(kv[0][1])):
            if jj != j:
                continue
            # expand prod_i phi_i^{k_i}: dict z-monomial -> t-poly
            prod = {zero: [complex(c)]}
            for i, ki in enumerate(k):
                for _ in range(ki):
                    nxt: dict = {}
                    for mk, mp in sorted(prod.items(), key=lambda kv: grlex_key(kv[0])):
                        for fk, fp in sorted(phi[i].items(), key=lambda kv: grlex_key(kv[0])):
                            key = tuple(x + y for x, y in zip(mk, fk))
                            tp = _tpoly_mul(mp, fp)
                            if key in nxt:
                                cur = nxt[key]
                                ln = max(len(cur), len(tp))
                                nxt[key] = [
                                    (cur[q] if q < len(cur) else 0j)
                                    + (tp[q] if q < len(tp) else 0j)
                                    for q in range(ln)
                                ]
                            else:
                                nxt[key] = tp
                    prod = nxt
            for mk, mp in sorted(prod.items(), key=lambda kv: grlex_key(kv[0])):
                tp = _tpoly_integrate(mp)
                if mk in comp:
                    cur = comp[mk]
                    ln = max(len(cur), len(tp))
                    comp[mk] = [
                        (cur[q] if q < len(cur) else 0j) + (tp[q] if q < len(tp) else 0j)
                        for q in range(ln)
                    ]
                else:
                    comp[mk] = tp
        phi.append(comp)

    coeffs = {}
    for j in range(1, n + 1):
        base_key = tuple(1 if i == j - 1 else 0 for i in range(n))
        for mk, mp in phi[j - 1].items():
            if mk == base_key:
                continue
            trimmed = list(mp)
            while trimmed and abs(trimmed[-1]) < 1e-300:
                trimmed.pop()
            if trimmed:
                coeffs[(j, mk)] = trimmed
    return TriangularFlow(tuple(alpha), coeffs)


def eval_triangular(flow: TriangularFlow, t: float, z: Sequence[complex]) -> np.ndarray:
    """Module-level alias for TriangularFlow.evaluate."""
    return flow.evaluate(t, z)
