"""Koenigs-type limits: does e^{-At} phi_t(z) settle down?

The rescaled orbit s(t) = e^{-At} Q(phi_t(z)) is sampled on a uniform
grid through one dense-output integration.  Q defaults to the
identity; a polynomial Q fixing the origin with identity derivative
can cancel obstructing terms, in which case the limit recovers a
linearizer even when the plain rescaled orbit has none.

Verdicts are decided from the successive differences d_i of the
samples over trailing windows:

* converged: some run of CONFIRM_WINDOW consecutive differences sits
  below tol without rising beyond a noise band of 0.1 tol (exact-zero
  ties, as for a linear field, count as non-rising); the earliest such
  run wins and the record is truncated there, since the rescaling
  amplifies integrator noise exponentially in t and would otherwise
  bury a limit that was already reached;
* diverged: sample norms grow tenfold across the detection window, or
  the differences stay large while pointing the same way (the drift
  ratio |sum d_i| / sum |d_i| near 1 separates a slow escape from a
  bounded oscillation);
* oscillating: differences stay above 10 tol with a small drift ratio
  while the underlying trajectory itself decays to the origin;
* inconclusive otherwise.

Rescaling multiplies component j by e^{-alpha_j t}, which reaches
e^{+|Re alpha_j| t_max}; any absolute error floor in the integration
would be amplified by that factor and bury the samples, so sampling
runs with purely relative error control (atol = 0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import PolyMap, VectorField
from .errors import ValidationError
from . import flow as _flow
from . import spectrum

DEFAULT_T_MAX = 40.0
DEFAULT_DT = 0.25
DEFAULT_TOL = 1e-9

CONFIRM_WINDOW = 5
DETECT_WINDOW = 20
GROWTH_FACTOR = 10.0
DRIFT_RATIO = 0.7


@dataclass(frozen=True)
class KoenigsResult:
    verdict: str  # converged | oscillating | diverged | inconclusive
    times: np.ndarray
    samples: np.ndarray
    diffs: np.ndarray
    limit: np.ndarray | None
    oscillation_amplitude: float | None

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "times": [float(t) for t in self.times],
            "samples": [
                [x for v in row for x in (v.real, v.imag)] for row in self.samples
            ],
            "diffs": [float(d) for d in self.diffs],
            "limit": None
            if self.limit is None
            else [x for v in self.limit for x in (v.real, v.imag)],
            "oscillation_amplitude": self.oscillation_amplitude,
        }

    def samples_csv(self) -> str:
        n = self.samples.shape[1]
        header = ["t"]
        for j in range(1, n + 1):
            header += ["re_s%d" % j, "im_s%d" % j]
        lines = [",".join(header)]
        for t, row in zip(self.times, self.samples):
            cells = ["%.17g" % t]
            for v in row:
                cells += ["%.17g" % v.real, "%.17g" % v.imag]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _verdict(samples, traj_decayed, tol):
    """Classify the sample sequence.

    Returns (verdict, cut, diffs, amplitude); ``cut`` is the sample
    index where convergence was confirmed, None otherwise.  The scan
    takes the EARLIEST confirmation window: the rescaling amplifies
    integrator noise like e^{|Re alpha| t}, so once the limit is
    reached, later windows degrade again and must not overturn it.
    """
    diffs = np.max(np.abs(np.diff(samples, axis=0)), axis=1)
    band = 0.1 * tol
    for i in range(CONFIRM_WINDOW, len(diffs) + 1):
        tail = diffs[i - CONFIRM_WINDOW : i]
        if bool(np.all(tail < tol)) and all(
            tail[q + 1] <= max(tail[q], band) for q in range(CONFIRM_WINDOW - 1)
        ):
            return "converged", i, diffs, None

    if len(diffs) >= DETECT_WINDOW:
        window = np.asarray(samples[-DETECT_WINDOW - 1 :])
        wdiffs = np.diff(window, axis=0)
        norms = np.max(np.abs(window), axis=1)
        floor = float(np.min(np.max(np.abs(wdiffs), axis=1)))
        total = float(np.sum(np.sqrt(np.sum(np.abs(wdiffs) ** 2, axis=1))))
        net = float(np.sqrt(np.sum(np.abs(np.sum(wdiffs, axis=0)) ** 2)))
        drift = 1.0 if total == 0.0 else net / total
        first = float(norms[0])
        last = float(norms[-1])
        if (math.isinf(last) or last >= GROWTH_FACTOR * max(first, 1e-300)) or (
            floor > 10.0 * tol and drift >= DRIFT_RATIO
        ):
            return "diverged", None, diffs, None
        if floor > 10.0 * tol and drift < DRIFT_RATIO and traj_decayed:
            # half the max pairwise distance; robust when the window
            # covers only part of an oscillation period
            amp = 0.0
            for q in range(len(window) - 1):
                gap = np.max(np.abs(window[q + 1 :] - window[q]), axis=1)
                amp = max(amp, float(np.max(gap)))
            return "oscillating", None, diffs, 0.5 * amp
    return "inconclusive", None, diffs, None


def _run(field, pre, z, t_max, dt, tol, rtol):
    if not field.is_dilation:
        raise ValidationError("rescaled-orbit limits need a dilation field")
    if dt <= 0 or t_max <= 0 or t_max < 2 * dt:
        raise ValidationError("need 0 < dt and t_max >= 2 dt")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    n = field.dimension
    count = int(math.floor(t_max / dt + 1e-9))
    times = [i * dt for i in range(count + 1)]
    alpha = field.alpha
    if field.min_higher_degree() is None:
        # linear field: phi_t = e^{At} z in closed form, so the
        # rescaled orbit is constant (exactly z when pre is absent)
        zc = [complex(v) for v in z]
        points = []
        samples = []
        for t in times:
            point = np.array(
                [cmath.exp(alpha[q] * t) * zc[q] for q in range(n)], dtype=complex
            )
            points.append(point)
            if pre is None:
                samples.append(np.array(zc, dtype=complex))
            else:
                mapped = pre.evaluate(point)
                samples.append(
                    np.array(
                        [cmath.exp(-alpha[q] * t) * mapped[q] for q in range(n)],
                        dtype=complex,
                    )
                )
        sample_times = np.array(times)
        points = np.array(points)
    else:
        traj = _flow.integrate(field, z, times[-1], rtol=rtol, atol=0.0, t_eval=times)
        sample_times = np.asarray(traj.times)
        points = traj.points
        samples = []
        for t, point in zip(traj.times, traj.points):
            mapped = pre.evaluate(point) if pre is not None else point
            samples.append(
                np.array(
                    [cmath.exp(-alpha[q] * t) * mapped[q] for q in range(n)],
                    dtype=complex,
                )
            )
    samples = np.array(samples)
    z0_norm = float(np.max(np.abs(points[0]))) if n else 0.0
    final_norm = float(np.max(np.abs(points[-1])))
    traj_decayed = final_norm <= 1e-3 * max(z0_norm, 1e-300)
    verdict, cut, diffs, amplitude = _verdict(samples, traj_decayed, tol)
    if verdict == "converged":
        return KoenigsResult(
            verdict,
            sample_times[: cut + 1],
            samples[: cut + 1],
            diffs[:cut],
            samples[cut].copy(),
            None,
        )
    return KoenigsResult(verdict, sample_times, samples, diffs, None, amplitude)


def limit(
    field: VectorField,
    z: Sequence[complex],
    t_max: float = DEFAULT_T_MAX,
    dt: float = DEFAULT_DT,
    tol: float = DEFAULT_TOL,
    rtol: float = _flow.DEFAULT_RTOL,
) -> KoenigsResult:
    """Sampled verdict on lim e^{-At} phi_t(z)."""
    return _run(field, None, z, t_max, dt, tol, rtol)


def limit_with_precomposition(
    field: VectorField,
    pre: PolyMap,
    z: Sequence[complex],
    t_max: float = DEFAULT_T_MAX,
    dt: float = DEFAULT_DT,
    tol: float = DEFAULT_TOL,
    rtol: float = _flow.DEFAULT_RTOL,
) -> KoenigsResult:
    """Same limit with samples e^{-At} pre(phi_t(z)).

    ``pre`` must fix the origin with identity derivative, the
    normalization that keeps the limit a candidate linearizer.
    """
    if pre.dimension != field.dimension:
        raise ValidationError("precomposition dimension mismatch")
    if not pre.has_zero_constant_term() or not pre.has_identity_linear_part():
        raise ValidationError(
            "precomposition must fix the origin with identity linear part"
        )
    return _run(field, pre, z, t_max, dt, tol, rtol)


def normal_linearizability_precheck(field: VectorField) -> tuple[bool, str]:
    """Sufficient decay test: lowest nonlinear degree beats the distortion.

    When the higher part starts at degree m with m > lambda_index the
    rescaled orbit converges for every point in the polydisc.  The
    test failing decides nothing by itself.
    """
    lam = spectrum.lambda_index(field.alpha)
    if not field.is_dilation:
        raise ValidationError("precheck expects a dilation field")
    m = field.min_higher_degree()
    if m is None:
        return True, "field is linear; the rescaled orbit is constant"
    if m > lam:
        return True, (
            "lowest nonlinear degree m=%d exceeds the distortion index %.6g; "
            "convergence is guaranteed" % (m, lam)
        )
    return False, (
        "lowest nonlinear degree m=%d does not exceed the distortion index %.6g; "
        "no conclusion from this test" % (m, lam)
    )
