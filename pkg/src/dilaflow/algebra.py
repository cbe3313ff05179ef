"""Sparse truncated polynomial maps and vector fields on C^n.

Conventions used across the package:

* components are numbered 1..n, matching the serialized form;
* an exponent is a tuple of n non-negative ints, position i belongs to
  the variable z_{i+1}, so ``(2, 0)`` reads "z1 squared";
* term tables are sparse (zero coefficients are never stored), and all
  arithmetic iterates terms in graded lexicographic order so results
  are reproducible bit for bit across runs and platforms;
* coefficients whose modulus drops below PRUNE_TOL after arithmetic
  are treated as double-precision noise and removed.

A "triangular" map is one that some relabeling of coordinates brings to
the shape where component j uses only z_1..z_j and its degree-1 part is
a multiple of z_j.  ``PolyMap.is_triangular`` finds the relabeling by a
dependency-graph search instead of trying all n! orders.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError

# Coefficients below this modulus are considered arithmetic noise.
PRUNE_TOL = 1e-14

Exponent = tuple[int, ...]
TermKey = tuple[int, Exponent]  # (component, exponent), component is 1-based


def grlex_key(k: Exponent) -> tuple:
    return (sum(k), k)


def _term_key(item) -> tuple:
    (j, k), _ = item
    return (sum(k), k, j)


def _sorted_terms(terms: Mapping[TermKey, complex]):
    return sorted(terms.items(), key=_term_key)


def _is_finite(c: complex) -> bool:
    return math.isfinite(c.real) and math.isfinite(c.imag)


def _unit_exponent(n: int, i: int) -> Exponent:
    """Exponent tuple of z_i (1-based i)."""
    return tuple(1 if q == i - 1 else 0 for q in range(n))


# ---------------------------------------------------------------------------
# scalar series helpers: one component as {exponent: coefficient}

def _series_mul(a: dict, b: dict, n: int, cap: int, prune: float) -> dict:
    out: dict = {}
    for ka, ca in sorted(a.items(), key=lambda kv: grlex_key(kv[0])):
        da = sum(ka)
        for kb, cb in sorted(b.items(), key=lambda kv: grlex_key(kv[0])):
            if da + sum(kb) > cap:
                continue
            km = tuple(x + y for x, y in zip(ka, kb))
            out[km] = out.get(km, 0j) + ca * cb
    return {k: c for k, c in out.items() if abs(c) > prune}


def _series_pow(a: dict, p: int, n: int, cap: int, prune: float) -> dict:
    result = {tuple(0 for _ in range(n)): 1.0 + 0j}
    for _ in range(p):
        result = _series_mul(result, a, n, cap, prune)
    return result


@dataclass(frozen=True)
class PolyMap:
    """Polynomial self-map of C^n stored as a sparse term table.

    ``terms`` maps (component, exponent) to a complex coefficient.  The
    table is validated, copied and pruned at construction; treat
    instances as immutable.
    """

    dimension: int
    max_degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.dimension
        if not isinstance(n, int) or n < 1:
            raise ValidationError("dimension must be a positive int, got %r" % (n,))
        if not isinstance(self.max_degree, int) or self.max_degree < 0:
            raise ValidationError("max_degree must be a non-negative int")
        clean: dict = {}
        for key, c in self.terms.items():
            try:
                j, k = key
            except (TypeError, ValueError):
                raise ValidationError("term key must be (component, exponents), got %r" % (key,))
            if not isinstance(j, int) or not (1 <= j <= n):
                raise ValidationError("component %r out of range 1..%d" % (j, n))
            k = tuple(k)
            if len(k) != n or any((not isinstance(e, int)) or e < 0 for e in k):
                raise ValidationError("bad exponent tuple %r for dimension %d" % (k, n))
            if sum(k) > self.max_degree:
                raise ValidationError(
                    "term (j=%d, k=%s) exceeds max_degree=%d" % (j, k, self.max_degree)
                )
            c = complex(c)
            if not _is_finite(c):
                raise ValidationError("non-finite coefficient at (j=%d, k=%s)" % (j, k))
            if abs(c) > PRUNE_TOL:
                clean[(j, k)] = c
        object.__setattr__(self, "terms", clean)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dimension: int, max_degree: int = 0) -> "PolyMap":
        return cls(dimension, max_degree, {})

    @classmethod
    def identity(cls, dimension: int, max_degree: int = 1) -> "PolyMap":
        if max_degree < 1:
            raise ValidationError("identity needs max_degree >= 1")
        terms = {(j, _unit_exponent(dimension, j)): 1.0 + 0j for j in range(1, dimension + 1)}
        return cls(dimension, max_degree, terms)

    @classmethod
    def linear(cls, diag: Sequence[complex], max_degree: int = 1) -> "PolyMap":
        """Diagonal linear map z_j -> diag[j-1] * z_j."""
        n = len(diag)
        terms = {(j, _unit_exponent(n, j)): complex(diag[j - 1]) for j in range(1, n + 1)}
        return cls(n, max(1, max_degree), terms)

    # -- basic queries -------------------------------------------------------

    def degree(self) -> int:
        """Largest total degree actually present (0 for the zero map)."""
        return max((sum(k) for (_, k) in self.terms), default=0)

    def max_coefficient(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def coefficient(self, j: int, k: Sequence[int]) -> complex:
        return self.terms.get((j, tuple(k)), 0j)

    def coefficient_mass(self) -> float:
        """Sum of coefficient moduli, a crude norm on the polydisc."""
        return sum(abs(c) for c in self.terms.values())

    def has_zero_constant_term(self) -> bool:
        return all(sum(k) > 0 for (_, k) in self.terms)

    def linear_part(self) -> dict:
        return {key: c for key, c in self.terms.items() if sum(key[1]) == 1}

    def has_identity_linear_part(self, tol: float = 1e-12) -> bool:
        lin = self.linear_part()
        n = self.dimension
        for j in range(1, n + 1):
            if abs(lin.pop((j, _unit_exponent(n, j)), 0j) - 1.0) > tol:
                return False
        return all(abs(c) <= tol for c in lin.values())

    def component_series(self, j: int) -> dict:
        """Terms of component j as {exponent: coefficient}."""
        return {k: c for (jj, k), c in self.terms.items() if jj == j}

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, z: Sequence[complex]) -> np.ndarray:
        zv = np.asarray(z, dtype=complex)
        if zv.shape != (self.dimension,):
            raise ValidationError(
                "point has shape %s, expected (%d,)" % (zv.shape, self.dimension)
            )
        zt = [complex(v) for v in zv]
        out = [0j] * self.dimension
        for (j, k), c in _sorted_terms(self.terms):
            m = c
            for i, ki in enumerate(k):
                if ki:
                    m *= zt[i] ** ki
            out[j - 1] += m
        return np.array(out, dtype=complex)

    __call__ = evaluate

    # -- arithmetic ----------------------------------------------------------

    def _merged(self, other: "PolyMap", sign: int) -> "PolyMap":
        if other.dimension != self.dimension:
            raise ValidationError("dimension mismatch in PolyMap arithmetic")
        out = dict(self.terms)
        for key, c in _sorted_terms(other.terms):
            out[key] = out.get(key, 0j) + sign * c
        return PolyMap(self.dimension, max(self.max_degree, other.max_degree), out)

    def __add__(self, other: "PolyMap") -> "PolyMap":
        return self._merged(other, +1)

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        return self._merged(other, -1)

    def scaled(self, factor: complex) -> "PolyMap":
        return PolyMap(
            self.dimension,
            self.max_degree,
            {key: factor * c for key, c in self.terms.items()},
        )

    def diag_scale(self, diag: Sequence[complex]) -> "PolyMap":
        """Apply the diagonal matrix diag on the left: component j scales by diag[j-1]."""
        if len(diag) != self.dimension:
            raise ValidationError("diag length mismatch")
        return PolyMap(
            self.dimension,
            self.max_degree,
            {(j, k): complex(diag[j - 1]) * c for (j, k), c in self.terms.items()},
        )

    def truncated(self, cap: int) -> "PolyMap":
        return PolyMap(
            self.dimension, cap, {key: c for key, c in self.terms.items() if sum(key[1]) <= cap}
        )

    def homogeneous_part(self, m: int) -> "PolyMap":
        """Terms of total degree exactly m; zero map when none exist."""
        if m < 0:
            raise ValidationError("degree must be non-negative")
        return PolyMap(
            self.dimension,
            self.max_degree,
            {key: c for key, c in self.terms.items() if sum(key[1]) == m},
        )

    # -- composition and differentiation --------------------------------------

    def compose(self, inner: "PolyMap", truncate_to: int) -> "PolyMap":
        """self after inner, truncated to total degree ``truncate_to``.

        ``inner`` must fix the origin, otherwise the truncation has no
        meaning degree by degree.
        """
        if inner.dimension != self.dimension:
            raise ValidationError("dimension mismatch in compose")
        if not inner.has_zero_constant_term():
            raise ValidationError("inner map must have zero constant term")
        n = self.dimension
        series = [inner.component_series(i) for i in range(1, n + 1)]
        out: dict = {}
        for (j, k), c in _sorted_terms(self.terms):
            prod = {tuple(0 for _ in range(n)): 1.0 + 0j}
            for i, ki in enumerate(k):
                if ki:
                    prod = _series_mul(
                        prod, _series_pow(series[i], ki, n, truncate_to, PRUNE_TOL),
                        n, truncate_to, PRUNE_TOL,
                    )
                if not prod:
                    break
            for km, pc in sorted(prod.items(), key=lambda kv: grlex_key(kv[0])):
                key = (j, km)
                out[key] = out.get(key, 0j) + c * pc
        return PolyMap(n, truncate_to, out)

    def jacobian_apply(self, v: "PolyMap", truncate_to: int) -> "PolyMap":
        """The map z -> d(self)_z . v(z), truncated to total degree."""
        if v.dimension != self.dimension:
            raise ValidationError("dimension mismatch in jacobian_apply")
        n = self.dimension
        series = [v.component_series(i) for i in range(1, n + 1)]
        out: dict = {}
        for (j, k), c in _sorted_terms(self.terms):
            for i, ki in enumerate(k):
                if not ki:
                    continue
                dk = tuple(e - 1 if q == i else e for q, e in enumerate(k))
                base = sum(dk)
                dc = c * ki
                for km, vc in sorted(series[i].items(), key=lambda kv: grlex_key(kv[0])):
                    if base + sum(km) > truncate_to:
                        continue
                    key = (j, tuple(x + y for x, y in zip(dk, km)))
                    out[key] = out.get(key, 0j) + dc * vc
        return PolyMap(n, truncate_to, out)

    def inverse(self, truncate_to: int) -> "PolyMap":
        """Formal compositional inverse, degree by degree.

        Requires an identity linear part.  The defect of compose(self, q)
        at degree m depends only on the part of q below m, so one sweep
        per degree converges.
        """
        if not self.has_zero_constant_term():
            raise ValidationError("inverse needs a map fixing the origin")
        if not self.has_identity_linear_part():
            raise ValidationError("inverse implemented for identity linear part only")
        q = PolyMap.identity(self.dimension, truncate_to)
        ident = PolyMap.identity(self.dimension, truncate_to)
        for m in range(2, truncate_to + 1):
            defect = (self.compose(q, m) - ident.truncated(m)).homogeneous_part(m)
            if defect.terms:
                q = q - PolyMap(self.dimension, truncate_to, defect.terms)
        return q

    # -- structure -----------------------------------------------------------

    def permuted(self, perm: Sequence[int]) -> "PolyMap":
        """Conjugate by the coordinate relabeling ``perm``.

        ``perm[p-1]`` is the original coordinate placed at position p
        (1-based labels).  Components and variables move together, so
        the returned map is P o self o P^{-1} for the permutation
        matrix P sending e_{perm[p-1]} to e_p.
        """
        n = self.dimension
        if sorted(perm) != list(range(1, n + 1)):
            raise ValidationError("perm must be a permutation of 1..%d" % n)
        pos = {old: new for new, old in enumerate(perm, start=1)}
        out = {}
        for (j, k), c in self.terms.items():
            nk = tuple(k[perm[q] - 1] for q in range(n))
            out[(pos[j], nk)] = c
        return PolyMap(n, self.max_degree, out)

    def is_triangular(self) -> tuple[bool, tuple[int, ...] | None]:
        """Search for a relabeling that makes the map triangular.

        Returns (True, perm) with ``perm`` as in :meth:`permuted`, or
        (False, None).  Off-diagonal degree-1 terms rule triangularity
        out under any relabeling, so they are rejected before the
        dependency search.
        """
        n = self.dimension
        for (j, k), _ in self.terms.items():
            if sum(k) == 1 and k[j - 1] != 1:
                return False, None
        deps: dict[int, set] = {j: set() for j in range(1, n + 1)}
        for (j, k), _ in self.terms.items():
            for i, ki in enumerate(k, start=1):
                if ki and i != j:
                    deps[j].add(i)
        placed: set = set()
        order: list[int] = []
        remaining = set(range(1, n + 1))
        while remaining:
            ready = sorted(j for j in remaining if deps[j] <= placed)
            if not ready:
                return False, None
            j = ready[0]
            order.append(j)
            placed.add(j)
            remaining.discard(j)
        return True, tuple(order)

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "max_degree": self.max_degree,
            "terms": [
                {
                    "component": j,
                    "exponents": list(k),
                    "coeff": [c.real, c.imag],
                }
                for (j, k), c in _sorted_terms(self.terms)
            ],
        }

    @classmethod
    def from_json_dict(cls, data) -> "PolyMap":
        _check_keys(data, {"dimension", "max_degree", "terms"}, "PolyMap")
        dim = _check_int(data["dimension"], "dimension")
        mdeg = _check_int(data["max_degree"], "max_degree")
        raw = data["terms"]
        if not isinstance(raw, list):
            raise ValidationError("terms must be a list")
        terms = {}
        for entry in raw:
            _check_keys(entry, {"component", "exponents", "coeff"}, "term")
            j = _check_int(entry["component"], "component")
            k = entry["exponents"]
            if not isinstance(k, list) or any(not isinstance(e, int) for e in k):
                raise ValidationError("exponents must be a list of ints")
            c = _check_complex_pair(entry["coeff"], "coeff")
            key = (j, tuple(k))
            if key in terms:
                raise ValidationError("duplicate term (j=%d, k=%s)" % (j, tuple(k)))
            terms[key] = c
        return cls(dim, mdeg, terms)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorField:
    """Holomorphic vector field A z + g(z) with diagonal linear part.

    ``alpha`` holds the diagonal of A.  Construction reorders the
    coordinates so the real parts of alpha are non-increasing; the
    relabeling used is recorded in ``permutation`` (identity when the
    input was already ordered).  ``higher`` collects the terms of total
    degree >= 2 and ``radius`` bounds the polydisc where the expansion
    is trusted.
    """

    alpha: tuple
    higher: PolyMap
    radius: float = 1.0
    permutation: tuple = ()

    def __post_init__(self):
        alpha = tuple(complex(a) for a in self.alpha)
        n = len(alpha)
        if n < 1:
            raise ValidationError("alpha must be non-empty")
        if any(not _is_finite(a) for a in alpha):
            raise ValidationError("alpha entries must be finite")
        if not (isinstance(self.radius, (int, float)) and self.radius > 0 and math.isfinite(self.radius)):
            raise ValidationError("radius must be a positive finite real")
        higher = self.higher
        if higher.dimension != n:
            raise ValidationError("higher part dimension %d does not match alpha length %d"
                                  % (higher.dimension, n))
        if any(sum(k) < 2 for (_, k) in higher.terms):
            raise ValidationError("higher part must contain only terms of degree >= 2")
        order = sorted(range(1, n + 1), key=lambda i: -alpha[i - 1].real)
        if order != list(range(1, n + 1)):
            alpha = tuple(alpha[i - 1] for i in order)
            higher = higher.permuted(tuple(order))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "higher", higher)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "permutation", tuple(order))

    @property
    def dimension(self) -> int:
        return len(self.alpha)

    @property
    def is_dilation(self) -> bool:
        return all(a.real < 0 for a in self.alpha)

    def min_higher_degree(self):
        """Smallest total degree in the higher part, None when it is empty."""
        return min((sum(k) for (_, k) in self.higher.terms), default=None)

    def as_polymap(self, truncate_to: int) -> PolyMap:
        terms = {
            (j, _unit_exponent(self.dimension, j)): self.alpha[j - 1]
            for j in range(1, self.dimension + 1)
        }
        for (j, k), c in self.higher.terms.items():
            if sum(k) <= truncate_to:
                terms[(j, k)] = c
        return PolyMap(self.dimension, truncate_to, terms)

    def evaluate(self, z: Sequence[complex]) -> np.ndarray:
        zv = np.asarray(z, dtype=complex)
        if zv.shape != (self.dimension,):
            raise ValidationError("point has shape %s, expected (%d,)" % (zv.shape, self.dimension))
        out = np.array(self.alpha, dtype=complex) * zv
        if self.higher.terms:
            out = out + self.higher.evaluate(zv)
        return out

    __call__ = evaluate

    def rhs(self) -> Callable[[list], list]:
        """Right-hand side closure on plain complex lists (hot path)."""
        alpha = list(self.alpha)
        terms = _sorted_terms(self.higher.terms)
        n = self.dimension

        def f(z: list) -> list:
            out = [alpha[i] * z[i] for i in range(n)]
            for (j, k), c in terms:
                m = c
                for i, ki in enumerate(k):
                    if ki:
                        m *= z[i] ** ki
                out[j - 1] += m
            return out

        return f

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "alpha": [[a.real, a.imag] for a in self.alpha],
            "radius": self.radius,
            "terms": [
                {"component": j, "exponents": list(k), "coeff": [c.real, c.imag]}
                for (j, k), c in _sorted_terms(self.higher.terms)
            ],
        }

    @classmethod
    def from_json_dict(cls, data) -> "VectorField":
        _check_keys(data, {"dimension", "alpha", "radius", "terms"}, "VectorField")
        dim = _check_int(data["dimension"], "dimension")
        raw_alpha = data["alpha"]
        if not isinstance(raw_alpha, list) or len(raw_alpha) != dim:
            raise ValidationError("alpha must be a list of %d [re, im] pairs" % dim)
        alpha = tuple(_check_complex_pair(a, "alpha entry") for a in raw_alpha)
        radius = data["radius"]
        if not isinstance(radius, (int, float)):
            raise ValidationError("radius must be a number")
        terms = {}
        if not isinstance(data["terms"], list):
            raise ValidationError("terms must be a list")
        max_deg = 0
        for entry in data["terms"]:
            _check_keys(entry, {"component", "exponents", "coeff"}, "term")
            j = _check_int(entry["component"], "component")
            k = entry["exponents"]
            if not isinstance(k, list) or any(not isinstance(e, int) for e in k):
                raise ValidationError("exponents must be a list of ints")
            c = _check_complex_pair(entry["coeff"], "coeff")
            key = (j, tuple(k))
            if key in terms:
                raise ValidationError("duplicate term (j=%d, k=%s)" % (j, tuple(k)))
            terms[key] = c
            max_deg = max(max_deg, sum(k))
        higher = PolyMap(dim, max(2, max_deg), terms)
        return cls(alpha, higher, float(radius))


def linear_flow_diag(alpha: Sequence[complex], t: float) -> np.ndarray:
    """Diagonal of exp(At) for A = diag(alpha)."""
    return np.array([cmath.exp(complex(a) * t) for a in alpha], dtype=complex)


# ---------------------------------------------------------------------------
# strict JSON helpers


def _check_keys(data, expected: set, what: str):
    if not isinstance(data, dict):
        raise ValidationError("%s must be a JSON object" % what)
    keys = set(data.keys())
    unknown = keys - expected
    missing = expected - keys
    if unknown:
        raise ValidationError("%s has unknown keys: %s" % (what, sorted(unknown)))
    if missing:
        raise ValidationError("%s is missing keys: %s" % (what, sorted(missing)))


def _check_int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError("%s must be an int, got %r" % (what, v))
    return v


def _check_complex_pair(v, what: str) -> complex:
    if (
        not isinstance(v, list)
        or len(v) != 2
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)
    ):
        raise ValidationError("%s must be a [re, im] pair" % what)
    c = complex(v[0], v[1])
    if not _is_finite(c):
        raise ValidationError("%s must be finite" % what)
    return c
