"""Built-in worked examples shared by the command line and the tests."""

from __future__ import annotations

from .algebra import PolyMap, VectorField
from .errors import ValidationError

NAMES = ("example1", "example2", "example3-map", "example3-h", "nonres-2.5", "chain-3d")


def example1(alpha1: complex = -1.0, m: int = 2, a: complex = 1.0) -> VectorField:
    """(alpha1 z1, m alpha1 z2 + a z1^m); the relation alpha_2 = m alpha_1
    makes the single nonlinear term resonant by construction."""
    if not isinstance(m, int) or m < 2:
        raise ValidationError("m must be an integer >= 2")
    alpha1 = complex(alpha1)
    if alpha1.real >= 0:
        raise ValidationError("alpha1 must have negative real part")
    higher = PolyMap(2, m, {(2, (m, 0)): complex(a)})
    return VectorField((alpha1, m * alpha1), higher)


def example2(a: complex = 1.0) -> VectorField:
    """(-(1+i) z1, -(2+i) z2 + a z1^2): only the real parts resonate."""
    higher = PolyMap(2, 2, {(2, (2, 0)): complex(a)})
    return VectorField((-(1 + 1j), -(2 + 1j)), higher, radius=2.0)


def example3_map() -> PolyMap:
    """The diagonal contraction diag(1/2, 1/4)."""
    return PolyMap(2, 1, {(1, (1, 0)): 0.5, (2, (0, 1)): 0.25})


def example3_h() -> PolyMap:
    """(z1, z1^2 + z2), a nonlinear map commuting with diag(1/2, 1/4)."""
    return PolyMap(2, 2, {(1, (1, 0)): 1.0, (2, (0, 1)): 1.0, (2, (2, 0)): 1.0})


def nonres_25() -> VectorField:
    """(-z1, -2.5 z2 + z1^2): nonresonant, linearized exactly by
    (z1, z2 - 2 z1^2)."""
    return VectorField((-1.0, -2.5), PolyMap(2, 2, {(2, (2, 0)): 1.0}))


def resonant_chain_3d() -> VectorField:
    """(-z1, -2 z2 + z1^2, -3 z3 + z1 z2): already in normal form, two
    resonant terms chained across three coordinates."""
    higher = PolyMap(3, 2, {(2, (2, 0, 0)): 1.0, (3, (1, 1, 0)): 1.0})
    return VectorField((-1.0, -2.0, -3.0), higher)


def get(name: str, alpha1: complex = -1.0, m: int = 2, a: complex = 1.0):
    """Fixture by CLI name; returns a VectorField or a PolyMap."""
    if name == "example1":
        return example1(alpha1, m, a)
    if name == "example2":
        return example2(a)
    if name == "example3-map":
        return example3_map()
    if name == "example3-h":
        return example3_h()
    if name == "nonres-2.5":
        return nonres_25()
    if name == "chain-3d":
        return resonant_chain_3d()
    raise ValidationError(
        "unknown fixture %r; available: %s" % (name, ", ".join(NAMES))
    )
