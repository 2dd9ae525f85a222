"""Generalized twist flows on representations of surface groups.

For a curve ``a_i`` the flow fixes every standard generator except ``b_i``,
which is multiplied on the right by an element ``E`` of the centralizer of
the image of ``a_i``. Because ``E`` commutes with ``rho(a_i)``, the handle
commutator ``[a_i, b_i E]`` equals ``[a_i, b_i]`` and the relator is
preserved exactly.

Twists about other curves go through an automorphism ``phi`` of the free
group sending the relator to a conjugate of itself: the twist about
``phi(a_i)`` is ``push(twist(push(rho, phi)), phi^-1)``.
"""

from __future__ import annotations

import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Union

import mpmath
import numpy as np

from .groups import in_lie_algebra, member, variation
from .linalg import (
    ExactMatrix,
    exact_from_float,
    expm_dps,
    expm_mp,
    expm_precise,
    has_distinct_eigenvalues,
    mp_to_exact,
    to_mp,
)
from .reps import Representation, RepresentationError
from .words import SurfacePresentation, Word, algebraic_intersection, cyclic_key


class TwistError(ValueError):
    pass


@dataclass(frozen=True)
class TwistDatum:
    """A curve with the standard generators split into fixed and twisted sets."""

    presentation: SurfacePresentation
    curve: Word
    fixed: frozenset
    twisted: frozenset

    def __post_init__(self) -> None:
        pres = self.presentation
        pres.check_word(self.curve)
        gens = set(range(pres.rank))
        if self.fixed & self.twisted or self.fixed | self.twisted != gens:
            raise TwistError("every generator must be either fixed or twisted")
        for g in self.fixed:
            if algebraic_intersection(self.curve, Word.gen(g), pres) != 0:
                raise TwistError(f"fixed generator {pres.names[g]} meets the curve")
        for g in self.twisted:
            if algebraic_intersection(self.curve, Word.gen(g), pres) != 1:
                raise TwistError(f"twisted generator {pres.names[g]} does not meet the curve once positively")

    def describe(self) -> str:
        names = self.presentation.names
        return (f"curve {self.presentation.format(self.curve)}; twisted "
                f"{sorted(names[g] for g in self.twisted)}")


def standard_twist_datum(pres: SurfacePresentation, index: int | str) -> TwistDatum:
    """Datum for ``a_i``: ``b_i`` is twisted, all other generators fixed."""
    g = pres.index(index) if isinstance(index, str) else int(index)
    if not 0 <= g < pres.rank:
        raise TwistError(f"no generator with index {g}")
    if g % 2:
        raise TwistError(f"{pres.names[g]} is a b-generator; twist about it through an automorphism")
    return TwistDatum(pres, Word.gen(g), frozenset(i for i in range(pres.rank) if i != g + 1),
                      frozenset({g + 1}))


@dataclass(frozen=True)
class Substitution:
    """Endomorphism of the free group: generator ``g`` goes to ``images[g]``."""

    presentation: SurfacePresentation
    images: tuple

    def __post_init__(self) -> None:
        if len(self.images) != self.presentation.rank:
            raise TwistError("one image word per generator required")
        for w in self.images:
            self.presentation.check_word(w)

    @classmethod
    def identity(cls, pres: SurfacePresentation) -> Substitution:
        return cls(pres, tuple(Word.gen(g) for g in range(pres.rank)))

    @classmethod
    def from_mapping(cls, pres: SurfacePresentation, mapping: Mapping[str, str | Word]) -> Substitution:
        """Generators missing from ``mapping`` map to themselves."""
        images = [Word.gen(g) for g in range(pres.rank)]
        for name, w in mapping.items():
            images[pres.index(name)] = pres.parse(w) if isinstance(w, str) else w
        return cls(pres, tuple(images))

    def apply(self, w: Word) -> Word:
        return w.substitute(self.images)

    def then(self, other: Substitution) -> Substitution:
        """Composite ``g -> other(self(g))``: ``self`` first, then ``other``."""
        return Substitution(self.presentation, tuple(w.substitute(other.images) for w in self.images))

    def is_identity(self) -> bool:
        return all(w == Word.gen(g) for g, w in enumerate(self.images))

    def preserves_relator(self) -> bool:
        """True when the relator maps to a conjugate of itself in the free group."""
        rel = self.presentation.relator
        img = self.apply(rel)
        return bool(img) and cyclic_key(img) == cyclic_key(rel)

    def to_json(self) -> dict:
        return {self.presentation.names[g]: self.presentation.format(w)
                for g, w in enumerate(self.images) if w != Word.gen(g)}


@dataclass(frozen=True)
class ConjugatedTwist:
    """Twist about ``phi(curve of datum)``, given ``phi`` and its inverse."""

    datum: TwistDatum
    substitution: Substitution
    inverse: Substitution

    def __post_init__(self) -> None:
        if not self.substitution.preserves_relator():
            raise TwistError("substitution does not preserve the relator")
        if not (self.substitution.then(self.inverse).is_identity()
                and self.inverse.then(self.substitution).is_identity()):
            raise TwistError("inverse substitution does not invert the substitution")

    @property
    def presentation(self) -> SurfacePresentation:
        return self.datum.presentation

    @property
    def curve(self) -> Word:
        return self.substitution.apply(self.datum.curve)

    def describe(self) -> str:
        return f"curve {self.presentation.format(self.curve)} (via substitution)"


Twist = Union[TwistDatum, ConjugatedTwist]


def pushforward(rep: Representation, substitution: Substitution | Sequence[Word]) -> Representation:
    """Representation ``g -> rho(substitution(g))``; the relator must still hold."""
    images = substitution.images if isinstance(substitution, Substitution) else tuple(substitution)
    out = rep.with_images([rep.evaluate(w) for w in images])
    if not out.relator_ok():
        raise RepresentationError("substitution does not preserve the relator for this representation")
    return out


def _check_curve(A) -> None:
    if isinstance(A, ExactMatrix):
        if not has_distinct_eigenvalues(A):
            warnings.warn("curve image has repeated eigenvalues", RuntimeWarning, stacklevel=3)
        return
    w = np.linalg.eigvals(A)
    scale = max(float(np.abs(w).max()), 1.0)
    gaps = [abs(w[i] - w[j]) for i in range(len(w)) for j in range(i)]
    if gaps and min(gaps) <= 1e-9 * scale:
        warnings.warn("curve image has nearly repeated eigenvalues", RuntimeWarning, stacklevel=3)


def _twist_exponent(rep: Representation, curve: Word) -> ExactMatrix:
    # Float images are taken at face value, so the exponent is exact either way.
    A = exact_from_float(rep.evaluate(curve))
    V = variation(A, rep.group)
    if not in_lie_algebra(V, rep.group):
        raise RepresentationError("variation does not lie in the Lie algebra of the group")
    return V


def twist_matrix(rep: Representation, curve: Word, t: float) -> np.ndarray:
    """``expm(t * variation(rho(curve)))``, evaluated in multiprecision."""
    return expm_precise(_twist_exponent(rep, curve), t)


def twist_real(rep: Representation, d: Twist, t: float) -> Representation:
    """Real twist: each twisted generator ``b`` goes to ``rho(b) expm(t F(rho(curve)))``.

    The result is an extended-precision real representation: the
    exponential and the products are formed in multiprecision and stored as
    dyadic rationals, and untouched generators keep their input values.
    Use ``to_real()`` for doubles.
    """
    if isinstance(d, ConjugatedTwist):
        inner = twist_real(pushforward(rep, d.substitution), d.datum, t)
        return pushforward(inner, d.inverse)
    _check_curve(rep.evaluate(d.curve))
    if t == 0:
        return rep.to_extended()
    V = _twist_exponent(rep, d.curve)
    twisted = [rep.images[g] for g in sorted(d.twisted)]
    with mpmath.workdps(expm_dps(V, *twisted, t=t)):
        E = expm_mp(V, t)
        images = [mp_to_exact(to_mp(m) * E) if g in d.twisted else exact_from_float(m)
                  for g, m in enumerate(rep.images)]
    out = rep.with_images(images, exact=False)
    res = out.relator_residual()
    if res > out.relator_tolerance():
        raise RepresentationError(f"relator residual {res:.3g} after twist exceeds tolerance")
    return out


def twist_rational(rep: Representation, d: Twist, B: ExactMatrix) -> Representation:
    """Exact twist by a rational centralizer element ``B`` in the group."""
    if not rep.exact:
        raise RepresentationError("twist_rational needs an exact representation")
    if isinstance(d, ConjugatedTwist):
        inner = twist_rational(pushforward(rep, d.substitution), d.datum, B)
        return pushforward(inner, d.inverse)
    A = rep.evaluate(d.curve)
    if not B.commutes_with(A):
        raise TwistError("B does not commute with the curve image")
    if not member(B, rep.group):
        raise TwistError(f"B is not in {rep.group.kind}({rep.n}, Q)")
    out = rep.with_images([m @ B if g in d.twisted else m for g, m in enumerate(rep.images)])
    if not out.relator_ok():
        raise RepresentationError("relator is not the identity after an exact twist")
    return out
