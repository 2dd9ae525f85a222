"""Representations: one matrix per generator of a presentation."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Union

import mpmath
import numpy as np

from .groups import GroupSpec, member
from .linalg import ExactMatrix, as_real, dist, exact_from_float, to_mp, working_dps
from .words import Presentation, Word

Matrix = Union[ExactMatrix, np.ndarray]


class RepresentationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Representation:
    """Assignment of matrices to generators, exact (rational) or real.

    Exact representations hold rational matrices that satisfy the relators
    exactly. Real ones hold either doubles or, when ``extended``, rational
    matrices used as high-precision real numbers; their relators hold only
    up to a residual.

    ``projective`` marks representations whose relators are only required
    to map to scalar matrices, e.g. the Long-Reid matrices on ``<a,b|[a,b]^2>``.
    """

    presentation: Presentation
    images: tuple
    group: GroupSpec
    exact: bool
    projective: bool = False
    tolerance: float = 1e-9
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        imgs = tuple(self.images)
        if len(imgs) != self.presentation.rank:
            raise RepresentationError("one image per generator required")
        rational = [isinstance(m, ExactMatrix) for m in imgs]
        if self.exact and not all(rational):
            raise RepresentationError("exact representations need ExactMatrix images")
        if not self.exact and any(rational) and not all(rational):
            imgs = tuple(exact_from_float(m) for m in imgs)
        elif not self.exact and not any(rational):
            imgs = tuple(as_real(m) for m in imgs)
        if any((m.n if isinstance(m, ExactMatrix) else m.shape[0]) != self.group.n for m in imgs):
            raise RepresentationError("image dimension does not match the group")
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return self.group.n

    @property
    def extended(self) -> bool:
        """Real representation stored at extended precision."""
        return not self.exact and bool(self.images) and isinstance(self.images[0], ExactMatrix)

    @property
    def rational_storage(self) -> bool:
        return self.exact or self.extended

    def __getitem__(self, key: int | str) -> Matrix:
        if isinstance(key, str):
            key = self.presentation.index(key)
        return self.images[key]

    def _inv(self, g: int) -> Matrix:
        if g not in self._cache:
            m = self.images[g]
            self._cache[g] = m.inverse() if self.rational_storage else np.linalg.inv(m)
        return self._cache[g]

    def identity(self) -> Matrix:
        return ExactMatrix.identity(self.n) if self.rational_storage else np.eye(self.n)

    def evaluate(self, w: Word | str) -> Matrix:
        if isinstance(w, str):
            w = self.presentation.parse(w)
        self.presentation.check_word(w)
        out = self.identity()
        for g, e in w.syllables:
            base = self.images[g] if e > 0 else self._inv(g)
            if self.rational_storage:
                out = out @ (base ** abs(e))
            else:
                out = out @ np.linalg.matrix_power(base, abs(e))
        return out

    def relator_images(self) -> list[Matrix]:
        return [self.evaluate(r) for r in self.presentation.relators]

    def relator_residual(self) -> float:
        """Max entrywise distance of relator images from the identity.

        Double-precision images are taken at face value and multiplied in
        multiprecision, so the residual reflects the data rather than
        rounding inside the long product.
        """
        if self.rational_storage:
            worst = Fraction(0)
            for m in self.relator_images():
                target = _nearest_scalar(m, True) if self.projective else self.identity()
                worst = max(worst, max(abs(x - y) for r, q in zip(m.rows, target.rows) for x, y in zip(r, q)))
            return float(worst)
        return self._real_relator_stats()[0]

    def relator_ok(self) -> bool:
        if self.exact:
            for m in self.relator_images():
                if not (m.is_scalar() if self.projective else m.is_identity()):
                    return False
            return True
        return self.relator_residual() <= self.relator_tolerance()

    def relator_tolerance(self) -> float:
        """``tolerance`` scaled by the product of generator norms along the relator.

        Rounding of the entries is amplified along a matrix product by at most
        the product of the norms of its factors, so this is the natural
        yardstick for real residuals.
        """
        if self.exact:
            return 0.0
        return self.tolerance * self._real_relator_stats()[1]

    def _real_relator_stats(self) -> tuple[float, float]:
        if "stats" in self._cache:
            return self._cache["stats"]
        with mpmath.workdps(working_dps(*self.images)):
            mats = [to_mp(m) for m in self.images]
            invs = [mpmath.inverse(m) for m in mats]
            norms = [(float(mpmath.mnorm(m, 1)), float(mpmath.mnorm(v, 1))) for m, v in zip(mats, invs)]
            worst, scale = 0.0, 1.0
            eye = mpmath.eye(self.n)
            for r in self.presentation.relators:
                prod, s = eye, 1.0
                for g, e in r.letters():
                    prod = prod * (mats[g] if e > 0 else invs[g])
                    s *= max(1.0, norms[g][0 if e > 0 else 1])
                target = eye * (sum(prod[i, i] for i in range(self.n)) / self.n) if self.projective else eye
                worst = max(worst, float(max(abs(prod[i, j] - target[i, j])
                                             for i in range(self.n) for j in range(self.n))))
                scale = max(scale, s)
        self._cache["stats"] = (worst, scale)
        return worst, scale

    def membership(self, tol: float | None = None) -> list:
        tol = self.tolerance if tol is None else tol
        return [member(m, self.group, tol, approximate=not self.exact) for m in self.images]

    def to_real(self) -> Representation:
        """Real representation in double precision."""
        if not self.rational_storage:
            return self
        return replace(self, images=tuple(m.to_float() for m in self.images), exact=False)

    def to_extended(self) -> Representation:
        """Real representation at extended precision with the same values."""
        if self.extended:
            return self
        return replace(self, images=tuple(exact_from_float(m) for m in self.images), exact=False)

    def with_images(self, images: Sequence[Matrix], exact: bool | None = None) -> Representation:
        return replace(self, images=tuple(images), exact=self.exact if exact is None else exact)

    def named_images(self) -> dict[str, Matrix]:
        return dict(zip(self.presentation.names, self.images))


def _nearest_scalar(m: Matrix, exact: bool) -> Matrix:
    n = m.n if exact else m.shape[0]
    if exact:
        return ExactMatrix.identity(n).scale(m.trace() / n)
    return np.trace(m) / n * np.eye(n)


def rep_dist(r1: Representation, r2: Representation) -> float:
    """Max over generators of the entrywise distance between images."""
    if r1.presentation.names != r2.presentation.names:
        raise RepresentationError("representations of different presentations")
    return max((dist(a, b) for a, b in zip(r1.images, r2.images)), default=0.0)
