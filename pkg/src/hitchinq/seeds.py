"""Exact rational base representations.

The Long-Reid matrices on ``Gamma = <a, b | [a,b]^2>``, their restriction to
surface subgroups of every genus, and symmetric-power lifts into SL(n, Q),
Sp(n, Q) and G2(Q).
"""

from __future__ import annotations

from fractions import Fraction
from functools import cache
from math import comb

from . import _dictionaries
from .groups import GroupSpec, GroupSpecError
from .linalg import ExactMatrix
from .reps import Representation, RepresentationError
from .subgroups import (
    PermutationRep,
    SubgroupData,
    schreier_subgroup,
    standard_dictionary,
)
from .words import Presentation, SurfacePresentation, Word, gamma_presentation

LONG_REID_A = ExactMatrix([[3, Fraction(2, 3)], [0, Fraction(1, 3)]])
LONG_REID_B = ExactMatrix([[0, -2], [Fraction(1, 2), Fraction(83, 8)]])

# a -> (1 2 3 4), b -> (1 3): [a, b] acts fixed-point freely with order 2.
GAMMA_COVER = ((1, 2, 3, 4),), ((1, 3),)


def long_reid() -> Representation:
    """Long-Reid matrices on ``<a, b | [a,b]^2>``.

    In SL(2, Q) the relator evaluates to ``-I``, so this is a representation
    into PSL(2, Q); it is flagged ``projective``.
    """
    return Representation(gamma_presentation(), (LONG_REID_A, LONG_REID_B), GroupSpec.sl(2),
                          exact=True, projective=True)


def gamma_cover_rep() -> PermutationRep:
    return PermutationRep.from_cycles(4, GAMMA_COVER)


def genus_cover_rep(degree: int, generator: int = 2) -> PermutationRep:
    """Cyclic cover of the genus-2 surface: ``generator -> (1 2 ... degree)``, others fixed.

    ``generator`` is a 0-based index into ``a1, b1, a2, b2``. The stabilizer
    has genus ``degree + 1``. Seeds use ``a2``: cutting along it keeps the
    short handles of the genus-2 seed intact, which keeps the lifted
    matrices small.
    """
    if not 0 <= generator < 4:
        raise ValueError("generator must index a1, b1, a2 or b2")
    cycles: list[list[tuple[int, ...]]] = [[] for _ in range(4)]
    cycles[generator] = [tuple(range(1, degree + 1))]
    return PermutationRep.from_cycles(degree, cycles)


# -- symmetric powers -------------------------------------------------------------

def _binomial_row(p: Fraction, q: Fraction, k: int) -> list[Fraction]:
    return [comb(k, j) * p ** (k - j) * q ** j for j in range(k + 1)]


def sym_power(M, n: int):
    """Action of a 2x2 matrix on degree ``n-1`` binary forms.

    Row ``i`` holds the coefficients of ``(a x + b y)^(n-1-i) (c x + d y)^i``
    in the monomials ``x^(n-1-j) y^j``, so entries are integer polynomials in
    the entries of ``M`` and ``sym_power`` is multiplicative.
    """
    if n < 1:
        raise ValueError("n must be positive")
    exact = isinstance(M, ExactMatrix)
    if exact:
        if M.det() != 1:
            raise ValueError("sym_power needs det M = 1")
        a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    else:
        import numpy as np

        M = np.asarray(M, dtype=float)
        if abs(np.linalg.det(M) - 1) > 1e-9:
            raise ValueError("sym_power needs det M = 1")
        a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    deg = n - 1
    rows = []
    for i in range(n):
        u = _binomial_row(a, b, deg - i)
        v = _binomial_row(c, d, i)
        row = [0] * n
        for j1, x in enumerate(u):
            for j2, y in enumerate(v):
                row[j1 + j2] += x * y
        rows.append(row)
    if exact:
        return ExactMatrix(rows)
    import numpy as np

    return np.array(rows, dtype=float)


def induced_form(n: int) -> ExactMatrix:
    """Alternating form on odd-degree binary forms preserved by ``sym_power``.

    ``J[i, n-1-i] = (-1)^i C(n-1, i)``.
    """
    if n % 2:
        raise ValueError("the induced pairing is symmetric for odd n")
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][n - 1 - i] = (-1) ** i * comb(n - 1, i)
    return ExactMatrix(rows)


# -- standard-form dictionaries -------------------------------------------------------

def _trace_size(m: ExactMatrix) -> Fraction:
    return abs(m.trace())


def reduce_handles(words: list[Word], evaluate) -> list[Word]:
    """Shorten each handle ``(x, y)`` by moves that fix ``[x, y]`` letter for letter.

    Moves: ``y -> y x^{+-1}``, ``x -> x y^{+-1}`` and ``(x, y) -> (y^-1, y x)``.
    Greedy descent on ``|tr x| + |tr y| + |tr xy|``; then the shortest of
    ``x, y, xy`` goes to the ``a`` slot and ``y`` is shortened with ``x`` fixed.
    """
    out = list(words)
    for h in range(len(out) // 2):
        x, y = out[2 * h], out[2 * h + 1]
        X, Y = evaluate(x), evaluate(y)

        def size(X, Y):
            return _trace_size(X) + _trace_size(Y) + _trace_size(X @ Y)

        cur = size(X, Y)
        while True:
            Xi, Yi = X.inverse(), Y.inverse()
            cands = [
                (x, y * x, X, Y @ X),
                (x, y * ~x, X, Y @ Xi),
                (x * y, y, X @ Y, Y),
                (x * ~y, y, X @ Yi, Y),
            ]
            best = min(cands, key=lambda c: size(c[2], c[3]))
            s = size(best[2], best[3])
            if s >= cur:
                break
            x, y, X, Y = best
            cur = s
        shortest = min(_trace_size(X), _trace_size(Y), _trace_size(X @ Y))
        if _trace_size(X @ Y) == shortest and _trace_size(X) != shortest:
            x, X = x * y, X @ Y
        elif _trace_size(Y) == shortest and _trace_size(X) != shortest:
            x, y, X, Y = ~y, y * x, Y.inverse(), Y @ X
        while True:
            Xi = X.inverse()
            cands = [(y * x, Y @ X), (y * ~x, Y @ Xi)]
            ny, nY = min(cands, key=lambda c: _trace_size(c[1]))
            if _trace_size(nY) >= _trace_size(Y):
                break
            y, Y = ny, nY
        out[2 * h], out[2 * h + 1] = x, y
    return out


def sort_handles(words: list[Word], evaluate) -> list[Word]:
    """Order handles by ``|tr a_i|`` with adjacent swaps.

    A swap uses ``K_i K_j = (K_i K_j K_i^-1) K_i`` or
    ``K_i K_j = K_j (K_j^-1 K_i K_j)``, whichever gives matrices of smaller
    Frobenius norm; either way the product of commutators is unchanged as a
    word.
    """
    import numpy as np

    def weight(ws):
        return sum(float(np.sum(evaluate(w).to_float() ** 2)) for w in ws)

    out = list(words)
    g = len(out) // 2
    key = lambda h: _trace_size(evaluate(out[2 * h]))
    for _ in range(g):
        for h in range(g - 1):
            if key(h + 1) < key(h):
                x, y, u, v = out[2 * h:2 * h + 4]
                K = x * y * ~x * ~y
                L = u * v * ~u * ~v
                out[2 * h:2 * h + 4] = min([K * u * ~K, K * v * ~K, x, y],
                                           [u, v, ~L * x * L, ~L * y * L], key=weight)
    return out


def derive_dictionary(ambient: Presentation, rep: PermutationRep, evaluate) -> list[Word]:
    """Standard generators of the stabilizer of point 0, handle-reduced and sorted."""
    sub = schreier_subgroup(ambient, rep, 0)
    return sort_handles(reduce_handles(standard_dictionary(sub), evaluate), evaluate)


class DictionaryError(RuntimeError):
    pass


@cache
def cover_data(genus: int) -> SubgroupData:
    """Subgroup data for the genus-``genus`` surface group inside its parent.

    Genus 2 sits inside ``Gamma`` with index 4; genus ``g >= 3`` sits inside
    genus 2 with index ``g - 1``. Shipped dictionaries are certified here by
    permutation membership and exact evaluation of the relator.
    """
    if genus < 2:
        raise ValueError("genus must be at least 2")
    if genus == 2:
        ambient, rep = gamma_presentation(), gamma_cover_rep()
        parent = long_reid()
    else:
        ambient, rep = SurfacePresentation.of_genus(2), genus_cover_rep(genus - 1)
        parent = surface_seed(2)
    sub = schreier_subgroup(ambient, rep, 0)
    shipped = _dictionaries.SHIPPED.get(genus)
    if shipped is not None:
        words = [ambient.parse(s) for s in shipped]
    else:
        words = derive_dictionary(ambient, rep, parent.evaluate)
    for w in words:
        if rep.apply(0, w) != 0:
            raise DictionaryError(f"dictionary word {ambient.format(w)!r} leaves the subgroup")
    if len(words) != 2 * genus:
        raise DictionaryError("dictionary has the wrong number of generators")
    sub.standard = words
    mats = [parent.evaluate(w) for w in words]
    rel = SurfacePresentation.of_genus(genus).relator
    img = ExactMatrix.identity(2)
    for g, e in rel.letters():
        img = img @ (mats[g] if e > 0 else mats[g].inverse())
    if not img.is_identity():
        raise DictionaryError(f"genus-{genus} dictionary relator evaluates to {img}")
    return sub


@cache
def surface_seed(genus: int) -> Representation:
    """Exact SL(2, Q) representation of the genus-``genus`` surface group.

    Images are the dictionary words evaluated through the parent seed, with
    the sign of each generator chosen so that its trace is positive (the
    relator is insensitive to these signs).
    """
    if genus < 2:
        raise ValueError("genus must be at least 2")
    sub = cover_data(genus)
    parent = long_reid() if genus == 2 else surface_seed(2)
    mats = []
    for w in sub.standard:
        m = parent.evaluate(w)
        mats.append(-m if m.trace() < 0 else m)
    rep = Representation(SurfacePresentation.of_genus(genus), tuple(mats), GroupSpec.sl(2), exact=True)
    if not rep.relator_ok():
        raise DictionaryError("surface seed relator is not the identity")
    return rep


def ambient_words(genus: int) -> list[Word]:
    """Standard generators of the genus-``genus`` seed as words in ``a, b`` of Gamma."""
    words = cover_data(genus).standard
    if genus == 2:
        return list(words)
    parent = ambient_words(2)
    return [w.substitute(parent) for w in words]


def default_spec(n: int, kind: str) -> GroupSpec:
    kind = kind.upper()
    if kind == "SL":
        return GroupSpec.sl(n)
    if kind == "SP":
        return GroupSpec.sp(n, induced_form(n))
    if kind == "G2":
        if n != 7:
            raise GroupSpecError("G2 seeds need n = 7")
        return GroupSpec.g2()
    raise GroupSpecError(f"unknown group kind {kind!r}")


def hitchin_seed(genus: int, n: int, spec: GroupSpec | None = None) -> Representation:
    """``sym_power`` of the genus-``genus`` surface seed, checked against ``spec``."""
    spec = spec or GroupSpec.sl(n)
    if spec.n != n:
        raise GroupSpecError("spec dimension does not match n")
    if spec.kind == "SP" and spec.J != induced_form(n):
        raise GroupSpecError("symplectic seeds use the induced form; pass default_spec(n, 'SP')")
    base = surface_seed(genus)
    rep = Representation(base.presentation, tuple(sym_power(m, n) for m in base.images), spec, exact=True)
    if not rep.relator_ok():
        raise RepresentationError("seed relator is not the identity")
    bad = [name for name, ok in zip(rep.presentation.names, rep.membership()) if not ok]
    if bad:
        raise RepresentationError(f"seed images {bad} are not in {spec.kind}({n})")
    return rep
