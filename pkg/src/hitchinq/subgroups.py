"""Finite-index subgroups from permutation representations.

Reidemeister-Schreier rewriting, Tietze elimination, and a cut-and-paste
normalizer that brings an orientable quadratic relator to the standard
surface form ``[x1,y1]...[xg,yg]`` while tracking the Nielsen moves used.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field

from .words import Presentation, SurfacePresentation, Word, cyclic_key


class SubgroupError(ValueError):
    pass


@dataclass(frozen=True)
class PermutationRep:
    """Right action of the generators on ``{0, ..., degree-1}``."""

    degree: int
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for img in self.images:
            if sorted(img) != list(range(self.degree)):
                raise SubgroupError(f"not a permutation of degree {self.degree}: {img}")
        inv = tuple(tuple(img.index(i) for i in range(self.degree)) for img in self.images)
        object.__setattr__(self, "_inverses", inv)

    @classmethod
    def from_cycles(cls, degree: int, cycles: Sequence[Sequence[Sequence[int]]]) -> PermutationRep:
        """Build from 1-based cycle notation, one cycle list per generator."""
        images = []
        for gen_cycles in cycles:
            img = list(range(degree))
            for cyc in gen_cycles:
                for k, p in enumerate(cyc):
                    img[p - 1] = cyc[(k + 1) % len(cyc)] - 1
            images.append(tuple(img))
        return cls(degree, tuple(images))

    def act(self, point: int, gen: int, exp: int = 1) -> int:
        table = self.images[gen] if exp > 0 else self._inverses[gen]  # type: ignore[attr-defined]
        for _ in range(abs(exp)):
            point = table[point]
        return point

    def apply(self, point: int, w: Word) -> int:
        for g, e in w.syllables:
            point = self.act(point, g, e)
        return point

    def permutation(self, w: Word) -> tuple[int, ...]:
        return tuple(self.apply(p, w) for p in range(self.degree))

    def is_transitive(self) -> bool:
        seen = {0}
        todo = [0]
        while todo:
            p = todo.pop()
            for g in range(len(self.images)):
                for e in (1, -1):
                    q = self.act(p, g, e)
                    if q not in seen:
                        seen.add(q)
                        todo.append(q)
        return len(seen) == self.degree

    def check(self, pres: Presentation) -> None:
        if len(self.images) != pres.rank:
            raise SubgroupError("one permutation per generator required")
        ident = tuple(range(self.degree))
        for r in pres.relators:
            if self.permutation(r) != ident:
                raise SubgroupError(f"relator {pres.format(r)!r} is not mapped to the identity")
        if not self.is_transitive():
            raise SubgroupError("permutation representation is not transitive")


def cycle_type(perm: Sequence[int]) -> list[tuple[int, ...]]:
    """Nontrivial cycles of a 0-based permutation, as 1-based tuples."""
    seen: set[int] = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        p = perm[start]
        while p != start:
            cyc.append(p)
            seen.add(p)
            p = perm[p]
        if len(cyc) > 1:
            out.append(tuple(c + 1 for c in cyc))
    return out


@dataclass
class SubgroupData:
    """Stabilizer of ``basepoint`` with its Schreier generators.

    ``edges[(coset, gen)]`` is the index of the Schreier generator attached
    to the edge ``coset --gen--> coset*gen``, or ``None`` for tree edges.
    ``standard`` optionally maps the generators of a standard surface
    presentation of the subgroup to words in the ambient generators.
    """

    ambient: Presentation
    rep: PermutationRep
    basepoint: int
    transversal: list[Word]
    generators: list[Word]
    edges: dict[tuple[int, int], int | None]
    relators: list[Word] = field(default_factory=list)
    standard: list[Word] | None = None

    @property
    def index(self) -> int:
        return self.rep.degree

    def expand(self, w: Word) -> Word:
        """Map a word in Schreier generators back to the ambient generators."""
        return w.substitute(self.generators)

    def surface(self) -> SurfacePresentation:
        if self.standard is None:
            raise SubgroupError("no standard-form dictionary")
        return SurfacePresentation.of_genus(len(self.standard) // 2)


def _spanning_tree(pres: Presentation, rep: PermutationRep, basepoint: int):
    transversal: dict[int, Word] = {basepoint: Word()}
    tree: set[tuple[int, int]] = set()
    queue = deque([basepoint])
    while queue:
        c = queue.popleft()
        for g in range(pres.rank):
            for e in (1, -1):
                d = rep.act(c, g, e)
                if d in transversal:
                    continue
                transversal[d] = transversal[c] * Word.gen(g, e)
                tree.add((c, g) if e > 0 else (d, g))
                queue.append(d)
    return [transversal[c] for c in range(rep.degree)], tree


def _trace(w: Word, sub: SubgroupData, start: int) -> tuple[Word, int]:
    out: list[tuple[int, int]] = []
    c = start
    for g, e in w.letters():
        if e > 0:
            s = sub.edges[(c, g)]
            c = sub.rep.act(c, g)
        else:
            c = sub.rep.act(c, g, -1)
            s = sub.edges[(c, g)]
        if s is not None:
            out.append((s, e))
    return Word(tuple(out)), c


def schreier_subgroup(pres: Presentation, rep: PermutationRep, basepoint: int = 0) -> SubgroupData:
    rep.check(pres)
    transversal, tree = _spanning_tree(pres, rep, basepoint)
    generators: list[Word] = []
    edges: dict[tuple[int, int], int | None] = {}
    for c in range(rep.degree):
        for g in range(pres.rank):
            if (c, g) in tree:
                edges[(c, g)] = None
                continue
            d = rep.act(c, g)
            edges[(c, g)] = len(generators)
            generators.append(transversal[c] * Word.gen(g) * ~transversal[d])
    sub = SubgroupData(pres, rep, basepoint, transversal, generators, edges)
    seen = set()
    for c in range(rep.degree):
        for r in pres.relators:
            rw, end = _trace(r, sub, c)
            assert end == c
            rw = rw.cyclic_reduce()
            key = cyclic_key(rw)
            if rw and key not in seen:
                seen.add(key)
                sub.relators.append(rw)
    return sub


def rewrite_in_subgroup(w: Word, sub: SubgroupData) -> Word:
    """Express ``w`` (which must fix the basepoint) in Schreier generators."""
    out, end = _trace(w, sub, sub.basepoint)
    if end != sub.basepoint:
        raise SubgroupError("word does not lie in the subgroup")
    return out


# -- Tietze elimination -------------------------------------------------------

def tietze_eliminate(rank: int, relators: Sequence[Word]) -> tuple[list[int], list[Word], dict[int, Word]]:
    """Eliminate generators occurring exactly once in some relator.

    Returns the surviving generator indices, the remaining relators and, for
    each eliminated generator, its expression in the survivors.
    """
    rels = [r.cyclic_reduce() for r in relators]
    alive = set(range(rank))
    solved: dict[int, Word] = {}
    progress = True
    while progress and len(rels) > 1:
        progress = False
        best = None
        for ri, r in enumerate(rels):
            seq = r.signed()
            for x in set(abs(v) for v in seq):
                if sum(1 for v in seq if abs(v) == x) == 1:
                    cand = (len(seq), ri, x)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            break
        _, ri, x = best
        seq = rels[ri].signed()
        pos = next(i for i, v in enumerate(seq) if abs(v) == x)
        u, v = Word.from_signed(seq[:pos]), Word.from_signed(seq[pos + 1:])
        # u x^e v = 1
        value = ~u * ~v if seq[pos] > 0 else v * u
        gen = x - 1
        images = {g: Word.gen(g) for g in range(rank)}
        images[gen] = value
        rels = [r.substitute(images).cyclic_reduce() for k, r in enumerate(rels) if k != ri]
        rels = [r for r in rels if r]
        for k in solved:
            solved[k] = solved[k].substitute(images)
        solved[gen] = value
        alive.discard(gen)
        progress = True
    return sorted(alive), rels, solved


# -- Quadratic words ----------------------------------------------------------

class _Normalizer:
    """Nielsen moves on a single relator, tracking letter expressions."""

    def __init__(self, relator: Sequence[int], letters: Sequence[int]):
        self.rel = list(relator)
        self.expr = {x: Word.from_signed([x]) for x in letters}

    def _expr_of(self, seq: Sequence[int]) -> Word:
        out = Word()
        for v in seq:
            w = self.expr[abs(v)]
            out = out * (w if v > 0 else ~w)
        return out

    def replace(self, x: int, left: Sequence[int], right: Sequence[int]) -> None:
        """Set ``old_x = left * new_x * right`` (``left``, ``right`` free of x)."""
        assert all(abs(v) != x for v in list(left) + list(right))
        new_seq: list[int] = []
        inv = lambda s: [-v for v in reversed(s)]
        for v in self.rel:
            if v == x:
                new_seq.extend(list(left) + [x] + list(right))
            elif v == -x:
                new_seq.extend(inv(right) + [-x] + inv(left))
            else:
                new_seq.append(v)
        self.rel = Word.from_signed(new_seq).signed()
        self.expr[x] = ~self._expr_of(left) * self.expr[x] * ~self._expr_of(right)

    def flip(self, x: int) -> None:
        self.rel = [-v if abs(v) == x else v for v in self.rel]
        self.expr[x] = ~self.expr[x]


def is_orientable_quadratic(seq: Sequence[int]) -> bool:
    counts: dict[int, list[int]] = {}
    for v in seq:
        counts.setdefault(abs(v), []).append(v)
    return all(len(c) == 2 and c[0] == -c[1] for c in counts.values())


def standardize(relator: Word, max_steps: int = 10_000) -> list[tuple[Word, Word]]:
    """Bring an orientable quadratic cyclic relator to ``prod [x_i, y_i]``.

    Returns the new letters ``(x_i, y_i)`` as words in the old letters; the
    relator, rewritten in the new letters, is conjugate to the standard one.
    Raises ``SubgroupError`` when the relator is not an orientable quadratic
    word of a closed surface.
    """
    seq = relator.cyclic_reduce().signed()
    if not is_orientable_quadratic(seq):
        raise SubgroupError("relator is not an orientable quadratic word")
    norm = _Normalizer(seq, sorted({abs(v) for v in seq}))
    blocks: list[tuple[int, int]] = []
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise SubgroupError("step budget exhausted")
        start = 4 * len(blocks)
        rest = norm.rel[start:]
        if not rest:
            break
        pair = _find_linked(rest)
        if pair is None:
            raise SubgroupError("no linked pair; relator is not a closed-surface word")
        i, j = pair
        x, y = abs(rest[i]), abs(rest[j])
        if rest[i] < 0:
            norm.flip(x)
        if rest[j] < 0:
            norm.flip(y)
        rest = norm.rel[start:]
        p1 = rest.index(x)
        p2 = rest.index(y)
        p3 = rest.index(-x)
        p4 = rest.index(-y)
        assert p1 < p2 < p3 < p4
        prefix = rest[:p1]
        A = rest[p1 + 1:p2]
        B = rest[p2 + 1:p3]
        C = rest[p3 + 1:p4]
        inv = lambda s: [-v for v in reversed(s)]
        # x A y B X C Y D  ->  x y X (C B A) Y D  ->  [x, y] (C B A) D
        norm.replace(x, [], inv(A))
        norm.replace(y, [], inv(A) + inv(B))
        E = C + B + A
        norm.replace(y, inv(E), E)
        norm.replace(x, [], E)
        # move the new block in front of the prefix: z -> P^-1 z P
        if prefix:
            norm.replace(x, inv(prefix), prefix)
            norm.replace(y, inv(prefix), prefix)
        head = norm.rel[:start]
        block = norm.rel[start:start + 4]
        if block != [x, y, -x, -y] or head != [v for a, b in blocks for v in (a, b, -a, -b)]:
            raise SubgroupError("normalization invariant violated")  # pragma: no cover
        blocks.append((x, y))
    return [(norm.expr[x], norm.expr[y]) for x, y in blocks]


def _find_linked(seq: Sequence[int]) -> tuple[int, int] | None:
    pos: dict[int, list[int]] = {}
    for k, v in enumerate(seq):
        pos.setdefault(abs(v), []).append(k)
    for i in range(len(seq)):
        lo, hi = pos[abs(seq[i])]
        if lo != i:
            continue
        for j in range(lo + 1, hi):
            other = pos[abs(seq[j])]
            if other[0] == j and other[1] > hi:
                return i, j
    return None


def standard_dictionary(sub: SubgroupData) -> list[Word]:
    """Standard surface generators of ``sub`` as ambient words.

    Runs Tietze elimination down to one relator and normalizes it. The
    result lists ``a1, b1, a2, b2, ...`` of the subgroup's own presentation.
    """
    alive, rels, _ = tietze_eliminate(len(sub.generators), sub.relators)
    if len(rels) != 1:
        raise SubgroupError(f"Tietze elimination left {len(rels)} relators")
    pairs = standardize(rels[0])
    out = []
    for x, y in pairs:
        out.append(sub.expand(x))
        out.append(sub.expand(y))
    return out
