"""Words in finitely presented groups, surface presentations and homology."""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

Syllable = tuple[int, int]


def _push(out: list[list[int]], gen: int, exp: int) -> None:
    if exp == 0:
        return
    if out and out[-1][0] == gen:
        out[-1][1] += exp
        if out[-1][1] == 0:
            out.pop()
    else:
        out.append([gen, exp])


@dataclass(frozen=True)
class Word:
    """A freely reduced word, stored as run-length (generator, exponent) pairs.

    Any syllable sequence passed to the constructor is reduced, so every
    ``Word`` instance satisfies the free-reduction invariant.
    """

    syllables: tuple[Syllable, ...] = ()

    def __post_init__(self) -> None:
        out: list[list[int]] = []
        for gen, exp in self.syllables:
            _push(out, int(gen), int(exp))
        object.__setattr__(self, "syllables", tuple((g, e) for g, e in out))

    @classmethod
    def gen(cls, index: int, exp: int = 1) -> Word:
        return cls(((index, exp),))

    @classmethod
    def from_letters(cls, letters: Iterable[Syllable]) -> Word:
        return cls(tuple(letters))

    def letters(self) -> Iterator[Syllable]:
        """Expand to single letters ``(gen, +1)`` / ``(gen, -1)``."""
        for gen, exp in self.syllables:
            step = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield gen, step

    def signed(self) -> list[int]:
        """Letters as signed integers ``±(gen + 1)``."""
        return [(g + 1) * e for g, e in self.letters()]

    @classmethod
    def from_signed(cls, seq: Iterable[int]) -> Word:
        return cls(tuple((abs(x) - 1, 1 if x > 0 else -1) for x in seq))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def __mul__(self, other: Word) -> Word:
        return Word(self.syllables + other.syllables)

    def __invert__(self) -> Word:
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def inverse(self) -> Word:
        return ~self

    def __pow__(self, k: int) -> Word:
        base = self if k >= 0 else ~self
        out = Word()
        for _ in range(abs(k)):
            out = out * base
        return out

    def generators(self) -> set[int]:
        return {g for g, _ in self.syllables}

    def cyclic_reduce(self) -> Word:
        seq = self.signed()
        while len(seq) >= 2 and seq[0] == -seq[-1]:
            seq = seq[1:-1]
        return Word.from_signed(seq)

    def substitute(self, images: Sequence[Word] | dict[int, Word]) -> Word:
        """Apply the endomorphism ``gen -> images[gen]``."""
        out: list[Syllable] = []
        for gen, exp in self.syllables:
            img = images[gen]
            if exp < 0:
                img = ~img
            out.extend(img.syllables * abs(exp))
        return Word(tuple(out))

    def __repr__(self) -> str:
        return f"Word({list(self.syllables)})"


def free_reduce(w: Word | Iterable[Syllable]) -> Word:
    if isinstance(w, Word):
        return w
    return Word(tuple(w))


def invert(w: Word) -> Word:
    return ~w


def concat(u: Word, v: Word) -> Word:
    return u * v


def commutator(u: Word, v: Word) -> Word:
    return u * v * ~u * ~v


def cyclic_rotations(w: Word) -> Iterator[tuple[int, ...]]:
    seq = w.signed()
    for i in range(max(len(seq), 1)):
        yield tuple(seq[i:] + seq[:i])


def cyclic_key(w: Word) -> tuple[int, ...]:
    """Canonical representative of the cyclic word of ``w`` or its inverse."""
    w = w.cyclic_reduce()
    return min(min(cyclic_rotations(w)), min(cyclic_rotations(~w)))


class WordSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"^([A-Za-z][A-Za-z0-9_]*?)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Presentation:
    """Finite presentation with lowercase generator names.

    In the text syntax an uppercase name denotes the inverse generator, so
    ``"a1 b1 A1 B1"`` is the commutator of ``a1`` and ``b1``.
    """

    names: tuple[str, ...]
    relators: tuple[Word, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        for name in self.names:
            if name != name.lower():
                raise ValueError(f"generator names must be lowercase: {name!r}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @property
    def rank(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise WordSyntaxError(f"unknown generator {name!r}") from None

    def parse(self, text: str) -> Word:
        out: list[Syllable] = []
        for tok in text.replace("*", " ").split():
            m = _TOKEN.match(tok)
            if not m:
                raise WordSyntaxError(f"bad token {tok!r}")
            name, power = m.group(1), int(m.group(2) or 1)
            if name in self._index:
                out.append((self._index[name], power))
            elif name.lower() in self._index and name != name.lower():
                out.append((self._index[name.lower()], -power))
            else:
                raise WordSyntaxError(f"unknown generator {name!r} in {text!r}")
        return Word(tuple(out))

    def format(self, w: Word) -> str:
        toks = []
        for g, e in w.letters():
            toks.append(self.names[g] if e > 0 else self.names[g].upper())
        return " ".join(toks)

    def check_word(self, w: Word) -> None:
        for g in w.generators():
            if not 0 <= g < self.rank:
                raise IndexError(f"generator index {g} out of range for rank {self.rank}")

    def to_json(self) -> dict:
        return {"names": list(self.names), "relators": [self.format(r) for r in self.relators]}


@dataclass(frozen=True)
class SurfacePresentation(Presentation):
    """Standard presentation ``<a1, b1, ..., ag, bg | [a1,b1]...[ag,bg]>``."""

    genus: int = 2

    @classmethod
    def of_genus(cls, genus: int) -> SurfacePresentation:
        if genus < 1:
            raise ValueError("genus must be positive")
        names = tuple(f"{c}{i}" for i in range(1, genus + 1) for c in "ab")
        rel = Word()
        for i in range(genus):
            rel = rel * commutator(Word.gen(2 * i), Word.gen(2 * i + 1))
        return cls(names=names, relators=(rel,), genus=genus)

    @property
    def relator(self) -> Word:
        return self.relators[0]

    def a(self, i: int) -> int:
        """Generator index of ``a_i`` (1-based handle number)."""
        return 2 * (i - 1)

    def b(self, i: int) -> int:
        return 2 * (i - 1) + 1

    def to_json(self) -> dict:
        return {"genus": self.genus}


def gamma_presentation() -> Presentation:
    """The one-relator group ``<a, b | [a,b]^2>``."""
    a, b = Word.gen(0), Word.gen(1)
    return Presentation(names=("a", "b"), relators=(commutator(a, b) ** 2,))


def presentation_from_json(data: dict) -> Presentation:
    if "genus" in data:
        return SurfacePresentation.of_genus(int(data["genus"]))
    names = tuple(data["names"])
    proto = Presentation(names=names, relators=())
    rels = tuple(proto.parse(r) for r in data.get("relators", []))
    return Presentation(names=names, relators=rels)


HomologyClass = tuple[int, ...]


def abelianize(w: Word, pres: Presentation) -> HomologyClass:
    pres.check_word(w)
    vec = [0] * pres.rank
    for g, e in w.syllables:
        vec[g] += e
    return tuple(vec)


def intersection_pairing(x: HomologyClass, y: HomologyClass) -> int:
    if len(x) != len(y) or len(x) % 2:
        raise ValueError("homology classes must have equal even length")
    return sum(x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i] for i in range(len(x) // 2))


def algebraic_intersection(u: Word, v: Word, pres: SurfacePresentation) -> int:
    """Symplectic pairing of homology classes; ``i(a_i, b_i) = +1``."""
    return intersection_pairing(abelianize(u, pres), abelianize(v, pres))
