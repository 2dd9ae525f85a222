"""Certified standard-form dictionaries for the covers used by the seeds.

Genus 2: generators of the stabilizer of point 1 under a -> (1 2 3 4),
b -> (1 3), as words in a, b.  Genus 3: generators of the kernel of
a2 -> 1 in Z/2, as words in the genus-2 generators.  Produced by
``seeds.derive_dictionary`` and re-certified by ``seeds.cover_data``.
"""

SHIPPED: dict[int, tuple[str, ...]] = {
    2: (
        "a a b",
        "A B a b b",
        "A A B",
        "b a B A B",
    ),
    3: (
        "a2 a1 A2",
        "a2 b1 A2",
        "a1",
        "b1",
        "b1 a1 B1 A1 a2 a2 a1 b1 A1 B1",
        "a2 b2 A2 a1 b1 A1 B1",
    ),
}
