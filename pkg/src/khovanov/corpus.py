"""The shipped diagram corpus.

Base diagrams cover every sign/twist code path (pure positive, pure
negative, mixed, split links, crossingless circles); the generated tail
is produced by seeded random Reidemeister sequences from the bases, so
the corpus carries whole equivalence-class samples for the invariance
suite.
"""

from __future__ import annotations

from functools import lru_cache

from .diagram import LinkDiagram, parse_pd
from .moves import random_move_sequence

BASE_PDS = [
    ("unknot-0", "O"),
    ("unknot-1+", "X[1,1,2,2]"),
    ("unknot-1-", "X[1,2,2,1]"),
    ("unknot-2", "X[1,1,2,4] X[2,3,3,4]"),
    ("unknot-3", "X[8,4,2,3] X[1,8,2,3] X[4,1,9,9]"),
    ("unlink-2", "O O"),
    ("trefoil-left", "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"),
    ("trefoil-right", "X[5,2,4,1] X[1,4,6,3] X[3,6,2,5]"),
    ("figure-eight", "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]"),
    ("hopf-plus", "X[1,2,3,4] X[2,1,4,3]"),
    ("hopf-minus", "X[4,1,3,2] X[3,2,4,1]"),
    ("5_1", "X[1,6,2,7] X[3,8,4,9] X[5,10,6,1] X[7,2,8,3] X[9,4,10,5]"),
    ("5_2", "X[1,4,2,5] X[3,8,4,9] X[5,10,6,1] X[9,6,10,7] X[7,2,8,3]"),
    ("6_1", "X[1,4,2,5] X[7,10,8,11] X[3,9,4,8] X[9,3,10,2] X[5,12,6,1] "
            "X[11,6,12,7]"),
]

GENERATED_COUNT = 20
_GENERATION_SEED = 7


@lru_cache(maxsize=None)
def base_corpus():
    """(name, diagram) pairs for the hand-picked bases."""
    return tuple((name, parse_pd(pd)) for name, pd in BASE_PDS)


@lru_cache(maxsize=None)
def generated_corpus(count: int = GENERATED_COUNT, seed: int = _GENERATION_SEED,
                     max_crossings: int = 8):
    """Deterministic move-sequence variants of the bases."""
    bases = base_corpus()
    out = []
    i = 0
    while len(out) < count:
        name, d = bases[i % len(bases)]
        seq = random_move_sequence(d, 4, seed + i, max_crossings=max_crossings)
        variant = seq[-1]
        out.append(("%s~%d" % (name, i), variant))
        i += 1
    return tuple(out)


def full_corpus():
    return base_corpus() + generated_corpus()


def corpus_by_name(name: str) -> LinkDiagram:
    for n, d in full_corpus():
        if n == name:
            return d
    raise KeyError(name)


def write_corpus_file(path):
    with open(path, "w") as fh:
        for name, d in full_corpus():
            fh.write("# %s\n%s\n" % (name, d.serialize() or "O" * 0))


def read_corpus_file(path):
    out = []
    name = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                name = line[1:].strip()
                continue
            out.append((name or "diagram-%d" % len(out), parse_pd(line)))
            name = None
    return out
