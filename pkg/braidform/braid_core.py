"""
Braid words on N strands, the canonical homomorphism to S_N and the
pure-braid generators x_{i,j} in Artin normal form.

Words are kept freely reduced at all times. Indexing of strands and
generators is one-based. No braid-relation rewriting is performed.
"""
import re
from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import numpy as np

from .errors import IndexRangeError, StrandMismatchError, WordSpecError

Letter = Tuple[int, int]

_TOKEN = re.compile(r'^b?(-?\d+)(?:\^\{?(-?1)\}?)?$')


def _free_reduce(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    stack: List[Letter] = []
    for index, sign in letters:
        if stack and stack[-1][0] == index and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((index, sign))
    return tuple(stack)


@dataclass(frozen=True)
class BraidWord:
    """A freely reduced word in b_1^{+-1} .. b_{N-1}^{+-1}"""
    strands: int
    letters: Tuple[Letter, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.strands, (int, np.integer)) or self.strands < 1:
            raise IndexRangeError(f"strand count must be >= 1, got {self.strands}")
        cleaned = []
        for letter in self.letters:
            try:
                index, sign = (int(letter[0]), int(letter[1]))
            except (TypeError, ValueError, IndexError):
                raise WordSpecError(f"malformed letter {letter!r}") from None
            if not 1 <= index <= self.strands - 1:
                raise IndexRangeError(
                    f"generator index {index} outside 1..{self.strands - 1} for {self.strands} strands")
            if sign not in (1, -1):
                raise WordSpecError(f"exponent sign must be +1 or -1, got {sign}")
            cleaned.append((index, sign))
        object.__setattr__(self, 'strands', int(self.strands))
        object.__setattr__(self, 'letters', _free_reduce(cleaned))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: 'BraidWord') -> 'BraidWord':
        return compose(self, other)

    def is_empty(self) -> bool:
        return not self.letters

    def to_json(self) -> dict:
        return {"strands": self.strands, "letters": [[i, s] for i, s in self.letters]}

    @classmethod
    def from_json(cls, obj) -> 'BraidWord':
        if not isinstance(obj, dict) or 'strands' not in obj or 'letters' not in obj:
            raise WordSpecError('braid word JSON needs "strands" and "letters"')
        if not isinstance(obj['letters'], list):
            raise WordSpecError('"letters" must be a list of [index, sign] pairs')
        return cls(obj['strands'], tuple(tuple(letter) for letter in obj['letters']))

    def __str__(self) -> str:
        if not self.letters:
            return 'e'
        return ' '.join(f"b{i}" if s == 1 else f"b{i}^-1" for i, s in self.letters)


@dataclass(frozen=True)
class Permutation:
    """images[k-1] = sigma(k); composition is (self o other)(k) = self(other(k))"""
    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(k) for k in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise IndexRangeError(f"{images} is not a bijection of 1..{len(images)}")
        object.__setattr__(self, 'images', images)

    @classmethod
    def identity(cls, size: int) -> 'Permutation':
        return cls(tuple(range(1, size + 1)))

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def compose(self, other: 'Permutation') -> 'Permutation':
        if other.size != self.size:
            raise StrandMismatchError(f"cannot compose S_{self.size} with S_{other.size}")
        return Permutation(tuple(self.images[k - 1] for k in other.images))

    def inverse(self) -> 'Permutation':
        inv = [0] * self.size
        for k, image in enumerate(self.images, start=1):
            inv[image - 1] = k
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(image == k for k, image in enumerate(self.images, start=1))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest element"""
        seen = set()
        result = []
        for start in range(1, self.size + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            k = self(start)
            while k != start:
                cycle.append(k)
                seen.add(k)
                k = self(k)
            if len(cycle) > 1:
                result.append(tuple(cycle))
        return result

    def __str__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return '()'
        return ''.join('(' + ' '.join(str(k) for k in c) + ')' for c in cycles)


def compose(a: BraidWord, b: BraidWord) -> BraidWord:
    if a.strands != b.strands:
        raise StrandMismatchError(f"cannot compose words on {a.strands} and {b.strands} strands")
    return BraidWord(a.strands, a.letters + b.letters)


def invert(a: BraidWord) -> BraidWord:
    return BraidWord(a.strands, tuple((i, -s) for i, s in reversed(a.letters)))


def to_permutation(a: BraidWord) -> Permutation:
    """phi(l_1) o ... o phi(l_k); the exponent sign is irrelevant"""
    images = list(range(1, a.strands + 1))
    for index, _ in a.letters:
        images[index - 1], images[index] = images[index], images[index - 1]
    return Permutation(tuple(images))


def pure_braid_generator(i: int, j: int, n: int) -> BraidWord:
    """x_{i,j} = b_j b_{j-1} .. b_{i+1} b_i^2 b_{i+1}^-1 .. b_j^-1

    Strand j+1 winds once around strand i.
    """
    if not 1 <= i <= j <= n - 1:
        raise IndexRangeError(f"x_{{{i},{j}}} needs 1 <= i <= j <= N-1 with N = {n}")
    up = [(k, 1) for k in range(j, i, -1)]
    down = [(k, -1) for k in range(i + 1, j + 1)]
    return BraidWord(n, tuple(up + [(i, 1), (i, 1)] + down))


def pure_generator_indices(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(1, n) for j in range(i, n)]


def pure_generators(n: int) -> List[BraidWord]:
    if n < 2:
        raise IndexRangeError(f"the pure braid generators need N >= 2, got {n}")
    return [pure_braid_generator(i, j, n) for i, j in pure_generator_indices(n)]


def adjacent_factorization(sigma: Permutation, direction: str = 'left') -> List[int]:
    """
    Factor sigma into adjacent transpositions by bubble sort.

    Returns k_1 .. k_m with sigma = s_{k_1} o ... o s_{k_m}. 'left' sweeps
    each pass left to right, 'right' sweeps right to left; both give valid
    (usually different) words for the same permutation.
    """
    if direction not in ('left', 'right'):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    arr = list(sigma.images)
    n = len(arr)
    swaps = []
    changed = True
    while changed:
        changed = False
        positions = range(n - 1) if direction == 'left' else range(n - 2, -1, -1)
        for p in positions:
            if arr[p] > arr[p + 1]:
                arr[p], arr[p + 1] = arr[p + 1], arr[p]
                swaps.append(p + 1)
                changed = True
    # sigma o s_{w_1} o ... o s_{w_m} = id, hence sigma = s_{w_m} o ... o s_{w_1}
    return swaps[::-1]


def word_for_permutation(sigma: Permutation, direction: str = 'left') -> BraidWord:
    return BraidWord(sigma.size, tuple((k, 1) for k in adjacent_factorization(sigma, direction)))


def parse_word(text: str, n: int) -> BraidWord:
    """Parse "b1 b2^-1 b1", "1 -2 1" or "1,-2,1" into a word on n strands"""
    letters = []
    for token in re.split(r'[\s,]+', text.strip()):
        if not token or token in ('e', '1_B'):
            continue
        match = _TOKEN.match(token)
        if not match:
            raise WordSpecError(f"cannot parse braid letter {token!r}")
        index = int(match.group(1))
        sign = -1 if index < 0 else 1
        if match.group(2) is not None:
            sign *= int(match.group(2))
        letters.append((abs(index), sign))
    return BraidWord(n, tuple(letters))


def random_word(n: int, length: int, rng: np.random.Generator) -> BraidWord:
    """Random word of at most `length` letters (free reduction may shorten it)"""
    if n < 2:
        return BraidWord(n)
    indices = rng.integers(1, n, size=length)
    signs = rng.choice((-1, 1), size=length)
    return BraidWord(n, tuple((int(i), int(s)) for i, s in zip(indices, signs)))
