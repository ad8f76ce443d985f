"""Surface-group presentations and free-word combinatorics.

Words are tuples of signed generator indices: +k is the k-th generator,
-k its inverse (1-based).  For genus g the generators are
a1, b1, ..., ag, bg with indices 1..2g; the relator is the product of
commutators [a1,b1]...[ag,bg].

Only free reduction is performed; sampled words are short and their
matrix images are compared numerically downstream.
"""

from dataclasses import dataclass

from .config import ResourceLimit


@dataclass(frozen=True)
class GroupWord:
    """A freely reduced word in the surface-group generators."""

    letters: tuple

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        for a, b in zip(letters, letters[1:]):
            if a == -b:
                raise ValueError("word is not freely reduced")
        if any(x == 0 for x in letters):
            raise ValueError("letter indices are nonzero signed integers")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return reduce_word(self.letters + other.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple(-x for x in reversed(self.letters)))

    def to_json(self) -> list:
        return list(self.letters)

    @classmethod
    def from_json(cls, data) -> "GroupWord":
        return reduce_word(data)


@dataclass(frozen=True)
class SurfaceGroupPresentation:
    """Presentation of the genus-g surface group (g >= 2)."""

    genus: int

    def __post_init__(self):
        if self.genus < 2:
            raise ValueError("genus must be at least 2")

    @property
    def num_generators(self) -> int:
        return 2 * self.genus

    def generator_name(self, index: int) -> str:
        """Names a1, b1, a2, b2, ...; capitalized for inverses."""
        base = ("a", "b")[(abs(index) - 1) % 2]
        pair = (abs(index) - 1) // 2 + 1
        name = f"{base}{pair}"
        return name.upper() if index < 0 else name

    def relator(self) -> GroupWord:
        letters = []
        for i in range(self.genus):
            a, b = 2 * i + 1, 2 * i + 2
            letters += [a, b, -a, -b]
        return GroupWord(tuple(letters))

    def parse_word(self, text: str) -> GroupWord:
        """Parse words like "a1 B1 a2" (capital letter = inverse)."""
        letters = []
        for token in text.split():
            base, pair = token[0], int(token[1:])
            if base.lower() not in ("a", "b") or not (1 <= pair <= self.genus):
                raise ValueError(f"unknown generator {token!r}")
            idx = 2 * (pair - 1) + (1 if base.lower() == "a" else 2)
            letters.append(-idx if base.isupper() else idx)
        return reduce_word(letters)

    def format_word(self, word: GroupWord) -> str:
        return " ".join(self.generator_name(x) for x in word.letters) or "e"


def reduce_word(letters) -> GroupWord:
    """Freely reduce a letter sequence; idempotent."""
    if isinstance(letters, GroupWord):
        letters = letters.letters
    stack = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(int(x))
    return GroupWord(tuple(stack))


def cyclic_reduce(word: GroupWord) -> GroupWord:
    """Cyclically reduced, lexicographically least conjugacy representative.

    The tie-break among cyclic rotations uses the letter order
    a1 < a1^-1 < b1 < b1^-1 < a2 < ... (see `_letter_key`).
    """
    letters = list(reduce_word(word).letters)
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    if not letters:
        return GroupWord(())
    rotations = [tuple(letters[i:] + letters[:i]) for i in range(len(letters))]
    best = min(rotations, key=lambda rot: tuple(_letter_key(x) for x in rot))
    return GroupWord(best)


def _letter_key(x: int) -> int:
    return 2 * (abs(x) - 1) + (1 if x < 0 else 0)


def _is_proper_power(letters: tuple) -> bool:
    n = len(letters)
    for period in range(1, n):
        if n % period == 0 and letters == letters[period:] + letters[:period]:
            return True
    return False


def enumerate_conjugacy_classes(presentation: SurfaceGroupPresentation, max_len: int,
                                primitive_only: bool = False,
                                max_count: int = 2_000_000) -> list:
    """One canonical representative per cyclic-conjugacy class of reduced words.

    Deterministic order: by length, then lexicographic on the canonical
    rotation.  gamma and gamma^-1 are kept as separate classes.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    k = presentation.num_generators
    alphabet = sorted(
        [x for i in range(1, k + 1) for x in (i, -i)], key=_letter_key
    )
    out = []
    seen = set()
    count = 0

    def extend(prefix):
        nonlocal count
        length = len(prefix)
        if length >= 1:
            count += 1
            if count > max_count:
                raise ResourceLimit(f"word ball exceeds {max_count} words")
            # only canonical (cyclically reduced, least-rotation) words are kept
            if prefix[0] != -prefix[-1]:
                canon = cyclic_reduce(GroupWord(tuple(prefix))).letters
                if len(canon) == length and canon not in seen:
                    if not (primitive_only and _is_proper_power(canon)):
                        seen.add(canon)
                        out.append((length, tuple(_letter_key(x) for x in canon), GroupWord(canon)))
        if length < max_len:
            last = prefix[-1] if prefix else None
            for x in alphabet:
                if last is None or x != -last:
                    extend(prefix + [x])

    extend([])
    out.sort(key=lambda item: (item[0], item[1]))
    return [w for _, _, w in out]
