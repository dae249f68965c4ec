"""Words in the free group on a, b with the commutator letter c = [a, b].

Letters are single characters: lowercase for generators, uppercase for their
inverses. ``c`` stands for ``a b a⁻¹ b⁻¹`` and is kept as a letter so that the
Cayley graph of the generating set {a±1, b±1, c±1} can be walked directly.
"""
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator, NamedTuple

from app.group.exceptions import WordParseError


ALPHABET = "aAbBcC"
GENERATORS = "aAbB"
LETTER_ORDER = {letter: index for index, letter in enumerate(ALPHABET)}
INVERSE_LETTER = {"a": "A", "A": "a", "b": "B", "B": "b", "c": "C", "C": "c"}
C_EXPANSION = {"c": "abAB", "C": "baBA"}
PERIPHERAL_WORD = C_EXPANSION["c"]

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻⁺", "0123456789-+")
_SEPARATORS = set(" \t·*.,")


def _read_exponent(text: str, pos: int) -> tuple[int, int]:
    """Read an optional exponent starting at ``pos``; return (exponent, new pos)."""
    if pos < len(text) and text[pos] == "^":
        pos += 1
        wrapped = pos < len(text) and text[pos] == "("
        if wrapped:
            pos += 1
        start = pos
        while pos < len(text) and (text[pos] in "+-" or text[pos].isdigit()):
            pos += 1
        digits = text[start:pos]
        if wrapped:
            if pos >= len(text) or text[pos] != ")":
                raise WordParseError(f"Unclosed exponent in '{text}'")
            pos += 1
        try:
            return int(digits), pos
        except ValueError as e:
            raise WordParseError(f"Bad exponent '{digits}' in '{text}'") from e

    start = pos
    while pos < len(text) and text[pos] in "⁰¹²³⁴⁵⁶⁷⁸⁹⁻⁺":
        pos += 1
    if pos == start:
        return 1, pos
    raw = text[start:pos].translate(_SUPERSCRIPTS)
    try:
        return int(raw), pos
    except ValueError as e:
        raise WordParseError(f"Bad exponent '{text[start:pos]}' in '{text}'") from e


def parse_word(text: str) -> str:
    """Parse a human-written word into compact letter form.

    Accepts ``a``, ``A`` (inverse), ``a⁻¹``, ``a^-1``, ``a^(3)``, ``c²`` and
    separators such as spaces or ``·``. No reduction is performed.
    """
    letters: list[str] = []
    pos = 0
    while pos < len(text):
        char = text[pos]
        if char in _SEPARATORS:
            pos += 1
            continue
        if char not in LETTER_ORDER:
            raise WordParseError(f"Unknown letter '{char}' in '{text}'")
        exponent, pos = _read_exponent(text, pos + 1)
        letter = char if exponent >= 0 else INVERSE_LETTER[char]
        letters.append(letter * abs(exponent))
    return "".join(letters)


def free_reduce(word: str) -> str:
    """Cancel adjacent inverse pairs, keeping c letters as letters."""
    stack: list[str] = []
    for letter in word:
        if stack and stack[-1] == INVERSE_LETTER[letter]:
            stack.pop()
        else:
            stack.append(letter)
    return "".join(stack)


def expand(word: str) -> str:
    """Replace every c letter by its commutator expansion."""
    return "".join(C_EXPANSION.get(letter, letter) for letter in word)


def reduce(word: str) -> str:
    """Canonical freely reduced a/b word of the element ``word`` represents."""
    return free_reduce(expand(word))


def inverse_word(word: str) -> str:
    return "".join(INVERSE_LETTER[letter] for letter in reversed(word))


def c_power(k: int) -> str:
    return "c" * k if k >= 0 else "C" * (-k)


def word_key(word: str) -> tuple[int, tuple[int, ...]]:
    """Length-then-lexicographic sort key with a < A < b < B < c < C."""
    return len(word), tuple(LETTER_ORDER[letter] for letter in word)


def format_word(word: str, unicode: bool = False) -> str:
    """Render a compact word; ``unicode`` spells inverses as ``a⁻¹``."""
    if not word:
        return "1"
    if not unicode:
        return word
    return " ".join(
        letter if letter.islower() else f"{letter.lower()}⁻¹" for letter in word
    )


def enumerate_words(max_length: int, alphabet: str = ALPHABET) -> Iterator[str]:
    """Yield freely reduced words up to ``max_length`` in length-then-lex order."""
    ordered = sorted(alphabet, key=LETTER_ORDER.__getitem__)
    layer = [""]
    yield ""
    for _ in range(max_length):
        next_layer = []
        for word in layer:
            for letter in ordered:
                if word and word[-1] == INVERSE_LETTER[letter]:
                    continue
                next_layer.append(word + letter)
        for word in next_layer:
            yield word
        layer = next_layer


class CosetDecomposition(NamedTuple):
    """g = rep · cᵏ with rep the canonical shortest member of g⟨c⟩."""
    rep: str
    exponent: int


def _periodic_suffix_match(word: str, period: str) -> int:
    """Length of the longest suffix of ``word`` that is a suffix of period^∞."""
    n = len(period)
    matched = 0
    while matched < len(word) and word[-1 - matched] == period[-1 - (matched % n)]:
        matched += 1
    return matched


def peripheral_coset_decompose(
    word: str, peripheral: str = PERIPHERAL_WORD
) -> CosetDecomposition:
    """Split an element as rep · cᵏ with rep shortest in its ⟨c⟩-coset.

    Ties in length are broken lexicographically, which makes ``rep`` a
    function of the coset alone. The scan only inspects the periodic suffix
    of the reduced word, so the cost is linear in its length.
    """
    reduced = reduce(word)
    period_inverse = inverse_word(peripheral)
    n = len(peripheral)

    candidates: list[tuple[str, int]] = [(reduced, 0)]
    forward = _periodic_suffix_match(reduced, peripheral)
    backward = _periodic_suffix_match(reduced, period_inverse)
    for matched, strip, sign in (
        (forward, period_inverse, 1),
        (backward, peripheral, -1),
    ):
        for j in {matched // n, -(-matched // n)}:
            if j > 0:
                candidates.append((free_reduce(reduced + strip * j), sign * j))

    rep, exponent = min(candidates, key=lambda item: word_key(item[0]))
    return CosetDecomposition(rep, exponent)


@total_ordering
@dataclass(frozen=True)
class GroupElement:
    """An element of F₂ stored by its canonical reduced a/b word."""

    word: str

    @classmethod
    def from_word(cls, text: str) -> "GroupElement":
        return cls(reduce(parse_word(text)))

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls("")

    def __post_init__(self) -> None:
        if reduce(self.word) != self.word:
            raise WordParseError(f"'{self.word}' is not a reduced a/b word")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(free_reduce(self.word + other.word))

    def __lt__(self, other: "GroupElement") -> bool:
        return word_key(self.word) < word_key(other.word)

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return format_word(self.word)

    def inverse(self) -> "GroupElement":
        return GroupElement(inverse_word(self.word))

    @property
    def is_identity(self) -> bool:
        return not self.word

    def coset(self) -> CosetDecomposition:
        return peripheral_coset_decompose(self.word)

    def matrix(self, rep):
        """Matrix of this element under ``rep`` (a Representation)."""
        return rep.evaluate(self.word)
