"""Words over a doubled alphabet and inverse monoid presentations.

A word is a tuple of letters, each letter a generator base with a sign.
The textual form uses a trailing apostrophe for formal inverses, so
``a b' a`` denotes the word a b^-1 a, and the single token ``1`` denotes
the empty word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple


class Letter(NamedTuple):
    base: str
    sign: int  # +1 or -1

    def inv(self) -> "Letter":
        return Letter(self.base, -self.sign)

    def __str__(self) -> str:
        return self.base if self.sign > 0 else self.base + "'"


InvWord = tuple[Letter, ...]


def invert_word(w: Iterable[Letter]) -> InvWord:
    """Formal inverse: reverse the word and invert each letter."""
    return tuple(x.inv() for x in reversed(tuple(w)))


def free_reduce(w: Iterable[Letter]) -> InvWord:
    """Cancel adjacent xx^-1 pairs until none remain."""
    out: list[Letter] = []
    for x in w:
        if out and out[-1] == x.inv():
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class WordSyntaxError(ValueError):
    """Malformed word text.  ``position`` is a character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownLetterError(ValueError):
    def __init__(self, base: str):
        super().__init__(f"letter {base!r} is not in the presentation alphabet")
        self.base = base


_TOKEN = re.compile(r"[A-Za-z][A-Za-z0-9_]*'?|1|'")


def parse_word(text: str, presentation: "Presentation | None" = None) -> InvWord:
    """Parse space separated letters into an InvWord.

    ``1`` is accepted only as the sole token and gives the empty word.
    When a presentation is supplied every base must be in its alphabet.
    """
    letters: list[Letter] = []
    saw_one = False
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group()
        end = m.end()
        if end < n and not text[end].isspace():
            raise WordSyntaxError(f"malformed token starting with {tok!r}", pos)
        if tok == "1":
            saw_one = True
            letters.append(Letter("", 0))  # placeholder, validated below
        elif tok == "'":
            raise WordSyntaxError("dangling apostrophe", pos)
        elif tok.endswith("'"):
            letters.append(Letter(tok[:-1], -1))
        else:
            letters.append(Letter(tok, 1))
        pos = end
    if saw_one:
        if len(letters) != 1:
            raise WordSyntaxError("'1' may only appear as the whole word", 0)
        return ()
    if presentation is not None:
        for x in letters:
            if x.base not in presentation.alphabet:
                raise UnknownLetterError(x.base)
    return tuple(letters)


def format_word(w: Iterable[Letter]) -> str:
    parts = [str(x) for x in w]
    return " ".join(parts) if parts else "1"


@dataclass(frozen=True)
class Presentation:
    """Inverse monoid presentation Inv<alphabet | relations>.

    Relations are pairs of words over the doubled alphabet.  The derived
    constant ``K`` bounds the neighbourhood radius used throughout the
    sapling machinery: the longest relation side, but never below 2.
    """

    alphabet: frozenset[str]
    relations: tuple[tuple[InvWord, InvWord], ...]

    def __post_init__(self):
        for lhs, rhs in self.relations:
            for x in lhs + rhs:
                if x.base not in self.alphabet:
                    raise UnknownLetterError(x.base)

    @property
    def K(self) -> int:
        longest = max((len(s) for r in self.relations for s in r), default=0)
        return max(2, longest)

    @property
    def letters(self) -> tuple[Letter, ...]:
        """All signed letters, positive bases first, sorted for determinism."""
        pos = [Letter(a, 1) for a in sorted(self.alphabet)]
        return tuple(pos + [x.inv() for x in pos])


def presentation(alphabet: Iterable[str], relations: Iterable[tuple[str, str]]) -> Presentation:
    """Convenience constructor from plain strings."""
    alpha = frozenset(alphabet)
    rels = []
    for lhs, rhs in relations:
        rels.append((parse_word(lhs), parse_word(rhs)))
    p = Presentation(alpha, tuple(rels))
    return p


class PresentationSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


def parse_presentation(text: str) -> Presentation:
    """Parse the presentation file format.

    One ``letters:`` line listing generator bases, then any number of
    ``rel:`` lines of the form ``rel: u = v``.  Blank lines and ``#``
    comments are ignored.
    """
    alphabet: list[str] = []
    saw_letters = False
    relations: list[tuple[InvWord, InvWord]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("letters:"):
            if saw_letters:
                raise PresentationSyntaxError("duplicate letters: line", lineno)
            saw_letters = True
            for tok in line[len("letters:"):].split():
                if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", tok):
                    raise PresentationSyntaxError(f"bad generator name {tok!r}", lineno)
                if tok in alphabet:
                    raise PresentationSyntaxError(f"repeated generator {tok!r}", lineno)
                alphabet.append(tok)
        elif line.startswith("rel:"):
            if not saw_letters:
                raise PresentationSyntaxError("rel: before letters:", lineno)
            body = line[len("rel:"):]
            if body.count("=") != 1:
                raise PresentationSyntaxError("relation needs exactly one '='", lineno)
            lhs_text, rhs_text = body.split("=")
            try:
                lhs = parse_word(lhs_text)
                rhs = parse_word(rhs_text)
            except ValueError as e:
                raise PresentationSyntaxError(str(e), lineno) from e
            relations.append((lhs, rhs))
        else:
            raise PresentationSyntaxError(f"unrecognised line {line!r}", lineno)
    if not saw_letters:
        raise PresentationSyntaxError("missing letters: line", 1)
    p = Presentation(frozenset(alphabet), tuple(relations))
    return p


def format_presentation(p: Presentation) -> str:
    lines = ["letters: " + " ".join(sorted(p.alphabet))]
    for lhs, rhs in p.relations:
        lines.append(f"rel: {format_word(lhs)} = {format_word(rhs)}")
    return "\n".join(lines) + "\n"
