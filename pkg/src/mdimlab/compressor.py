"""Streaming LZ78 compressor with exact bit accounting.

The parse splits the input into phrases, each extending a previously seen
phrase by one literal bit. Emitting the i-th phrase (0-based) costs
``i.bit_length() + 1`` bits: enough to name any of the i + 1 dictionary
entries, the empty phrase included, plus the literal bit. A final partial
phrase, one cut off mid-extension, is charged like a completed one. The
empty string costs zero bits.

Costs are reproducible integers, so profiles taken at different times or
processes agree bit for bit.
"""

from __future__ import annotations

from typing import Iterable


def _token_cost(index: int) -> int:
    return index.bit_length() + 1


class Lz78Parser:
    """Incremental parser holding a running compressed-size total."""

    __slots__ = ("_children", "_node", "_closed_cost", "_tokens", "_length")

    def __init__(self) -> None:
        self._children: list[dict[str, int]] = [{}]
        self._node = 0
        self._closed_cost = 0
        self._tokens = 0
        self._length = 0

    def push(self, bit: str) -> None:
        if bit != "0" and bit != "1":
            raise ValueError(f"bit must be '0' or '1', got {bit!r}")
        self._length += 1
        child = self._children[self._node].get(bit)
        if child is None:
            self._children[self._node][bit] = len(self._children)
            self._children.append({})
            self._closed_cost += _token_cost(self._tokens)
            self._tokens += 1
            self._node = 0
        else:
            self._node = child

    def feed(self, bits: str) -> "Lz78Parser":
        for bit in bits:
            self.push(bit)
        return self

    @property
    def length(self) -> int:
        """Number of input bits consumed so far."""
        return self._length

    @property
    def cost(self) -> int:
        """Compressed size in bits of everything consumed so far."""
        if self._node != 0:
            return self._closed_cost + _token_cost(self._tokens)
        return self._closed_cost

    @property
    def phrase_count(self) -> int:
        """Completed phrases plus the in-progress one, if any."""
        return self._tokens + (1 if self._node != 0 else 0)


def lz78_cost(bits: str) -> int:
    """Compressed size in bits of the whole string."""
    return Lz78Parser().feed(bits).cost


def lz78_phrases(bits: str) -> list[str]:
    """The parse as a list of phrases; the last one may be partial."""
    phrases = []
    current = ""
    seen = {""}
    for bit in bits:
        current += bit
        if current not in seen:
            seen.add(current)
            phrases.append(current)
            current = ""
    if current:
        phrases.append(current)
    return phrases


def lz78_profile(bits: str, checkpoints: Iterable[int]) -> list[int]:
    """Compressed sizes of the prefixes ending at each checkpoint.

    Checkpoints must be nondecreasing positions within the string. The
    whole string is parsed once; each reported value equals what
    ``lz78_cost`` would return for that prefix on its own.
    """
    marks = list(checkpoints)
    if any(b > a for a, b in zip(marks[1:], marks)):
        raise ValueError("checkpoints must be nondecreasing")
    if marks and (marks[0] < 0 or marks[-1] > len(bits)):
        raise ValueError("checkpoint outside the string")
    parser = Lz78Parser()
    out = []
    at = 0
    for mark in marks:
        while at < mark:
            parser.push(bits[at])
            at += 1
        out.append(parser.cost)
    return out


def conditional_cost(target: str, context: str) -> int:
    """Bits needed for ``target`` given a parse warmed up on ``context``."""
    parser = Lz78Parser().feed(context)
    base = parser.cost
    return parser.feed(target).cost - base
