"""Deterministic finite automata with output, read most-significant-bit first."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


def to_binary(n: int) -> str:
    """Canonical binary word of ``n``; ``0`` maps to ``"0"``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return format(n, "b")


def from_binary(word: str) -> int:
    return int(word, 2)


@dataclass(frozen=True)
class Dfao:
    """Automaton over the bits ``{0, 1}`` with an output value on every state.

    ``transition[q]`` is the pair of successor states on reading 0 and 1.
    """

    initial: int
    transition: tuple[tuple[int, int], ...]
    output: tuple[int, ...]

    def __post_init__(self):
        n = len(self.output)
        if n == 0:
            raise ValueError("automaton needs at least one state")
        if len(self.transition) != n:
            raise ValueError("transition table must cover every state")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        for row in self.transition:
            if len(row) != 2 or not all(0 <= q < n for q in row):
                raise ValueError(f"bad transition row {row!r}")

    @property
    def state_count(self) -> int:
        return len(self.output)

    def run(self, word: str) -> int:
        """State reached from the initial state after reading ``word``."""
        q = self.initial
        for ch in word:
            if ch == "0":
                q = self.transition[q][0]
            elif ch == "1":
                q = self.transition[q][1]
            else:
                raise ValueError(f"not a binary word: {word!r}")
        return q

    def eval_word(self, word: str) -> int:
        return self.output[self.run(word)]


def rudin_shapiro_dfao() -> Dfao:
    """Four states: (parity of 11-blocks so far, last bit read).

    q0 = (even, 0), q1 = (even, 1), q2 = (odd, 1), q3 = (odd, 0).
    """
    return Dfao(
        initial=0,
        transition=((0, 1), (0, 2), (3, 1), (3, 2)),
        output=(1, 1, -1, -1),
    )


def dfao_eval(a: Dfao, n: int) -> int:
    return a.eval_word(to_binary(n))


def dfao_sequence(a: Dfao, count: int, start: int = 0) -> list[int]:
    return [dfao_eval(a, n) for n in range(start, start + count)]


def count_word_occurrences(w: str | Sequence[int], n: int,
                           leading_zero_context: bool = False) -> int:
    """Overlapping occurrences of ``w`` in the binary expansion of ``n``.

    With ``leading_zero_context`` the expansion is read as ``0(n)_2``.
    """
    if not isinstance(w, str):
        w = "".join(str(int(b)) for b in w)
    if not w:
        raise ValueError("empty word")
    if set(w) - {"0", "1"}:
        raise ValueError(f"not a binary word: {w!r}")
    text = to_binary(n)
    if leading_zero_context:
        text = "0" + text
    count = 0
    pos = text.find(w)
    while pos != -1:
        count += 1
        pos = text.find(w, pos + 1)
    return count


def dfao_eval_array(a: Dfao, n) -> np.ndarray:
    """Vectorised :func:`dfao_eval`; reads exactly the canonical word of each n."""
    n = np.asarray(n, dtype=np.uint64)
    table = np.asarray(a.transition, dtype=np.int64)
    out = np.asarray(a.output, dtype=np.int64)
    top = int(n.max(initial=0)).bit_length()
    length = np.ones(n.shape, dtype=np.int64)  # "0" is one letter long
    for pos in range(1, top):
        length[(n >> np.uint64(pos)) > 0] = pos + 1
    q = np.full(n.shape, a.initial, dtype=np.int64)
    for pos in range(max(top, 1) - 1, -1, -1):
        active = pos < length
        bit = ((n >> np.uint64(pos)) & np.uint64(1)).astype(np.int64)
        q = np.where(active, table[q, bit], q)
    return out[q]
