"""Markov-chain generator for attribute value sequences.

Used to seed initial populations with semantically richer scenarios than
uniform sampling gives (e.g. roads that rarely stay straight for the whole
map).  The chain drives exactly one designated attribute; everything else
is sampled uniformly by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

_TOL = 1e-9


@dataclass(frozen=True)
class MarkovChain:
    """Row-stochastic transition table over values of one attribute."""

    attribute: str
    states: tuple
    transition: tuple[tuple[float, ...], ...]
    initial: tuple[float, ...]

    def __post_init__(self):
        n = len(self.states)
        if n == 0:
            raise ValueError("chain needs at least one state")
        if len(set(self.states)) != n:
            raise ValueError("chain states must be unique")
        if len(self.transition) != n or any(len(row) != n for row in self.transition):
            raise ValueError("transition matrix must be square over the states")
        if len(self.initial) != n:
            raise ValueError("initial distribution size must match the states")
        for row in self.transition:
            if any(p < 0 for p in row):
                raise ValueError("transition probabilities must be non-negative")
            if abs(sum(row) - 1.0) > _TOL:
                raise ValueError(f"transition row {row} does not sum to 1")
        if any(p < 0 for p in self.initial):
            raise ValueError("initial probabilities must be non-negative")
        if abs(sum(self.initial) - 1.0) > _TOL:
            raise ValueError(f"initial distribution {self.initial} does not sum to 1")

    def _draw(self, probs: Sequence[float], rng):
        u = rng.random()
        acc = 0.0
        for state, p in zip(self.states, probs):
            acc += p
            if u < acc:
                return state
        return self.states[-1]  # guard against rounding at u ~ 1

    def walk(self, length: int, rng) -> list:
        """A realization of the chain: first value from the initial
        distribution, each next from the current state's transition row."""
        if length <= 0:
            return []
        values = [self._draw(self.initial, rng)]
        for _ in range(length - 1):
            row = self.transition[self.states.index(values[-1])]
            values.append(self._draw(row, rng))
        return values
