"""Initial test-case generation: uniform and Markov-chain sampling."""

from __future__ import annotations

import random

from .markov import MarkovChain
from .schema import Element, ScenarioSchema, SchemaError, TestCase


def _sample_element(schema: ScenarioSchema, rng: random.Random, fixed: dict | None = None) -> Element:
    """Draw one element.  ``fixed`` pins attribute values (e.g. from a chain).

    Draw order is deterministic: the presence selector first, then the
    remaining attributes in schema order, skipping empty cells.
    """
    fixed = fixed or {}
    values: dict = {}
    if schema.presence is not None:
        sel = schema.presence.selector
        values[sel] = fixed[sel] if sel in fixed else schema.attribute(sel).domain.sample(rng)
        required = schema.presence.required(values[sel])
    else:
        required = None
    row = []
    for spec in schema.attributes:
        if spec.name in values:
            row.append(values[spec.name])
        elif required is not None and spec.name not in required:
            row.append(None)
        elif spec.name in fixed:
            row.append(fixed[spec.name])
        else:
            row.append(spec.domain.sample(rng))
    return Element.create(schema, row)


def random_test_case(schema: ScenarioSchema, rng: random.Random) -> TestCase:
    """Length uniform in [min_elements, max_elements], every attribute value
    uniform over its domain.  Deterministic given the rng state."""
    length = rng.randint(schema.min_elements, schema.max_elements)
    return TestCase.create(schema, [_sample_element(schema, rng) for _ in range(length)])


def markov_test_case(schema: ScenarioSchema, chain: MarkovChain, rng: random.Random) -> TestCase:
    """Like :func:`random_test_case`, but the chain's designated attribute
    follows a realization of the chain instead of uniform draws."""
    spec = schema.attribute(chain.attribute)
    for state in chain.states:
        if not spec.domain.contains(state):
            raise SchemaError(
                f"chain state {state!r} outside domain of attribute {chain.attribute!r}"
            )
    length = rng.randint(schema.min_elements, schema.max_elements)
    walk = chain.walk(length, rng)
    return TestCase.create(
        schema,
        [_sample_element(schema, rng, fixed={chain.attribute: walk[i]}) for i in range(length)],
    )
