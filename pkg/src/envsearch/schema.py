"""Scenario encoding: attribute schemas, elements and test cases.

A test case is an ordered sequence of environment elements.  Each element
holds one value per schema attribute (a cell may be empty when the schema
declares conditional presence, e.g. a road segment that is either a
straight with a length or a turn with an angle).  Test cases are immutable
after construction and validated eagerly, so every downstream consumer can
assume domain membership and length bounds hold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence


class SchemaError(ValueError):
    """Raised when a schema, element or test case violates its invariants."""


@dataclass(frozen=True)
class DiscreteSet:
    """Finite attribute domain; values keep their declaration order."""

    values: tuple

    def __post_init__(self):
        if not self.values:
            raise SchemaError("discrete domain must be non-empty")
        if len(set(self.values)) != len(self.values):
            raise SchemaError("discrete domain must not contain duplicates")

    def contains(self, value) -> bool:
        return value in self.values

    def snap(self, value):
        return value

    def sample(self, rng):
        return rng.choice(self.values)


@dataclass(frozen=True)
class Interval:
    """Closed numeric domain sampled on a fixed step grid."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise SchemaError(f"interval lower bound {self.lo} above upper bound {self.hi}")
        if self.step <= 0:
            raise SchemaError("interval step must be positive")

    @property
    def n_steps(self) -> int:
        return int(round((self.hi - self.lo) / self.step))

    def contains(self, value) -> bool:
        if not isinstance(value, (int, float)):
            return False
        if not (self.lo <= value <= self.hi):
            return False
        k = (value - self.lo) / self.step
        return abs(k - round(k)) < 1e-9

    def snap(self, value):
        """Snap to the nearest grid point; used for canonical comparison."""
        k = round((value - self.lo) / self.step)
        k = min(max(k, 0), self.n_steps)
        return self.lo + k * self.step

    def sample(self, rng):
        return self.lo + rng.randint(0, self.n_steps) * self.step


@dataclass(frozen=True)
class AttributeSpec:
    """One named attribute of an environment element."""

    name: str
    domain: DiscreteSet | Interval


@dataclass(frozen=True)
class PresenceRule:
    """Conditional cell presence keyed on a single selector attribute.

    ``present`` maps each selector value to the names of the other
    attributes that must be filled for an element with that selector value;
    all remaining attributes must be empty.
    """

    selector: str
    present: Mapping[Any, frozenset]

    def required(self, selector_value) -> frozenset:
        try:
            return self.present[selector_value]
        except KeyError:
            raise SchemaError(f"no presence pattern for selector value {selector_value!r}")


@dataclass(frozen=True)
class ScenarioSchema:
    """Declares the attributes and length bounds of a scenario family."""

    name: str
    attributes: tuple[AttributeSpec, ...]
    min_elements: int
    max_elements: int
    presence: PresenceRule | None = None

    def __post_init__(self):
        if not (1 <= self.min_elements <= self.max_elements):
            raise SchemaError(
                f"need 1 <= min_elements <= max_elements, got "
                f"({self.min_elements}, {self.max_elements})"
            )
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if self.presence is not None and self.presence.selector not in names:
            raise SchemaError(f"presence selector {self.presence.selector!r} is not an attribute")

    @property
    def attribute_names(self) -> tuple:
        return tuple(a.name for a in self.attributes)

    def attribute(self, name: str) -> AttributeSpec:
        for a in self.attributes:
            if a.name == name:
                return a
        raise SchemaError(f"unknown attribute {name!r}")

    def index_of(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise SchemaError(f"unknown attribute {name!r}")

    def validate_element(self, values: Sequence) -> None:
        if len(values) != len(self.attributes):
            raise SchemaError(
                f"element has {len(values)} values, schema expects {len(self.attributes)}"
            )
        for spec, value in zip(self.attributes, values):
            if value is not None and not spec.domain.contains(value):
                raise SchemaError(f"value {value!r} outside domain of attribute {spec.name!r}")
        if self.presence is not None:
            sel_idx = self.index_of(self.presence.selector)
            sel_value = values[sel_idx]
            if sel_value is None:
                raise SchemaError(f"selector attribute {self.presence.selector!r} must be present")
            required = self.presence.required(sel_value)
            for spec, value in zip(self.attributes, values):
                if spec.name == self.presence.selector:
                    continue
                if spec.name in required and value is None:
                    raise SchemaError(
                        f"attribute {spec.name!r} must be present when "
                        f"{self.presence.selector!r} = {sel_value!r}"
                    )
                if spec.name not in required and value is not None:
                    raise SchemaError(
                        f"attribute {spec.name!r} must be empty when "
                        f"{self.presence.selector!r} = {sel_value!r}"
                    )

    def element(self, *values) -> "Element":
        return Element.create(self, values)


@dataclass(frozen=True)
class Element:
    """One environment element: a tuple of attribute values (None = empty cell)."""

    values: tuple

    @classmethod
    def create(cls, schema: ScenarioSchema, values: Iterable) -> "Element":
        values = tuple(values)
        schema.validate_element(values)
        return cls(values)

    def canonical_key(self, schema: ScenarioSchema) -> tuple:
        """Values snapped to their domain grid, for equality and hashing."""
        return tuple(
            None if v is None else spec.domain.snap(v)
            for spec, v in zip(schema.attributes, self.values)
        )


@dataclass(frozen=True)
class TestCase:
    """An ordered, schema-valid sequence of elements."""

    schema: ScenarioSchema = field(repr=False)
    elements: tuple[Element, ...]

    @classmethod
    def create(cls, schema: ScenarioSchema, elements: Iterable[Element]) -> "TestCase":
        elements = tuple(elements)
        if not (schema.min_elements <= len(elements) <= schema.max_elements):
            raise SchemaError(
                f"test case length {len(elements)} outside "
                f"[{schema.min_elements}, {schema.max_elements}]"
            )
        for el in elements:
            schema.validate_element(el.values)
        return cls(schema, elements)

    @classmethod
    def from_rows(cls, schema: ScenarioSchema, rows: Iterable[Iterable]) -> "TestCase":
        return cls.create(schema, [Element.create(schema, row) for row in rows])

    def __len__(self) -> int:
        return len(self.elements)

    def canonical_keys(self) -> list:
        return [el.canonical_key(self.schema) for el in self.elements]

    def replace_elements(self, elements: Iterable[Element]) -> "TestCase":
        return TestCase.create(self.schema, elements)


def test_case_to_dict(tc: TestCase) -> dict:
    """Interchange form: schema name plus a list of value rows (null = empty)."""
    return {
        "schema_name": tc.schema.name,
        "elements": [list(el.values) for el in tc.elements],
    }


def test_case_from_dict(data: Mapping, schema: ScenarioSchema) -> TestCase:
    if data.get("schema_name") != schema.name:
        raise SchemaError(
            f"document is for schema {data.get('schema_name')!r}, expected {schema.name!r}"
        )
    return TestCase.from_rows(schema, [tuple(row) for row in data["elements"]])


def dump_test_case(tc: TestCase) -> str:
    return json.dumps(test_case_to_dict(tc), sort_keys=True)


def load_test_case(text: str, schema: ScenarioSchema) -> TestCase:
    return test_case_from_dict(json.loads(text), schema)
