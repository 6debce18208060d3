"""Jaccard distance between test cases.

Elements are matched by exact equality of their canonical (grid-snapped)
values, with multiset semantics so repeated identical elements count with
multiplicity.  Empty cells compare equal only to empty cells.
"""

from __future__ import annotations

from collections import Counter

from .schema import SchemaError, TestCase


def jaccard_distance(tc1: TestCase, tc2: TestCase) -> float:
    """1 - |intersection| / |union| over element multisets, in [0, 1]."""
    if tc1.schema != tc2.schema:
        raise SchemaError(
            f"cannot compare test cases of schemas {tc1.schema.name!r} and {tc2.schema.name!r}"
        )
    c1 = Counter(tc1.canonical_keys())
    c2 = Counter(tc2.canonical_keys())
    inter = sum((c1 & c2).values())
    union = sum((c1 | c2).values())
    return 1.0 - inter / union
