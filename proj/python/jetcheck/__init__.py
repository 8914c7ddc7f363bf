"""Exact verification of the catalogued identities."""

import json

from ._jetcheck import (
    JetcheckError,
    catalog_index,
    check_ids,
    euler,
    expand,
    explain,
    is_total_derivative,
    run_json,
    total_derivative,
)

__all__ = [
    "JetcheckError",
    "catalog_index",
    "check_ids",
    "euler",
    "expand",
    "explain",
    "is_total_derivative",
    "run",
    "run_json",
    "total_derivative",
]


def run(ids=(), seed=0, max_order=64, errata=True, errata_path=""):
    """Run the checks (all when ids is empty) and return the parsed report."""
    return json.loads(run_json(list(ids), seed, max_order, errata, errata_path))
