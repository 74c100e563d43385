"""Fatou-Bieberbach interpolation: build, evaluate and verify automorphism words."""

import json

from ._core import (
    Error,
    NotInSubspace,
    Overflow,
    ParseError,
    Problem,
    Result,
    SeparationFailure,
    ValidationError,
    Word,
    orbit_csv,
    solve,
    tame_normalize,
    verify_json,
)


def verify(word, problem, density=4.0):
    """Verification report as a dict; report["pass"] is the verdict."""
    return json.loads(verify_json(word, problem, density))


__all__ = [
    "Error",
    "NotInSubspace",
    "Overflow",
    "ParseError",
    "Problem",
    "Result",
    "SeparationFailure",
    "ValidationError",
    "Word",
    "orbit_csv",
    "solve",
    "tame_normalize",
    "verify",
    "verify_json",
]
