"""Ambiguous-discourse schemas and their compilation to measurement scenarios.

The one-pronoun schema gives two observables that can never be measured
together (two disjoint singleton contexts): a judge sees either the special
or the alternate wording, never both.  The two-pronoun generalisation pairs
each slot-1 wording with each slot-2 wording, which yields four two-element
contexts arranged in a cycle of rank 4.

Observables are identified as "(pronoun,word)".  Outcomes are the two noun
phrases the pronouns can refer to, first phrase mapping to +1.  Templates
carry literal slot markers ${word1}/${word2} and pronoun markers
${pron1}/${pron2}.
"""

from __future__ import annotations

from dataclasses import dataclass
from string import Template

from .scenario import MeasurementScenario

WORD1 = "${word1}"
WORD2 = "${word2}"
PRON1 = "${pron1}"
PRON2 = "${pron2}"


class SchemaError(ValueError):
    """The schema violates a structural requirement."""


@dataclass(frozen=True)
class WinogradSchema:
    """One pronoun, one special/alternate word pair."""

    noun_phrases: tuple[str, str]
    pronoun: str
    special: str
    alternate: str
    template: str


@dataclass(frozen=True)
class GeneralisedWinogradSchema:
    """Two pronouns, one special/alternate pair per word slot."""

    noun_phrases: tuple[str, str]
    pronouns: tuple[str, str]
    special: tuple[str, str]
    alternate: tuple[str, str]
    template: str


def observable_id(pronoun: str, word: str) -> str:
    return f"({pronoun},{word})"


def _check_pair(label: str, pair: tuple[str, str], problems: list[str]) -> None:
    a, b = pair
    if not a or not b:
        problems.append(f"{label} entries must be non-empty")
    if a == b:
        problems.append(f"{label} entries must differ, both are {a!r}")


def validate_ws(schema: WinogradSchema) -> list[str]:
    problems: list[str] = []
    _check_pair("noun_phrases", schema.noun_phrases, problems)
    if not schema.pronoun:
        problems.append("pronoun must be non-empty")
    _check_pair("special/alternate words", (schema.special, schema.alternate), problems)
    for marker, want in ((WORD1, 1), (PRON1, 1), (WORD2, 0), (PRON2, 0)):
        got = schema.template.count(marker)
        if got != want:
            problems.append(f"template has {got} of {marker}, needs exactly {want}")
    return problems


def validate_gws(schema: GeneralisedWinogradSchema) -> list[str]:
    problems: list[str] = []
    _check_pair("noun_phrases", schema.noun_phrases, problems)
    # the two pronouns may be the same surface string (subscripts in print);
    # only the four (pronoun, word) ids must stay distinct
    if not schema.pronouns[0] or not schema.pronouns[1]:
        problems.append("pronouns must be non-empty")
    for slot in (0, 1):
        _check_pair(
            f"slot{slot + 1} special/alternate words",
            (schema.special[slot], schema.alternate[slot]),
            problems,
        )
    ids = [
        observable_id(schema.pronouns[0], schema.special[0]),
        observable_id(schema.pronouns[0], schema.alternate[0]),
        observable_id(schema.pronouns[1], schema.special[1]),
        observable_id(schema.pronouns[1], schema.alternate[1]),
    ]
    if len(set(ids)) != 4:
        problems.append(f"observable ids collide: {ids}")
    for marker in (WORD1, WORD2, PRON1, PRON2):
        got = schema.template.count(marker)
        if got != 1:
            problems.append(f"template has {got} of {marker}, needs exactly 1")
    return problems


def _require_valid(problems: list[str]) -> None:
    if problems:
        raise SchemaError("; ".join(problems))


def ws_scenario(schema: WinogradSchema) -> MeasurementScenario:
    """Two observables, each alone in its own maximal context."""
    _require_valid(validate_ws(schema))
    x_s = observable_id(schema.pronoun, schema.special)
    x_a = observable_id(schema.pronoun, schema.alternate)
    return MeasurementScenario.from_maximal(
        observables=(x_s, x_a),
        maximal_faces=((x_s,), (x_a,)),
        outcomes=schema.noun_phrases,
    )


def gws_scenario(schema: GeneralisedWinogradSchema) -> MeasurementScenario:
    """Four observables; contexts pair a slot-1 wording with a slot-2
    wording, so the result is always a rank-4 cycle."""
    _require_valid(validate_gws(schema))
    p1, p2 = schema.pronouns
    obs = (
        observable_id(p1, schema.special[0]),
        observable_id(p1, schema.alternate[0]),
        observable_id(p2, schema.special[1]),
        observable_id(p2, schema.alternate[1]),
    )
    x1, x2, y1, y2 = obs
    faces = ((x1, y1), (x1, y2), (x2, y1), (x2, y2))
    return MeasurementScenario.from_maximal(
        observables=obs, maximal_faces=faces, outcomes=schema.noun_phrases
    )


def context_words(schema: GeneralisedWinogradSchema, word1: str, word2: str) -> tuple[str, str]:
    """Check both words belong to their slots; returns them unchanged."""
    if word1 not in (schema.special[0], schema.alternate[0]):
        raise SchemaError(
            f"{word1!r} is not the slot-1 special ({schema.special[0]!r}) "
            f"or alternate ({schema.alternate[0]!r}) word"
        )
    if word2 not in (schema.special[1], schema.alternate[1]):
        raise SchemaError(
            f"{word2!r} is not the slot-2 special ({schema.special[1]!r}) "
            f"or alternate ({schema.alternate[1]!r}) word"
        )
    return word1, word2


def _fill(template: str, **slots: str) -> str:
    try:
        return Template(template).substitute(**slots)
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"template has markers beyond the supported set: {exc}") from exc


def instantiate(schema: GeneralisedWinogradSchema, word1: str, word2: str) -> str:
    """The discourse text for one context (a choice of both words)."""
    _require_valid(validate_gws(schema))
    context_words(schema, word1, word2)
    return _fill(
        schema.template,
        word1=word1, word2=word2, pron1=schema.pronouns[0], pron2=schema.pronouns[1],
    )


def instantiate_ws(schema: WinogradSchema, word: str) -> str:
    _require_valid(validate_ws(schema))
    if word not in (schema.special, schema.alternate):
        raise SchemaError(
            f"{word!r} is not the special ({schema.special!r}) "
            f"or alternate ({schema.alternate!r}) word"
        )
    return _fill(schema.template, word1=word, pron1=schema.pronoun)
