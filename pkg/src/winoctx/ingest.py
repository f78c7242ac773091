"""Response-file parsing, the validity filter, and aggregation to a model.

File format: comma-separated with header `respondent_id,word1,word2,pick1,pick2`.
The word columns carry the literal wording a judge saw; the schema decides
which slot and which special/alternate kind they are.  Picks label joint
referent choices: "AB" means first pronoun -> noun phrase A, second -> B.

A judge picks exactly two of the four combinations.  Only pick pairs closed
under swapping the referents count as valid: {AA,BB} (same referent twice)
or {AB,BA} (different referents).  Each valid response puts mass 1/2 on
each of its two picks, so p(AA) = p(BB) = n_same / (2 n_valid) and
p(AB) = p(BA) = 1/2 - p(AA) exactly.  Models built this way are
outcome-symmetric, and their single-observable marginals are (1/2, 1/2)
bit-for-bit, so the signalling discrepancy is exactly 0.0.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

from .empirical import EmpiricalModel
from .scenario import Context
from .schema import GeneralisedWinogradSchema, gws_scenario, observable_id

HEADER = ("respondent_id", "word1", "word2", "pick1", "pick2")
# pick labels are positional: first letter = first pronoun's referent,
# A = first noun phrase of the schema, B = second
PICKS = ("AA", "AB", "BA", "BB")
SAME = frozenset({"AA", "BB"})
DIFF = frozenset({"AB", "BA"})


class IngestError(ValueError):
    pass


class ResponseFormatError(IngestError):
    """Structural problem with a response file (missing/bad header)."""


@dataclass(frozen=True)
class ResponseRecord:
    respondent_id: str
    word1: str
    word2: str
    picks: frozenset[str]


@dataclass(frozen=True)
class ParseResult:
    records: tuple[ResponseRecord, ...]
    problems: tuple[str, ...]  # malformed lines, reported not dropped silently

    @property
    def ok(self) -> bool:
        return not self.problems


@dataclass(frozen=True)
class ContextTally:
    n_total: int
    n_valid: int
    n_same: int  # picks {AA,BB}
    n_diff: int  # picks {AB,BA}

    def __post_init__(self):
        if self.n_same + self.n_diff != self.n_valid:
            raise IngestError("n_valid must equal n_same + n_diff")
        if self.n_valid > self.n_total:
            raise IngestError("n_valid cannot exceed n_total")
        if min(self.n_total, self.n_valid, self.n_same, self.n_diff) < 0:
            raise IngestError("negative tally")


def validate_response(record: ResponseRecord) -> bool:
    """Valid iff the pick pair is closed under swapping referents A and B."""
    return record.picks == SAME or record.picks == DIFF


def parse_responses(path) -> ParseResult:
    """Read a response file.  Malformed data lines land in `problems` with
    their line number; well-formed lines always come back as records."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ResponseFormatError(f"{path}: empty file, expected header "
                                      + ",".join(HEADER)) from None
        if tuple(h.strip() for h in header) != HEADER:
            raise ResponseFormatError(
                f"{path}: header is {','.join(header)!r}, expected {','.join(HEADER)!r}"
            )
        records: list[ResponseRecord] = []
        problems: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(HEADER):
                problems.append(f"line {lineno}: {len(row)} fields, expected {len(HEADER)}")
                continue
            rid, word1, word2, pick1, pick2 = (cell.strip() for cell in row)
            if not rid:
                problems.append(f"line {lineno}: empty respondent_id")
                continue
            bad = [p for p in (pick1, pick2) if p not in PICKS]
            if bad:
                problems.append(
                    f"line {lineno}: unknown pick label(s) {bad}, expected one of {list(PICKS)}"
                )
                continue
            if pick1 == pick2:
                problems.append(f"line {lineno}: duplicate pick {pick1!r}, need two distinct")
                continue
            records.append(
                ResponseRecord(rid, word1, word2, frozenset((pick1, pick2)))
            )
        if not records and not problems:
            problems.append("file has a header but no data rows")
    return ParseResult(records=tuple(records), problems=tuple(problems))


def _context_map(schema: GeneralisedWinogradSchema) -> dict[tuple[str, str], Context]:
    p1, p2 = schema.pronouns
    out = {}
    for w1 in (schema.special[0], schema.alternate[0]):
        for w2 in (schema.special[1], schema.alternate[1]):
            out[(w1, w2)] = (observable_id(p1, w1), observable_id(p2, w2))
    return out


def aggregate(
    records: Iterable[ResponseRecord], schema: GeneralisedWinogradSchema
) -> tuple[EmpiricalModel, dict[Context, ContextTally]]:
    """Tally per context and build the symmetric empirical model.

    Order-independent: tallies are pure counts.  Every context of the
    schema's scenario must end up with at least one valid response,
    otherwise there is no distribution to put there and we refuse.
    """
    scenario = gws_scenario(schema)
    ctx_of = _context_map(schema)

    counts = {ctx: {"total": 0, "same": 0, "diff": 0} for ctx in ctx_of.values()}
    seen_ids: set[str] = set()
    for rec in records:
        key = (rec.word1, rec.word2)
        if key not in ctx_of:
            raise IngestError(
                f"record {rec.respondent_id!r}: words {key} match no context of the schema"
            )
        if rec.respondent_id in seen_ids:
            warnings.warn(
                f"respondent id {rec.respondent_id!r} appears more than once",
                stacklevel=2,
            )
        seen_ids.add(rec.respondent_id)
        c = counts[ctx_of[key]]
        c["total"] += 1
        if rec.picks == SAME:
            c["same"] += 1
        elif rec.picks == DIFF:
            c["diff"] += 1

    tallies: dict[Context, ContextTally] = {}
    tables: dict[Context, dict[tuple[str, str], float]] = {}
    for ctx, c in counts.items():
        tally = ContextTally(
            n_total=c["total"],
            n_valid=c["same"] + c["diff"],
            n_same=c["same"],
            n_diff=c["diff"],
        )
        tallies[ctx] = tally
        if tally.n_valid == 0:
            raise IngestError(
                f"context {ctx} has no valid responses; cannot estimate a distribution"
            )
        tables[ctx] = tally_distribution(tally, scenario.outcomes)

    model = EmpiricalModel.build(scenario, tables)
    return model, tallies


def tally_distribution(
    tally: ContextTally, outcomes: Sequence[str] = ("A", "B")
) -> dict[tuple[str, str], float]:
    """The symmetric two-observable table implied by a tally.

    p_diff is computed as 0.5 - p_same, not n_diff/(2 n_valid): the marginal
    p_same + (0.5 - p_same) then rounds to exactly 0.5 for every float
    p_same in [0, 0.5], which keeps aggregated models signalling-free to
    the last bit.
    """
    if tally.n_valid <= 0:
        raise IngestError("empty tally has no distribution")
    first, second = outcomes
    p_same = tally.n_same / (2 * tally.n_valid)
    p_diff = 0.5 - p_same
    return {
        (first, first): p_same,
        (second, second): p_same,
        (first, second): p_diff,
        (second, first): p_diff,
    }
