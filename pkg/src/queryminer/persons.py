"""Candidate full-name extraction from multi-token queries.

A query token that appears in the given-name lexicon acts as a trigger; the
extractor then reads a surname next to it, optionally crossing a particle
sequence ("van", "van den", ...).  Extraction is deliberately recall-heavy:
candidates are meant to be filtered afterwards by knowledge-base lookup.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .ingest import Query, normalize_text

_DIGITS_RE = re.compile(r"^[0-9]+$")

# Surname-internal function words; multi-token sequences first so the
# matcher is longest-first by construction.
DEFAULT_PARTICLE_SEQUENCES = (
    ("van", "den"),
    ("van", "der"),
    ("van",),
    ("von",),
    ("de",),
    ("du",),
    ("ten",),
    ("ter",),
)

GIVEN_FIRST = "given-first"
SURNAME_FIRST = "surname-first"


@dataclass(frozen=True)
class GivenNameLexicon:
    """Set of normalized given names used as extraction triggers."""

    names: frozenset[str]
    source_tag: str = ""

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("given-name lexicon is empty")

    def __contains__(self, token: str) -> bool:
        return token in self.names

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class ParticleList:
    """Particle token sequences, longest first."""

    sequences: tuple[tuple[str, ...], ...] = DEFAULT_PARTICLE_SEQUENCES

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.sequences, key=len, reverse=True))
        if any(not seq for seq in ordered):
            raise ValueError("empty particle sequence")
        object.__setattr__(self, "sequences", ordered)

    @property
    def tokens(self) -> frozenset[str]:
        return frozenset(tok for seq in self.sequences for tok in seq)


@dataclass(frozen=True)
class CandidateName:
    """A possible full person name inside one query.

    Spans are [start, end) over the query's tokens; the surface keeps the
    original token order.
    """

    query: Query
    given_span: tuple[int, int]
    surname_span: tuple[int, int]
    particle_span: Optional[tuple[int, int]]
    surface: str
    order: str

    @property
    def span(self) -> tuple[int, int]:
        parts = [self.given_span, self.surname_span]
        if self.particle_span:
            parts.append(self.particle_span)
        return min(s for s, _ in parts), max(e for _, e in parts)

    def given_text(self) -> str:
        s, e = self.given_span
        return " ".join(self.query.tokens[s:e])

    def particle_text(self) -> str:
        if not self.particle_span:
            return ""
        s, e = self.particle_span
        return " ".join(self.query.tokens[s:e])

    def surname_text(self) -> str:
        s, e = self.surname_span
        return " ".join(self.query.tokens[s:e])

    def inverted_surface(self) -> str:
        """The same name with given/surname order swapped."""
        tail = " ".join(p for p in (self.particle_text(), self.surname_text()) if p)
        if self.order == GIVEN_FIRST:
            return f"{tail} {self.given_text()}"
        return f"{self.given_text()} {tail}"


def load_given_names(path: str, source_tag: str = "") -> GivenNameLexicon:
    """One name per line; entries that normalize to more than one token
    (hyphenated double names) are skipped."""
    names = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            tokens = normalize_text(line)
            if len(tokens) == 1:
                names.add(tokens[0])
    return GivenNameLexicon(names=frozenset(names), source_tag=source_tag)


def load_particles(path: str) -> ParticleList:
    """One space-separated particle sequence per line."""
    sequences = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            tokens = tuple(normalize_text(line))
            if tokens:
                sequences.append(tokens)
    return ParticleList(sequences=tuple(sequences))


def _is_surname_token(
    token: str,
    given_names: Iterable[str],
    common_words: frozenset[str],
    particle_tokens: frozenset[str],
) -> bool:
    # A surname token must not be readable as anything else: not a given
    # name, not a function word, not a particle, not a number.
    if token in given_names or token in common_words or token in particle_tokens:
        return False
    return not _DIGITS_RE.match(token)


def _match_particles_at(
    tokens: Sequence[str], pos: int, particles: ParticleList
) -> Optional[tuple[int, int]]:
    for seq in particles.sequences:
        end = pos + len(seq)
        if end <= len(tokens) and tuple(tokens[pos:end]) == seq:
            return pos, end
    return None


def _match_particles_ending_at(
    tokens: Sequence[str], pos: int, particles: ParticleList
) -> Optional[tuple[int, int]]:
    for seq in particles.sequences:
        start = pos - len(seq)
        if start >= 0 and tuple(tokens[start:pos]) == seq:
            return start, pos
    return None


def _surname_run(
    tokens: Sequence[str],
    start: int,
    given_names: Iterable[str],
    common_words: frozenset[str],
    particle_tokens: frozenset[str],
    cap: int,
) -> int:
    length = 0
    while (start + length < len(tokens) and length < cap
           and _is_surname_token(tokens[start + length], given_names,
                                 common_words, particle_tokens)):
        length += 1
    return length


def _surname_run_backwards(
    tokens: Sequence[str],
    end: int,
    given_names: Iterable[str],
    common_words: frozenset[str],
    particle_tokens: frozenset[str],
    cap: int,
) -> int:
    length = 0
    while (end - length - 1 >= 0 and length < cap
           and _is_surname_token(tokens[end - length - 1], given_names,
                                 common_words, particle_tokens)):
        length += 1
    return length


def person_reading_exists(
    tokens: Sequence[str],
    position: int,
    given_names: Iterable[str],
    common_words: frozenset[str],
    particles: ParticleList,
    max_surname_tokens: int = 2,
) -> bool:
    """Could the token at ``position`` be the given name of a full name?

    Used by the place matcher to suppress single-token gazetteer hits whose
    token doubles as a first name or common word.  The check is structural:
    it asks whether a surname can be read beside the position, without
    requiring the token itself to be in any lexicon.
    """
    ptoks = particles.tokens
    right = position + 1
    particle = _match_particles_at(tokens, right, particles)
    if particle:
        if _surname_run(tokens, particle[1], given_names, common_words,
                        ptoks, max_surname_tokens):
            return True
    if _surname_run(tokens, right, given_names, common_words, ptoks,
                    max_surname_tokens):
        return True
    return bool(_surname_run_backwards(tokens, position, given_names,
                                       common_words, ptoks,
                                       max_surname_tokens))


def _candidates_at(
    query: Query,
    i: int,
    lexicon: GivenNameLexicon,
    particles: ParticleList,
    common_words: frozenset[str],
    max_surname_tokens: int,
    order: str,
) -> list[CandidateName]:
    tokens = query.tokens
    ptoks = particles.tokens
    found = []
    # Given name first, surname (with optional particle) to the right.
    right = i + 1
    particle = _match_particles_at(tokens, right, particles)
    surname_start = particle[1] if particle else right
    run = _surname_run(tokens, surname_start, lexicon.names, common_words,
                       ptoks, max_surname_tokens)
    if not run and particle:
        # Particle with no surname after it is not a name; retry without.
        particle = None
        surname_start = right
        run = _surname_run(tokens, surname_start, lexicon.names, common_words,
                           ptoks, max_surname_tokens)
    if run:
        end = surname_start + run
        found.append(CandidateName(
            query=query,
            given_span=(i, i + 1),
            surname_span=(surname_start, end),
            particle_span=particle,
            surface=" ".join(tokens[i:end]),
            order=GIVEN_FIRST,
        ))
    if order != "both":
        return found
    # Surname first (library queries are often inverted), given name last.
    back = _surname_run_backwards(tokens, i, lexicon.names, common_words,
                                  ptoks, max_surname_tokens)
    if back:
        surname_span = (i - back, i)
        particle = _match_particles_ending_at(tokens, i - back, particles)
        start = particle[0] if particle else i - back
        found.append(CandidateName(
            query=query,
            given_span=(i, i + 1),
            surname_span=surname_span,
            particle_span=particle,
            surface=" ".join(tokens[start:i + 1]),
            order=SURNAME_FIRST,
        ))
    return found


def _resolve_overlaps(candidates: list[CandidateName]) -> list[CandidateName]:
    order_rank = {GIVEN_FIRST: 0, SURNAME_FIRST: 1}
    ranked = sorted(
        candidates,
        key=lambda c: (-(c.span[1] - c.span[0]), c.span[0], order_rank[c.order]),
    )
    taken: list[tuple[int, int]] = []
    kept = []
    for cand in ranked:
        s, e = cand.span
        if any(s < te and ts < e for ts, te in taken):
            continue
        taken.append((s, e))
        kept.append(cand)
    kept.sort(key=lambda c: c.span)
    return kept


def extract_candidates(
    query: Query,
    lexicon: GivenNameLexicon,
    particles: ParticleList = ParticleList(),
    common_words: frozenset[str] = frozenset(),
    max_surname_tokens: int = 2,
    order: str = "both",
) -> list[CandidateName]:
    """Extract candidate full names from one query.

    Single-token queries yield nothing.  Both name orders are attempted by
    default (``order="given-first"`` restricts to the forward reading).
    Overlapping candidates are resolved longest-span first, ties broken by
    start position and then by reading order.
    """
    if order not in ("both", GIVEN_FIRST):
        raise ValueError(f"unknown order {order!r}")
    tokens = query.tokens
    if len(tokens) < 2:
        return []
    raw: list[CandidateName] = []
    for i, token in enumerate(tokens):
        if token in lexicon:
            raw.extend(_candidates_at(query, i, lexicon, particles,
                                      common_words, max_surname_tokens, order))
    return _resolve_overlaps(raw)
