"""Synthetic question generation: cloze questions over text and SQL-grounded questions over tables.

The trained seq2seq generator is replaced by fixed templates; the sampler,
executor, and answer-consistency machinery are the real core. Every emitted
pair is verifiable: table answers re-execute to the same string, cloze answers
occur in their source sentence.
"""

import csv
import random
from dataclasses import dataclass, field

from .corpus import Passage, tokenize
from .errors import QgenBadQuery, QgenBadSpan, QgenExhausted, QgenUnsatisfiable

AGGREGATES = ("count", "min", "max", "sum", "avg")
_TERMINALS = ".!?"


@dataclass(frozen=True)
class AnswerCandidate:
    text: str
    char_start: int
    char_end: int
    kind: str  # proper | number | year


@dataclass(frozen=True)
class Column:
    name: str
    type: str  # text | number


@dataclass
class Table:
    name: str
    columns: list
    rows: list

    def column_index(self, name: str) -> int:
        for i, col in enumerate(self.columns):
            if col.name == name:
                return i
        raise QgenBadQuery(f"table {self.name!r} has no column {name!r}")

    def column_type(self, name: str) -> str:
        return self.columns[self.column_index(name)].type


@dataclass(frozen=True)
class Condition:
    column: str
    op: str  # = > <
    literal: str


@dataclass(frozen=True)
class SqlQuery:
    column: str
    agg: str | None = None  # one of AGGREGATES, or None for a plain select
    where: tuple = ()


@dataclass(frozen=True)
class SqlControls:
    max_where: int = 2
    allow_aggs: frozenset = frozenset(AGGREGATES)
    allow_plain: bool = True


@dataclass(frozen=True)
class QAPair:
    question: str
    answer: str
    source: str  # cloze | table_sql
    provenance: object  # passage_id, or (table name, serialized query)


def _sentence_spans(text):
    spans = []
    start = 0
    for i, ch in enumerate(text):
        if ch in _TERMINALS:
            spans.append((start, i + 1))
            start = i + 1
    if start < len(text):
        spans.append((start, len(text)))
    return spans


def _original_words(text):
    return [(text[t.char_start : t.char_end], t.char_start, t.char_end) for t in tokenize(text)]


def hypothesize_answers(passage: Passage) -> list[AnswerCandidate]:
    """Deterministic answer candidates: capitalized runs, years, and numbers.

    Capitalized runs break at sentence boundaries; a run starting a sentence
    only counts when it spans at least two words. A 4-digit token in
    [1000, 2100] is a year; other all-digit tokens (including d.d decimals)
    are numbers.
    """
    text = passage.text
    words = _original_words(text)
    sentences = _sentence_spans(text)

    def sentence_of(pos):
        for s, e in sentences:
            if s <= pos < e:
                return s, e
        return 0, len(text)

    candidates = []

    # capitalized runs
    run = []
    prev_sentence = None

    def flush():
        if not run:
            return
        starts_sentence = run[0][3]
        if len(run) >= 2 or not starts_sentence:
            cs, ce = run[0][1], run[-1][2]
            candidates.append(AnswerCandidate(text[cs:ce], cs, ce, "proper"))

    prev_end = None
    for word, cs, ce in words:
        sent = sentence_of(cs)
        first_of_sentence = not any(w for w, ws, we in words if sent[0] <= ws < cs)
        capitalized = word[0].isupper()
        if capitalized:
            if run and sent != prev_sentence:
                flush()
                run = []
            run.append((word, cs, ce, first_of_sentence))
            prev_sentence = sent
        else:
            flush()
            run = []
        prev_end = ce
    flush()

    # numeric tokens, merging d.d decimals
    i = 0
    while i < len(words):
        word, cs, ce = words[i]
        if word.isdigit():
            if (
                i + 1 < len(words)
                and words[i + 1][0].isdigit()
                and text[ce : words[i + 1][1]] == "."
            ):
                merged_end = words[i + 1][2]
                candidates.append(AnswerCandidate(text[cs:merged_end], cs, merged_end, "number"))
                i += 2
                continue
            if len(word) == 4 and 1000 <= int(word) <= 2100:
                candidates.append(AnswerCandidate(word, cs, ce, "year"))
            else:
                candidates.append(AnswerCandidate(word, cs, ce, "number"))
        i += 1

    seen = set()
    unique = []
    for cand in sorted(candidates, key=lambda c: (c.char_start, c.char_end)):
        key = (cand.char_start, cand.char_end)
        if key not in seen:
            seen.add(key)
            unique.append(cand)
    return unique


def generate_cloze(passage: Passage, candidate: AnswerCandidate) -> QAPair:
    """Blank the candidate out of its sentence and ask to fill it in."""
    text = passage.text
    if not (0 <= candidate.char_start < candidate.char_end <= len(text)):
        raise QgenBadSpan(f"span [{candidate.char_start}, {candidate.char_end}) outside passage")
    if text[candidate.char_start : candidate.char_end] != candidate.text:
        raise QgenBadSpan("candidate text does not match the passage slice")
    for s, e in _sentence_spans(text):
        if s <= candidate.char_start < e:
            sentence = text[s:e]
            offset = len(sentence) - len(sentence.lstrip())
            s2 = s + offset
            e2 = s + len(sentence.rstrip())
            blanked = text[s2 : candidate.char_start] + "____" + text[candidate.char_end : e2]
            return QAPair(
                question="Fill in the blank: " + blanked,
                answer=candidate.text,
                source="cloze",
                provenance=passage.passage_id,
            )
    raise QgenBadSpan("candidate not inside any sentence")


def _parse_number(cell: str):
    try:
        return float(cell)
    except ValueError:
        return None


def _format_value(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _matches(table: Table, row, cond: Condition) -> bool:
    idx = table.column_index(cond.column)
    cell = row[idx]
    if cell == "":
        return False
    if table.column_type(cond.column) == "number":
        value = _parse_number(cell)
        literal = _parse_number(cond.literal)
        if value is None or literal is None:
            return False
        if cond.op == "=":
            return value == literal
        if cond.op == ">":
            return value > literal
        if cond.op == "<":
            return value < literal
        raise QgenBadQuery(f"unknown operator {cond.op!r}")
    if cond.op != "=":
        raise QgenBadQuery(f"operator {cond.op!r} not allowed on text column {cond.column!r}")
    return cell == cond.literal


def execute_sql(table: Table, query: SqlQuery) -> str:
    """Full-scan execution; empty result renders as the empty string."""
    idx = table.column_index(query.column)
    rows = [row for row in table.rows if all(_matches(table, row, c) for c in query.where)]
    cells = [row[idx] for row in rows if row[idx] != ""]
    if query.agg is None:
        distinct = list(dict.fromkeys(cells))
        return ", ".join(distinct)
    if query.agg == "count":
        return str(len(cells))
    if query.agg not in AGGREGATES:
        raise QgenBadQuery(f"unknown aggregate {query.agg!r}")
    if table.column_type(query.column) != "number":
        raise QgenBadQuery(f"aggregate {query.agg!r} needs a number column")
    values = [v for v in (_parse_number(c) for c in cells) if v is not None]
    if not values:
        return ""
    if query.agg == "min":
        return _format_value(min(values))
    if query.agg == "max":
        return _format_value(max(values))
    if query.agg == "sum":
        return _format_value(sum(values))
    return f"{sum(values) / len(values):.6g}"


def render_question(query: SqlQuery, table: Table) -> str:
    """Fixed-template natural language rendering of a query."""
    phrases = {"=": "is", ">": "greater than", "<": "less than"}
    conds = ""
    if query.where:
        parts = [f"{c.column} {phrases[c.op]} {c.literal}" for c in query.where]
        conds = " when " + " and ".join(parts)
    if query.agg is None:
        return f"What is the {query.column}{conds}?"
    if query.agg == "count":
        return f"How many rows{conds}?"
    names = {"min": "minimum", "max": "maximum", "sum": "total", "avg": "average"}
    return f"What is the {names[query.agg]} {query.column}{conds}?"


def serialize_sql(query: SqlQuery, table: Table) -> str:
    select = query.column if query.agg is None else f"{query.agg.upper()}({query.column})"
    sql = f"SELECT {select} FROM {table.name}"
    if query.where:
        parts = []
        for c in query.where:
            lit = c.literal if table.column_type(c.column) == "number" else f"'{c.literal}'"
            parts.append(f"{c.column} {c.op} {lit}")
        sql += " WHERE " + " AND ".join(parts)
    return sql


def sample_sql(table: Table, n: int, seed: int, controls: SqlControls | None = None) -> list[SqlQuery]:
    """Draw n queries with a seeded PRNG, resampling any that execute to an empty answer."""
    if not table.rows:
        raise ValueError("table has no rows")
    if n < 1:
        raise ValueError("n must be >= 1")
    controls = controls or SqlControls()
    number_cols = [c.name for c in table.columns if c.type == "number"]
    all_cols = [c.name for c in table.columns]

    selects = []
    if controls.allow_plain:
        selects += [(None, col) for col in all_cols]
    if "count" in controls.allow_aggs:
        selects += [("count", col) for col in all_cols]
    for agg in ("min", "max", "sum", "avg"):
        if agg in controls.allow_aggs:
            selects += [(agg, col) for col in number_cols]
    if not selects:
        raise QgenUnsatisfiable("controls admit no select clause for this table")

    column_values = {
        col: sorted({row[i] for row in table.rows if row[i] != ""})
        for i, col in enumerate(all_cols)
    }
    where_cols = [col for col in all_cols if column_values[col]]

    rng = random.Random(seed)
    queries = []
    attempts = 0
    while len(queries) < n:
        attempts += 1
        if attempts > 100 * n:
            raise QgenExhausted(f"gave up after {attempts - 1} attempts for {n} queries")
        agg, col = rng.choice(selects)
        width = rng.randint(0, min(controls.max_where, len(where_cols)))
        conditions = []
        for wcol in rng.sample(where_cols, width):
            ops = ["=", ">", "<"] if wcol in number_cols else ["="]
            op = rng.choice(ops)
            literal = rng.choice(column_values[wcol])
            conditions.append(Condition(wcol, op, literal))
        query = SqlQuery(col, agg, tuple(conditions))
        if execute_sql(table, query) != "":
            queries.append(query)
    return queries


def load_table_csv(path, name: str | None = None) -> Table:
    """Load a CSV with a header row; a column is numeric iff every non-empty cell parses."""
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        rows = [tuple(row) for row in reader]
    if not rows:
        raise ValueError(f"{path} is empty")
    header, data = rows[0], rows[1:]
    columns = []
    for i, col_name in enumerate(header):
        cells = [row[i] for row in data if i < len(row) and row[i] != ""]
        numeric = bool(cells) and all(_parse_number(c) is not None for c in cells)
        columns.append(Column(col_name, "number" if numeric else "text"))
    width = len(header)
    data = [row + ("",) * (width - len(row)) if len(row) < width else row[:width] for row in data]
    if name is None:
        name = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return Table(name, columns, data)


def generate_pairs(source, budget: int, seed: int = 0, controls: SqlControls | None = None) -> list[QAPair]:
    """Generate up to ``budget`` verified question-answer pairs from passages or a table."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if isinstance(source, Table):
        queries = sample_sql(source, budget, seed, controls)
        return [
            QAPair(
                question=render_question(q, source),
                answer=execute_sql(source, q),
                source="table_sql",
                provenance=(source.name, serialize_sql(q, source)),
            )
            for q in queries
        ]
    passages = list(source)
    candidate_lists = [(p, hypothesize_answers(p)) for p in passages]
    pairs = []
    depth = 0
    while len(pairs) < budget:
        emitted = False
        for passage, candidates in candidate_lists:
            if depth < len(candidates):
                pairs.append(generate_cloze(passage, candidates[depth]))
                emitted = True
                if len(pairs) == budget:
                    break
        if not emitted:
            break
        depth += 1
    return pairs
