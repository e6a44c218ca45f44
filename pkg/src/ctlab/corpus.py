"""Corpus loading, validation, inspection, and splitting.

Owns the four-flag label schema. ``Noncommunal`` is exclusive: a sample
flagged noncommunal may carry no other violence flag. The all-zeros vector
is legal and denotes the non-violent case.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigurationError, EmptyInputError, ParseError, ValidationError

CLASSES = ("religio", "ethno", "nondenominational", "noncommunal")
DECISIONS = ("Religio", "Ethno", "Nondenominational", "Noncommunal", "NonViolent")
PROVENANCES = ("original", "paraphrase", "manual", "mined")

CSV_FIELDS = (
    "id",
    "text",
    "religio",
    "ethno",
    "nondenominational",
    "noncommunal",
    "sublabel",
    "provenance",
    "needs_context",
)

TEST_RATIO = 0.20
VAL_RATIO_OF_REMAINDER = 0.15


@dataclass(frozen=True)
class LabelVector:
    """Four binary violence-class flags."""

    religio: int = 0
    ethno: int = 0
    nondenominational: int = 0
    noncommunal: int = 0

    def __post_init__(self):
        for name in CLASSES:
            v = getattr(self, name)
            if v not in (0, 1):
                raise ValidationError(f"label flag {name!r} must be 0 or 1, got {v!r}")
        if self.noncommunal == 1 and (self.religio or self.ethno or self.nondenominational):
            raise ValidationError(
                "noncommunal=1 excludes all other class flags "
                f"(got {self.as_tuple()})"
            )

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.religio, self.ethno, self.nondenominational, self.noncommunal)

    @property
    def is_nonviolent(self) -> bool:
        return self.as_tuple() == (0, 0, 0, 0)

    def decision(self) -> str:
        """Reduce to a single decision label.

        Multi-label violent rows reduce by fixed priority
        religio > ethno > nondenominational; noncommunal is exclusive by
        invariant; all-zeros is NonViolent.
        """
        if self.is_nonviolent:
            return "NonViolent"
        for name, decision in zip(CLASSES, DECISIONS):
            if getattr(self, name) == 1:
                return decision
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class Sample:
    id: str
    text: str
    labels: LabelVector
    provenance: str = "original"
    needs_context: bool = False
    sublabel: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValidationError("sample id must be non-empty")
        if not self.text:
            raise ValidationError(f"sample {self.id!r}: text must be non-empty")
        if self.provenance not in PROVENANCES:
            raise ValidationError(
                f"sample {self.id!r}: unknown provenance {self.provenance!r}"
            )


class Corpus:
    """Immutable ordered collection of samples with unique ids."""

    def __init__(self, samples: Iterable[Sample]):
        self._samples = tuple(samples)
        self._by_id: dict[str, Sample] = {}
        for s in self._samples:
            if s.id in self._by_id:
                raise ValidationError(f"duplicate sample id {s.id!r}")
            self._by_id[s.id] = s

    @property
    def samples(self) -> tuple[Sample, ...]:
        return self._samples

    @property
    def size(self) -> int:
        return len(self._samples)

    def __len__(self) -> int:
        return len(self._samples)

    def __iter__(self):
        return iter(self._samples)

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self._by_id

    def get(self, sample_id: str) -> Sample:
        try:
            return self._by_id[sample_id]
        except KeyError:
            raise KeyError(f"no sample with id {sample_id!r}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self._samples)

    @property
    def counts(self) -> dict[str, int]:
        """Per-class positive counts, recomputed from samples."""
        c = {name: 0 for name in CLASSES}
        for s in self._samples:
            for name in CLASSES:
                c[name] += getattr(s.labels, name)
        return c


@dataclass(frozen=True)
class SplitSpec:
    train: frozenset[str]
    val: frozenset[str]
    test: frozenset[str]
    seed: int

    def __post_init__(self):
        if self.train & self.val or self.train & self.test or self.val & self.test:
            raise ValidationError("split sets must be pairwise disjoint")

    @property
    def all_ids(self) -> frozenset[str]:
        return self.train | self.val | self.test

    def subset(self, corpus: Corpus, part: str) -> Corpus:
        ids = {"train": self.train, "val": self.val, "test": self.test}[part]
        return Corpus(s for s in corpus if s.id in ids)


def _parse_flag(value, name: str) -> int:
    s = str(value).strip()
    if s in ("0", "1"):
        return int(s)
    raise ParseError(f"field {name!r} must be 0 or 1, got {value!r}")


def _parse_bool(value) -> bool:
    return str(value).strip().lower() in ("1", "true", "yes")


def _row_to_sample(row: dict, row_no: int) -> Sample:
    missing = [f for f in CSV_FIELDS[:6] if row.get(f) in (None, "")]
    if "text" in missing or "id" in missing:
        raise ParseError(f"row {row_no}: missing required field(s) {missing}")
    try:
        labels = LabelVector(
            *(_parse_flag(row.get(name, 0) or 0, name) for name in CLASSES)
        )
    except ValidationError as e:
        raise type(e)(f"row {row_no} (id={row.get('id')!r}): {e}") from e
    return Sample(
        id=str(row["id"]),
        text=str(row["text"]),
        labels=labels,
        provenance=str(row.get("provenance") or "original"),
        needs_context=_parse_bool(row.get("needs_context", False)),
        sublabel=str(row.get("sublabel") or ""),
    )


def load_corpus(path, format: str | None = None) -> Corpus:
    """Load a corpus from CSV or JSONL; format inferred from suffix if omitted."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"corpus file not found: {path}")
    if format is None:
        format = "jsonl" if path.suffix in (".jsonl", ".ndjson", ".json") else "csv"
    if format == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "id" not in reader.fieldnames:
                raise ParseError(f"{path}: missing or invalid CSV header")
            unknown = set(reader.fieldnames) - set(CSV_FIELDS)
            if unknown:
                raise ParseError(f"{path}: unknown CSV columns {sorted(unknown)}")
            samples = [_row_to_sample(row, i) for i, row in enumerate(reader, start=2)]
    elif format == "jsonl":
        samples = []
        with path.open(encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as e:
                    raise ParseError(f"row {i}: invalid JSON ({e})") from e
                samples.append(_row_to_sample(obj, i))
    else:
        raise ValidationError(f"unknown corpus format {format!r}")
    return Corpus(samples)


def _sample_record(s: Sample) -> dict:
    return {
        "id": s.id,
        "text": s.text,
        "religio": s.labels.religio,
        "ethno": s.labels.ethno,
        "nondenominational": s.labels.nondenominational,
        "noncommunal": s.labels.noncommunal,
        "sublabel": s.sublabel,
        "provenance": s.provenance,
        "needs_context": int(s.needs_context),
    }


def save_corpus(corpus: Corpus, path, format: str | None = None) -> None:
    """Write canonically: sorted by id, fields in header order.

    Reloading a file written here and writing it again is byte-identical.
    """
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix in (".jsonl", ".ndjson", ".json") else "csv"
    ordered = sorted(corpus, key=lambda s: s.id)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for s in ordered:
            writer.writerow(_sample_record(s))
        path.write_text(buf.getvalue(), encoding="utf-8")
    elif format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for s in ordered:
                fh.write(json.dumps(_sample_record(s), ensure_ascii=False) + "\n")
    else:
        raise ValidationError(f"unknown corpus format {format!r}")


def class_distribution(corpus: Corpus, violent_only: bool = False) -> dict[str, float]:
    """Fraction of samples per decision label over the selected subset.

    With ``violent_only`` the map covers the four violence classes over
    samples carrying at least one flag; otherwise NonViolent is a fifth key.
    """
    if corpus.size == 0:
        raise EmptyInputError("class_distribution over an empty corpus")
    decisions = [s.labels.decision() for s in corpus]
    if violent_only:
        decisions = [d for d in decisions if d != "NonViolent"]
        if not decisions:
            raise EmptyInputError("no violent samples in corpus")
        keys = DECISIONS[:4]
    else:
        keys = DECISIONS
    n = len(decisions)
    return {k: decisions.count(k) / n for k in keys}


def split(corpus: Corpus, seed: int) -> SplitSpec:
    """Deterministic stratified train/val/test split.

    Holds out 20% for test, then takes 15% of the remainder for
    validation. Strata are decision labels; per-stratum sizes land within
    one sample of the ratio targets.
    """
    if corpus.size < 10:
        raise ValidationError(f"corpus too small to split: {corpus.size} < 10")
    strata: dict[str, list[str]] = {}
    for s in corpus:
        strata.setdefault(s.labels.decision(), []).append(s.id)

    train: set[str] = set()
    val: set[str] = set()
    test: set[str] = set()
    for decision in sorted(strata):
        ids = sorted(strata[decision])
        rng = random.Random(f"{seed}:{decision}")
        rng.shuffle(ids)
        n = len(ids)
        n_test = round(n * TEST_RATIO)
        n_val = round((n - n_test) * VAL_RATIO_OF_REMAINDER)
        test.update(ids[:n_test])
        val.update(ids[n_test : n_test + n_val])
        train.update(ids[n_test + n_val :])
    if not train or not val or not test:
        raise ValidationError(
            "corpus too small to populate all three splits "
            f"(train={len(train)}, val={len(val)}, test={len(test)})"
        )
    return SplitSpec(
        train=frozenset(train), val=frozenset(val), test=frozenset(test), seed=seed
    )
