"""CSV interchange formats.

All files are UTF-8 comma-separated with a header row.  Record ids may not
contain commas or newlines (enforced at graph construction), so no quoting
is ever needed.  Floats are written with repr, which round-trips exactly
and keeps reruns byte-identical.
"""

from __future__ import annotations

import csv

from .crowd import GoldClustering
from .graph import Clustering, Pair, VoteTally
from .harness import MetricsSnapshot
from .util import canonical_pair

VOTES_HEADER = ["record_a", "record_b", "yes", "total"]
RECORDS_HEADER = ["record_id"]
CLUSTERS_HEADER = ["record_id", "cluster_id"]
GOLD_HEADER = ["record_id", "entity_id"]
CURVE_HEADER = ["questions_asked", "precision", "recall", "f1", "reliability", "blocks"]


def _open_reader(path):
    return open(path, newline="", encoding="utf-8")


def _check_header(row, expected, path, optional_tail=()):
    if row is None or row[:len(expected)] != expected:
        raise ValueError(f"{path}: expected header {','.join(expected)}, got "
                         f"{','.join(row) if row else 'an empty file'}")
    extra = row[len(expected):]
    for col in extra:
        if col not in optional_tail:
            raise ValueError(f"{path}: unexpected column {col!r}")
    return extra


def read_records_csv(path) -> list[str]:
    """record_id per row; returns ids in file order."""
    with _open_reader(path) as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), RECORDS_HEADER, path)
        out = []
        for row in reader:
            if not row:
                continue
            out.append(row[0])
    if not out:
        raise ValueError(f"{path}: no records listed")
    return out


def write_records_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORDS_HEADER)
        for r in records:
            writer.writerow([r])


def read_votes_csv(path) -> list[tuple[Pair, VoteTally]]:
    """Vote rows in file order, pairs canonicalized."""
    out = []
    with _open_reader(path) as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), VOTES_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            a, b, yes, total = row
            try:
                tally = VoteTally(yes=int(yes), total=int(total))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad tally for pair ({a}, {b}): {exc}") from exc
            out.append((canonical_pair(a, b), tally))
    return out


def write_votes_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(VOTES_HEADER)
        for (a, b), tally in rows:
            writer.writerow([a, b, tally.yes, tally.total])


def read_gold_csv(path) -> GoldClustering:
    """record_id,entity_id with an optional difficulty column."""
    entity: dict[str, str] = {}
    difficulty: dict[str, float] = {}
    with _open_reader(path) as fh:
        reader = csv.reader(fh)
        extra = _check_header(next(reader, None), GOLD_HEADER, path,
                              optional_tail=("difficulty",))
        has_difficulty = bool(extra)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            rid, eid = row[0], row[1]
            if rid in entity:
                raise ValueError(f"{path}:{lineno}: record {rid!r} listed twice")
            entity[rid] = eid
            if has_difficulty and len(row) > 2 and row[2] != "":
                difficulty[rid] = float(row[2])
    return GoldClustering(entity, difficulty)


def write_gold_csv(path, gold: GoldClustering) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GOLD_HEADER)
        for rid in sorted(gold.records):
            writer.writerow([rid, gold.entity_of(rid)])


def read_clusters_csv(path) -> Clustering:
    groups: dict[str, list[str]] = {}
    with _open_reader(path) as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), CLUSTERS_HEADER, path)
        for row in reader:
            if not row:
                continue
            groups.setdefault(row[1], []).append(row[0])
    if not groups:
        raise ValueError(f"{path}: no cluster assignments listed")
    return Clustering(groups.values())


def write_clusters_csv(path, clustering: Clustering) -> None:
    """record_id,cluster_id rows sorted by record; a block's id is its
    minimum member."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CLUSTERS_HEADER)
        rows = []
        for block in clustering.blocks:
            for r in block:
                rows.append([r, block[0]])
        rows.sort()
        writer.writerows(rows)


def write_curve_csv(path, curve: list[MetricsSnapshot]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_HEADER)
        for snap in curve:
            writer.writerow([snap.questions_asked, repr(snap.precision),
                             repr(snap.recall), repr(snap.f1),
                             repr(snap.reliability), snap.blocks])


def read_curve_csv(path) -> list[MetricsSnapshot]:
    out = []
    with _open_reader(path) as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), CURVE_HEADER, path)
        for row in reader:
            if not row:
                continue
            out.append(MetricsSnapshot(questions_asked=int(row[0]),
                                       precision=float(row[1]), recall=float(row[2]),
                                       f1=float(row[3]), reliability=float(row[4]),
                                       blocks=int(row[5])))
    return out


def load_graph(records_path, votes_path):
    """Convenience: records.csv plus votes.csv into an UncertainGraph."""
    from .graph import ingest_votes
    records = read_records_csv(records_path)
    return ingest_votes(records, read_votes_csv(votes_path))
