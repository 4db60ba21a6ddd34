"""Event-sourced store behind the human review loop.

Every mutation is an event appended to ``events.jsonl`` (flushed
immediately, so a killed process loses nothing) and then applied to the
in-memory state by the same code replay uses. At all times the current
annotation of an abstract equals the fold of its events over the
original auto annotation. A periodically compacted ``snapshot.json``
speeds up loading; the event log itself is never truncated.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError, VersionConflict
from .records import (
    AnnotatedAbstract,
    Annotation,
    Span,
    parse_doccano_record,
    serialize_doccano,
    validate,
)

Triple = tuple[int, int, str]


def _triple(span: Span) -> Triple:
    return (span.start, span.end, span.label)


# -- span diffing and replay --

def diff_spans(old: list[Span], new: list[Span]) -> list[dict]:
    """Edit list describing old -> new, one entry per touched span.

    Actions: relabel (same extent, new label), split (one old covered by
    several new), merge (several old into one new), resize (one-to-one
    with a changed extent), add, delete, confirm (old == new).
    """
    old_t = [_triple(s) for s in old]
    new_t = [_triple(s) for s in new]
    removed = [t for t in old_t if t not in set(new_t)]
    added = [t for t in new_t if t not in set(old_t)]
    edits: list[dict] = []
    used_a: set[Triple] = set()
    used_o: set[Triple] = set()

    def overlaps(a: Triple, b: Triple) -> bool:
        return a[0] < b[1] and b[0] < a[1]

    for o in removed:  # relabel: same extent, different label
        for a in added:
            if a not in used_a and o[0] == a[0] and o[1] == a[1]:
                edits.append({"action": "relabel", "old": list(o), "new": list(a)})
                used_o.add(o)
                used_a.add(a)
                break

    for o in removed:  # split: several new spans inside one old
        if o in used_o:
            continue
        hits = [a for a in added if a not in used_a and overlaps(o, a)]
        if len(hits) >= 2:
            for a in hits:
                edits.append({"action": "split", "old": list(o), "new": list(a)})
                used_a.add(a)
            used_o.add(o)

    for a in added:  # merge: one new span covering several old
        if a in used_a:
            continue
        hits = [o for o in removed if o not in used_o and overlaps(o, a)]
        if len(hits) >= 2:
            for o in hits:
                edits.append({"action": "merge", "old": list(o), "new": list(a)})
                used_o.add(o)
            used_a.add(a)

    for o in removed:  # resize: one-to-one overlap with changed extent
        if o in used_o:
            continue
        hits = [a for a in added if a not in used_a and overlaps(o, a)]
        if len(hits) == 1:
            edits.append({"action": "resize", "old": list(o), "new": list(hits[0])})
            used_o.add(o)
            used_a.add(hits[0])

    for o in removed:
        if o not in used_o:
            edits.append({"action": "delete", "old": list(o), "new": None})
    for a in added:
        if a not in used_a:
            edits.append({"action": "add", "old": None, "new": list(a)})
    return edits


def apply_edits(spans: list[Span], edits: list[dict]) -> list[Span]:
    """Replay an edit list: remove each distinct old triple once, insert
    each distinct new triple once, keep everything sorted."""
    result = [_triple(s) for s in spans]
    removals: list[Triple] = []
    additions: list[Triple] = []
    for e in edits:
        if e.get("old") is not None:
            t = tuple(e["old"])
            if t not in removals:
                removals.append(t)
        if e.get("new") is not None:
            t = tuple(e["new"])
            if t not in additions:
                additions.append(t)
    for t in removals:
        if t in additions and t in result:
            continue  # confirm: old == new, span stays in place
        try:
            result.remove(t)
        except ValueError:
            raise ValidationError(f"edit refers to a missing span {list(t)}") from None
    for t in additions:
        if t not in result:
            result.append(t)
    return sorted(Span(*t) for t in result)


# -- store --

@dataclass
class ReviewTask:
    abstract_id: object
    record: AnnotatedAbstract
    status: str          # pending | in_review | done
    version: int
    reviewer: str | None = None


@dataclass
class _TaskState:
    status: str
    created_seq: int
    reviewer: str | None = None
    version: int = 1


class ReviewStore:
    """Append-only event log + in-memory state, safe for concurrent
    reviewers (all writes serialized under one lock)."""

    SNAPSHOT_EVERY = 200  # events between automatic snapshot compactions

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.events_path = self.data_dir / "events.jsonl"
        self.snapshot_path = self.data_dir / "snapshot.json"
        self._lock = threading.RLock()
        self._records: dict[str, AnnotatedAbstract] = {}
        self._tasks: dict[str, _TaskState] = {}
        self._seq = 0
        self._load()
        self._log = open(self.events_path, "a", encoding="utf-8")

    # -- persistence --

    def _load(self) -> None:
        start_seq = 0
        if self.snapshot_path.exists():
            snap = json.loads(self.snapshot_path.read_text(encoding="utf-8"))
            start_seq = snap["seq"]
            self._seq = start_seq
            for key, entry in snap["records"].items():
                self._records[key] = parse_doccano_record(entry["record"])
                ts = entry["task"]
                self._tasks[key] = _TaskState(status=ts["status"],
                                              created_seq=ts["created_seq"],
                                              reviewer=ts.get("reviewer"),
                                              version=ts["version"])
        if self.events_path.exists():
            with open(self.events_path, encoding="utf-8") as f:
                for line in f:
                    if not line.strip():
                        continue
                    ev = json.loads(line)
                    if ev["seq"] > start_seq:
                        self._apply(ev)
                        self._seq = ev["seq"]

    def compact(self) -> None:
        """Write a snapshot of current records; the event log is kept."""
        with self._lock:
            snap = {"seq": self._seq, "records": {}}
            for key, rec in self._records.items():
                ts = self._tasks[key]
                snap["records"][key] = {
                    "record": serialize_doccano(rec, extended=True),
                    "task": {"status": ts.status, "created_seq": ts.created_seq,
                             "reviewer": ts.reviewer, "version": ts.version},
                }
            tmp = self.snapshot_path.with_suffix(".tmp")
            tmp.write_text(json.dumps(snap) + "\n", encoding="utf-8")
            tmp.replace(self.snapshot_path)

    def close(self) -> None:
        with self._lock:
            self.compact()
            self._log.close()

    def _emit(self, ev: dict) -> dict:
        self._seq += 1
        ev = {"seq": self._seq, "ts": time.time(), **ev}
        self._log.write(json.dumps(ev, ensure_ascii=False) + "\n")
        self._log.flush()
        self._apply(ev)
        if self._seq % self.SNAPSHOT_EVERY == 0:
            self.compact()
        return ev

    # -- event application (used identically live and at replay) --

    def _apply(self, ev: dict) -> None:
        etype = ev["type"]
        if etype == "enqueued":
            rec = parse_doccano_record(ev["record"])
            key = str(rec.abstract.id)
            self._records[key] = rec
            self._tasks[key] = _TaskState(status="pending", created_seq=ev["seq"])
        elif etype == "assigned":
            task = self._tasks[ev["abstract_id"]]
            task.status = "in_review"
            task.reviewer = ev.get("reviewer")
        elif etype == "correction":
            key = ev["abstract_id"]
            rec = self._records[key]
            old_spans = list(rec.annotation.spans)
            new_spans = apply_edits(old_spans, ev["edits"])
            old_prov = {_triple(s): p for s, p in
                        zip(old_spans, rec.annotation.provenance)}
            provenance = tuple(old_prov.get(_triple(s), "corrected") for s in new_spans)
            annotation = Annotation(spans=tuple(new_spans), provenance=provenance,
                                    model_version=rec.annotation.model_version)
            # still under review: reviewed happens only at finalize
            status = "unlabeled" if not annotation.spans else "auto"
            self._records[key] = AnnotatedAbstract(
                abstract=rec.abstract, annotation=annotation, status=status)
            self._tasks[key].version = ev["version"]
        elif etype == "finalized":
            key = ev["abstract_id"]
            rec = self._records[key]
            provenance = tuple("corrected" if p == "auto" else p
                               for p in rec.annotation.provenance)
            annotation = Annotation(spans=rec.annotation.spans, provenance=provenance,
                                    model_version=rec.annotation.model_version)
            status = "reviewed" if annotation.spans else "unlabeled"
            self._records[key] = AnnotatedAbstract(
                abstract=rec.abstract, annotation=annotation, status=status)
            task = self._tasks[key]
            task.status = "done"
            task.version = ev["version"]
        elif etype == "retrain":
            pass  # lineage bookkeeping only
        else:
            raise ValidationError(f"unknown event type {etype!r}")

    # -- lookups --

    def resolve_key(self, abstract_id) -> str:
        key = str(abstract_id)
        if key not in self._records:
            raise KeyError(f"unknown abstract id {abstract_id!r}")
        return key

    def get_task(self, abstract_id) -> ReviewTask:
        with self._lock:
            key = self.resolve_key(abstract_id)
            ts = self._tasks[key]
            return ReviewTask(abstract_id=self._records[key].abstract.id,
                              record=self._records[key], status=ts.status,
                              version=ts.version, reviewer=ts.reviewer)

    def known_ids(self) -> set[str]:
        with self._lock:
            return set(self._records)

    def all_records(self) -> list[AnnotatedAbstract]:
        with self._lock:
            return list(self._records.values())

    def reviewed_records(self) -> list[AnnotatedAbstract]:
        with self._lock:
            return [r for r in self._records.values() if r.status == "reviewed"]

    def queue_counts(self) -> dict[str, int]:
        with self._lock:
            counts = {"pending": 0, "in_review": 0, "done": 0}
            for ts in self._tasks.values():
                counts[ts.status] += 1
            return counts

    # -- mutations --

    def add_auto_annotated(self, record: AnnotatedAbstract) -> bool:
        """Store one auto-annotated abstract as a pending task; returns
        False (no-op) when the id is already queued."""
        problems = validate(record)
        if problems:
            raise ValidationError("; ".join(problems))
        with self._lock:
            if str(record.abstract.id) in self._records:
                return False
            self._emit({"type": "enqueued", "abstract_id": str(record.abstract.id),
                        "record": serialize_doccano(record, extended=True)})
            return True

    def next_task(self, reviewer: str | None = None) -> ReviewTask | None:
        with self._lock:
            pending = [(ts.created_seq, key) for key, ts in self._tasks.items()
                       if ts.status == "pending"]
            if not pending:
                return None
            _, key = min(pending)
            self._emit({"type": "assigned", "abstract_id": key, "reviewer": reviewer})
            return self.get_task(key)

    def submit_correction(self, abstract_id, expected_version: int,
                          spans: list[Span], reviewer: str | None = None) -> int:
        with self._lock:
            key = self.resolve_key(abstract_id)
            task = self._tasks[key]
            if task.status != "in_review":
                raise ValidationError(
                    f"abstract {abstract_id!r} is {task.status}, not in_review")
            if task.version != expected_version:
                raise VersionConflict(
                    f"expected version {expected_version}, store has {task.version}")
            rec = self._records[key]
            new_spans = sorted(spans)
            candidate = AnnotatedAbstract(
                abstract=rec.abstract,
                annotation=Annotation(spans=tuple(new_spans),
                                      provenance=tuple("corrected" for _ in new_spans),
                                      model_version=rec.annotation.model_version),
                status="auto")
            problems = [p for p in validate(candidate)
                        if "status" not in p]  # status is recomputed on apply
            if problems:
                raise ValidationError("; ".join(problems))
            edits = diff_spans(list(rec.annotation.spans), new_spans)
            replayed = apply_edits(list(rec.annotation.spans), edits)
            if [_triple(s) for s in replayed] != [_triple(s) for s in new_spans]:
                raise ValidationError("internal error: edit diff does not replay")
            self._emit({"type": "correction", "abstract_id": key,
                        "reviewer": reviewer, "version": task.version + 1,
                        "edits": edits})
            return self._tasks[key].version

    def finalize(self, abstract_id) -> AnnotatedAbstract:
        with self._lock:
            key = self.resolve_key(abstract_id)
            task = self._tasks[key]
            if task.status == "done":
                return self._records[key]
            rec = self._records[key]
            confirms = [{"action": "confirm", "old": list(_triple(s)), "new": list(_triple(s))}
                        for s, p in zip(rec.annotation.spans, rec.annotation.provenance)
                        if p == "auto"]
            self._emit({"type": "finalized", "abstract_id": key,
                        "version": task.version + 1, "edits": confirms})
            return self._records[key]

    def record_retrain(self, info: dict) -> None:
        with self._lock:
            self._emit({"type": "retrain", **info})

    # -- reporting --

    def correction_events(self, since_ts: float | None = None) -> list[dict]:
        out = []
        if not self.events_path.exists():
            return out
        with open(self.events_path, encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                ev = json.loads(line)
                if ev["type"] not in ("correction", "finalized"):
                    continue
                if since_ts is not None and ev["ts"] < since_ts:
                    continue
                out.append(ev)
        return out

    def confusion_report(self, since_ts: float | None = None) -> list[tuple[str, str, int]]:
        """(old auto label -> corrected label) counts, descending; built to
        surface systematic confusions like MTD being corrected to PUR."""
        counts: dict[tuple[str, str], int] = {}
        for ev in self.correction_events(since_ts):
            for edit in ev.get("edits", []):
                old, new = edit.get("old"), edit.get("new")
                if old and new and old[2] != new[2]:
                    pair = (old[2], new[2])
                    counts[pair] = counts.get(pair, 0) + 1
        return sorted(((o, n, c) for (o, n), c in counts.items()),
                      key=lambda t: (-t[2], t[0], t[1]))

    def replay_check(self) -> bool:
        """Rebuild state from the raw event log (ignoring the snapshot) and
        compare with the live state; True when they agree bitwise."""
        with self._lock:
            self._log.flush()
            fresh = ReviewStore.__new__(ReviewStore)
            fresh._records, fresh._tasks, fresh._seq = {}, {}, 0
            fresh._lock = threading.RLock()
            with open(self.events_path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        ev = json.loads(line)
                        fresh._apply(ev)
                        fresh._seq = ev["seq"]
            same = (set(fresh._records) == set(self._records)
                    and all(serialize_doccano(fresh._records[k], extended=True)
                            == serialize_doccano(self._records[k], extended=True)
                            for k in self._records)
                    and fresh._tasks == self._tasks)
            return same
