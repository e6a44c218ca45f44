"""Event-sourced state for the blind-voting annotation workflow.

Every mutation is an event appended to a JSONL log before it is applied;
replaying the log reconstructs the exact state, including session
counters (sessions are derived from event timestamps, with a new session
starting after 8 hours of inactivity). Mutations run under one lock, so
the per-session cap cannot be overrun by concurrent requests.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from ..corpus import CLASSES, LabelVector
from ..errors import (
    AuthorizationError,
    SessionCapError,
    StateError,
    ValidationError,
)

SESSION_CAP = 50
SESSION_TIMEOUT_S = 8 * 3600
SNAPSHOT_EVERY = 100


@dataclass
class StoreConfig:
    annotators: tuple[str, ...]
    adjudicators: tuple[str, ...]
    session_cap: int = SESSION_CAP
    session_timeout_s: float = SESSION_TIMEOUT_S


@dataclass
class Vote:
    labels: tuple[int, int, int, int]
    needs_context: bool


@dataclass
class AnnotationTask:
    task_id: str
    text: str
    source: str = "external"
    model_score: tuple[float, float, float, float] | None = None
    assigned: set[str] = field(default_factory=set)
    votes: dict[str, Vote] = field(default_factory=dict)
    state: str = "open"  # open | agreed | conflict | resolved
    final_labels: tuple[int, int, int, int] | None = None
    resolved_by: str | None = None
    accepted: bool | None = None

    def annotator_view(self, session: "Session") -> dict:
        """Blind payload: text only, no votes, no model score."""
        return {
            "task_id": self.task_id,
            "text": self.text,
            "session": {"count": session.count, "cap": session.cap},
        }


@dataclass
class Session:
    annotator_id: str
    started_at: float
    last_activity: float
    count: int = 0
    cap: int = SESSION_CAP


def _parse_labels(labels) -> tuple[int, int, int, int]:
    if isinstance(labels, dict):
        vec = LabelVector(**{k: int(labels.get(k, 0)) for k in CLASSES})
    else:
        vec = LabelVector(*[int(x) for x in labels])
    return vec.as_tuple()


class AnnotationStore:
    def __init__(
        self,
        config: StoreConfig,
        log_path: str | Path | None = None,
        clock: Callable[[], float] = time.time,
        snapshot_every: int = SNAPSHOT_EVERY,
    ):
        self.config = config
        self.clock = clock
        self.log_path = Path(log_path) if log_path else None
        self.snapshot_every = snapshot_every
        self.tasks: dict[str, AnnotationTask] = {}
        self.sessions: dict[str, Session] = {}
        self._order: list[str] = []
        self._events_since_snapshot = 0
        self._lock = threading.RLock()

    # ---- roles ----------------------------------------------------------

    def _require_annotator(self, annotator_id: str) -> None:
        if annotator_id not in self.config.annotators:
            raise AuthorizationError(f"unknown annotator {annotator_id!r}")

    def _require_adjudicator(self, adjudicator_id: str) -> None:
        if adjudicator_id not in self.config.adjudicators:
            raise AuthorizationError(
                f"{adjudicator_id!r} is not an authorized adjudicator"
            )

    # ---- sessions -------------------------------------------------------

    def _session(self, annotator_id: str, now: float) -> Session:
        s = self.sessions.get(annotator_id)
        if s is None or now - s.last_activity >= self.config.session_timeout_s:
            s = Session(
                annotator_id=annotator_id,
                started_at=now,
                last_activity=now,
                cap=self.config.session_cap,
            )
            self.sessions[annotator_id] = s
        return s

    # ---- event plumbing -------------------------------------------------

    def _record(self, event: dict) -> None:
        """Append to the log, then apply. Log write comes first so a
        replay can never be ahead of the persisted history."""
        event = {"ts": self.clock(), **event}
        if self.log_path:
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        self._apply(event)
        self._events_since_snapshot += 1
        if self.log_path and self._events_since_snapshot >= self.snapshot_every:
            self.write_snapshot(self.log_path.with_suffix(".snapshot.json"))
            self._events_since_snapshot = 0

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "task_added":
            task = AnnotationTask(
                task_id=event["task_id"],
                text=event["text"],
                source=event.get("source", "external"),
                model_score=tuple(event["model_score"]) if event.get("model_score") else None,
            )
            self.tasks[task.task_id] = task
            self._order.append(task.task_id)
        elif kind == "assigned":
            self.tasks[event["task_id"]].assigned.add(event["annotator"])
        elif kind == "voted":
            self._apply_vote(event)
        elif kind == "resolved":
            task = self.tasks[event["task_id"]]
            task.state = "resolved"
            task.resolved_by = event["adjudicator"]
            if event.get("reject"):
                task.accepted = False
            else:
                task.final_labels = tuple(event["labels"])
                task.accepted = True
        else:
            raise ValidationError(f"unknown event type {kind!r}")

    def _apply_vote(self, event: dict) -> None:
        task = self.tasks[event["task_id"]]
        annotator = event["annotator"]
        task.votes[annotator] = Vote(
            labels=tuple(event["labels"]), needs_context=bool(event["needs_context"])
        )
        session = self._session(annotator, event["ts"])
        session.count += 1
        session.last_activity = event["ts"]
        if len(task.votes) == 2:
            votes = list(task.votes.values())
            unanimous = votes[0].labels == votes[1].labels
            flagged = any(v.needs_context for v in votes)
            if unanimous and not flagged:
                task.state = "agreed"
                task.final_labels = votes[0].labels
                task.accepted = True
            else:
                # disagreement, or a needs-context flag: adjudication queue,
                # rejected by default unless an adjudicator overrides
                task.state = "conflict"
                task.accepted = False

    # ---- public API -----------------------------------------------------

    def add_candidates(self, candidates: Iterable) -> int:
        """Queue candidate comments (from the miner or any text source)."""
        n = 0
        with self._lock:
            for cand in candidates:
                task_id = getattr(cand, "id", None) or str(cand.get("id"))
                if task_id in self.tasks:
                    raise ValidationError(f"duplicate task id {task_id!r}")
                text = getattr(cand, "text", None) or cand.get("text")
                score = getattr(cand, "model_score", None) or cand.get("model_score")
                source = getattr(cand, "source", None) or cand.get("source", "external")
                self._record(
                    {
                        "type": "task_added",
                        "task_id": task_id,
                        "text": text,
                        "source": source,
                        "model_score": list(score) if score else None,
                    }
                )
                n += 1
        return n

    def next_task(self, annotator_id: str) -> dict | None:
        """Blind view of the next open task for this annotator, or None
        when the queue holds nothing for them."""
        with self._lock:
            self._require_annotator(annotator_id)
            now = self.clock()
            session = self._session(annotator_id, now)
            if session.count >= session.cap:
                raise SessionCapError(
                    f"session cap of {session.cap} annotations reached; "
                    "start a new session to continue"
                )
            for task_id in self._order:
                task = self.tasks[task_id]
                if task.state != "open":
                    continue
                if annotator_id in task.votes:
                    continue
                if annotator_id not in task.assigned and len(task.assigned) >= 2:
                    continue
                if annotator_id not in task.assigned:
                    self._record(
                        {"type": "assigned", "task_id": task_id, "annotator": annotator_id}
                    )
                return task.annotator_view(session)
            return None

    def submit_vote(
        self, annotator_id: str, task_id: str, labels, needs_context: bool = False
    ) -> str:
        """Record one vote; returns the resulting task state."""
        with self._lock:
            self._require_annotator(annotator_id)
            task = self.tasks.get(task_id)
            if task is None:
                raise ValidationError(f"no task {task_id!r}")
            if task.state != "open":
                raise StateError(f"task {task_id} is {task.state}, not open")
            if annotator_id not in task.assigned:
                raise AuthorizationError(
                    f"annotator {annotator_id!r} is not assigned to task {task_id}"
                )
            if annotator_id in task.votes:
                raise StateError(f"annotator {annotator_id!r} already voted on {task_id}")
            now = self.clock()
            session = self._session(annotator_id, now)
            if session.count >= session.cap:
                raise SessionCapError(
                    f"session cap of {session.cap} annotations reached; "
                    "start a new session to continue"
                )
            vec = _parse_labels(labels)  # validates exclusivity
            self._record(
                {
                    "type": "voted",
                    "task_id": task_id,
                    "annotator": annotator_id,
                    "labels": list(vec),
                    "needs_context": bool(needs_context),
                }
            )
            return task.state

    def conflicts(self, adjudicator_id: str) -> list[dict]:
        """Conflicted tasks with both votes side by side (adjudicator only)."""
        with self._lock:
            self._require_adjudicator(adjudicator_id)
            out = []
            for task_id in self._order:
                task = self.tasks[task_id]
                if task.state != "conflict":
                    continue
                out.append(
                    {
                        "task_id": task.task_id,
                        "text": task.text,
                        "votes": {
                            who: {
                                "labels": list(v.labels),
                                "needs_context": v.needs_context,
                            }
                            for who, v in task.votes.items()
                        },
                    }
                )
            return out

    def resolve_conflict(
        self, adjudicator_id: str, task_id: str, final_labels=None, reject: bool = False
    ) -> str:
        with self._lock:
            self._require_adjudicator(adjudicator_id)
            task = self.tasks.get(task_id)
            if task is None:
                raise ValidationError(f"no task {task_id!r}")
            if task.state != "conflict":
                raise StateError(f"task {task_id} is {task.state}, not conflict")
            event = {
                "type": "resolved",
                "task_id": task_id,
                "adjudicator": adjudicator_id,
            }
            if reject:
                event["reject"] = True
            else:
                if final_labels is None:
                    raise ValidationError("a final label (or reject) is required")
                event["labels"] = list(_parse_labels(final_labels))
            self._record(event)
            return task.state

    def progress(self) -> dict:
        with self._lock:
            states = {"open": 0, "agreed": 0, "conflict": 0, "resolved": 0}
            for task in self.tasks.values():
                states[task.state] += 1
            return {
                **states,
                "total": len(self.tasks),
                "accepted": sum(1 for t in self.tasks.values() if t.accepted),
            }

    def export_accepted(self) -> list[dict]:
        """Accepted annotations as corpus-schema records (provenance=manual)."""
        with self._lock:
            records = []
            for task_id in sorted(self.tasks):
                task = self.tasks[task_id]
                if not task.accepted or task.final_labels is None:
                    continue
                r, e, n, nc = task.final_labels
                records.append(
                    {
                        "id": task.task_id,
                        "text": task.text,
                        "religio": r,
                        "ethno": e,
                        "nondenominational": n,
                        "noncommunal": nc,
                        "sublabel": "",
                        "provenance": "manual",
                        "needs_context": 0,
                    }
                )
            return records

    # ---- persistence ----------------------------------------------------

    def write_snapshot(self, path) -> None:
        state = {
            "tasks": [
                {
                    "task_id": t.task_id,
                    "text": t.text,
                    "source": t.source,
                    "model_score": t.model_score,
                    "assigned": sorted(t.assigned),
                    "votes": {
                        who: {"labels": list(v.labels), "needs_context": v.needs_context}
                        for who, v in t.votes.items()
                    },
                    "state": t.state,
                    "final_labels": t.final_labels,
                    "resolved_by": t.resolved_by,
                    "accepted": t.accepted,
                }
                for t in (self.tasks[i] for i in self._order)
            ],
        }
        Path(path).write_text(
            json.dumps(state, ensure_ascii=False, indent=2), encoding="utf-8"
        )

    @classmethod
    def replay(
        cls,
        log_path,
        config: StoreConfig,
        clock: Callable[[], float] = time.time,
    ) -> "AnnotationStore":
        """Rebuild state by applying every event in the log, using the
        recorded timestamps for session reconstruction."""
        store = cls(config, log_path=None, clock=clock)
        log_path = Path(log_path)
        if log_path.exists():
            with log_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        store._apply(json.loads(line))
        store.log_path = log_path
        return store

    def state_digest(self) -> dict:
        """Comparable snapshot of everything except wall-clock metadata."""
        return {
            "tasks": {
                t.task_id: {
                    "state": t.state,
                    "assigned": sorted(t.assigned),
                    "votes": {
                        who: [list(v.labels), v.needs_context]
                        for who, v in sorted(t.votes.items())
                    },
                    "final_labels": t.final_labels,
                    "accepted": t.accepted,
                    "resolved_by": t.resolved_by,
                }
                for t in self.tasks.values()
            },
            "sessions": {
                who: [s.count, s.started_at, s.last_activity]
                for who, s in self.sessions.items()
            },
            "order": list(self._order),
        }
