"""HTTP service hosting the interactive context-labeling workflow.

Serves trials and pre-extracted frames, persists per-annotator label
sessions in append-only journals, and exports context transcripts. All
endpoints live under /api/v1; a built annotator UI is mounted at / when
present.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .context import SLOT_NAMES, CodeOutOfVocabulary, parse_state, task_spec
from .errors import MalformedName, MalformedState
from .ingest import TrialId, parse_trial_id

FRAME_SUFFIXES = (".png", ".jpg", ".jpeg")
SESSION_SEP = "__"


def _api_error(status: int, code: str, message: str, **extra) -> HTTPException:
    return HTTPException(status, detail={"error": code, "message": message, **extra})


@dataclass
class Trial:
    trial_id: TrialId
    frames: list

    @property
    def name(self) -> str:
        return self.trial_id.render()

    @property
    def frame_count(self) -> int:
        return len(self.frames)


class TrialStore:
    """Trials discovered from `<root>/<Task>/frames/<TrialId>/` image dirs."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._trials: dict[str, Trial] = {}
        self._scan()

    def _scan(self) -> None:
        for frames_dir in sorted(self.root.glob("*/frames/*")):
            if not frames_dir.is_dir():
                continue
            try:
                trial_id = parse_trial_id(frames_dir.name)
            except MalformedName:
                continue
            frames = sorted(
                p for p in frames_dir.iterdir() if p.suffix.lower() in FRAME_SUFFIXES
            )
            self._trials[trial_id.render()] = Trial(trial_id, frames)

    def get(self, name: str) -> Trial:
        trial = self._trials.get(name)
        if trial is None:
            raise _api_error(404, "UnknownTrial", f"no trial named {name}")
        return trial

    def list(self) -> list:
        return [self._trials[name] for name in sorted(self._trials)]


@dataclass
class Session:
    session_id: str
    trial: Trial
    annotator: str
    journal: Path
    labels: dict = field(default_factory=dict)  # frame -> state string
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def replay(self) -> None:
        if not self.journal.exists():
            return
        for line in self.journal.read_text().splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            self._apply(record)
            self.version = record["version"]

    def _apply(self, record: dict) -> None:
        if record["op"] == "label":
            self.labels[record["frame"]] = record["state"]
        elif record["op"] == "carry":
            state = self.labels[record["from_frame"]]
            for frame in range(record["from_frame"], record["to_frame"] + 1):
                self.labels[frame] = state
        else:
            raise ValueError(f"unknown journal op {record['op']!r}")

    def commit(self, record: dict) -> int:
        """Apply and journal one accepted write; returns the new version."""
        record["version"] = self.version + 1
        with open(self.journal, "a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
        self._apply(record)
        self.version = record["version"]
        return self.version

    def snapshot(self) -> tuple[int, dict]:
        return self.version, dict(self.labels)


class SessionStore:
    def __init__(self, root: Path, trials: TrialStore):
        self.dir = Path(root) / "sessions"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.trials = trials
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is not None:
                return session
            if SESSION_SEP not in session_id:
                raise _api_error(
                    404,
                    "UnknownTrial",
                    f"session id must be <trial>{SESSION_SEP}<annotator>",
                )
            trial_name, annotator = session_id.rsplit(SESSION_SEP, 1)
            trial = self.trials.get(trial_name)
            session = Session(
                session_id=session_id,
                trial=trial,
                annotator=annotator,
                journal=self.dir / f"{session_id}.jsonl",
            )
            session.replay()
            self._sessions[session_id] = session
            return session


class LabelWrite(BaseModel):
    frame: int
    state: str
    base_version: int


class CarryRequest(BaseModel):
    from_frame: int
    to_frame: int


def create_app(data_root: Path, frontend_dist: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="compass labeling service")
    trials = TrialStore(Path(data_root))
    sessions = SessionStore(Path(data_root), trials)

    def check_frame(trial: Trial, frame: int) -> None:
        if not 0 <= frame < trial.frame_count:
            raise _api_error(
                404,
                "FrameOutOfRange",
                f"frame {frame} outside [0, {trial.frame_count})",
            )

    @app.get("/api/v1/trials")
    def list_trials():
        out = []
        for trial in trials.list():
            spec = task_spec(trial.trial_id.task)
            out.append(
                {
                    "id": trial.name,
                    "task": trial.trial_id.task.value,
                    "frame_count": trial.frame_count,
                    "vocabulary": [
                        {"code": 0, "name": "nothing"},
                        *(
                            {"code": obj.code, "name": obj.name}
                            for obj in spec.vocabulary
                        ),
                    ],
                    "progress": [
                        {"code": code, "name": name}
                        for code, name in sorted(spec.progress_domain.items())
                    ],
                    "variables": list(SLOT_NAMES),
                }
            )
        return out

    @app.get("/api/v1/trials/{trial_name}/frames/{frame}")
    def get_frame(trial_name: str, frame: int):
        trial = trials.get(trial_name)
        check_frame(trial, frame)
        return FileResponse(trial.frames[frame])

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        session = sessions.get(session_id)
        with session.lock:
            version, labels = session.snapshot()
        return {
            "id": session.session_id,
            "trial": session.trial.name,
            "annotator": session.annotator,
            "frame_count": session.trial.frame_count,
            "version": version,
            "labels": {str(frame): labels[frame] for frame in sorted(labels)},
        }

    @app.put("/api/v1/sessions/{session_id}/labels")
    def put_label(session_id: str, write: LabelWrite):
        session = sessions.get(session_id)
        check_frame(session.trial, write.frame)
        try:
            parse_state(write.state, session.trial.trial_id.task)
        except CodeOutOfVocabulary as exc:
            raise _api_error(
                400, "InvalidState", str(exc), variable=exc.slot
            ) from exc
        except MalformedState as exc:
            raise _api_error(400, "InvalidState", str(exc), variable=None) from exc
        with session.lock:
            if write.base_version != session.version:
                raise _api_error(
                    409,
                    "VersionConflict",
                    f"base_version {write.base_version} is stale",
                    version=session.version,
                )
            version = session.commit(
                {"op": "label", "frame": write.frame, "state": write.state}
            )
        return {"version": version}

    @app.post("/api/v1/sessions/{session_id}/carry")
    def carry(session_id: str, req: CarryRequest):
        session = sessions.get(session_id)
        check_frame(session.trial, req.from_frame)
        check_frame(session.trial, req.to_frame)
        if req.to_frame < req.from_frame:
            raise _api_error(
                400, "FrameOutOfRange", "to_frame must not precede from_frame"
            )
        with session.lock:
            if req.from_frame not in session.labels:
                raise _api_error(
                    400,
                    "FrameNotLabeled",
                    f"frame {req.from_frame} has no label to carry",
                )
            version = session.commit(
                {
                    "op": "carry",
                    "from_frame": req.from_frame,
                    "to_frame": req.to_frame,
                }
            )
        return {"version": version}

    @app.get("/api/v1/sessions/{session_id}/export")
    def export(session_id: str):
        session = sessions.get(session_id)
        with session.lock:
            _, labels = session.snapshot()
        lines = [f"{frame} {labels[frame]}" for frame in sorted(labels)]
        text = "\n".join(lines) + "\n" if lines else ""
        return PlainTextResponse(text)

    if frontend_dist is not None and Path(frontend_dist).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dist), html=True))

    return app
