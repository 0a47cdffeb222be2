"""Durable, resumable persistence for crawl runs.

Each run owns one directory::

    <run_dir>/
        manifest.json              run metadata, config snapshot, stage flags
        raw/<aa>/<sha256>          content-addressed response bodies
        fetches.jsonl              one row per fetch attempt
        pages.jsonl                cleaned pages
        assignments_<taxonomy>.jsonl
        affect.jsonl
        reports/                   rendered tables

All JSONL files are UTF-8, one record per line, append-only. A partial
trailing line (torn write from an interrupted run) is dropped with a
warning on read and truncated before the next append, so resumed runs
produce the same bytes as uninterrupted ones.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
STAGE_ORDER = ("crawl", "extract", "classify", "affect", "report")


class StoreError(Exception):
    """Unrecoverable storage problem (corruption, schema mismatch)."""


def new_run_id() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
    return f"run-{stamp}-{os.urandom(3).hex()}"


@dataclass
class RunManifest:
    run_id: str
    schema_version: int = SCHEMA_VERSION
    config: dict = field(default_factory=dict)
    taxonomy_versions: dict = field(default_factory=dict)
    backend_ids: dict = field(default_factory=dict)
    stages: dict = field(default_factory=dict)
    created_at: str = ""
    updated_at: str = ""

    def stage_complete(self, stage: str) -> bool:
        return bool(self.stages.get(stage))


class RunStore:
    """Filesystem-backed store for one run directory.

    Appends are serialized through a single lock so concurrent producers
    (e.g. per-domain crawl workers) interleave at record granularity.
    """

    def __init__(self, run_dir: str | Path, run_id: str | None = None):
        self.run_dir = Path(run_dir)
        self.raw_dir = self.run_dir / "raw"
        self.reports_dir = self.run_dir / "reports"
        self._lock = threading.Lock()
        self._manifest_path = self.run_dir / "manifest.json"

        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.raw_dir.mkdir(exist_ok=True)
        self.reports_dir.mkdir(exist_ok=True)

        if self._manifest_path.exists():
            self.manifest = self._load_manifest()
            if run_id is not None and run_id != self.manifest.run_id:
                raise StoreError(
                    f"run dir {self.run_dir} belongs to {self.manifest.run_id!r}, "
                    f"not {run_id!r}"
                )
        else:
            now = datetime.now(timezone.utc).isoformat()
            self.manifest = RunManifest(
                run_id=run_id or new_run_id(), created_at=now, updated_at=now
            )
            self.save_manifest()

    # -- manifest ---------------------------------------------------------

    def _load_manifest(self) -> RunManifest:
        try:
            with open(self._manifest_path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise StoreError(f"unreadable manifest at {self._manifest_path}: {exc}") from exc
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise StoreError(
                f"manifest schema version {version} does not match "
                f"supported version {SCHEMA_VERSION}"
            )
        known = {f for f in RunManifest.__dataclass_fields__}
        return RunManifest(**{k: v for k, v in data.items() if k in known})

    def save_manifest(self) -> None:
        self.manifest.updated_at = datetime.now(timezone.utc).isoformat()
        tmp = self._manifest_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(asdict(self.manifest), fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self._manifest_path)

    def mark_stage_complete(self, stage: str) -> None:
        if stage not in STAGE_ORDER:
            raise StoreError(f"unknown stage {stage!r}")
        self.manifest.stages[stage] = True
        self.save_manifest()

    def stage_complete(self, stage: str) -> bool:
        return self.manifest.stage_complete(stage)

    def clear_stage(self, stage: str) -> None:
        """Drop a stage's completion flag (outputs are overwritten on rerun)."""
        if self.manifest.stages.pop(stage, None) is not None:
            self.save_manifest()

    # -- raw bodies -------------------------------------------------------

    def put_raw(self, body: bytes) -> str:
        digest = hashlib.sha256(body).hexdigest()
        blob = self.raw_dir / digest[:2] / digest
        if not blob.exists():
            blob.parent.mkdir(exist_ok=True)
            tmp = blob.with_name(blob.name + ".tmp")
            tmp.write_bytes(body)
            os.replace(tmp, blob)
        return digest

    def get_raw(self, digest: str) -> bytes:
        blob = self.raw_dir / digest[:2] / digest
        try:
            return blob.read_bytes()
        except FileNotFoundError:
            raise StoreError(f"no raw blob {digest}") from None

    def has_raw(self, digest: str) -> bool:
        return (self.raw_dir / digest[:2] / digest).exists()

    # -- JSONL stages -----------------------------------------------------

    def stage_path(self, name: str) -> Path:
        return self.run_dir / f"{name}.jsonl"

    @staticmethod
    def assignments_stage(taxonomy: str) -> str:
        return f"assignments_{taxonomy}"

    def append_records(self, name: str, records: Iterable[dict]) -> int:
        """Append records to a stage file; returns how many were written."""
        path = self.stage_path(name)
        with self._lock:
            self._repair_tail(path)
            written = 0
            with open(path, "a", encoding="utf-8") as fh:
                for record in records:
                    fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
                    fh.write("\n")
                    written += 1
                fh.flush()
                os.fsync(fh.fileno())
        return written

    def read_records(self, name: str) -> Iterator[dict]:
        """Yield records in file order; a torn final line is dropped."""
        path = self.stage_path(name)
        if not path.exists():
            return
        with open(path, "rb") as fh:
            raw_lines = fh.read().split(b"\n")
        if raw_lines and raw_lines[-1] == b"":
            raw_lines.pop()
        for i, raw in enumerate(raw_lines):
            try:
                yield json.loads(raw.decode("utf-8"))
            except (ValueError, UnicodeDecodeError) as exc:
                if i == len(raw_lines) - 1:
                    log.warning(
                        "dropping partial trailing line in %s (interrupted write)", path
                    )
                    return
                raise StoreError(f"corrupt record at {path}:{i + 1}: {exc}") from exc

    def record_count(self, name: str) -> int:
        return sum(1 for _ in self.read_records(name))

    def truncate_stage(self, name: str) -> None:
        """Remove a stage file so its producer can rebuild it from scratch."""
        path = self.stage_path(name)
        if path.exists():
            path.unlink()

    @staticmethod
    def _repair_tail(path: Path) -> None:
        """Truncate a file that does not end in a newline back to the last one."""
        if not path.exists():
            return
        with open(path, "rb+") as fh:
            fh.seek(0, os.SEEK_END)
            size = fh.tell()
            if size == 0:
                return
            fh.seek(-1, os.SEEK_END)
            if fh.read(1) == b"\n":
                return
            data = Path(path).read_bytes()
            keep = data.rfind(b"\n") + 1
            log.warning(
                "truncating %d bytes of torn trailing line in %s", size - keep, path
            )
            fh.truncate(keep)
