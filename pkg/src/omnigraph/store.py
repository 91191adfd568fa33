"""File-backed workspace store with optimistic-concurrency saves.

Layout: one `<id>.hgw.json` per workspace under the root directory,
metamodels under `<root>/metamodels/*.mm.yaml`. Saves carry the version the
caller read; a mismatch is a conflict, never a lost update. Writes go
through a temp file plus atomic rename, so a crash mid-save leaves either
the old file or the new one, never a torn one.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from .bundled import bundled_metamodel, bundled_metamodel_ids
from .errors import (
    ConflictError,
    GraphError,
    NotFoundError,
    OmniGraphError,
)
from .graph import FILE_EXTENSION, Workspace, check_workspace_id, deserialize, serialize
from .metamodel import MetaModel, load_metamodel

HISTORY_CAP = 100


@dataclass
class WorkspaceInfo:
    id: str
    name: str = ""
    metamodel: str = ""
    version: int = 0
    node_count: int = 0
    link_count: int = 0
    corrupt: bool = False
    error: str | None = None

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "name": self.name,
            "metamodel": self.metamodel,
            "version": self.version,
            "node_count": self.node_count,
            "link_count": self.link_count,
        }
        if self.corrupt:
            doc["corrupt"] = True
            doc["error"] = self.error
        return doc


class WorkspaceStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        # test seam: called between writing the temp file and the atomic rename
        self._pre_replace_hook = None

    # -- paths and locks ------------------------------------------------------

    def path_for(self, workspace_id: str) -> Path:
        check_workspace_id(workspace_id)
        return self.root / f"{workspace_id}{FILE_EXTENSION}"

    def _lock(self, workspace_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(workspace_id, threading.Lock())

    def _check_case_collision(self, workspace_id: str) -> None:
        lowered = workspace_id.lower()
        for path in self.root.glob(f"*{FILE_EXTENSION}"):
            existing = path.name.removesuffix(FILE_EXTENSION)
            if existing.lower() == lowered and existing != workspace_id:
                raise GraphError(
                    f"workspace id {workspace_id!r} collides with existing "
                    f"{existing!r} (differs only by case)"
                )

    # -- operations -------------------------------------------------------------

    def list(self) -> list:
        """Summaries of every workspace file, ascending by id; corrupt files
        are flagged, never fatal."""
        infos = []
        for path in sorted(self.root.glob(f"*{FILE_EXTENSION}")):
            workspace_id = path.name.removesuffix(FILE_EXTENSION)
            try:
                ws = deserialize(path.read_text(encoding="utf-8"))
                infos.append(
                    WorkspaceInfo(
                        id=workspace_id,
                        name=ws.name,
                        metamodel=ws.metamodel,
                        version=ws.version,
                        node_count=ws.node_count(),
                        link_count=ws.link_count(),
                    )
                )
            except (OSError, OmniGraphError) as exc:
                infos.append(WorkspaceInfo(id=workspace_id, corrupt=True, error=str(exc)))
        return infos

    def exists(self, workspace_id: str) -> bool:
        return self.path_for(workspace_id).is_file()

    def load(self, workspace_id: str):
        """Returns (workspace, version token)."""
        path = self.path_for(workspace_id)
        if not path.is_file():
            raise NotFoundError(f"no workspace named {workspace_id!r}")
        ws = deserialize(path.read_text(encoding="utf-8"))
        return ws, ws.version

    def save(self, workspace_id: str, ws: Workspace, expected: int) -> int:
        """Optimistic save: succeeds only when `expected` matches the stored
        version; the stored version then becomes expected + 1."""
        if ws.id != workspace_id:
            raise GraphError(
                f"workspace document id {ws.id!r} does not match target {workspace_id!r}"
            )
        ws.check()
        path = self.path_for(workspace_id)
        with self._lock(workspace_id):
            self._check_case_collision(workspace_id)
            if path.is_file():
                stored = deserialize(path.read_text(encoding="utf-8")).version
            else:
                stored = 0
            if expected != stored:
                raise ConflictError(expected, stored)
            ws.version = expected + 1
            self._write_atomic(path, serialize(ws))
            return ws.version

    def delete(self, workspace_id: str) -> None:
        path = self.path_for(workspace_id)
        if not path.is_file():
            raise NotFoundError(f"no workspace named {workspace_id!r}")
        with self._lock(workspace_id):
            path.unlink()

    def navigate(self, workspace_id: str, target_id: str) -> list:
        """Append a visit to the source workspace's navigation history.

        Immediately repeated entries deduplicate; history is capped at 100,
        oldest first out.
        """
        if not self.exists(target_id):
            raise NotFoundError(f"navigation target {target_id!r} does not exist")
        with self._lock(workspace_id):
            ws, version = self.load(workspace_id)
            if not ws.history or ws.history[-1] != target_id:
                ws.history.append(target_id)
                ws.history = ws.history[-HISTORY_CAP:]
                ws.version = version + 1
                self._write_atomic(self.path_for(workspace_id), serialize(ws))
            return list(ws.history)

    def _write_atomic(self, path: Path, text: str) -> None:
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        if self._pre_replace_hook is not None:
            self._pre_replace_hook(path)
        tmp.replace(path)

    # -- metamodels ------------------------------------------------------------

    def metamodels_dir(self) -> Path:
        return self.root / "metamodels"

    def metamodel_ids(self) -> list:
        ids = set(bundled_metamodel_ids())
        if self.metamodels_dir().is_dir():
            ids.update(
                p.name.removesuffix(".mm.yaml")
                for p in self.metamodels_dir().glob("*.mm.yaml")
            )
        return sorted(ids)

    def load_metamodel(self, name: str) -> MetaModel:
        """Store metamodels shadow the bundled ones of the same name."""
        path = self.metamodels_dir() / f"{name}.mm.yaml"
        if path.is_file():
            return load_metamodel(path.read_text(encoding="utf-8"))
        try:
            return bundled_metamodel(name)
        except NotFoundError:
            raise NotFoundError(f"no metamodel named {name!r}") from None
