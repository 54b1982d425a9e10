"""Stage bookkeeping for batch pipeline runs."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional
import json

from ._logger import logger

logger.debug(f"Loading module {__name__}.")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class CheckpointManager:
    """
    Completed and failed stages of a pipeline, kept in a JSON file.

    Stage names are ``<model>/<stage>``, e.g. ``peterson/reduce``.
    """

    def __init__(self, checkpoint_file: str | Path = "output/.checkpoint.json"):
        self.checkpoint_file = Path(checkpoint_file)
        self.checkpoint_file.parent.mkdir(parents=True, exist_ok=True)
        self.data = self.load()
        self._skipping = True

    @staticmethod
    def _empty() -> dict:
        return {"completed": [], "failed": {}, "last_run": None}

    def load(self) -> dict:
        if self.checkpoint_file.exists():
            with open(self.checkpoint_file, "r") as f:
                return json.load(f)
        return self._empty()

    def save(self) -> None:
        self.data["last_run"] = _now()
        with open(self.checkpoint_file, "w") as f:
            json.dump(self.data, f, indent=2)

    def is_completed(self, stage: str) -> bool:
        return stage in self.data["completed"]

    def mark_completed(self, stage: str) -> None:
        if stage not in self.data["completed"]:
            self.data["completed"].append(stage)
        self.data["failed"].pop(stage, None)
        self.save()

    def mark_failed(self, stage: str, error: BaseException | str) -> None:
        self.data["failed"][stage] = {"error": str(error), "timestamp": _now()}
        self.save()

    def reset(self) -> None:
        self.data = self._empty()
        self._skipping = True
        if self.checkpoint_file.exists():
            self.checkpoint_file.unlink()

    def should_run(
        self,
        stage: str,
        skip_until: Optional[str] = None,
        only: Optional[Iterable[str]] = None,
    ) -> bool:
        """
        ``only`` selects stages or whole models; ``skip_until`` skips every
        stage before the named one; otherwise completed stages are skipped.
        """
        if only:
            only = set(only)
            return stage in only or stage.split("/", 1)[0] in only
        if skip_until:
            if self._skipping:
                if stage == skip_until or stage.split("/", 1)[0] == skip_until:
                    self._skipping = False
                    return True
                return False
            return True
        return not self.is_completed(stage)
