"""
Tests for pipeline stage bookkeeping.
Run with: pytest test/test_checkpoint.py
"""

import json
import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import pytest

from cubeabs.checkpoint import CheckpointManager


@pytest.fixture
def manager(tmp_path):
    return CheckpointManager(tmp_path / "run" / ".checkpoint.json")


def test_completed_stages_persist(manager):
    assert manager.should_run("peterson/reduce")
    manager.mark_completed("peterson/reduce")
    assert not manager.should_run("peterson/reduce")
    again = CheckpointManager(manager.checkpoint_file)
    assert again.is_completed("peterson/reduce")
    assert json.loads(manager.checkpoint_file.read_text())["last_run"]


def test_failure_is_cleared_by_success(manager):
    manager.mark_failed("square/certify", ValueError("boom"))
    assert manager.data["failed"]["square/certify"]["error"] == "boom"
    manager.mark_completed("square/certify")
    assert "square/certify" not in manager.data["failed"]


def test_only_selects_stages_and_models(manager):
    manager.mark_completed("peterson/reduce")
    assert manager.should_run("peterson/reduce", only=["peterson"])
    assert manager.should_run("square/reduce", only=["square/reduce"])
    assert not manager.should_run("square/certify", only=["square/reduce"])


def test_skip_until(manager):
    stages = ["square/reduce", "square/certify", "peterson/compose", "peterson/reduce"]
    picked = [s for s in stages if manager.should_run(s, skip_until="peterson")]
    assert picked == ["peterson/compose", "peterson/reduce"]


def test_reset(manager):
    manager.mark_completed("square/reduce")
    manager.reset()
    assert not manager.checkpoint_file.exists()
    assert manager.should_run("square/reduce")


if __name__ == "__main__":
    pytest.main([__file__])
