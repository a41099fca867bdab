import json
import subprocess
import sys
from pathlib import Path

import pytest

OP_PRETRAIN_CFG = """
GLOBAL_VAR_COUNT: 0
STATEMENT_COUNT: 5
MASTER_SEED: 3
"""


def synthlang(*args) -> subprocess.CompletedProcess:
    """Invoke the corpus tool through its public CLI (the only coupling)."""
    return subprocess.run([sys.executable, "-m", "synthlang.cli", *args],
                          capture_output=True, text=True)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """20k-sample no-globals corpus for unit-scale training tests."""
    root = tmp_path_factory.mktemp("small-corpus")
    cfg = root / "op.cfg"
    cfg.write_text(OP_PRETRAIN_CFG)
    proc = synthlang("gen", "--config", str(cfg), "--train", "20000",
                     "--test-noglobal", "1000", "--out", str(root))
    assert proc.returncode == 0, proc.stderr
    return root


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("tiny-corpus")
    cfg = root / "op.cfg"
    cfg.write_text(OP_PRETRAIN_CFG)
    proc = synthlang("gen", "--config", str(cfg), "--train", "300",
                     "--test-noglobal", "100", "--out", str(root))
    assert proc.returncode == 0, proc.stderr
    return root


def read_references(path: Path, limit=None) -> dict:
    refs = {}
    with path.open() as fh:
        for line in fh:
            record = json.loads(line)
            refs[record["id"]] = record["output"]
            if limit and len(refs) >= limit:
                break
    return refs
