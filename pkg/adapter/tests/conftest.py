from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent.parent
FIXTURES = REPO / "fixtures"
SPECS = REPO / "specs"

ADAPTER_CMD = shutil.which("nomos-adapter") or f"{sys.executable} -m nomos_adapter.serve"


@pytest.fixture()
def adapter_proc():
    """A live adapter process on the decision-tree fixture."""
    proc = subprocess.Popen(
        [*ADAPTER_CMD.split(), str(FIXTURES / "dt_felony_nonmono.json")],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        text=True, encoding="utf-8", bufsize=1,
    )
    yield proc
    if proc.poll() is None:
        proc.kill()
    proc.wait()


def ask(proc, payload) -> str:
    proc.stdin.write(payload if isinstance(payload, str) else json.dumps(payload))
    proc.stdin.write("\n")
    proc.stdin.flush()
    return proc.stdout.readline().rstrip("\n")
