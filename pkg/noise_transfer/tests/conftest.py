import sys
from pathlib import Path

import pytest

# Ensure project root is on sys.path for test imports
ROOT = Path(__file__).resolve().parents[2]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))


@pytest.fixture(autouse=True)
def isolated_output(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Send CLI artefacts without ``--path`` to a per-test directory."""
    out = tmp_path / "results"
    monkeypatch.setenv("NOISE_TRANSFER_OUTPUT_DIR", str(out))
    monkeypatch.delenv("NOISE_TRANSFER_LOG_LEVEL", raising=False)
    return out
