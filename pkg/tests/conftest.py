import pytest


@pytest.fixture(autouse=True)
def _no_data_dir_override(monkeypatch):
    # user environments may point preset lookup elsewhere; tests want the
    # packaged presets unless they set the variable themselves
    monkeypatch.delenv("ZSBA_DATA_DIR", raising=False)
