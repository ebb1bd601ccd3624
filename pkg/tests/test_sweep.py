import json

import pytest

from shape4d.sweep import SCHEMA_VERSION, SweepResult


def _result(**kw):
    r = SweepResult(columns=["format", "snr_db", "gmi"], command="shape4d gmi-sweep", seed=4, **kw)
    r.add(format="qpsk", snr_db=3.0, gmi=1.234567890123)
    return r


class TestSweepResult:
    def test_csv_metadata_and_rows(self):
        lines = _result(timestamp=False).to_csv().splitlines()
        assert lines[0] == f"# schema_version: {SCHEMA_VERSION}"
        assert "# seed: 4" in lines
        assert "# command: shape4d gmi-sweep" in lines
        assert lines[-2] == "format,snr_db,gmi"
        assert lines[-1] == "qpsk,3,1.23456789"

    def test_timestamp_toggle(self):
        assert "generated" in _result().meta()
        assert "generated" not in _result(timestamp=False).meta()

    def test_json(self):
        doc = json.loads(_result(timestamp=False).render("json"))
        assert doc["columns"] == ["format", "snr_db", "gmi"]
        assert doc["rows"][0]["gmi"] == pytest.approx(1.234567890123)
        assert doc["meta"]["schema_version"] == SCHEMA_VERSION

    def test_missing_column(self):
        r = SweepResult(columns=["a", "b"])
        with pytest.raises(KeyError):
            r.add(a=1)

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            _result().render("xml")
