import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shape4d.fileio import ConstellationParseError, dumps, load, loads, save
from shape4d.formats import BUILTIN_NAMES, builtin


@pytest.mark.parametrize("name", ["4d-os128", "128sp-16qam", "pm-qpsk", "16qam"])
def test_roundtrip_exact(tmp_path, name):
    c = builtin(name)
    path = tmp_path / f"{name}.4ds"
    save(c, path)
    back = load(path)
    np.testing.assert_array_equal(back.points, c.points)
    np.testing.assert_array_equal(back.labels, c.labels)


def test_header_and_row_grammar():
    text = dumps(builtin("qpsk"))
    lines = text.splitlines()
    assert lines[0].startswith("#4dshape v1 N=2 m=2 Es=")
    assert len(lines) == 5
    left, right = lines[1].split(" | ")
    assert len(left.split(" ")) == 2
    assert right in {"0 0", "0 1", "1 0", "1 1"}

    row = dumps(builtin("4d-os128")).splitlines()[1].split(" | ")[0].split(" ")[0]
    assert len(row.lstrip("-").replace(".", "").lstrip("0")) >= 9


class TestParseErrors:
    def test_bad_header(self):
        with pytest.raises(ConstellationParseError) as err:
            loads("4dshape N=2\n")
        assert err.value.lineno == 1

    def test_bad_coordinate_reports_line(self):
        text = dumps(builtin("qpsk")).splitlines()
        text[3] = "0.7 abc | 1 0"
        with pytest.raises(ConstellationParseError) as err:
            loads("\n".join(text))
        assert err.value.lineno == 4
        assert "line 4" in str(err.value)

    def test_wrong_bit_count(self):
        text = dumps(builtin("qpsk")).splitlines()
        text[2] = text[2].rsplit(" ", 1)[0]
        with pytest.raises(ConstellationParseError) as err:
            loads("\n".join(text))
        assert err.value.lineno == 3

    def test_missing_rows(self):
        text = dumps(builtin("qpsk")).splitlines()[:-1]
        with pytest.raises(ConstellationParseError, match="expected 4 rows"):
            loads("\n".join(text))

    def test_duplicate_label(self):
        text = dumps(builtin("qpsk")).splitlines()
        text[2] = text[2].split("|")[0] + "| " + text[1].split("| ")[1]
        with pytest.raises(ConstellationParseError):
            loads("\n".join(text))

    def test_empty(self):
        with pytest.raises(ConstellationParseError):
            loads("")


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(BUILTIN_NAMES), st.floats(0.01, 100.0))
def test_roundtrip_any_scale(name, scale):
    c = builtin(name).scaled(scale)
    back = loads(dumps(c))
    np.testing.assert_array_equal(back.points, c.points)
