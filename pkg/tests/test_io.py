import numpy as np
import pytest

from maddclust.io import CSVFormatError, ingest_csv, write_csv


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_plain_numeric_file(tmp_path):
    data = ingest_csv(write(tmp_path, "1,2\n3,4\n5,6\n"))
    assert (data.n, data.d) == (3, 2) and data.labels is None
    np.testing.assert_array_equal(data.X, [[1, 2], [3, 4], [5, 6]])


def test_label_column_by_name(tmp_path):
    data = ingest_csv(write(tmp_path, "a,b,class\n1,2,x\n3,4,y\n5,6,x\n"), label_column="class")
    assert data.d == 2 and data.columns == ["a", "b"]
    assert data.labels.tolist() == [1, 2, 1]


def test_label_column_by_index_without_header(tmp_path):
    data = ingest_csv(write(tmp_path, "0,1.5,2\n1,2.5,3\n"), header=False, label_column=0)
    assert data.d == 2 and data.labels.tolist() == [1, 2]


def test_ragged_row_names_line(tmp_path):
    p = write(tmp_path, "a,b\n1,2\n3\n")
    with pytest.raises(CSVFormatError, match=r"line 3 .*ragged"):
        ingest_csv(p)


def test_non_numeric_cell_location(tmp_path):
    p = write(tmp_path, "1,2\n3,abc\n")
    with pytest.raises(CSVFormatError, match=r"line 2, column 2"):
        ingest_csv(p)


def test_missing_file_and_bad_label(tmp_path):
    with pytest.raises(CSVFormatError, match="cannot read"):
        ingest_csv(tmp_path / "nope.csv")
    with pytest.raises(CSVFormatError, match="no column"):
        ingest_csv(write(tmp_path, "a,b\n1,2\n"), label_column="class")
    with pytest.raises(CSVFormatError, match="empty"):
        ingest_csv(write(tmp_path, "", "e.csv"))


def test_round_trip_is_exact(tmp_path):
    X = np.random.default_rng(0).normal(size=(5, 3)) * 1e-7
    labels = np.array([1, 2, 1, 3, 2])
    p = tmp_path / "out" / "x.csv"
    write_csv(p, X, labels)
    back = ingest_csv(p, label_column="class")
    assert np.array_equal(back.X, X)
    assert back.labels.tolist() == labels.tolist()
