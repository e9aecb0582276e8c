import json
from pathlib import Path

import numpy as np

from debruijn import __version__
from debruijn.report import (
    SCHEMA,
    build_report,
    file_digest,
    format_cell,
    jsonable,
    report_to_json,
    write_csv,
    write_report,
)


def test_jsonable_conversions():
    value = jsonable(
        {
            "array": np.array([1.5, np.nan, np.inf, -np.inf]),
            "int": np.int64(7),
            "bool": np.bool_(True),
            "path": Path("/tmp/x"),
            "nested": (np.float64(0.25), [np.int32(1)]),
            3: "keyed",
        }
    )
    assert value["array"] == [1.5, None, None, None]
    assert value["int"] == 7 and isinstance(value["int"], int)
    assert value["bool"] is True
    assert value["path"] == "/tmp/x"
    assert value["nested"] == [0.25, [1]]
    assert value["3"] == "keyed"


def test_file_digest_format(tmp_path):
    path = tmp_path / "blob.bin"
    path.write_bytes(b"0101")
    digest = file_digest(path)
    assert digest.startswith("sha256:")
    assert len(digest) == len("sha256:") + 64
    assert digest == file_digest(path)


def test_build_report_shape(tmp_path):
    source = tmp_path / "input.txt"
    source.write_text("0101\n")
    report = build_report(
        command="prob",
        parameters={"m": 2, "p": np.array([0.5, 0.5, 0.5, 0.5])},
        results={"value": np.float64(0.125)},
        seed=42,
        input_paths=[source],
    )
    assert report["schema"] == SCHEMA == "debruijn.report/1"
    assert report["version"] == __version__
    assert report["command"] == "prob"
    assert report["seed"] == 42
    assert report["inputs"]["parameters"]["m"] == 2
    assert report["inputs"]["digests"][str(source)].startswith("sha256:")
    assert report["results"]["value"] == 0.125
    # timestamps are ISO-8601 UTC at second resolution
    assert report["created_utc"].endswith("+00:00")


def test_report_json_is_deterministic_apart_from_timestamp():
    a = build_report("x", {"b": 2, "a": 1}, {"nan": float("nan")})
    b = build_report("x", {"a": 1, "b": 2}, {"nan": float("nan")})
    a["created_utc"] = b["created_utc"] = "T"
    assert report_to_json(a) == report_to_json(b)
    text = report_to_json(a)
    assert text.endswith("\n")
    assert json.loads(text)["results"]["nan"] is None


def test_write_report_round_trip(tmp_path):
    report = build_report("y", {}, {"ok": True})
    path = write_report(report, tmp_path / "report.json")
    assert json.loads(path.read_text()) == json.loads(report_to_json(report))


def test_format_cell():
    assert format_cell(None) == ""
    assert format_cell(float("nan")) == ""
    assert format_cell(np.float64(0.1)) == "0.1"
    assert format_cell(1 / 3) == repr(1 / 3)
    assert format_cell(np.int64(5)) == "5"
    assert format_cell("word") == "word"


def test_write_csv(tmp_path):
    path = write_csv(
        tmp_path / "t.csv",
        ["word", "estimate"],
        [["00", 0.25], ["01", float("nan")]],
    )
    assert path.read_text() == "word,estimate\n00,0.25\n01,\n"
