import csv
import json
from pathlib import Path

import pytest

from inplayer.archetypes import archetype_trace
from inplayer.cli import main
from inplayer.traces import read_trace_file, write_trace_file

from conftest import cyclic_story_doc

STORIES_DIR = Path(__file__).resolve().parent.parent / "stories"
STORY = str(STORIES_DIR / "anchorhead-day2.json")


def test_validate_clean_story(capsys):
    assert main(["validate", "--story", STORY]) == 0
    out = capsys.readouterr().out
    assert "endings: 2" in out
    assert "ok" in out


def test_validate_cyclic_story(tmp_path, capsys):
    path = tmp_path / "cyclic.json"
    path.write_text(json.dumps(cyclic_story_doc()))
    assert main(["validate", "--story", str(path)]) == 1
    assert "problem" in capsys.readouterr().out


def test_validate_missing_file():
    with pytest.raises(SystemExit) as exc:
        main(["validate", "--story", "/nonexistent/story.json"])
    assert exc.value.code == 2


def test_simulate_writes_batch(tmp_path, capsys):
    out = tmp_path / "ua.jsonl"
    code = main(["simulate", "--story", STORY, "--uninformed",
                 "--runs", "3", "--seed", "7", "--max-ticks", "120",
                 "--out", str(out)])
    assert code == 0
    traces = read_trace_file(out)
    assert len(traces) == 3
    assert [t.seed for t in traces] == [7, 8, 9]
    manifest = json.loads((tmp_path / "ua.jsonl.manifest.json").read_text())
    assert manifest["agent_kind"] == "uninformed"


def test_simulate_determinism_byte_identical(tmp_path):
    profile_path = tmp_path / "profile.json"
    profile_path.write_text(json.dumps({"f": 0.2, "gE": 0.8, "pE": 0.9, "p": 0.8}))
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (out1, out2):
        code = main(["simulate", "--story", STORY, "--profile", str(profile_path),
                     "--runs", "3", "--seed", "0", "--max-ticks", "150",
                     "--out", str(out)])
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_conflicting_flags(tmp_path, capsys):
    profile_path = tmp_path / "p.json"
    profile_path.write_text(json.dumps({"f": 0.5, "gE": 0.5, "pE": 0.5, "p": 0.5}))
    code = main(["simulate", "--story", STORY, "--uninformed",
                 "--profile", str(profile_path), "--out", str(tmp_path / "x.jsonl")])
    assert code == 2
    assert "mutually exclusive" in capsys.readouterr().err


def test_gridsearch_csv(tmp_path, capsys, anchorhead):
    trace_path = tmp_path / "human.jsonl"
    write_trace_file([archetype_trace(anchorhead, "speedrunner")], trace_path)
    out = tmp_path / "grid.csv"
    code = main(["gridsearch", "--story", STORY, "--trace", str(trace_path),
                 "--runs", "2", "--seed", "0", "--max-ticks", "100",
                 "--out", str(out)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 16
    best_rows = [r for r in rows if r["best"] == "1"]
    assert len(best_rows) == 1
    # the reported best must be the argmax over the exported means
    assert float(best_rows[0]["mean"]) == max(float(r["mean"]) for r in rows)
    stdout = capsys.readouterr().out
    assert "best profile" in stdout


def test_gridsearch_empty_trace_file(tmp_path, capsys):
    trace_path = tmp_path / "empty.jsonl"
    trace_path.write_text("")
    code = main(["gridsearch", "--story", STORY, "--trace", str(trace_path),
                 "--runs", "2", "--out", str(tmp_path / "grid.csv")])
    assert code == 1
    assert "no traces" in capsys.readouterr().err


def test_compare_rows_and_flag(tmp_path, anchorhead):
    human = archetype_trace(anchorhead, "speedrunner")
    traces_path = tmp_path / "humans.jsonl"
    write_trace_file([human], traces_path)
    profiles_path = tmp_path / "profiles.json"
    profiles_path.write_text(json.dumps({
        human.session_id: {"f": 0.2, "gE": 0.8, "pE": 0.9, "p": 0.8}}))
    out = tmp_path / "compare.csv"
    code = main(["compare", "--story", STORY, "--traces", str(traces_path),
                 "--profiles", str(profiles_path), "--runs", "2",
                 "--max-ticks", "100", "--out", str(out)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["session_id"] == human.session_id
    assert rows[0]["reported_equals_best"] in ("0", "1")


def test_config_file_merges_beneath_flags(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"runs": 2, "seed": 50, "max_ticks": 60}))
    out = tmp_path / "out.jsonl"
    code = main(["simulate", "--story", STORY, "--uninformed",
                 "--config", str(config_path), "--seed", "9",  # flag beats config
                 "--out", str(out)])
    assert code == 0
    traces = read_trace_file(out)
    assert len(traces) == 2            # from config
    assert traces[0].seed == 9         # from flag


def test_simulate_events_log(tmp_path):
    out = tmp_path / "out.jsonl"
    events = tmp_path / "events.jsonl"
    code = main(["simulate", "--story", STORY, "--uninformed", "--runs", "1",
                 "--max-ticks", "20", "--events", str(events), "--out", str(out)])
    assert code == 0
    records = [json.loads(l) for l in events.read_text().splitlines()]
    assert len(records) == 20
    assert {"run", "tick", "goal", "plan", "action", "drops"} <= set(records[0])


def test_compare_unmatched_session(tmp_path, anchorhead, capsys):
    human = archetype_trace(anchorhead, "speedrunner")
    traces_path = tmp_path / "humans.jsonl"
    write_trace_file([human], traces_path)
    profiles_path = tmp_path / "profiles.json"
    profiles_path.write_text(json.dumps({"someone-else": {"f": 0, "gE": 0, "pE": 0, "p": 0}}))
    code = main(["compare", "--story", STORY, "--traces", str(traces_path),
                 "--profiles", str(profiles_path), "--runs", "2",
                 "--out", str(tmp_path / "c.csv")])
    assert code == 1
    assert "no profile for session" in capsys.readouterr().err
