import json
from pathlib import Path

import jsonschema
from click.testing import CliRunner

from paraviews.cli import main
from paraviews.document import Document
from paraviews.prompts import PromptSet, render
from paraviews.providers import ScriptedResponse, save_fixtures
from paraviews.report import REPORT_SCHEMA

SAMPLE = "One clear idea.\n\nAnother idea follows.\n"


def write_sample(tmp_path: Path, name="draft.txt", text=SAMPLE) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def run(*args, **kwargs):
    return CliRunner().invoke(main, list(args), **kwargs)


def test_report_mock_json_exit_zero(tmp_path):
    path = write_sample(tmp_path)
    result = run("report", str(path), "--mock")
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["source"] == "draft.txt"
    assert report["paragraph_count"] == 2
    assert report["prompts"] == [
        "thesis",
        "important-concepts",
        "writer-questions",
        "reader-questions",
        "advice",
    ]
    assert len(report["paragraphs"][0]["views"]) == 5


def test_report_contains_no_absolute_paths(tmp_path):
    path = write_sample(tmp_path)
    result = run("report", str(path), "--mock")
    assert str(tmp_path) not in result.output


def test_report_is_byte_identical_across_runs(tmp_path):
    path = write_sample(tmp_path)
    outputs = {run("report", str(path), "--mock").output for _ in range(3)}
    assert len(outputs) == 1


def test_report_prompt_subset_and_order(tmp_path):
    path = write_sample(tmp_path)
    result = run("report", str(path), "--mock", "--prompts", "advice,thesis")
    report = json.loads(result.output)
    assert report["prompts"] == ["advice", "thesis"]
    views = report["paragraphs"][0]["views"]
    assert [v["prompt_id"] for v in views] == ["advice", "thesis"]


def test_unknown_prompt_id_is_usage_error(tmp_path):
    path = write_sample(tmp_path)
    result = run("report", str(path), "--mock", "--prompts", "advice,nonsense")
    assert result.exit_code == 2
    assert "nonsense" in result.output


def test_stdin_source(tmp_path):
    result = run("report", "-", "--mock", input="From stdin.\n")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["source"] == "<stdin>"


def test_failed_view_sets_exit_one(tmp_path):
    path = write_sample(tmp_path, text="failing paragraph")
    doc = Document.from_text("x", "failing paragraph")
    request = render(PromptSet().get("advice"), doc.paragraphs[0].text)
    fixtures = {
        request.fingerprint(): ScriptedResponse(
            chunks=[], terminal="error", error_detail="quota exhausted"
        )
    }
    fixture_path = tmp_path / "fixtures.json"
    save_fixtures(fixtures, fixture_path)

    result = run(
        "report",
        str(path),
        "--mock",
        "--fixtures",
        str(fixture_path),
        "--prompts",
        "advice",
    )
    assert result.exit_code == 1
    report = json.loads(result.output)
    assert report["paragraphs"][0]["views"][0]["status"] == "error"
    assert report["paragraphs"][0]["views"][0]["error_detail"] == "quota exhausted"


def test_fixture_replay_controls_output(tmp_path):
    path = write_sample(tmp_path, text="scripted paragraph")
    request = render(PromptSet().get("advice"), "scripted paragraph")
    fixtures = {
        request.fingerprint(): ScriptedResponse(chunks=["- tighten", "\n- trim"])
    }
    fixture_path = tmp_path / "fixtures.json"
    save_fixtures(fixtures, fixture_path)

    result = run(
        "report", str(path), "--mock", "--fixtures", str(fixture_path),
        "--prompts", "advice",
    )
    report = json.loads(result.output)
    view = report["paragraphs"][0]["views"][0]
    assert view["display_text"] == "- tighten\n- trim"
    assert view["display_blocks"][0]["kind"] == "unordered_list"


def test_markdown_format(tmp_path):
    path = write_sample(tmp_path)
    result = run("report", str(path), "--mock", "--format", "markdown", "--prompts", "advice")
    assert result.exit_code == 0
    assert result.output.startswith("# Views: draft.txt")
    assert "## Paragraph 1 (chars 0-15)" in result.output
    assert "### Advice" in result.output


def test_output_file(tmp_path):
    path = write_sample(tmp_path)
    out = tmp_path / "report.json"
    result = run("report", str(path), "--mock", "-o", str(out), "--prompts", "thesis")
    assert result.exit_code == 0
    jsonschema.validate(json.loads(out.read_text()), REPORT_SCHEMA)


def test_custom_prompt_file(tmp_path):
    path = write_sample(tmp_path)
    prompt_file = tmp_path / "prompts.json"
    prompt_file.write_text(
        json.dumps([{"id": "mine", "label": "Mine", "body": "Note one thing."}])
    )
    result = run(
        "report", str(path), "--mock",
        "--prompt-file", str(prompt_file), "--prompts", "mine",
    )
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["prompts"] == ["mine"]


def test_report_without_credential_requires_mock(tmp_path):
    path = write_sample(tmp_path)
    result = run("report", str(path), env={"PARAVIEWS_API_KEY": "", "OPENAI_API_KEY": ""})
    assert result.exit_code == 1
    assert "credential" in result.output
    assert "--mock" in result.output


def test_record_fixtures_without_credential_fails_clearly(tmp_path):
    path = write_sample(tmp_path)
    result = run(
        "record-fixtures", str(path), "-o", str(tmp_path / "f.json"),
        env={"PARAVIEWS_API_KEY": "", "OPENAI_API_KEY": ""},
    )
    assert result.exit_code == 1
    assert "credential" in result.output


def test_serve_without_credential_fails_before_binding():
    result = run("serve", env={"PARAVIEWS_API_KEY": "", "OPENAI_API_KEY": ""})
    assert result.exit_code == 1
    assert "credential" in result.output


def test_duplicate_paragraphs_share_one_generation(tmp_path):
    path = write_sample(tmp_path, text="twin\n\ntwin")
    result = run("report", str(path), "--mock", "--prompts", "advice")
    report = json.loads(result.output)
    views = [p["views"][0]["display_text"] for p in report["paragraphs"]]
    assert views[0] == views[1]
