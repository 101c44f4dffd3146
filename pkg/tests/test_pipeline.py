import hashlib

import pytest

from votenet import synth
from votenet.dataset import write_canonical
from votenet.pipeline import (
    ConfigError,
    PipelineConfig,
    StageError,
    WindowSpec,
    load_config,
    read_group_discipline,
    render_report,
    run_pipeline,
)


def write_fixture_config(tmp_path, n_windows=2, extra="", members=24, sessions=30):
    data_dir = tmp_path / "data"
    data_dir.mkdir(exist_ok=True)
    sections = []
    for i in range(n_windows):
        label = f"y{i}"
        planted = synth.generate(blocs=2, members=members, sessions=sessions,
                                 loyalty=0.9, seed=100 + i, window_label=label)
        write_canonical(planted.dataset, data_dir / f"{label}.tsv")
        sections.append(f"[window:{label}]\nfiles = data/{label}.tsv\nadapter = canonical\n")
    config_text = (
        "[pipeline]\n"
        f"output = out\n"
        "percentile = 55\n"
        "sweep = 0:1:0.25\n"
        "seed = 0\n"
        "restarts = 2\n"
        f"{extra}\n"
        + "\n".join(sections))
    path = tmp_path / "pipeline.ini"
    path.write_text(config_text, encoding="utf-8")
    return path


EXPECTED_WINDOW_FILES = [
    "dataset.tsv", "party.pd.tsv",
    "graph.edges.tsv", "graph.nodes.tsv", "graph.stats.tsv",
    "ideological.partition.tsv", "ideological.pd.tsv",
    "sweep.tsv", "overlap_threshold.tsv",
    "polarized.edges.tsv", "polarized.nodes.tsv", "polarized.stats.tsv",
    "polarized.partition.tsv", "polarized.pd.tsv",
]


def test_run_pipeline_smoke(tmp_path):
    config = load_config(write_fixture_config(tmp_path))
    out = run_pipeline(config)
    for label in ("y0", "y1"):
        for name in EXPECTED_WINDOW_FILES:
            assert (out / label / name).exists(), name
        assert not (out / label / ".partial").exists()
    assert (out / "temporal.tsv").exists()
    assert (out / "flow_y0_y1.tsv").exists()
    manifest = (out / "manifest.tsv").read_text()
    assert "# seed: 0" in manifest
    listed = {line.split("\t")[0] for line in manifest.splitlines()
              if line and not line.startswith("#")}
    assert "y0/dataset.tsv" in listed and "temporal.tsv" in listed


def test_unknown_adapter_rejected_before_work(tmp_path):
    path = write_fixture_config(tmp_path)
    path.write_text(path.read_text().replace("adapter = canonical", "adapter = mystery"))
    with pytest.raises(ConfigError, match="mystery"):
        load_config(path)


def test_duplicate_window_labels_rejected():
    from pathlib import Path
    spec = WindowSpec("y", files=(Path("x.tsv"),))
    config = PipelineConfig(windows=(spec, spec), output_dir=Path("out"))
    with pytest.raises(ConfigError, match="unique"):
        config.validate()


def test_pipeline_deterministic_rerun(tmp_path):
    path = write_fixture_config(tmp_path)

    def digest_all(out_dir):
        return {p.relative_to(out_dir): hashlib.sha256(p.read_bytes()).hexdigest()
                for p in sorted(out_dir.rglob("*")) if p.is_file()}

    config = load_config(path)
    first = digest_all(run_pipeline(config))
    second = digest_all(run_pipeline(load_config(path)))
    assert first == second


def test_stage_error_leaves_partial_marker(tmp_path):
    path = write_fixture_config(tmp_path)
    config = load_config(path)
    # corrupt one input so the ingest stage fails
    (tmp_path / "data" / "y1.tsv").write_text("not\tenough\n")
    with pytest.raises(StageError) as err:
        run_pipeline(config)
    assert err.value.stage == "ingest" and err.value.window == "y1"
    assert (config.output_dir / "y1" / ".partial").exists()
    assert not (config.output_dir / "y0" / ".partial").exists()


def test_explicit_overlap_threshold_respected(tmp_path):
    path = write_fixture_config(tmp_path, n_windows=1)
    text = path.read_text().replace("[window:y0]", "[window:y0]\noverlap_threshold = 0.1")
    path.write_text(text)
    config = load_config(path)
    run_pipeline(config)
    assert "0.1" in (config.output_dir / "y0" / "overlap_threshold.tsv").read_text()


def test_reports(tmp_path):
    config = load_config(write_fixture_config(tmp_path))
    run_pipeline(config)

    datasets = render_report("datasets", config)
    assert datasets.columns[0] == "Window"
    assert len(datasets.rows) == 2
    assert datasets.rows[0][1] == "30"  # sessions

    for kind in ("ideological", "polarized"):
        table = render_report(kind, config)
        assert "Mod." in table.columns and len(table.rows) == 2

    temporal = render_report("temporal", config)
    assert temporal.rows[0][0] == "y0-y1"
    assert temporal.rows[0][1].endswith("%")

    with pytest.raises(ValueError):
        render_report("nope", config)


def test_report_boundary_pair_excluded(tmp_path):
    path = write_fixture_config(tmp_path, n_windows=3, extra="boundaries = y1-y2\n")
    config = load_config(path)
    run_pipeline(config)
    pairs = [r[0] for r in render_report("temporal", config).rows]
    assert pairs == ["y0-y1"]
    assert not (config.output_dir / "flow_y1_y2.tsv").exists()


def test_group_discipline_report_readback(tmp_path):
    config = load_config(write_fixture_config(tmp_path, n_windows=1))
    out = run_pipeline(config)
    groups = read_group_discipline(out / "y0" / "party.pd.tsv")
    assert set(groups) == {"B0", "B1"}
    for mean, sd in groups.values():
        assert 0.0 <= mean <= 1.0 and sd >= 0.0


def test_output_root_env(tmp_path, monkeypatch):
    path = write_fixture_config(tmp_path, n_windows=1)
    monkeypatch.setenv("VOTENET_OUTPUT_ROOT", str(tmp_path / "root"))
    config = load_config(path)
    assert config.output_dir == tmp_path / "root" / "out"
