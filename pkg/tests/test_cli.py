import filecmp

import pytest

from votenet import synth
from votenet.cli import main
from votenet.dataset import parse_canonical, write_canonical

from test_pipeline import write_fixture_config


@pytest.fixture
def synth_dataset(tmp_path):
    planted = synth.generate(blocs=2, members=20, sessions=25, loyalty=0.9, seed=8,
                             window_label="2010")
    path = tmp_path / "votes.tsv"
    write_canonical(planted.dataset, path)
    return path


def test_synth_and_ingest_roundtrip(tmp_path):
    out = tmp_path / "synth.tsv"
    assert main(["synth", "--members", "12", "--sessions", "10", "--seed", "3",
                 "--out", str(out)]) == 0
    ingested = tmp_path / "dataset.tsv"
    assert main(["ingest", str(out), "--format", "canonical",
                 "--out", str(ingested)]) == 0
    d = parse_canonical(ingested)
    assert len(d.members) == 12 and len(d.sessions) == 10


def test_ingest_bad_file_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("one\tfield\n")
    assert main(["ingest", str(bad), "--out", str(tmp_path / "x.tsv")]) == 1
    assert "error:" in capsys.readouterr().err


def test_graph_detect_polarize_temporal_chain(tmp_path, synth_dataset):
    prefix = tmp_path / "g"
    assert main(["graph", "--dataset", str(synth_dataset), "--percentile", "55",
                 "--stats", "--out", str(prefix)]) == 0
    assert (tmp_path / "g.edges.tsv").exists()
    assert (tmp_path / "g.stats.tsv").exists()

    part_dir = tmp_path / "parts"
    part_dir.mkdir()
    assert main(["detect", "--graph", str(prefix), "--seed", "0", "--restarts", "4",
                 "--out", str(part_dir / "2010.partition.tsv")]) == 0

    pol = tmp_path / "pol"
    assert main(["polarize", "--graph", str(prefix), "--sweep", "0:1:0.25",
                 "--seed", "0", "--out", str(pol)]) == 0
    assert (tmp_path / "pol.sweep.tsv").exists()
    assert (tmp_path / "pol.partition.tsv").exists()

    # fabricate a second window by re-detecting with another seed
    assert main(["detect", "--graph", str(prefix), "--seed", "1",
                 "--out", str(part_dir / "2011.partition.tsv")]) == 0
    assert main(["temporal", "--partitions", str(part_dir),
                 "--out", str(tmp_path / "t")]) == 0
    assert (tmp_path / "t.temporal.tsv").exists()
    assert (tmp_path / "t.flow_2010_2011.tsv").exists()


def test_polarize_explicit_threshold(tmp_path, synth_dataset):
    prefix = tmp_path / "g"
    main(["graph", "--dataset", str(synth_dataset), "--percentile", "55",
          "--out", str(prefix)])
    assert main(["polarize", "--graph", str(prefix), "--overlap-threshold", "0.2",
                 "--out", str(tmp_path / "pol")]) == 0
    assert not (tmp_path / "pol.sweep.tsv").exists()


def test_discipline_party_groups(tmp_path, synth_dataset, capsys):
    out = tmp_path / "pd.tsv"
    assert main(["discipline", "--dataset", str(synth_dataset), "--groups", "party",
                 "--out", str(out)]) == 0
    assert "B0" in capsys.readouterr().out
    assert out.exists()


def test_discipline_assignment_file(tmp_path, synth_dataset):
    d = parse_canonical(synth_dataset)
    groups = tmp_path / "groups.tsv"
    groups.write_text("".join(f"{m}\t{i % 2}\n" for i, m in enumerate(sorted(d.members))))
    assert main(["discipline", "--dataset", str(synth_dataset), "--groups", str(groups),
                 "--out", str(tmp_path / "pd.tsv")]) == 0


def test_run_and_report_commands(tmp_path, capsys):
    config = write_fixture_config(tmp_path)
    assert main(["run", "--config", str(config)]) == 0
    capsys.readouterr()
    assert main(["report", "ideological", "--config", str(config)]) == 0
    out = capsys.readouterr().out
    assert "Mod." in out and "y0" in out
    assert main(["report", "temporal", "--config", str(config), "--tsv"]) == 0
    assert "y0-y1" in capsys.readouterr().out


def test_stagewise_cli_matches_run_pipeline(tmp_path):
    """Running stages individually reproduces the pipeline's artifacts."""
    config_path = write_fixture_config(tmp_path, n_windows=1)
    from votenet.pipeline import load_config, run_pipeline
    config = load_config(config_path)
    out = run_pipeline(config)

    manual = tmp_path / "manual"
    manual.mkdir()
    main(["ingest", str(tmp_path / "data" / "y0.tsv"), "--out",
          str(manual / "dataset.tsv")])
    main(["graph", "--dataset", str(manual / "dataset.tsv"), "--percentile", "55",
          "--out", str(manual / "graph")])
    main(["detect", "--graph", str(manual / "graph"), "--seed", "0", "--restarts", "2",
          "--out", str(manual / "ideological.partition.tsv")])

    assert filecmp.cmp(manual / "dataset.tsv", out / "y0" / "dataset.tsv", shallow=False)
    assert filecmp.cmp(manual / "graph.edges.tsv", out / "y0" / "graph.edges.tsv",
                       shallow=False)
    assert filecmp.cmp(manual / "ideological.partition.tsv",
                       out / "y0" / "ideological.partition.tsv", shallow=False)
