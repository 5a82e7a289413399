"""End-to-end: render CSVs produced by the actual qbc CLI."""

import pytest

click_testing = pytest.importorskip("click.testing")
qbc_cli = pytest.importorskip("qbc.cli")

from qbcplots.render import KIND_HISTOGRAM, KIND_LINE, PlotSpec, render


@pytest.fixture(scope="module")
def produced(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("pipeline")
    runner = click_testing.CliRunner()
    key = tmp_path / "key.json"
    steps = [
        ["keygen", "--paper-fig6", "-o", str(key)],
        [
            "attack", "--key", str(key), "--message", "Wait and hope.",
            "--runs", "20", "--seed", "1",
            "-o", str(tmp_path / "attack.csv"),
            "--records-out", str(tmp_path / "records.csv"),
        ],
        [
            "matchrate", "--key", str(key), "--strategies", "Z2,B2",
            "--max-bits", "12", "--trials", "6", "--seed", "1",
            "-o", str(tmp_path / "matchrate.csv"),
        ],
        [
            "sweep", "--key", str(key), "--mode", "sum_prev",
            "--min-length", "10", "--max-length", "20", "--step", "10",
            "--runs", "5", "--seed", "1", "-o", str(tmp_path / "sweep.csv"),
        ],
    ]
    for args in steps:
        result = runner.invoke(qbc_cli.main, args)
        assert result.exit_code == 0, (args[0], result.output)
    return tmp_path


@pytest.mark.parametrize(
    "name,kind",
    [
        ("attack.csv", KIND_HISTOGRAM),
        ("records.csv", KIND_HISTOGRAM),
        ("matchrate.csv", KIND_LINE),
        ("sweep.csv", KIND_LINE),
    ],
)
def test_real_outputs_render(produced, name, kind):
    out = produced / f"{name}.png"
    result = render(PlotSpec(produced / name, kind, out))
    assert out.exists() and out.stat().st_size > 0
    if kind == KIND_HISTOGRAM:
        import csv as csv_mod

        with open(produced / name, newline="", encoding="utf-8") as handle:
            rows = list(csv_mod.reader(handle))
        if rows[0] == ["errors", "count"]:
            assert result.bars == [(int(a), int(b)) for a, b in rows[1:]]
