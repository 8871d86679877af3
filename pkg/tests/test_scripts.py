import subprocess
import sys
from pathlib import Path

from biovalent.config import DEMO_CONFIG

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def _run(*args):
    return subprocess.run([sys.executable, *map(str, args)], capture_output=True, text=True, check=True).stdout


def test_fixture_generator_reproduces_bundled_tables(tmp_path):
    _run(SCRIPTS / "make_demo_fixture.py", "--out", tmp_path)
    bundled = DEMO_CONFIG.parent
    generated = sorted(p.name for p in tmp_path.iterdir())
    assert generated and all(p.suffix == ".csv" for p in tmp_path.iterdir())
    for name in generated:
        assert (tmp_path / name).read_bytes() == (bundled / name).read_bytes(), name


def test_reproduce_statement_script():
    out = _run(SCRIPTS / "reproduce_statement.py")
    assert "Total Expenses / Footprints" in out and "243 742" in out
    assert "-444 265" in out and "-9 091" in out


def test_offset_scenarios_script():
    out = _run(SCRIPTS / "offset_scenarios.py", "--horizons", "30")
    assert "68.79 nBDe" in out and "Brazil" in out
