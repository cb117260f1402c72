import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).parent.parent / "scripts"


def run_script(name, *args):
    return subprocess.run(
        [sys.executable, str(SCRIPTS / name), *args],
        capture_output=True,
        text=True,
        timeout=120,
    )


def test_end_to_end_demo_small():
    proc = run_script(
        "end_to_end_demo.py", "--n-train", "200", "--n-test", "80", "--d", "8"
    )
    assert proc.returncode == 0, proc.stderr
    assert "accuracy:" in proc.stdout


def test_mode_ablation_small():
    proc = run_script("mode_ablation.py", "--sizes", "200", "2000", "--cap", "1000")
    assert proc.returncode == 0, proc.stderr
    assert "MATERIALIZATION_CAP_EXCEEDED" in proc.stdout  # force-local at 2000 rows
    assert proc.stdout.count("ok, count=") >= 4
