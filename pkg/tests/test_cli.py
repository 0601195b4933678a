import shutil

import pytest

from situp.cli import main
from situp.dataset import load_otb

from conftest import FIXTURES


@pytest.fixture(scope="module")
def two_seq_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("root")
    assert main(["synth", "--spec", str(FIXTURES / "static.spec"), "--out", str(root / "static")]) == 0
    short = root.parent / "short.spec"
    short.write_text((FIXTURES / "zoom.spec").read_text().replace("frames = 100", "frames = 12")
                     .replace("name = zoom", "name = zoom12"))
    assert main(["synth", "--spec", str(short), "--out", str(root / "zoom12")]) == 0
    return root


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0


@pytest.mark.parametrize("argv", [["track", "--bogus"], ["frobnicate"], []])
def test_usage_errors(argv):
    assert main(argv) == 1


def test_synth_round_trip(two_seq_root):
    seq = load_otb(two_seq_root / "static", check_frames=True)
    assert len(seq) == 20 and seq.attributes == {"IV"}


def test_track_writes_one_row_per_frame(two_seq_root, tmp_path):
    out = tmp_path / "t.txt"
    assert main(["track", "--seq", str(two_seq_root / "zoom12"), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "frame,x,y,w,h" and len(lines) == 13
    diag = (tmp_path / "t.txt.diag.csv").read_text().splitlines()
    assert len(diag) == 12 and diag[0].count("apce_") == 7


def test_track_singleton_pool_and_criterion(two_seq_root, tmp_path):
    out = tmp_path / "t.txt"
    assert main(["track", "--seq", str(two_seq_root / "zoom12"), "--out", str(out),
                 "--pool", "1.0", "--criterion", "maxresp"]) == 0
    widths = {line.split(",")[3] for line in out.read_text().splitlines()[1:]}
    assert widths == {"40"}


def test_track_missing_sequence(tmp_path):
    assert main(["track", "--seq", str(tmp_path / "nope"), "--out", str(tmp_path / "o")]) == 1


def test_eval_parallel_matches_serial(two_seq_root, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["eval", "--root", str(two_seq_root), "--out", str(a)]) == 0
    assert main(["eval", "--root", str(two_seq_root), "--out", str(b), "--parallel", "2"]) == 0
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert all((a / f).read_bytes() == (b / f).read_bytes() for f in files)
    rows = (a / "sequences.csv").read_text().splitlines()
    assert len(rows) == 3


def test_eval_attribute_slice(two_seq_root, tmp_path):
    assert main(["eval", "--root", str(two_seq_root), "--out", str(tmp_path), "--attr", "SV"]) == 0
    table = (tmp_path / "table.csv").read_text().splitlines()
    assert [r.split(",")[1] for r in table[1:]] == ["SV"]
    assert main(["eval", "--root", str(two_seq_root), "--out", str(tmp_path), "--attr", "OCC"]) == 1


def test_eval_skips_broken_sequence(two_seq_root, tmp_path):
    root = tmp_path / "root"
    shutil.copytree(two_seq_root, root)
    (root / "static" / "groundtruth_rect.txt").unlink()
    (root / "broken").mkdir()
    (root / "broken" / "groundtruth_rect.txt").write_text("1,1,5,5\n")
    assert main(["eval", "--root", str(root), "--out", str(tmp_path / "o")]) == 0
    assert len((tmp_path / "o" / "sequences.csv").read_text().splitlines()) == 2


def test_ablate_singleton_pool_traces_identical(tmp_path):
    short = tmp_path / "s.spec"
    short.write_text((FIXTURES / "zoom_occlusion.spec").read_text()
                     .replace("frames = 100", "frames = 8"))
    assert main(["ablate", "--seq", str(short), "--out", str(tmp_path), "--pool", "1.0"]) == 0
    rows = [r.split(",") for r in (tmp_path / "ablation.csv").read_text().splitlines()]
    assert rows[0] == ["frame", "iou_apce", "iou_maxresp", "scale_ratio_apce",
                       "scale_ratio_maxresp"]
    assert len(rows) == 9 and all(r[1] == r[2] and r[3] == r[4] for r in rows[1:])
