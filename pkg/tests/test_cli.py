import io
import subprocess
import sys

import pytest

from sukp.cli import main
from sukp.instance import SukpInstance, generate_instance, read_instance, write_instance


def call(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def small_file(tmp_path):
    path = tmp_path / "small.sukp"
    write_instance(generate_instance(8, 7, 0.35, 0.5, seed=2), path)
    return str(path)


def test_generate_default_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, text = call("generate", "--items", "100", "--elements", "85", "--density", "0.10",
                      "--ratio", "0.75", "--seed", "1")
    assert code == 0 and "sukp100_85_0.10_0.75.sukp" in text
    inst = read_instance(tmp_path / "sukp100_85_0.10_0.75.sukp")
    assert inst == generate_instance(100, 85, 0.10, 0.75, 1)


def test_generate_without_seed_prints_it(tmp_path):
    out = tmp_path / "x.sukp"
    code, text = call("generate", "--items", "5", "--elements", "5", "--density", "0.5",
                      "--ratio", "0.5", "--out", str(out))
    assert code == 0 and "(generated)" in text
    seed = int(text.split()[1])
    assert read_instance(out) == generate_instance(5, 5, 0.5, 0.5, seed)


def test_usage_errors_exit_1(tmp_path):
    with pytest.raises(SystemExit) as info:
        call("generate", "--elements", "5", "--density", "0.5", "--ratio", "0.5")
    assert info.value.code == 1
    code, _ = call("generate", "--items", "9", "--elements", "9", "--density", "0.01",
                   "--ratio", "0.5", "--seed", "1", "--out", str(tmp_path / "y"))
    assert code == 1
    with pytest.raises(SystemExit) as info:
        call("frobnicate")
    assert info.value.code == 1


def test_solve_single_item(tmp_path):
    path = tmp_path / "one.sukp"
    write_instance(SukpInstance([7], [3], [[True]], 3), path)
    code, text = call("solve", "--instance", str(path), "--seed", "0", "--popsize", "4")
    assert code == 0
    assert "run 0 seed" in text and "fitness 7 " in text
    assert "run 0 solution 1" in text


def test_solve_runs_summary_and_history(small_file, tmp_path):
    hist = tmp_path / "h.csv"
    code, text = call("solve", "--instance", small_file, "--runs", "5", "--seed", "3",
                      "--history", str(hist))
    assert code == 0
    assert sum(" fitness " in line for line in text.splitlines()) == 5
    assert "mfc: 180" in text  # 20 + 20 * max(8, 7)
    assert text.splitlines()[-1].startswith("summary best ")
    assert hist.read_text().startswith("run,evaluation,best_fitness\n0,1,")


def test_solve_element_mode(small_file):
    code, text = call("solve", "--instance", small_file, "--mode", "element", "--seed", "1",
                      "--mfc", "60", "--no-eos", "--no-sf")
    assert code == 0 and "repair: esro" in text


def test_solve_mismatched_repair_is_usage_error(small_file):
    code, _ = call("solve", "--instance", small_file, "--mode", "element", "--repair", "isro",
                   "--seed", "1")
    assert code == 1
    assert call("solve", "--instance", small_file, "--runs", "0", "--seed", "1")[0] == 1


def test_solve_bad_instance_exit_2(tmp_path):
    bad = tmp_path / "bad.sukp"
    bad.write_text("SUKP1\n1 1\n3\n5\n3\n0\n")
    assert call("solve", "--instance", str(bad), "--seed", "1")[0] == 2
    assert call("solve", "--instance", str(tmp_path / "missing"), "--seed", "1")[0] == 2


def test_oracle_methods_agree(small_file):
    _, brute = call("oracle", "--instance", small_file, "--method", "brute")
    _, bb = call("oracle", "--instance", small_file, "--method", "bb")
    assert brute.splitlines()[:2] == bb.splitlines()[:2]


def test_oracle_refuses_large(tmp_path):
    path = tmp_path / "big.sukp"
    write_instance(generate_instance(30, 30, 0.1, 0.5, seed=1), path)
    assert call("oracle", "--instance", str(path), "--method", "brute")[0] == 2


def test_oracle_zero_capacity(tmp_path):
    path = tmp_path / "zero.sukp"
    write_instance(SukpInstance.from_sets([3, 4], [1, 2], [[0], [1]], 0), path)
    code, text = call("oracle", "--instance", str(path))
    assert code == 0 and text.startswith("optimum 0\nwitness 00\n")


def test_bench_from_paper_means():
    code, text = call("bench", "--from-means", "paper")
    assert code == 0
    assert "I-DTLBO" in text and "nemenyi_cd 1.377" in text


def test_bench_from_means_file(tmp_path):
    csv = tmp_path / "m.csv"
    csv.write_text("instance,A,B\nx,3,1\ny,5,2\nz,4,4\n")
    code, text = call("bench", "--from-means", str(csv), "--out", str(tmp_path / "o"))
    assert code == 0 and (tmp_path / "o" / "ranks.csv").exists()


def test_bench_single_algorithm_has_no_ranks(tmp_path):
    code, text = call("bench", "--instance", "gen:6:6:0.4:0.5:1", "--instance", "gen:6:5:0.4:0.5:2",
                      "--algorithm", "I-DTLBO", "--runs", "2", "--seed", "0", "--popsize", "4",
                      "--out", str(tmp_path))
    assert code == 0 and "friedman" not in text
    assert not (tmp_path / "ranks.csv").exists()
    assert (tmp_path / "summary.csv").exists()


def test_bench_config(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(f"instances = gen:6:6:0.4:0.5:1, gen:7:6:0.4:0.5:2\n"
                   f"algorithms = I-DTLBO, S-DTLBO\nruns = 2\npopsize = 4\n"
                   f"output = {tmp_path / 'res'}\nformat = markdown\n")
    code, text = call("bench", "--config", str(cfg))
    assert code == 0 and "friedman" in text
    assert (tmp_path / "res" / "results.md").exists()


def test_bench_config_errors(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("instances = gen:6:6:0.4:0.5:1\nalgorithms = I-DTLBO\nruns = many\n")
    assert call("bench", "--config", str(cfg))[0] == 2
    assert call("bench", "--config", str(tmp_path / "nope"))[0] == 2
    assert call("bench", "--instance", "gen:6:6:0.4:0.5:1")[0] == 1


def test_stats_from_runs_csv(tmp_path):
    call("bench", "--instance", "gen:6:6:0.4:0.5:1", "--instance", "gen:6:5:0.4:0.5:2",
         "--algorithm", "I-DTLBO", "--algorithm", "S-TLBO", "--runs", "2", "--seed", "0",
         "--popsize", "4", "--out", str(tmp_path))
    code, text = call("stats", "--runs-csv", str(tmp_path / "runs.csv"))
    assert code == 0 and "S-TLBO" in text
    assert call("stats")[0] == 0
    assert call("stats", "--means", str(tmp_path / "missing.csv"))[0] == 2


def test_module_entry_point(small_file):
    proc = subprocess.run([sys.executable, "-m", "sukp", "oracle", "--instance", small_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("optimum ")
