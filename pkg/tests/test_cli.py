"""Command-line front end: golden run, formatting, error paths, reports."""

import math

import numpy as np
import pytest

from qcsim.cli import (
    format_amplitude,
    format_pmeasure,
    load_state,
    main,
    save_state,
)
from qcsim.statevector import run_full
from qcsim import parse_program

from conftest import DATA_DIR

GOLDEN_TABLE = {
    "000": 0.820082,
    "001": 0.0,
    "010": 0.106694,
    "011": 0.0,
    "100": 0.0549175,
    "101": 0.0,
    "110": 0.0183058,
    "111": 0.0,
}


def read_table(path):
    out = {}
    for line in path.read_text().splitlines():
        if ":" in line:
            key, value = line.split(":")
            out[key.strip()] = float(value)
    return out


class TestFormatting:
    def test_exact_zero_prints_bare(self):
        text = format_pmeasure(np.array([1.0, 0.0]))
        assert text == "0: 1\n1: 0"

    def test_six_significant_digits(self):
        text = format_pmeasure(np.array([0.82008253, 0.17991747]))
        assert text.splitlines()[0] == "0: 0.820083"

    def test_uniform_pair(self):
        assert format_pmeasure(np.array([0.5, 0.5])) == "0: 0.5\n1: 0.5"

    def test_sum_warning(self):
        warnings = []
        format_pmeasure(np.array([0.7, 0.1]), warn=warnings.append)
        assert warnings

    def test_amplitude_format(self):
        assert format_amplitude(1 / math.sqrt(2) + 0j) == "0.707107+0.000000i"
        assert format_amplitude(0.5 - 0.25j) == "0.500000-0.250000i"


class TestRunFullMode:
    def test_golden_output(self, tmp_path):
        out = tmp_path / "out.txt"
        code = main(["run", str(DATA_DIR / "golden.qprog"), "--out", str(out)])
        assert code == 0
        table = read_table(out)
        assert set(table) == set(GOLDEN_TABLE)
        for key, want in GOLDEN_TABLE.items():
            assert abs(table[key] - want) <= 1e-4, key

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        script = str(DATA_DIR / "golden.qprog")
        main(["run", script, "--seed", "9", "--out", str(a)])
        main(["run", script, "--seed", "9", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_error_path_exit_code_and_log(self, tmp_path):
        bad = tmp_path / "bad.qprog"
        bad.write_text("QINIT 2\nH 0\nH 9\n")
        log = tmp_path / "log.txt"
        code = main(["run", str(bad), "--log", str(log)])
        assert code == 2
        assert "QubitOutOfRange" in log.read_text()
        assert "(line 3)" in log.read_text()

    def test_resource_error_exit_code(self, tmp_path):
        big = tmp_path / "big.qprog"
        big.write_text("QINIT 31\nH 0\n")
        assert main(["run", str(big), "--out", str(tmp_path / "o.txt")]) == 3

    def test_measure_creg_output(self, tmp_path):
        script = tmp_path / "m.qprog"
        script.write_text("QINIT 1\nCREG 1\nX 0\nMEASURE 0,$0\n")
        out = tmp_path / "out.txt"
        main(["run", str(script), "--out", str(out)])
        assert "creg 0: 1" in out.read_text()

    def test_noise_flag(self, tmp_path):
        script = tmp_path / "n.qprog"
        script.write_text("QINIT 1\nX 0\nPMEASURE 0\n")
        out = tmp_path / "out.txt"
        code = main([
            "run", str(script), "--noise", "bitflip:0.25", "--seed", "3",
            "--out", str(out),
        ])
        assert code == 0
        table = read_table(out)
        assert table["0"] in (0.0, 1.0)  # one trajectory collapses either way

    def test_bad_noise_spec(self, tmp_path):
        script = tmp_path / "n.qprog"
        script.write_text("QINIT 1\nX 0\n")
        assert main(["run", str(script), "--noise", "bitflip:7"]) == 2


class TestPartialMode:
    def test_targets_inline(self, tmp_path):
        script = tmp_path / "p.qprog"
        script.write_text("QINIT 2\nH 0\nCZ 0,1\n")
        out = tmp_path / "out.txt"
        code = main([
            "run", str(script), "--mode", "partial", "--targets", "00,01",
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "00: 0.707107+0.000000i"
        assert lines[1] == "01: 0.707107+0.000000i"

    def test_targets_file(self, tmp_path):
        script = tmp_path / "p.qprog"
        script.write_text("QINIT 4\nH 0\nH 2\nCNOT 2,3\n")
        targets = tmp_path / "targets.txt"
        targets.write_text("0000\n1100\n")
        out = tmp_path / "out.txt"
        code = main([
            "run", str(script), "--mode", "partial", "--targets", str(targets),
            "--cut", "2", "--out", str(out),
        ])
        assert code == 0
        assert len(out.read_text().splitlines()) == 2

    def test_missing_targets(self, tmp_path):
        script = tmp_path / "p.qprog"
        script.write_text("QINIT 2\nH 0\n")
        assert main(["run", str(script), "--mode", "partial"]) == 2

    def test_uncuttable_exit(self, tmp_path):
        script = tmp_path / "p.qprog"
        script.write_text("QINIT 2\nSWAP 0,1\n")
        code = main([
            "run", str(script), "--mode", "partial", "--targets", "00",
        ])
        assert code == 2


class TestSingleMode:
    def test_ghz_amplitude(self, tmp_path):
        script = tmp_path / "ghz.qprog"
        script.write_text("QINIT 3\nH 0\nCNOT 0,1\nCNOT 1,2\n")
        out = tmp_path / "out.txt"
        code = main([
            "run", str(script), "--mode", "single", "--out-bits", "111",
            "--out", str(out),
        ])
        assert code == 0
        assert out.read_text() == "amplitude: 0.707107+0.000000i\n"

    def test_in_bits_default_zero(self, tmp_path):
        script = tmp_path / "s.qprog"
        script.write_text("QINIT 2\nX 0\nX 1\n")
        out = tmp_path / "out.txt"
        main(["run", str(script), "--mode", "single", "--out-bits", "11",
              "--out", str(out)])
        assert out.read_text().startswith("amplitude: 1.000000")

    def test_split_n_flag(self, tmp_path):
        script = tmp_path / "s.qprog"
        script.write_text("QINIT 3\nH 0\nH 1\nH 2\nCZ 0,1\nCZ 1,2\n")
        outs = []
        for n in ("0", "2"):
            out = tmp_path / f"out{n}.txt"
            main(["run", str(script), "--mode", "single", "--out-bits", "101",
                  "--split-n", n, "--out", str(out)])
            outs.append(out.read_text())
        assert outs[0] == outs[1]


class TestStateDump:
    def test_round_trip(self, tmp_path):
        prog = parse_program("QINIT 3\nH 0\nCNOT 0,1\nT 2\n")
        state = run_full(prog).state
        path = tmp_path / "state.bin"
        save_state(state, path)
        loaded = load_state(path)
        assert loaded.qubit_count == 3
        assert np.array_equal(loaded.amplitudes, state.amplitudes)
        assert path.stat().st_size == 16 + 16 * 8

    def test_dump_flag(self, tmp_path):
        script = tmp_path / "d.qprog"
        script.write_text("QINIT 2\nH 0\n")
        dump = tmp_path / "state.bin"
        main(["run", str(script), "--dump-state", str(dump),
              "--out", str(tmp_path / "o.txt")])
        st = load_state(dump)
        assert st.amplitudes[0] == pytest.approx(1 / math.sqrt(2))


ERROR_CORPUS = [
    # (script, extra cli flags, expected error class, expected exit code)
    ("missing_qinit.qprog", [], "MissingQinit", 2),
    ("unknown_mnemonic.qprog", [], "UnknownMnemonic", 2),
    ("qubit_out_of_range.qprog", [], "QubitOutOfRange", 2),
    ("creg_out_of_range.qprog", [], "CregOutOfRange", 2),
    ("duplicate_qubit.qprog", [], "DuplicateQubitArg", 2),
    ("unbalanced_block.qprog", [], "UnbalancedBlock", 2),
    ("malformed_angle.qprog", [], "MalformedAngle", 2),
    ("measure_inside_dagger.qprog", [], "MeasureInsideDagger", 2),
    ("measure_inside_control.qprog", [], "MeasureInsideControl", 2),
    ("control_collision.qprog", [], "ControlQubitCollision", 2),
    ("non_unitary_u4.qprog", [], "NonUnitaryU4", 2),
    ("too_many_qubits.qprog", [], "TooManyQubits", 3),
    ("uncuttable.qprog", ["--mode", "partial", "--targets", "00"], "UncuttableGate", 2),
    ("branch_explosion.qprog", ["--mode", "partial", "--targets", "00"], "BranchExplosion", 3),
    ("unsupported_single.qprog", ["--mode", "single", "--out-bits", "000"], "UnsupportedGate", 2),
]


class TestErrorCorpus:
    @pytest.mark.parametrize("name,flags,error,code", ERROR_CORPUS)
    def test_corpus_script(self, tmp_path, name, flags, error, code):
        log = tmp_path / "log.txt"
        script = DATA_DIR / "errors" / name
        got = main(["run", str(script), *flags, "--log", str(log)])
        assert got == code
        assert error in log.read_text()


class TestRqcCommand:
    def test_writes_program(self, tmp_path):
        out = tmp_path / "c.qprog"
        code = main(["rqc", "--rows", "2", "--cols", "3", "--depth", "4",
                     "--seed", "5", "--out", str(out)])
        assert code == 0
        prog = parse_program(out.read_text())
        assert prog.qubit_count == 6

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.qprog", tmp_path / "b.qprog"
        args = ["rqc", "--rows", "1", "--cols", "4", "--depth", "6", "--seed", "1"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestQfbeCommand:
    def test_arctan(self, capsys):
        assert main(["qfbe", "arctan", "1", "--bits", "4"]) == 0
        out = capsys.readouterr().out
        assert "digits: 0.0100" in out
        assert "value: 0.25" in out

    def test_cos_reference(self, capsys):
        assert main(["qfbe", "cos", "0.75", "--bits", "3", "--int-bits", "2"]) == 0
        out = capsys.readouterr().out
        assert "bits: 11.011" in out
        assert "value: -0.625" in out

    def test_domain_error_exit(self, capsys):
        assert main(["qfbe", "log2", "-1", "--bits", "4"]) == 4


class TestReportCommand:
    def test_renders_csv_and_figure(self, tmp_path):
        code = main([
            "report", str(DATA_DIR / "golden.qprog"), "--out-dir", str(tmp_path),
        ])
        assert code == 0
        csv_path = tmp_path / "golden.csv"
        png_path = tmp_path / "golden.png"
        txt_path = tmp_path / "golden.txt"
        assert csv_path.exists() and png_path.exists() and txt_path.exists()
        rows = csv_path.read_text().splitlines()
        assert rows[0] == "bitstring,probability"
        assert len(rows) == 9
        first = rows[1].split(",")
        assert first[0] == "000"
        assert abs(float(first[1]) - GOLDEN_TABLE["000"]) <= 1e-4
        assert png_path.stat().st_size > 1000
