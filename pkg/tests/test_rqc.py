"""Random circuit generator: determinism, structure, parseability."""

import pytest

from qcsim import parse_program
from qcsim.rqc import RqcConfig, generate_rqc, _layer_pairs


class TestStructure:
    def test_minimal_grid(self):
        text = generate_rqc(RqcConfig(1, 2, depth=1, seed=7))
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("%")]
        assert lines[0] == "QINIT 2"
        assert lines[1] == "H 0"
        assert lines[2] == "H 1"
        assert sum(1 for ln in lines if ln.startswith("CZ")) == 1

    def test_determinism(self):
        config = RqcConfig(2, 3, depth=8, seed=42)
        assert generate_rqc(config) == generate_rqc(config)

    def test_seed_changes_output(self):
        a = generate_rqc(RqcConfig(2, 3, depth=8, seed=1))
        b = generate_rqc(RqcConfig(2, 3, depth=8, seed=2))
        assert a != b

    def test_parses_cleanly(self):
        for seed in range(5):
            text = generate_rqc(RqcConfig(3, 3, depth=10, seed=seed, pmeasure=(0, 1)))
            prog = parse_program(text)
            assert prog.qubit_count == 9
            assert prog.instructions[-1].name == "PMEASURE"

    def test_cz_pairs_are_grid_adjacent(self):
        config = RqcConfig(3, 4, depth=12, seed=9)
        prog = parse_program(generate_rqc(config))
        for inst in prog.instructions:
            if inst.name == "CZ":
                a, b = inst.qubits
                dr, dc = divmod(b, 4)[0] - divmod(a, 4)[0], b % 4 - a % 4
                assert (abs(dr), abs(dc)) in ((0, 1), (1, 0))

    def test_no_qubit_touched_twice_per_layer(self):
        config = RqcConfig(3, 4, depth=9, seed=3)
        for layer in range(config.depth):
            seen = set()
            for a, b in _layer_pairs(config, layer):
                assert a not in seen and b not in seen
                seen.update((a, b))

    def test_pattern_cycle(self):
        config = RqcConfig(3, 3, depth=4, seed=0)
        kinds = []
        for layer in range(4):
            pairs = _layer_pairs(config, layer)
            kinds.append("h" if all(b - a == 1 for a, b in pairs) else "v")
        assert kinds == ["h", "h", "v", "v"]

    def test_all_backends_agree_on_reference_config(self):
        from qcsim.graph import run_single
        from qcsim.partition import run_partial
        from qcsim.statevector import run_full

        prog = parse_program(generate_rqc(RqcConfig(2, 3, depth=8, seed=42)))
        full = run_full(prog).state.amplitudes
        targets = [format(i, "06b") for i in range(0, 64, 5)]
        partial = run_partial(prog, 3, targets)
        for t in targets:
            assert abs(partial[t] - full[int(t, 2)]) <= 1e-10
            assert abs(run_single(prog, "000000", t, 1) - full[int(t, 2)]) <= 1e-10

    def test_validation(self):
        with pytest.raises(ValueError):
            RqcConfig(1, 1, depth=1, seed=0)
        with pytest.raises(ValueError):
            RqcConfig(2, 2, depth=0, seed=0)
        with pytest.raises(ValueError):
            RqcConfig(2, 2, depth=1, seed=0, single_qubit_pool=("Q",))
