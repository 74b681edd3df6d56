from kponet.benchmark import run_benchmark


def test_benchmark_runs_and_checks_equivalence(capsys):
    result = run_benchmark(n_modes=3, levels=5, repeats=1)
    assert result["dim"] == 125
    assert result["numpy_s"] > 0.0
    out = capsys.readouterr().out
    assert "numpy backend" in out
    if "max_diff" in result:  # compiled extension present
        assert result["max_diff"] < 1e-12
        assert result["compiled_s"] > 0.0
