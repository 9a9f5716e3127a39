"""Tests for configs, CSV output, IDX files, datasets, EMC, and the CLI."""

import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from descentlab.errors import ConfigError, FormatError, InvalidInput
from descentlab.harness.cli import main
from descentlab.harness.config import (
    EXPERIMENTS,
    effective_config_lines,
    load_config,
    parse_config_text,
)
from descentlab.harness.csvio import format_value, read_rows, write_csv
from descentlab.harness.datasets import (
    load_idx,
    load_mnist_split,
    make_synthetic_regression,
    mnist_available,
    one_hot,
    stratified_indices,
    write_idx,
)
from descentlab.harness.emc import emc_scan, estimate_emc, min_norm_linear_procedure
from descentlab.seeding import substream


# ------------------------------------------------------------------ config


def test_parse_config_text_basics():
    raw = parse_config_text(
        """
        # a comment
        experiment = polyfit

        degree = 12
        """
    )
    assert raw == {"experiment": "polyfit", "degree": "12"}


def test_parse_config_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_config_text("no equals sign here")
    with pytest.raises(ConfigError):
        parse_config_text("= value")
    with pytest.raises(ConfigError):
        parse_config_text("a = 1\na = 2")


def test_load_config_applies_defaults(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("experiment = sparse-risk\nseed = 3\ntrials = 7\n")
    config = load_config(path)
    assert config.experiment == "sparse-risk"
    assert config.seed == 3
    assert config.parameters["trials"] == 7
    assert config.parameters["d"] == 100  # schema default
    assert config.output_path == "sparse-risk.csv"


def test_load_config_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("experiment = emc\nseed = 3\noutput = a.csv\n")
    config = load_config(path, seed=99, output="b.csv")
    assert config.seed == 99
    assert config.output_path == "b.csv"


def test_load_config_rejections(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("experiment = polyfit\nwrong_key = 1\n")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text("experiment = polyfit\n")
    with pytest.raises(ConfigError):
        load_config(path, experiment="emc")  # experiment mismatch
    path.write_text("degree = 3\n")
    with pytest.raises(ConfigError):
        load_config(path)  # no experiment named anywhere
    path.write_text("experiment = nonsense\n")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text("experiment = polyfit\ndegree = abc\n")
    with pytest.raises(ConfigError):
        load_config(path)
    path.write_text("experiment = polyfit\nvia = magic\n")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_effective_lines_round_trip(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("experiment = emc\nseed = 11\nn_grid = 4, 8, 12\n")
    config = load_config(path)
    lines = effective_config_lines(config)
    assert lines[0] == "experiment = emc"
    assert "seed = 11" in lines
    assert "n_grid = 4, 8, 12" in lines
    # Echoed lines parse back to the identical effective config.
    reparsed_path = tmp_path / "echo.cfg"
    reparsed_path.write_text("\n".join(lines) + "\n")
    again = load_config(reparsed_path)
    assert again.parameters == config.parameters
    assert again.seed == config.seed


def test_every_experiment_has_runnable_defaults(tmp_path):
    for name in EXPERIMENTS:
        path = tmp_path / f"{name}.cfg"
        path.write_text(f"experiment = {name}\n")
        config = load_config(path)
        assert config.experiment == name
        assert effective_config_lines(config)


# --------------------------------------------------------------------- CSV


def test_format_value_forms():
    assert format_value(3) == "3"
    assert format_value(np.int64(-2)) == "-2"
    assert format_value(True) == "1"
    assert format_value(False) == "0"
    assert format_value(0.1) == "0.1"
    assert format_value(np.float64(0.1)) == "0.1"
    assert format_value(math.inf) == "inf"
    assert format_value(-math.inf) == "-inf"
    assert format_value("label") == "label"


@settings(max_examples=100, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_value_round_trips_floats(x):
    assert float(format_value(x)) == x


def test_write_read_round_trip(tmp_path):
    path = tmp_path / "out.csv"
    rows = [(1, 0.5, "a"), (2, math.inf, "b")]
    write_csv(path, ["seed = 7"], ("k", "v", "tag"), rows, trailing_comments=("emc = 2",))
    comments, columns, got = read_rows(path)
    assert comments == ["seed = 7", "emc = 2"]
    assert columns == ["k", "v", "tag"]
    assert got == [["1", "0.5", "a"], ["2", "inf", "b"]]


def test_write_csv_is_atomic_and_leaves_no_temp_files(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, [], ("a",), [(1,)])
    write_csv(path, [], ("a",), [(2,)])  # overwrite
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
    assert read_rows(path)[2] == [["2"]]


# --------------------------------------------------------------------- IDX


def test_idx_round_trip(tmp_path):
    labels = np.arange(10, dtype=np.uint8)
    images = substream(81, "idx-images").integers(0, 256, size=(4, 3, 5)).astype(np.uint8)
    lp, ip = tmp_path / "labels.idx", tmp_path / "images.idx"
    write_idx(lp, labels)
    write_idx(ip, images)
    np.testing.assert_array_equal(load_idx(lp), labels)
    np.testing.assert_array_equal(load_idx(ip), images)


def test_idx_rejects_malformed_files(tmp_path):
    bad_magic = tmp_path / "bad_magic.idx"
    bad_magic.write_bytes(b"\x00\x00\x0d\x01" + b"\x00" * 8)
    with pytest.raises(FormatError):
        load_idx(bad_magic)

    truncated = tmp_path / "truncated.idx"
    write_idx(truncated, np.zeros(10, dtype=np.uint8))
    data = truncated.read_bytes()
    truncated.write_bytes(data[:-3])  # payload shorter than the header says
    with pytest.raises(FormatError):
        load_idx(truncated)

    headerless = tmp_path / "headerless.idx"
    headerless.write_bytes(b"\x00\x00")
    with pytest.raises(FormatError):
        load_idx(headerless)

    with pytest.raises(InvalidInput):
        write_idx(tmp_path / "x.idx", np.zeros((2, 2), dtype=np.uint8))


def _write_fake_mnist(directory, dotted=False):
    rng = substream(82, "fake-mnist")
    sep = "." if dotted else "-"
    spec = {
        f"train-images{sep}idx3-ubyte": rng.integers(0, 256, (60, 4, 4)),
        f"train-labels{sep}idx1-ubyte": np.repeat(np.arange(10), 6),
        f"t10k-images{sep}idx3-ubyte": rng.integers(0, 256, (30, 4, 4)),
        f"t10k-labels{sep}idx1-ubyte": np.repeat(np.arange(10), 3),
    }
    for name, arr in spec.items():
        write_idx(os.path.join(directory, name), arr.astype(np.uint8))


def test_mnist_availability_and_loading(tmp_path, monkeypatch):
    empty = tmp_path / "empty"
    empty.mkdir()
    monkeypatch.setenv("DESCENTLAB_DATA", str(empty))
    assert not mnist_available()
    with pytest.raises(FormatError):
        load_mnist_split(10, 5, seed=0)

    filled = tmp_path / "filled"
    filled.mkdir()
    _write_fake_mnist(filled)
    monkeypatch.setenv("DESCENTLAB_DATA", str(filled))
    assert mnist_available()
    ds = load_mnist_split(20, 10, seed=5)
    assert ds.x_train.shape == (20, 16)
    assert ds.x_test.shape == (10, 16)
    assert ds.x_train.min() >= 0.0 and ds.x_train.max() <= 1.0
    # Stratified: two training samples of each digit.
    values, counts = np.unique(ds.y_train, return_counts=True)
    assert list(values) == list(range(10))
    assert np.all(counts == 2)


def test_mnist_dotted_filenames_are_found(tmp_path):
    _write_fake_mnist(tmp_path, dotted=True)
    assert mnist_available(str(tmp_path))


# ---------------------------------------------------------------- datasets


def test_one_hot_encoding():
    out = one_hot(np.array([0, 2, 1]), n_classes=4)
    np.testing.assert_array_equal(
        out, [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0]]
    )
    assert one_hot(np.array([1, 3])).shape == (2, 4)
    with pytest.raises(InvalidInput):
        one_hot(np.array([-1]))


def test_stratified_indices_balance():
    labels = np.repeat(np.arange(5), 20)
    idx = stratified_indices(labels, 17, substream(83, "strat"))
    assert idx.size == 17
    counts = np.bincount(labels[idx], minlength=5)
    assert counts.max() - counts.min() <= 1
    with pytest.raises(InvalidInput):
        stratified_indices(np.array([0, 1]), 5, substream(83, "strat"))


def test_synthetic_regression_kinds():
    params = {"n_train": 30, "n_test": 10, "input_dim": 4, "n_centers": 6}
    ds = make_synthetic_regression("rkhs-target", params, seed=84)
    assert ds.x_train.shape == (30, 4)
    assert ds.x_test.shape == (10, 4)
    again = make_synthetic_regression("rkhs-target", params, seed=84)
    np.testing.assert_array_equal(ds.features, again.features)
    np.testing.assert_array_equal(ds.labels, again.labels)

    lin = make_synthetic_regression(
        "gaussian-linear", {"n_train": 20, "n_test": 5, "input_dim": 3}, seed=84
    )
    assert lin.x_train.shape == (20, 3)

    with pytest.raises(InvalidInput):
        make_synthetic_regression("polynomial", params, seed=84)


def test_rkhs_target_labels_are_bounded():
    params = {"n_train": 50, "n_test": 0, "input_dim": 3, "n_centers": 8}
    ds = make_synthetic_regression("rkhs-target", params, seed=85)
    # |y| <= sum_k |alpha_k| since each kernel value is in (0, 1].
    alpha = substream(85, "rkhs-target")
    alpha.uniform(0.0, 1.0, size=(8, 3))  # skip the centers draw
    bound = np.sum(np.abs(alpha.standard_normal(8)))
    assert np.max(np.abs(ds.labels)) <= bound


# --------------------------------------------------------------------- EMC


def test_emc_grid_validation():
    def proc(x, y):
        return 0.0

    def sample(n, rng):
        return np.zeros((n, 1)), np.zeros(n)

    with pytest.raises(InvalidInput):
        emc_scan(proc, sample, 1e-6, (), 1, seed=0)
    with pytest.raises(InvalidInput):
        emc_scan(proc, sample, 1e-6, (5, 5), 1, seed=0)
    with pytest.raises(InvalidInput):
        emc_scan(proc, sample, 1e-6, (5, 4), 1, seed=0)
    with pytest.raises(InvalidInput):
        emc_scan(proc, sample, -1.0, (5,), 1, seed=0)


def test_emc_perfect_procedure_reaches_grid_end():
    emc, points = emc_scan(
        lambda x, y: 0.0,
        lambda n, rng: (np.zeros((n, 1)), np.zeros(n)),
        1e-9,
        (2, 4, 8),
        trials=2,
        seed=0,
    )
    assert emc == 8
    assert [p.n for p in points] == [2, 4, 8]
    assert all(p.interpolates for p in points)


def test_emc_early_exit_on_first_failure():
    emc, points = emc_scan(
        lambda x, y: 1.0,
        lambda n, rng: (np.zeros((n, 1)), np.zeros(n)),
        1e-9,
        (2, 4, 8),
        trials=2,
        seed=0,
    )
    assert emc == 0
    assert [p.n for p in points] == [2]
    assert not points[0].interpolates


def test_emc_of_min_norm_linear_is_the_dimension():
    d = 10
    w = np.ones(d) / math.sqrt(d)

    def sample(n, rng):
        x = rng.standard_normal((n, d))
        return x, x @ w + 0.1 * rng.standard_normal(n)

    emc = estimate_emc(
        min_norm_linear_procedure, sample, 1e-6, (5, 10, 11, 15), trials=4, seed=86
    )
    assert emc == d


# --------------------------------------------------------------------- CLI


def _cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_validate_prints_effective_config(tmp_path, capsys):
    path = _cfg(tmp_path, "experiment = polyfit\nseed = 4\n")
    assert main(["validate", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "experiment = polyfit" in out
    assert "seed = 4" in out
    assert "degree = 20" in out


def test_cli_config_errors_exit_2(tmp_path, capsys):
    bad = _cfg(tmp_path, "experiment = polyfit\nnope = 1\n")
    assert main(["validate", "--config", bad]) == 2
    assert main(["polyfit", "--config", str(tmp_path / "missing.cfg")]) == 2
    mismatch = _cfg(tmp_path, "experiment = polyfit\n", name="m.cfg")
    assert main(["emc", "--config", mismatch]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["not-an-experiment", "--config", bad])
    assert exc.value.code == 2


def test_cli_runs_polyfit_end_to_end(tmp_path, capsys):
    cfg = _cfg(tmp_path, "experiment = polyfit\nseed = 5\ngrid_points = 32\nn = 10\ndegree = 12\n")
    out = tmp_path / "fit.csv"
    assert main(["polyfit", "--config", cfg, "--out", str(out)]) == 0
    assert f"wrote {out}" in capsys.readouterr().out
    comments, columns, rows = read_rows(out)
    assert columns == ["x", "truth", "prediction"]
    assert len(rows) == 32
    assert "grid_points = 32" in comments
    # Every comment line is itself a parseable config line.
    parse_config_text("\n".join(comments[: len(comments)]))


def test_cli_seed_override_changes_output(tmp_path):
    cfg = _cfg(tmp_path, "experiment = polyfit\ngrid_points = 16\nn = 8\ndegree = 5\n")
    a, b, c = (str(tmp_path / f"{k}.csv") for k in "abc")
    main(["polyfit", "--config", cfg, "--seed", "1", "--out", a])
    main(["polyfit", "--config", cfg, "--seed", "1", "--out", b])
    main(["polyfit", "--config", cfg, "--seed", "2", "--out", c])
    with open(a, "rb") as fa, open(b, "rb") as fb, open(c, "rb") as fc:
        bytes_a, bytes_b, bytes_c = fa.read(), fb.read(), fc.read()
    assert bytes_a == bytes_b
    assert bytes_a != bytes_c


def test_cli_emc_run_reports_trailing_value(tmp_path):
    cfg = _cfg(
        tmp_path,
        "experiment = emc\nseed = 6\nd = 8\nn_grid = 4, 8, 9, 12\ntrials = 2\n",
    )
    out = tmp_path / "emc.csv"
    assert main(["emc", "--config", cfg, "--out", str(out)]) == 0
    comments, columns, rows = read_rows(out)
    assert comments[-1] == "emc = 8"
    assert columns == ["n", "mean_train_error", "interpolates"]
    # Early exit: the scan stops at n = 9, never visiting 12.
    assert [r[0] for r in rows] == ["4", "8", "9"]
    assert [r[2] for r in rows] == ["1", "1", "0"]
