import pytest

from quantdet.experiment import (
    ConfigError,
    ExperimentSpec,
    load_config,
    parse_config,
    save_config,
    serialize_config,
)


def test_defaults():
    spec = ExperimentSpec()
    assert spec.n_rx == 16 and spec.snapshots == 8 and spec.noise_power == 2.0
    assert spec.detectors == ("1", "2", "3", "inf")
    assert spec.seed is None and spec.trials is None


def test_round_trip_is_exact():
    spec = ExperimentSpec(
        command="roc",
        q=2,
        snr_db=-14.0,
        pfa=0.012345678901234567,
        pfa_grid=(1e-4, 0.1),
        detectors=("2", "inf"),
        trials=12345,
        seed=99,
        out="roc.csv",
        stall_tol=1.0000000000000002e-09,
    )
    assert parse_config(serialize_config(spec)) == spec


def test_parse_comments_and_blanks():
    spec = parse_config(
        """
        # full-width comment
        command = theory
        pfa = 0.05   # trailing comment
        n_rx = 4
        """
    )
    assert spec.command == "theory"
    assert spec.pfa == 0.05
    assert spec.n_rx == 4


def test_parse_tuple_values():
    spec = parse_config("snr_grid_db = -16,-12,-8\ndetectors = 1, inf\n")
    assert spec.snr_grid_db == (-16.0, -12.0, -8.0)
    assert spec.detectors == ("1", "inf")


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match="line 2.*swarm_sz"):
        parse_config("command = roc\nswarm_sz = 50\n")


def test_duplicate_key_reports_line():
    with pytest.raises(ConfigError, match="line 3.*duplicate.*seed"):
        parse_config("command = roc\nseed = 1\nseed = 2\n")


def test_bad_value_reports_line():
    with pytest.raises(ConfigError, match="line 1.*trials"):
        parse_config("trials = soon\n")


def test_missing_equals_sign():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just some words\n")


def test_spec_validation():
    with pytest.raises(ConfigError):
        ExperimentSpec(command="explode")
    with pytest.raises(ConfigError):
        ExperimentSpec(trials=0)
    with pytest.raises(ConfigError):
        ExperimentSpec(pfa=0.0)
    with pytest.raises(ConfigError):
        ExperimentSpec(pfa=1.0)
    with pytest.raises(ConfigError):
        ExperimentSpec(q=0)
    with pytest.raises(ConfigError):
        ExperimentSpec(workers=0)


def test_file_round_trip(tmp_path):
    spec = ExperimentSpec(command="pd-snr", snr_grid_db=(-20.0, -14.5), seed=7)
    path = tmp_path / "exp.cfg"
    save_config(spec, path)
    assert load_config(path) == spec


def test_none_fields_omitted():
    text = serialize_config(ExperimentSpec())
    assert "seed" not in text
    assert "command" not in text
    assert "n_rx = 16" in text
