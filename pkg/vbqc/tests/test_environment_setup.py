import pytest

from environment_setup import EnvironmentValidator, validate_and_setup_environment

VARIABLES = ("VBQC_SEED", "VBQC_BACKEND", "VBQC_WORKERS", "VBQC_OUT_DIR", "VBQC_VERBOSE")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for name in VARIABLES:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


def test_defaults_without_variables():
    env = validate_and_setup_environment()
    assert env.seed == 20240917
    assert env.backend == "statevector"
    assert env.workers == 4
    assert not env.verbose


def test_variables_override_defaults(monkeypatch, tmp_path):
    monkeypatch.setenv("VBQC_SEED", "7")
    monkeypatch.setenv("VBQC_BACKEND", " Frame ")
    monkeypatch.setenv("VBQC_WORKERS", "2")
    monkeypatch.setenv("VBQC_OUT_DIR", str(tmp_path))
    monkeypatch.setenv("VBQC_VERBOSE", "yes")
    env = validate_and_setup_environment()
    assert (env.seed, env.backend, env.workers) == (7, "frame", 2)
    assert env.verbose
    assert env.validate_output_dir()


@pytest.mark.parametrize(
    "name, value",
    [
        ("VBQC_SEED", "seven"),
        ("VBQC_SEED", "-1"),
        ("VBQC_BACKEND", "tensor"),
        ("VBQC_WORKERS", "0"),
        ("VBQC_WORKERS", "many"),
    ],
)
def test_bad_values_raise(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(RuntimeError):
        validate_and_setup_environment()


def test_missing_output_dir_is_created_later(tmp_path):
    validator = EnvironmentValidator()
    validator.out_dir = str(tmp_path / "reports")
    assert not validator.validate_output_dir()


def test_output_dir_that_is_a_file(tmp_path):
    target = tmp_path / "reports"
    target.write_text("", encoding="utf-8")
    validator = EnvironmentValidator()
    validator.out_dir = str(target)
    with pytest.raises(RuntimeError):
        validator.validate_output_dir()
