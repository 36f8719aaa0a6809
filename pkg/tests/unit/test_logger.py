import json

import pytest

from rdplab import LoggerConfig, configure_logger, logger
from rdplab.logger import METRIC_LEVEL, log_metrics


@pytest.fixture(autouse=True)
def reset_logger():
    logger.remove()
    yield
    logger.remove()
    logger.enable("rdplab")


@pytest.mark.unit
def test_console_goes_to_stderr(capsys):
    configure_logger()
    logger.info("Info message")
    logger.debug("Debug message")

    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.count("Info message") == 1
    assert "Debug message" not in captured.err


@pytest.mark.unit
@pytest.mark.parametrize(
    "level,shown,hidden",
    [
        ("DEBUG", ["Debug message", "Info message"], []),
        ("WARNING", ["Warning message"], ["Info message"]),
        (METRIC_LEVEL, ["Error message"], ["Warning message"]),
    ],
)
def test_console_level(capsys, level, shown, hidden):
    configure_logger(LoggerConfig(console_log_level=level))
    logger.debug("Debug message")
    logger.info("Info message")
    logger.warning("Warning message")
    logger.error("Error message")

    err = capsys.readouterr().err
    assert all(err.count(message) == 1 for message in shown)
    assert all(message not in err for message in hidden)


@pytest.mark.unit
def test_metrics_survive_a_warning_console(capsys):
    configure_logger(LoggerConfig(console_log_level="WARNING"))
    logger.log(METRIC_LEVEL, "empirical_distortion=0.25")
    log_metrics("va n=2", rate=1.0000004, trials=500)
    logger.info("Info message")

    err = capsys.readouterr().err
    assert err.count("METRIC - empirical_distortion=0.25") == 1
    assert "METRIC - va n=2: rate=1 trials=500" in err
    assert "Info message" not in err


@pytest.mark.unit
def test_file_sink_writes_json_lines(capsys, tmp_path):
    log_file = tmp_path / "rdplab.log"
    configure_logger(
        LoggerConfig(
            console_log_level="ERROR", log_file=str(log_file), log_file_level="INFO"
        )
    )
    logger.info("Info message")
    logger.error("Error message")

    err = capsys.readouterr().err
    assert "Info message" not in err
    assert err.count("Error message") == 1

    records = [json.loads(line) for line in log_file.read_text().splitlines()]
    assert [record["record"]["message"] for record in records] == [
        "Info message",
        "Error message",
    ]


@pytest.mark.unit
def test_environment_overrides(monkeypatch, capsys, tmp_path):
    monkeypatch.setenv("RDPLAB_LOG_LEVEL", "error")
    monkeypatch.setenv("RDPLAB_LOG_FILE", str(tmp_path / "env.log"))
    monkeypatch.setenv("RDPLAB_LOG_FILE_LEVEL", "debug")

    configure_logger(LoggerConfig(console_log_level="DEBUG"))
    logger.debug("Debug message")
    logger.info("Info message")
    logger.error("Error message")

    err = capsys.readouterr().err
    assert "Info message" not in err
    assert err.count("Error message") == 1

    contents = (tmp_path / "env.log").read_text()
    assert contents.count('"message": "Debug message"') == 1
    assert contents.count('"message": "Error message"') == 1


@pytest.mark.unit
def test_environment_disables_logging(monkeypatch, capsys):
    monkeypatch.setenv("RDPLAB_LOG_DISABLED", "true")

    configure_logger(LoggerConfig())
    logger.error("Error message")

    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err == ""
