"""Tests for JSON logging setup."""
import json
import logging

from oamsim.utils.logger import ROOT_LOGGER, add_file_handler, setup_logger


class _Recorder(logging.Handler):
    def __init__(self):
        super().__init__()
        self.records = []

    def emit(self, record):
        self.records.append(record)


def test_module_loggers_have_no_handlers_of_their_own():
    child = setup_logger("oamsim.analysis.oracle")
    setup_logger("oamsim.analysis.oracle")
    assert child.handlers == []
    assert child.propagate
    package = logging.getLogger(ROOT_LOGGER)
    assert len([h for h in package.handlers if type(h) is logging.StreamHandler]) == 1


def test_module_record_reaches_package_handlers_once():
    package = logging.getLogger(ROOT_LOGGER)
    recorder = _Recorder()
    package.addHandler(recorder)
    try:
        setup_logger("oamsim.core.calibration").warning("Calibration started")
    finally:
        package.removeHandler(recorder)
    assert [r.getMessage() for r in recorder.records] == ["Calibration started"]


def test_file_handler_writes_json_lines(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    handler = add_file_handler(log_file)
    try:
        assert add_file_handler(log_file) is handler
        setup_logger("oamsim.core.orchestrator").info("Scenario started", extra={"seed": 7})
        handler.flush()
        lines = log_file.read_text(encoding="utf-8").splitlines()
    finally:
        logging.getLogger(ROOT_LOGGER).removeHandler(handler)
        handler.close()

    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record["message"] == "Scenario started"
    assert record["name"] == "oamsim.core.orchestrator"
    assert record["seed"] == 7
