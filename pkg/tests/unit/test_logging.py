import logging

import pytest

from pprnet.logging.trace_logger import EpochRecord, TraceLogger
from pprnet.logging.utility_functions import (
    pprnet_log,
    register_file_log,
    register_stream_log,
)

RECORD = EpochRecord(
    network="IN-2",
    epoch=3,
    train_loss=0.123456789,
    validation_loss=float("nan"),
    train_accuracy=0.5,
    duration=1.25,
)


@pytest.fixture
def clean_handlers():
    before = list(pprnet_log.handlers)
    yield
    for handler in list(pprnet_log.handlers):
        if handler not in before:
            handler.close()
            pprnet_log.removeHandler(handler)


def test_trace_logger_writes_header_and_records(tmp_path):
    path = str(tmp_path / "trace.csv")
    trace = TraceLogger(path)
    trace.log_epoch(RECORD)

    with open(path) as fh:
        header, row = fh.read().splitlines()
    assert header == ";".join(EpochRecord._fields)
    assert row == "IN-2;3;0.12345679;nan;0.5;1.25"


def test_trace_logger_custom_fields(tmp_path):
    path = str(tmp_path / "trace.csv")
    trace = TraceLogger(
        path,
        separator=",",
        fields={"net": lambda r: r.network},
        extra_fields={"fold": lambda r: "P07"},
    )
    trace.log_epoch(RECORD)
    with open(path) as fh:
        assert fh.read() == "net,fold\nIN-2,P07\n"


def test_register_stream_log_replaces_previous_handler(clean_handlers):
    register_stream_log(logging.INFO)
    register_stream_log(logging.WARNING)
    tagged = [h for h in pprnet_log.handlers if hasattr(h, "tag")]
    assert len(tagged) == 1
    assert tagged[0].level == logging.WARNING


def test_register_file_log(tmp_path, clean_handlers):
    log_file = register_file_log(str(tmp_path / "logs"))
    logging.getLogger("pprnet.networks").debug("first epoch done")
    for handler in pprnet_log.handlers:
        handler.flush()

    with open(log_file) as fh:
        content = fh.read()
    assert "pprnet.networks] first epoch done" in content
