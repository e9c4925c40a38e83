import logging
import time

import pytest

from pprnet.utilities.generic.timekeeper import TimeKeeper


def _time_approx(seconds: int):
    return pytest.approx(seconds, abs=0.5)


def test_timekeeper_stopwatch_normal_behavior():
    """Normal stopwatch functionality for stopwatch returned by context manager."""
    timekeeper = TimeKeeper()
    with timekeeper.start_activity("tune", time_limit=3) as sw:
        assert _time_approx(0) == sw.elapsed_time
        assert timekeeper.current_stage.name == "tune"
        assert _time_approx(3) == timekeeper.current_stage.time_left
        time.sleep(1)
        assert _time_approx(1) == sw.elapsed_time
        assert _time_approx(2) == timekeeper.current_stage.time_left
        assert not timekeeper.current_stage.exceeded_limit()

    time.sleep(1)
    assert _time_approx(1) == sw.elapsed_time
    assert timekeeper.current_stage is None


def test_timekeeper_durations_sum_repeated_stages():
    timekeeper = TimeKeeper()
    for _ in range(2):
        with timekeeper.start_activity("fold"):
            time.sleep(0.5)
    with timekeeper.start_activity("report"):
        pass

    assert [stage.name for stage in timekeeper.stages] == ["fold", "fold", "report"]
    assert _time_approx(1) == timekeeper.durations["fold"]
    assert _time_approx(0) == timekeeper.durations["report"]


def test_timekeeper_nested_stages_restore_outer_stage():
    timekeeper = TimeKeeper()
    with timekeeper.start_activity("exp2"):
        with timekeeper.start_activity("augment"):
            assert timekeeper.current_stage.name == "augment"
        assert timekeeper.current_stage.name == "exp2"


def test_timekeeper_logs_start_stop_and_exceeded_limit(caplog):
    timekeeper = TimeKeeper()
    with caplog.at_level(logging.INFO, logger="pprnet"):
        with timekeeper.start_activity("pretrain", time_limit=0, activity_meta=[5]):
            time.sleep(0.1)

    assert "START: pretrain 5" in caplog.text
    assert "STOP: pretrain 5 after" in caplog.text
    assert "exceeded its time limit of 0s" in caplog.text
    assert timekeeper.stages[-1].exceeded_limit()


def test_stage_without_limit():
    timekeeper = TimeKeeper()
    with timekeeper.start_activity("report"):
        stage = timekeeper.current_stage
    assert not stage.exceeded_limit()
    with pytest.raises(TypeError):
        _ = stage.time_left
