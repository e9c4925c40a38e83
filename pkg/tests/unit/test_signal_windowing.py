import numpy as np
import pytest

from pprnet.signal.recording import (
    AnnotationKind,
    AnnotationSpan,
    Label,
    PprType,
    Recording,
    Window,
    WindowingConfig,
)
from pprnet.signal.windowing import (
    anomaly_fraction,
    corpus_balance,
    label_window,
    normalize_window,
    segment_windows,
    window_count,
    windows_to_arrays,
)


def _window(start_s: float, rate: int = 500) -> Window:
    return Window(np.zeros((1, rate)), Label.NORMAL, "P01", start_s, rate)


@pytest.mark.parametrize(
    "duration_s, rate, overlap, expected",
    [(300, 500, 0.9, 2_991), (3_600, 256, 0.0, 3_600), (10, 500, 0.5, 19)],
)
def test_window_count(duration_s, rate, overlap, expected):
    cfg = WindowingConfig(1.0, overlap)
    width, stride = cfg.window_samples(rate), cfg.stride_samples(rate)
    assert expected == window_count(duration_s * rate, width, stride)


def test_segment_windows_target_recording():
    rec = Recording("P01", ["A"], np.zeros((1, 300 * 500)), 500)
    windows = segment_windows(rec, WindowingConfig(1.0, 0.9))
    assert 2_991 == len(windows)
    assert (1, 500) == windows[0].shape
    assert pytest.approx(0.1) == windows[1].start_s
    assert all(w.subject_id == "P01" for w in windows)


def test_segment_windows_short_recording():
    rec = Recording("P01", ["A"], np.zeros((1, 250)), 500)
    assert [] == segment_windows(rec)


def test_segment_windows_labels_from_annotations():
    spans = [AnnotationSpan(2.0, 4.0)]
    rec = Recording("P01", ["A"], np.zeros((1, 10 * 500)), 500, annotations=spans)
    windows = segment_windows(rec)
    assert [w.is_anomaly for w in windows] == [False, False, True, True] + [False] * 6
    assert all(w.ppr_type == PprType.INTERIOR_C for w in windows if w.is_anomaly)


@pytest.mark.parametrize(
    "span, start_s, expected",
    [
        ((2.0, 4.0), 1.5, (Label.ANOMALY, PprType.ONSET_A)),
        ((2.0, 4.0), 3.5, (Label.ANOMALY, PprType.OFFSET_B)),
        ((2.0, 4.0), 2.5, (Label.ANOMALY, PprType.INTERIOR_C)),
        ((2.0, 2.3), 1.8, (Label.ANOMALY, PprType.WHOLE_D)),
        ((2.0, 4.0), 5.0, (Label.NORMAL, None)),
        ((2.0, 4.0), 1.0, (Label.NORMAL, None)),
    ],
)
def test_label_window(span, start_s, expected):
    assert expected == label_window(_window(start_s), [AnnotationSpan(*span)])


def test_label_window_single_sample_overlap():
    # The last sample of [1.0, 2.0) at 500 Hz is at 1.998 s.
    assert Label.ANOMALY == label_window(_window(1.0), [AnnotationSpan(1.998, 3.0)])[0]
    assert Label.NORMAL == label_window(_window(1.0), [AnnotationSpan(1.999, 3.0)])[0]


def test_label_window_largest_overlap_decides():
    spans = [AnnotationSpan(0.0, 1.2), AnnotationSpan(1.3, 1.4)]
    label, ppr_type = label_window(_window(1.0), spans)
    assert (Label.ANOMALY, PprType.OFFSET_B) == (label, ppr_type)
    assert (label, ppr_type) == label_window(_window(1.0), list(reversed(spans)))


def test_label_window_seizure_has_no_type():
    span = AnnotationSpan(0.0, 10.0, AnnotationKind.SEIZURE)
    assert (Label.ANOMALY, None) == label_window(_window(2.0), [span])


def test_normalize_window(rng):
    x = normalize_window(rng.normal(loc=3.0, scale=7.0, size=(4, 500)))
    np.testing.assert_allclose(x.mean(axis=-1), 0.0, atol=1e-12)
    np.testing.assert_allclose(x.std(axis=-1), 1.0, atol=1e-6)


def test_windows_to_arrays(window_factory):
    windows = [window_factory(1.0), window_factory(2.0, Label.ANOMALY)]
    x, y = windows_to_arrays(windows, normalize=False)
    assert (2, 2, 20) == x.shape
    assert np.float32 == x.dtype
    assert [0, 1] == y.tolist()
    with pytest.raises(ValueError):
        windows_to_arrays([])


@pytest.mark.parametrize(
    "total, anomalies, percentage",
    [(671_299, 10_860, 1.62), (29_190, 1_222, 4.19), (7_500, 3_000, 40.0)],
)
def test_anomaly_fraction(total, anomalies, percentage):
    assert percentage == round(100 * anomaly_fraction(anomalies, total), 2)


def test_corpus_balance(window_factory):
    windows = [window_factory()] * 3 + [window_factory(label=Label.ANOMALY)]
    balance = corpus_balance(windows)
    assert (4, 1) == balance
    assert "4 windows, 1 anomalies (25.00%)" == str(balance)
