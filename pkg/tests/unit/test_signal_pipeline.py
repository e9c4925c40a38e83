import numpy as np

from pprnet.signal.montage import COMMON_10_20_ELECTRODES, SOURCE_EXTRA_CHANNELS
from pprnet.signal.pipeline import (
    PreprocessingConfig,
    corpus_to_windows,
    preprocess_recording,
    recording_to_windows,
)
from pprnet.signal.recording import (
    AnnotationKind,
    AnnotationSpan,
    Domain,
    Montage,
    Recording,
)


def _source_recording(rng, subject: str = "S01", seconds: int = 6) -> Recording:
    names = list(COMMON_10_20_ELECTRODES) + list(SOURCE_EXTRA_CHANNELS)
    seizure = AnnotationSpan(2.0, 3.0, AnnotationKind.SEIZURE)
    return Recording(
        subject,
        names,
        rng.normal(size=(21, seconds * 256)),
        256,
        annotations=[seizure] if seconds > 3 else [],
        domain=Domain.SOURCE,
    )


def test_preprocess_source_recording(rng):
    rec = preprocess_recording(_source_recording(rng))
    assert (18, 3000) == rec.data.shape
    assert 500 == rec.sampling_rate_hz
    assert Montage.BIPOLAR == rec.montage


def test_source_windows_do_not_overlap(rng):
    windows = recording_to_windows(_source_recording(rng))
    assert 6 == len(windows)
    assert [w.start_s for w in windows] == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
    assert [w.is_anomaly for w in windows] == [False, False, True] + [False] * 3
    assert all(w.ppr_type is None for w in windows)


def test_target_windows_overlap(rng):
    data = rng.normal(size=(len(COMMON_10_20_ELECTRODES), 2 * 500))
    rec = Recording("P01", COMMON_10_20_ELECTRODES, data, 500)
    windows = recording_to_windows(rec, PreprocessingConfig())
    assert 11 == len(windows)
    assert all((18, 500) == w.shape for w in windows)


def test_corpus_to_windows_keeps_recording_order(rng):
    recordings = [_source_recording(rng, f"S0{i}", seconds=2) for i in range(1, 5)]
    windows = corpus_to_windows(recordings, n_jobs=2)
    assert ["S01"] * 2 + ["S02"] * 2 + ["S03"] * 2 + ["S04"] * 2 == [
        w.subject_id for w in windows
    ]


def test_windowing_per_domain():
    cfg = PreprocessingConfig(source_overlap=0.0, target_overlap=0.5)
    assert 0.0 == cfg.windowing(Domain.SOURCE).overlap_fraction
    assert 0.5 == cfg.windowing(Domain.TARGET).overlap_fraction
    assert np.isclose(1.0, cfg.windowing(Domain.TARGET).window_length_s)
