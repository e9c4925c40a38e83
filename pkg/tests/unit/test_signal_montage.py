import numpy as np
import pytest

from pprnet.errors import ChannelResolutionError, MontageError
from pprnet.signal.montage import (
    COMMON_10_20_ELECTRODES,
    DEFAULT_BIPOLAR_PAIRS,
    SOURCE_EXTRA_CHANNELS,
    drop_channels,
    infer_montage,
    to_average,
    to_bipolar,
    unify_channels,
)
from pprnet.signal.recording import Montage, Recording


def _abc(values):
    return Recording("S01", ["A", "B", "C"], np.array(values, dtype=float)[:, None], 1)


def test_to_average_subtracts_channel_mean():
    average = to_average(_abc([3, 1, 2]))
    assert [1.0, -1.0, 0.0] == average.data[:, 0].tolist()
    assert Montage.AVERAGE == average.montage


def test_to_average_of_zeros_is_zero():
    rec = Recording("S01", ["A", "B"], np.zeros((2, 10)), 10)
    assert not to_average(rec).data.any()


def test_to_average_has_zero_channel_mean(rng):
    rec = Recording("S01", ["A", "B", "C"], rng.normal(size=(3, 100)), 100)
    np.testing.assert_allclose(to_average(rec).data.mean(axis=0), 0.0, atol=1e-12)


def test_to_average_is_idempotent(referential_recording):
    once = to_average(referential_recording)
    twice = to_average(once)
    np.testing.assert_allclose(once.data, twice.data, atol=1e-10)


def test_to_average_rejects_bipolar(referential_recording):
    bipolar = to_bipolar(referential_recording)
    with pytest.raises(MontageError):
        to_average(bipolar)


def test_to_bipolar_subtracts_pairs():
    rec = _abc([3, 1, 2])
    assert 2.0 == to_bipolar(rec, [("A", "B")]).data[0, 0]
    assert 2.0 == to_bipolar(to_average(rec), [("A", "B")]).data[0, 0]


def test_to_bipolar_default_chain(referential_recording):
    bipolar = to_bipolar(referential_recording)
    assert 18 == bipolar.n_channels
    assert "Fp1-F7" == bipolar.channel_names[0]
    assert Montage.BIPOLAR == bipolar.montage
    fp1 = referential_recording.channel_index("Fp1")
    f7 = referential_recording.channel_index("F7")
    expected = referential_recording.data[fp1] - referential_recording.data[f7]
    np.testing.assert_array_equal(expected, bipolar.data[0])


def test_to_bipolar_misspelled_electrode(referential_recording):
    with pytest.raises(ChannelResolutionError) as error:
        to_bipolar(referential_recording, [("Fp1", "F77")])
    assert "F77" in str(error.value)


def test_to_bipolar_resolves_old_electrode_names(rng):
    names = ["T3", "T5", "O1"]
    rec = Recording("S01", names, rng.normal(size=(3, 8)), 8)
    bipolar = to_bipolar(rec, [("T7", "P7"), ("P7", "O1")])
    np.testing.assert_array_equal(rec.data[0] - rec.data[1], bipolar.data[0])


def test_reference_cancels_on_random_recordings():
    """The average reference never changes a bipolar derivation."""
    rng = np.random.default_rng(42)
    for _ in range(1000):
        data = rng.normal(scale=50.0, size=(len(COMMON_10_20_ELECTRODES), 16))
        rec = Recording("S01", COMMON_10_20_ELECTRODES, data, 16)
        np.testing.assert_allclose(
            to_bipolar(rec).data, to_bipolar(to_average(rec)).data, atol=1e-10
        )


def test_drop_channels(rng):
    names = list(COMMON_10_20_ELECTRODES) + list(SOURCE_EXTRA_CHANNELS)
    rec = Recording("S01", names, rng.normal(size=(21, 8)), 8)

    dropped = drop_channels(rec, SOURCE_EXTRA_CHANNELS)
    assert 19 == dropped.n_channels
    assert list(COMMON_10_20_ELECTRODES) == dropped.channel_names

    assert drop_channels(rec, []) is rec
    assert 21 == drop_channels(rec, ["Xx"]).n_channels


def test_unify_channels_reaches_default_pairs_from_both_montages(rng):
    names = list(COMMON_10_20_ELECTRODES) + list(SOURCE_EXTRA_CHANNELS)
    source = Recording("S01", names, rng.normal(size=(21, 8)), 8)
    unified = unify_channels(source)
    assert 18 == unified.n_channels

    # A recording distributed as bipolar, with extra derivations and a shuffled order.
    extra = ["FT9-FT10", "FT10-T8"]
    shuffled = list(reversed(unified.channel_names)) + extra
    data = np.vstack([unified.data[::-1], rng.normal(size=(2, 8))])
    bipolar = Recording("S01", shuffled, data, 8, montage=Montage.BIPOLAR)
    selected = unify_channels(bipolar)
    assert [f"{a}-{p}" for a, p in DEFAULT_BIPOLAR_PAIRS] == selected.channel_names
    np.testing.assert_array_equal(unified.data, selected.data)


@pytest.mark.parametrize(
    "labels, montage",
    [
        (["Fp1-F7", "F7-T7", "FT9-FT10"], Montage.BIPOLAR),
        (["FP1-F7", "T7-P7", "-", "ECG", "P7-O1"], Montage.BIPOLAR),
        (["Fp1", "F7", "T7"], Montage.REFERENTIAL),
        (["EEG FP1-REF", "EEG F7-REF", "Fp2-A2"], Montage.REFERENTIAL),
        (["Fp1-F7", "ECG", "VNS"], Montage.REFERENTIAL),
        (["-", ""], Montage.REFERENTIAL),
    ],
)
def test_infer_montage_from_labels(labels, montage):
    assert montage == infer_montage(labels)
