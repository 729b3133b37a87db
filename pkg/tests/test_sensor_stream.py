import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from physio_rec.errors import ContractError, ParseError, SensorValidationError
from physio_rec.sensor_stream import (
    CHANNEL_BOUNDS,
    CHANNELS,
    Channel,
    SensorSample,
    WindowSpec,
    parse_sensor_log,
    serialize_sensor_log,
    window,
)


def line(t, ch, v):
    return json.dumps({"t": t, "ch": ch, "v": v})


def test_empty_input():
    assert parse_sensor_log("") == []


def test_single_line_round_trip():
    (s,) = parse_sensor_log(line(100, "heart_rate", 72))
    assert s == SensorSample(100, Channel.HEART_RATE, 72.0)


def test_sorted_for_every_permutation():
    recs = [line(200, "heart_rate", 70), line(100, "heart_rate", 80)]
    for perm in itertools.permutations(recs):
        got = [s.timestamp for s in parse_sensor_log("\n".join(perm))]
        assert got == sorted(got) == [100, 200]


def test_equal_timestamps_keep_file_order():
    text = "\n".join([line(5, "heart_rate", 90), line(5, "heart_rate", 60), line(1, "alcohol_proxy", 0)])
    assert [s.value for s in parse_sensor_log(text)] == [0.0, 90.0, 60.0]


@pytest.mark.parametrize(
    "raw",
    ['{"t": 1, "ch": "heart_rate"', '[1, 2]', '{"t": 1, "v": 3}', '{"t": 1.5, "ch": "heart_rate", "v": 60}',
     '{"t": 1, "ch": "blood_sugar", "v": 3}', '{"t": 1, "ch": "heart_rate", "v": "fast"}'],
)
def test_malformed_line_reports_line_number(raw):
    text = line(1, "heart_rate", 60) + "\n\n" + raw
    with pytest.raises(ParseError) as exc:
        parse_sensor_log(text)
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)


@pytest.mark.parametrize(
    "ch,v,bound",
    [("heart_rate", 19, ">= 20"), ("heart_rate", 251, "<= 250"), ("accel_magnitude", -0.1, ">= 0"),
     ("feeding_gesture", 0.5, "in {0, 1}"), ("alcohol_proxy", 1.2, "<= 1"), ("sleep_interval", -1, ">= 0")],
)
def test_out_of_range_names_channel_and_bound(ch, v, bound):
    with pytest.raises(SensorValidationError) as exc:
        parse_sensor_log(line(1, ch, v))
    assert exc.value.channel == ch
    assert exc.value.bound == bound


def test_nonfinite_rejected():
    with pytest.raises(SensorValidationError):
        parse_sensor_log('{"t": 1, "ch": "skin_conductance", "v": NaN}')


def test_serializer_key_order():
    out = serialize_sensor_log([SensorSample(3, Channel.SLEEP_INTERVAL, 10.0)])
    assert out == '{"t": 3, "ch": "sleep_interval", "v": 10.0}\n'


def _valid_value(ch):
    lo, hi = CHANNEL_BOUNDS[ch]
    if ch is Channel.FEEDING_GESTURE:
        return st.sampled_from([0.0, 1.0])
    return st.floats(min_value=lo, max_value=hi if hi is not None else 1e9, allow_nan=False)


samples_st = st.lists(
    st.sampled_from(CHANNELS).flatmap(
        lambda ch: st.builds(SensorSample, st.integers(0, 10_000), st.just(ch), _valid_value(ch))
    ),
    max_size=40,
)


@given(samples_st)
def test_parse_serialize_parse_is_stable(samples):
    first = parse_sensor_log(serialize_sensor_log(samples))
    assert parse_sensor_log(serialize_sensor_log(first)) == first
    assert first == sorted(samples, key=lambda s: s.timestamp)


def hr(t, v):
    return SensorSample(t, Channel.HEART_RATE, float(v))


def test_empty_window_all_missing():
    f = window([hr(10, 70)], WindowSpec(60), 1000)
    assert all(f.is_missing(ch) and f.count(ch) == 0 for ch in CHANNELS)
    assert f.window_end == 1000


def test_heart_rate_aggregates():
    f = window([hr(950, 60), hr(990, 80)], WindowSpec(60), 1000)
    s = f.get(Channel.HEART_RATE)
    assert (s.mean, s.min, s.max, s.count, s.sum) == (70.0, 60.0, 80.0, 2, 140.0)
    assert f.is_missing(Channel.SKIN_CONDUCTANCE)


def test_window_boundaries_half_open():
    f = window([hr(940, 100), hr(1000, 50)], WindowSpec(60), 1000)
    s = f.get(Channel.HEART_RATE)
    assert s.count == 1 and s.mean == 50.0


def test_channel_duration_override():
    spec = WindowSpec(60, {Channel.SLEEP_INTERVAL: 86400})
    samples = [SensorSample(100, Channel.SLEEP_INTERVAL, 3600.0), hr(100, 70)]
    f = window(samples, spec, 10_000)
    assert f.get(Channel.SLEEP_INTERVAL).sum == 3600.0
    assert f.is_missing(Channel.HEART_RATE)


def test_last_event_tracks_nonzero_values():
    g = Channel.FEEDING_GESTURE
    f = window([SensorSample(10, g, 1.0), SensorSample(20, g, 0.0)], WindowSpec(100), 50)
    assert f.get(g).last_event == 10


def test_unsorted_input_is_contract_error():
    with pytest.raises(ContractError):
        window([hr(20, 70), hr(10, 70)], WindowSpec(60), 30)


def test_nonpositive_duration_rejected():
    with pytest.raises(ContractError):
        WindowSpec(0)


@given(samples_st, st.integers(0, 10_000), st.integers(1, 5_000))
def test_window_aggregate_invariants(samples, t_now, duration):
    samples = sorted(samples, key=lambda s: s.timestamp)
    f = window(samples, WindowSpec(duration), t_now)
    for s in f.channels.values():
        assert s.count > 0
        assert s.min <= s.mean <= s.max
        assert s.sum == pytest.approx(s.mean * s.count, rel=1e-9, abs=1e-12)


@given(samples_st, samples_st, st.integers(0, 10_000), st.integers(1, 5_000))
def test_window_ignores_samples_outside(inside, outside, t_now, duration):
    inside = [s for s in inside if t_now - duration < s.timestamp <= t_now]
    outside = [s for s in outside if not (t_now - duration < s.timestamp <= t_now)]
    spec = WindowSpec(duration)
    base = window(sorted(inside, key=lambda s: s.timestamp), spec, t_now)
    mixed = window(sorted(inside + outside, key=lambda s: s.timestamp), spec, t_now)
    assert base == mixed
