import itertools
import unittest

from hypothesis import given
from hypothesis import strategies as st

from icfs_wearsim.detector import BufferStatus, DetectorState
from icfs_wearsim.exceptions import ConfigurationError


def reference_detector(events, fail_threshold, success_threshold):
    """Line-by-line transcription of the buffer management loop; C = checkpoint, R = rollback."""
    fail_count = 0
    success_count = 0
    status = "Inactive"
    trail = []
    for event in events:
        if event == "C":
            success_count = success_count + 1
            fail_count = 0
            if success_count >= success_threshold:
                status = "Inactive"
        else:
            fail_count = fail_count + 1
            success_count = 0
            if fail_count >= fail_threshold:
                status = "Active"
        trail.append((fail_count, success_count, status))
    return trail


def feed(detector, events):
    trail = []
    for event in events:
        if event == "C":
            detector.on_checkpoint_signal()
        else:
            detector.on_rollback_to_commit()
        trail.append((detector.fail_count, detector.success_count, detector.buffer_status.value))
    return trail


class TestDetector(unittest.TestCase):
    def test_starts_inactive(self):
        self.assertIs(DetectorState().buffer_status, BufferStatus.INACTIVE)

    def test_three_failures_activate(self):
        d = DetectorState()
        changes = [d.on_rollback_to_commit() for _ in range(3)]
        self.assertEqual(changes, [False, False, True])
        self.assertTrue(d.active)

    def test_success_streak_deactivates(self):
        d = DetectorState()
        feed(d, "RRRCC")
        self.assertTrue(d.active)
        self.assertTrue(d.on_checkpoint_signal())
        self.assertFalse(d.active)

    def test_success_then_failure_keeps_active(self):
        d = DetectorState()
        feed(d, "RRRCR")
        self.assertTrue(d.active)
        self.assertEqual(d.success_count, 0)

    def test_broken_failure_streak_stays_inactive(self):
        d = DetectorState()
        feed(d, "RRCRR")
        self.assertFalse(d.active)

    def test_alternating_events_never_activate(self):
        for threshold in (2, 3):
            d = DetectorState(fail_threshold=threshold)
            feed(d, "RC" * 100)
            self.assertFalse(d.active)

    def test_fail_threshold_one_activates_at_once(self):
        d = DetectorState(fail_threshold=1)
        self.assertTrue(d.on_rollback_to_commit())
        self.assertTrue(d.active)

    def test_success_stream_never_activates(self):
        d = DetectorState(fail_threshold=1)
        feed(d, "C" * 50)
        self.assertFalse(d.active)

    def test_threshold_must_be_positive(self):
        with self.assertRaises(ConfigurationError):
            DetectorState(fail_threshold=0)
        with self.assertRaises(ConfigurationError):
            DetectorState(success_threshold=0)

    def test_exhaustive_against_reference(self):
        divergences = 0
        for fail_threshold, success_threshold in itertools.product((1, 2, 3), repeat=2):
            for length in range(13):
                for events in itertools.product("CR", repeat=length):
                    d = DetectorState(fail_threshold, success_threshold)
                    if feed(d, events) != reference_detector(events, fail_threshold, success_threshold):
                        divergences += 1
        self.assertEqual(divergences, 0)


@given(st.text(alphabet="CR", max_size=200), st.integers(1, 5), st.integers(1, 5))
def test_counters_never_both_positive(events, fail_threshold, success_threshold):
    d = DetectorState(fail_threshold, success_threshold)
    for fail, success, _ in feed(d, events):
        assert not (fail > 0 and success > 0)


@given(st.text(alphabet="CR", max_size=200))
def test_equal_event_strings_give_equal_states(events):
    assert feed(DetectorState(), events) == feed(DetectorState(), events)
