import numpy as np
import pytest

from oris.encoder import LastSeenTracker, encode_state


def test_averaged_last_seen_hand_case():
    # k=2, recorded steps [4, 6], queried at step 7 -> mean(3, 1) = 2
    tracker = LastSeenTracker(num_classes=1, k=2)
    for target in (4, 6):
        while tracker.current_step < target:
            tracker.advance_step()
        tracker.record_emission(0)
    tracker.advance_step()
    assert tracker.current_step == 7
    assert tracker.averaged_last_seen(0) == 2.0


def test_just_emitted_k_times_reads_zero():
    tracker = LastSeenTracker(num_classes=2, k=3)
    for _ in range(3):
        tracker.record_emission(1)
    assert tracker.averaged_last_seen(1) == 0.0


def test_fresh_tracker_padding_reads_current_step():
    tracker = LastSeenTracker(num_classes=4, k=3)
    for _ in range(10):
        tracker.advance_step()
    assert all(tracker.averaged_last_seen(c) == 10.0 for c in range(4))


def test_emissions_at_steps_1_3_5_queried_at_6():
    tracker = LastSeenTracker(num_classes=1, k=3)
    for target in (1, 3, 5):
        while tracker.current_step < target:
            tracker.advance_step()
        tracker.record_emission(0)
    tracker.advance_step()
    assert tracker.averaged_last_seen(0) == 3.0  # mean(5, 3, 1)


def test_k1_keeps_only_latest():
    tracker = LastSeenTracker(num_classes=1, k=1)
    tracker.record_emission(0)
    for _ in range(5):
        tracker.advance_step()
    tracker.record_emission(0)
    assert tracker.averaged_last_seen(0) == 0.0


def test_no_pick_leaves_buffers_unchanged():
    tracker = LastSeenTracker(num_classes=2, k=3)
    tracker.record_emission(0)
    before = [list(buf) for buf in tracker._buffers]
    for _ in range(4):
        tracker.advance_step()
    assert [list(buf) for buf in tracker._buffers] == before
    assert tracker.averaged_last_seen(0) > 0


def test_encode_state_concatenates():
    tracker = LastSeenTracker(num_classes=2, k=1)
    tracker.record_emission(0)
    for _ in range(5):
        tracker.advance_step()
    tracker.record_emission(1)  # dt: class0 = 5, class1 = 0
    state = encode_state(np.array([0.1, 0.2]), tracker)
    assert np.allclose(state, [0.1, 0.2, 5.0, 0.0])
    assert len(state) == 2 + 2


def test_encode_state_zero_at_start():
    tracker = LastSeenTracker(num_classes=3, k=3)
    assert np.array_equal(encode_state(np.zeros(4), tracker), np.zeros(7))


def test_encode_state_dt_scale():
    tracker = LastSeenTracker(num_classes=2, k=1)
    for _ in range(50):
        tracker.advance_step()
    tracker.record_emission(1)
    for _ in range(150):
        tracker.advance_step()
    # dt: class0 = 200, class1 = 150
    state = encode_state(np.zeros(1), tracker, dt_scale=100.0)
    assert np.allclose(state, [0.0, 2.0, 1.5])
    with pytest.raises(ValueError):
        encode_state(np.zeros(1), tracker, dt_scale=0.0)


def test_dt_entries_nonnegative_and_bounded_by_step():
    rng = np.random.default_rng(0)
    tracker = LastSeenTracker(num_classes=3, k=3)
    for _ in range(200):
        if rng.random() < 0.3:
            tracker.record_emission(int(rng.integers(3)))
        tracker.advance_step()
        tail = encode_state(np.zeros(2), tracker)[2:]
        assert np.all(tail >= 0.0)
        assert np.all(tail <= tracker.current_step)


def test_freshness_monotonicity_on_scripted_trace():
    # every class emitted within the last k picks at the current step:
    # the dt tail must be elementwise <= the tail of any earlier state
    k, num_classes = 3, 2
    tracker = LastSeenTracker(num_classes, k)
    tails = []
    for step in range(12):
        tails.append(encode_state(np.zeros(1), tracker)[1:].copy())
        tracker.record_emission(step % num_classes)
        tracker.advance_step()
    # refresh both classes k times each right before the final read
    for cls in (0, 1):
        for _ in range(k):
            tracker.record_emission(cls)
    final_tail = encode_state(np.zeros(1), tracker)[1:]
    for earlier in tails[1:]:  # step-0 tail is all zeros by the padding convention
        assert np.all(final_tail <= earlier)


def test_validation():
    with pytest.raises(ValueError):
        LastSeenTracker(num_classes=0, k=3)
    with pytest.raises(ValueError):
        LastSeenTracker(num_classes=2, k=0)
