"""Hand gestures: geometry ops, DAoI mapping, and the tracker state machine."""

import math
import random

import pytest

from airinput import events as ev
from airinput.errors import DegenerateHand
from airinput.hand import (
    AWAY,
    BENT,
    EXTENDED,
    INDETERMINATE,
    TOWARD_CAMERA,
    DAoI,
    HandTracker,
    estimate_depth_from_palm,
    finger_states,
    is_idle,
    make_daoi,
    map_to_screen,
    palm_facing,
    palm_size_px,
    pinch_ratio,
)
from airinput.model import HandFrame, Point2, Point3

from synth import make_hand, mirror_hand, with_point

W, H = 640, 480


def hand_with(p0=(0.5, 0.8), p9=(0.5, 0.6)):
    h = make_hand()
    h = with_point(h, 0, *p0)
    return with_point(h, 9, *p9)


def kinds(events):
    return [e.kind for e in events]


# --- palm size and depth -----------------------------------------------------

def test_palm_size_known_value():
    assert palm_size_px(hand_with(), W, H) == 96.0


def test_palm_size_doubles_with_resolution():
    h = hand_with()
    assert palm_size_px(h, 1280, 960) == 192.0


def test_palm_size_degenerate():
    with pytest.raises(DegenerateHand):
        palm_size_px(hand_with(p0=(0.5, 0.6), p9=(0.5, 0.6)), W, H)


def test_depth_one_point_calibration():
    # user at a known 600 mm shows a 120 px palm
    k = 600.0 * 120.0
    assert k == 72000.0
    assert estimate_depth_from_palm(120.0, k) == 600.0
    assert estimate_depth_from_palm(60.0, k) == 1200.0


def test_depth_strictly_decreasing_in_palm_size():
    rng = random.Random(2)
    for _ in range(100):
        k = rng.uniform(1e4, 1e5)
        a = rng.uniform(20, 300)
        b = a + rng.uniform(1, 50)
        assert estimate_depth_from_palm(b, k) < estimate_depth_from_palm(a, k)


def test_depth_rejects_bad_inputs():
    with pytest.raises(DegenerateHand):
        estimate_depth_from_palm(0.0, 72000.0)
    with pytest.raises(ValueError):
        estimate_depth_from_palm(100.0, -1.0)


# --- palm facing and idle ----------------------------------------------------

def facing_layout():
    # wrist bottom-center, index MCP upper-left of pinky MCP
    h = make_hand(side="right")
    h = with_point(h, 0, 0.5, 0.8)
    h = with_point(h, 5, 0.4, 0.5)
    return with_point(h, 17, 0.6, 0.55)


def test_palm_facing_right_toward():
    assert palm_facing(facing_layout(), W, H) == TOWARD_CAMERA


def test_palm_facing_mirror_symmetry():
    mirrored = mirror_hand(facing_layout())  # x -> 1-x, handedness flips
    assert mirrored.handedness == "left"
    assert palm_facing(mirrored, W, H) == TOWARD_CAMERA


def test_palm_facing_single_mirror_flips():
    m = mirror_hand(facing_layout())
    same_side = HandFrame(handedness="right", score=m.score, points=m.points)
    assert palm_facing(same_side, W, H) == AWAY


def test_palm_facing_degenerate():
    h = facing_layout()
    h = with_point(h, 5, 0.5, 0.6)
    h = with_point(h, 17, 0.5, 0.4)  # collinear with wrist
    with pytest.raises(DegenerateHand):
        palm_facing(h, W, H)


def test_idle_when_absent():
    assert is_idle(None, W, H) is True


def test_idle_conditions():
    h = facing_layout()
    h = with_point(h, 8, 0.45, 0.30)
    h = with_point(h, 4, 0.55, 0.45)
    assert is_idle(h, W, H) is False  # pointing, palm toward camera
    relaxed = with_point(h, 8, 0.45, 0.50)
    assert is_idle(relaxed, W, H) is True  # index tip below thumb tip
    away = make_hand(side="right", toward=False)
    assert is_idle(away, W, H) is True  # palm away


def test_idle_degenerate_hand_counts_as_idle():
    flat = HandFrame("right", 0.9, tuple(Point3(0.5, 0.5, 0.0) for _ in range(21)))
    assert is_idle(flat, W, H) is True


# --- pinch ratio -------------------------------------------------------------

def test_pinch_ratio_touching_is_zero():
    h = make_hand()
    h = with_point(h, 4, h.points[8].x, h.points[8].y)
    assert pinch_ratio(h, W, H) == 0.0


def test_pinch_ratio_known_value():
    # gap 48 px against a 96 px palm
    h = hand_with()  # palm = 96 px
    tip = h.points[8]
    h = with_point(h, 4, tip.x + 48.0 / W, tip.y)
    assert pinch_ratio(h, W, H) == pytest.approx(0.5, abs=1e-12)


def test_pinch_ratio_scale_invariant():
    h = make_hand(pinch=0.4)
    assert pinch_ratio(h, W, H) == pytest.approx(pinch_ratio(h, 2 * W, 2 * H), abs=1e-12)


def test_synth_pinch_parameter_is_exact():
    for r in (0.1, 0.35, 0.45, 0.8):
        h = make_hand(pinch=r)
        assert pinch_ratio(h, W, H) == pytest.approx(r, abs=1e-12)


# --- finger states -----------------------------------------------------------

def test_finger_states_symbolic():
    h = make_hand(fingers="EBIEB")
    assert finger_states(h, W, H) == (EXTENDED, BENT, INDETERMINATE, EXTENDED, BENT)


def test_finger_states_band_edges_inclusive():
    # pin >= / <= at the thresholds: classify with the band edge set to
    # the exact angle the landmarks produce
    from airinput.hand import FINGER_CHAINS
    from airinput.kernels import joint_angle_deg

    h = make_hand(fingers=[145.0] * 5)
    a, b, c = FINGER_CHAINS[1]
    pa, pb, pc = h.points[a], h.points[b], h.points[c]
    exact = joint_angle_deg(pa.x * W, pa.y * H, pb.x * W, pb.y * H, pc.x * W, pc.y * H)
    assert finger_states(h, W, H, extended_deg=exact, bent_deg=100.0)[1] == EXTENDED
    assert finger_states(h, W, H, extended_deg=170.0, bent_deg=exact)[1] == BENT
    assert finger_states(h, W, H, extended_deg=170.0, bent_deg=100.0)[1] == INDETERMINATE


def test_finger_states_right_angle_is_bent():
    h = make_hand(fingers=[90.0] * 5)
    assert finger_states(h, W, H) == (BENT,) * 5


def test_finger_states_degenerate():
    h = make_hand()
    h = with_point(h, 6, *(h.points[5].x, h.points[5].y))  # zero-length segment
    with pytest.raises(DegenerateHand):
        finger_states(h, W, H)


def test_finger_states_scale_invariant():
    h = make_hand(fingers="IEBIE")
    assert finger_states(h, W, H) == finger_states(h, 3 * W, 3 * H)


# --- DAoI --------------------------------------------------------------------

def test_daoi_formula_example():
    d = make_daoi(0.5, 0.5, 120.0, 640, 16 / 9, 3.0)
    assert d.width == pytest.approx(0.5625, abs=1e-12)
    assert d.height == pytest.approx(0.31640625, abs=1e-12)


def test_daoi_width_halves_when_palm_halves():
    big = make_daoi(0.5, 0.5, 120.0, 640, 16 / 9, 3.0)
    small = make_daoi(0.5, 0.5, 60.0, 640, 16 / 9, 3.0)
    assert small.width == pytest.approx(big.width / 2, abs=1e-12)


def test_daoi_translated_to_fit_size_preserved():
    d = make_daoi(0.02, 0.99, 120.0, 640, 16 / 9, 3.0)
    assert d.width == pytest.approx(0.5625, abs=1e-12)
    assert d.left >= 0.0 and d.top >= 0.0
    assert d.left + d.width <= 1.0 + 1e-12 and d.top + d.height <= 1.0 + 1e-12


def test_daoi_oversize_shrunk_aspect_preserved():
    d = make_daoi(0.5, 0.5, 500.0, 640, 16 / 9, 3.0)  # raw width 2.34
    assert d.width <= 1.0 and d.height <= 1.0
    assert d.width / d.height == pytest.approx(16 / 9, abs=1e-9)


def test_daoi_aspect_invariant_random():
    rng = random.Random(9)
    for _ in range(200):
        aspect = rng.uniform(0.5, 3.0)
        d = make_daoi(rng.random(), rng.random(), rng.uniform(10, 800),
                      640, aspect, rng.uniform(0.5, 6))
        assert d.width / d.height == pytest.approx(aspect, abs=1e-9)
        assert d.left >= -1e-12 and d.top >= -1e-12
        assert d.left + d.width <= 1.0 + 1e-12
        assert d.top + d.height <= 1.0 + 1e-12


def test_map_to_screen_corners_and_center():
    d = DAoI(0.5, 0.5, 0.4, 0.225)
    assert map_to_screen(Point2(d.left, d.top), d, 1920, 1080) == (0.0, 0.0)
    br = map_to_screen(Point2(d.left + d.width, d.top + d.height), d, 1920, 1080)
    assert br == (1919.0, 1079.0)  # clamped to the last addressable pixel
    assert map_to_screen(Point2(0.5, 0.5), d, 1920, 1080) == pytest.approx((960.0, 540.0), abs=1e-9)


def test_map_to_screen_affine_proportion():
    d = DAoI(0.5, 0.5, 0.4, 0.225)
    p = Point2(d.left + 0.25 * d.width, d.top + 0.75 * d.height)
    sx, sy = map_to_screen(p, d, 1920, 1080)
    assert (sx, sy) == pytest.approx((480.0, 810.0), abs=1e-9)


def test_map_to_screen_inverse_identity_on_interior():
    rng = random.Random(33)
    for _ in range(500):
        d = make_daoi(rng.random(), rng.random(), rng.uniform(40, 400), 640, 16 / 9, 3.0)
        u, v = rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99)
        p = Point2(d.left + u * d.width, d.top + v * d.height)
        sx, sy = map_to_screen(p, d, 1920, 1080)
        assert sx / 1920 == pytest.approx(u, abs=1e-9)
        assert sy / 1080 == pytest.approx(v, abs=1e-9)


# --- tracker state machine ---------------------------------------------------

FPS = 1000.0 / 30.0


def run_tracker(tracker, hands, t0=0.0, dt=FPS):
    all_events = []
    t = t0
    for h in hands:
        all_events.extend(tracker.step(h, t, W, H))
        t += dt
    return all_events


def test_always_idle_stream_emits_single_idle_enter():
    tr = HandTracker("right")
    evs = run_tracker(tr, [None] * 60)
    assert kinds(evs) == [ev.IDLE_ENTER]
    assert evs[0].t_ms >= 300.0  # debounce expiry


def test_active_hand_streams_cursor_immediately():
    tr = HandTracker("right")
    evs = run_tracker(tr, [make_hand()] * 30)
    ks = kinds(evs)
    assert ev.CURSOR_MOVE in ks
    assert ks.count(ev.IDLE_ENTER) == 0 and ks.count(ev.IDLE_EXIT) == 0
    assert ks.count(ev.POSE_CHANGED) == 1


def test_pinch_ramp_press_release_once():
    ramp = [0.6] * 10 + [0.2] * 10 + [0.6] * 10
    hands = [make_hand(pinch=r) for r in ramp]
    tr = HandTracker("right")
    evs = run_tracker(tr, hands)
    ks = kinds(evs)
    assert ks.count(ev.PINCH_PRESS) == 1
    assert ks.count(ev.PINCH_RELEASE) == 1
    assert ks.index(ev.PINCH_PRESS) < ks.index(ev.PINCH_RELEASE)


def test_pinch_events_strictly_alternate():
    rng = random.Random(4)
    hands = [make_hand(pinch=rng.choice([0.1, 0.3, 0.5, 0.7])) for _ in range(400)]
    tr = HandTracker("right")
    seq = [e.kind for e in run_tracker(tr, hands)
           if e.kind in (ev.PINCH_PRESS, ev.PINCH_RELEASE)]
    assert seq and seq[0] == ev.PINCH_PRESS
    assert all(a != b for a, b in zip(seq, seq[1:]))


def test_idle_gates_all_pointer_events():
    # random mix of idle and active hands; after any idle_enter, nothing
    # pointer-like may appear until the matching idle_exit
    rng = random.Random(8)
    hands = []
    for _ in range(600):
        r = rng.random()
        if r < 0.3:
            hands.append(None)
        elif r < 0.5:
            hands.append(make_hand(toward=False))  # palm away: idle
        else:
            hands.append(make_hand(pinch=rng.choice([0.2, 0.6])))
    tr = HandTracker("right")
    idle = False
    for e in run_tracker(tr, hands):
        if e.kind == ev.IDLE_ENTER:
            idle = True
        elif e.kind == ev.IDLE_EXIT:
            idle = False
        elif idle:
            assert e.kind not in (ev.CURSOR_MOVE, ev.PINCH_PRESS,
                                  ev.PINCH_RELEASE, ev.SCROLL)


def test_idle_events_alternate_starting_with_enter():
    rng = random.Random(15)
    hands = []
    for _ in range(50):
        block = rng.randint(12, 30)
        idle_block = rng.random() < 0.5
        hands.extend([None if idle_block else make_hand()] * block)
    tr = HandTracker("right")
    seq = [e.kind for e in run_tracker(tr, hands)
           if e.kind in (ev.IDLE_ENTER, ev.IDLE_EXIT)]
    assert seq[0] == ev.IDLE_ENTER
    assert all(a != b for a, b in zip(seq, seq[1:]))


def test_pinch_released_before_idle_enter():
    hands = [make_hand(pinch=0.2)] * 15 + [None] * 20
    tr = HandTracker("right")
    evs = run_tracker(tr, hands)
    ks = kinds(evs)
    assert ev.PINCH_PRESS in ks and ev.PINCH_RELEASE in ks
    assert ks.index(ev.PINCH_RELEASE) == ks.index(ev.IDLE_ENTER) - 1


def test_anchor_fixed_while_active_reanchors_after_idle():
    tr = HandTracker("right")
    t = 0.0
    centers = set()
    for i in range(20):
        tr.step(make_hand(wrist=(0.4 + i * 0.005, 0.7)), t, W, H)
        centers.add((tr.daoi.cx, tr.daoi.cy))
        t += FPS
    assert len(centers) == 1  # anchor pinned despite wrist drift
    for _ in range(20):  # go idle long enough to debounce
        tr.step(None, t, W, H)
        t += FPS
    for _ in range(15):  # and come back long enough to debounce again
        tr.step(make_hand(wrist=(0.6, 0.72)), t, W, H)
        t += FPS
    assert (tr.daoi.cx, tr.daoi.cy) not in centers


def test_fist_scrolls_instead_of_moving_cursor():
    tr = HandTracker("right")
    t = 0.0
    evs = []
    for i in range(40):
        h = make_hand(fingers="EBBBB", wrist=(0.5, 0.7 - i * 0.01))
        evs.extend(tr.step(h, t, W, H))
        t += FPS
    ks = kinds(evs)
    assert ev.CURSOR_MOVE not in ks
    deltas = [e.data["delta"] for e in evs if e.kind == ev.SCROLL]
    assert deltas and all(isinstance(d, int) for d in deltas)
    assert sum(deltas) > 0  # hand moving up scrolls up


def test_scroll_accumulates_fractional_notches():
    # slow drift: no single frame crosses a whole notch but the total does
    tr = HandTracker("right")
    t = 0.0
    total = 0
    n = 120
    for i in range(n):
        h = make_hand(fingers="EBBBB", wrist=(0.5, 0.7 - i * 0.002))
        for e in tr.step(h, t, W, H):
            if e.kind == ev.SCROLL:
                total += e.data["delta"]
        t += FPS
    # ~0.238 normalized units of travel at gain 8 -> roughly 1.9 notches
    assert total >= 1


def test_off_hand_only_classifies_poses():
    tr = HandTracker("left", is_cursor_hand=False)
    hands = [make_hand(side="left", pinch=0.1, fingers="EEBBE")] * 30
    ks = kinds(run_tracker(tr, hands))
    assert set(ks) == {ev.POSE_CHANGED}
    assert ks.count(ev.POSE_CHANGED) == 1


def test_pose_changed_carries_side_and_code():
    tr = HandTracker("right")
    evs = run_tracker(tr, [make_hand(fingers="EEBBB")] * 3)
    poses = [e for e in evs if e.kind == ev.POSE_CHANGED]
    assert poses[0].label == "right:EEBBB"


def test_mirror_symmetry_of_cursor_stream():
    rng = random.Random(21)
    pinches = [rng.choice([0.15, 0.3, 0.55, 0.7]) for _ in range(120)]
    xs = [0.35 + 0.25 * math.sin(i * 0.11) for i in range(120)]
    orig, mirr = [], []
    for x, r in zip(xs, pinches):
        h = make_hand(side="right", wrist=(x, 0.7), pinch=r)
        orig.append(h)
        mirr.append(mirror_hand(h))
    tr_r = HandTracker("right")
    tr_l = HandTracker("left")
    evs_r = run_tracker(tr_r, orig)
    evs_l = run_tracker(tr_l, mirr)
    assert kinds(evs_r) == kinds(evs_l)
    curs_r = [e for e in evs_r if e.kind == ev.CURSOR_MOVE]
    curs_l = [e for e in evs_l if e.kind == ev.CURSOR_MOVE]
    for a, b in zip(curs_r, curs_l):
        # unclamped mirror sums to screen_w; edge clamping costs <= 1 px
        assert abs((a.data["x"] + b.data["x"]) - 1920.0) <= 1.0 + 1e-6
        assert a.data["y"] == pytest.approx(b.data["y"], abs=1e-9)


def test_release_all_balances_dangling_pinch():
    tr = HandTracker("right")
    run_tracker(tr, [make_hand(pinch=0.2)] * 10)
    assert tr.pinch_held
    evs = tr.release_all(1000.0)
    assert kinds(evs) == [ev.PINCH_RELEASE]
    assert not tr.pinch_held
