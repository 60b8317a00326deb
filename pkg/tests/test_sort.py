import numpy as np

from spotrack.camera import CameraModel
from spotrack.config import SortSettings
from spotrack.model import SpoModel
from spotrack.simulate import sample_scenario
from spotrack.sort import sort_track

BOX = np.array([400.0, 300.0, 60.0, 120.0])


def constant_stream(present_frames, n_frames, box=BOX):
    return [box[None, :] if k in present_frames else np.empty((0, 4))
            for k in range(1, n_frames + 1)]


class TestTrackManagement:
    def test_confirmed_from_frame_min_hits(self):
        ts = sort_track(constant_stream(set(range(1, 11)), 10))
        assert len(ts.tracks) == 1
        track = next(iter(ts.tracks.values()))
        # spawn counts as the first hit, so the streak reaches 3 on frame 3
        assert track.first_frame == 3
        assert track.last_frame == 10
        assert len(track) == 8

    def test_short_stream_never_confirms(self):
        ts = sort_track(constant_stream({1, 2}, 6))
        assert ts.tracks == {}

    def test_single_frame_gap_keeps_identity(self):
        present = set(range(1, 16)) - {8}
        ts = sort_track(constant_stream(present, 15))
        assert len(ts.tracks) == 1
        track = next(iter(ts.tracks.values()))
        assert track.first_frame == 3
        assert track.last_frame == 15
        assert 8 not in track.boxes  # nothing emitted on the missed frame

    def test_two_frame_gap_kills_track(self):
        present = set(range(1, 8)) | set(range(10, 20))
        ts = sort_track(constant_stream(present, 19))
        assert len(ts.tracks) == 2
        first, second = sorted(ts.tracks.values(), key=lambda t: t.first_frame)
        assert first.last_frame == 7
        # the replacement spawns at 10 and confirms two frames later
        assert second.first_frame == 12
        assert second.last_frame == 19

    def test_far_jump_breaks_association(self):
        far = BOX + np.array([800.0, 0.0, 0.0, 0.0])
        detections = [BOX[None, :]] * 6 + [far[None, :]] * 6
        ts = sort_track(detections)
        assert len(ts.tracks) == 2

    def test_unconfirmed_tracks_stay_silent(self):
        # a two-frame flicker elsewhere must not appear in the output
        flicker = np.array([1500.0, 200.0, 40.0, 80.0])
        detections = []
        for k in range(1, 11):
            rows = [BOX]
            if k in (4, 5):
                rows.append(flicker)
            detections.append(np.stack(rows))
        ts = sort_track(detections)
        assert len(ts.tracks) == 1


class TestAssignmentDiscipline:
    def test_no_shared_detections_and_determinism(self):
        model = SpoModel(CameraModel(1920, 1080, 30))
        scenario = sample_scenario(model, 120, seed=60)
        a = sort_track(scenario.detections)
        b = sort_track(scenario.detections)
        assert set(a.tracks) == set(b.tracks)
        for ident in a.tracks:
            ta, tb = a.tracks[ident], b.tracks[ident]
            assert ta.boxes.keys() == tb.boxes.keys()
            for k in ta.boxes:
                assert np.array_equal(ta.boxes[k], tb.boxes[k])
        # injective association: per frame, emitted boxes are pairwise distinct
        for k in a.frames:
            _, boxes = a.at_frame(k)
            if len(boxes) > 1:
                diffs = np.abs(boxes[:, None, :] - boxes[None, :, :]).sum(axis=2)
                off_diag = diffs[~np.eye(len(boxes), dtype=bool)]
                assert (off_diag > 1e-9).all()

    def test_two_parallel_streams_two_tracks(self):
        other = BOX + np.array([600.0, 0.0, 0.0, 0.0])
        detections = [np.stack([BOX, other]) for _ in range(10)]
        ts = sort_track(detections)
        assert len(ts.tracks) == 2
        for track in ts.tracks.values():
            assert track.first_frame == 3
            assert track.last_frame == 10


class TestOutputShape:
    def test_empty_input(self):
        ts = sort_track([])
        assert ts.tracks == {}

    def test_first_frame_offset(self):
        ts = sort_track(constant_stream(set(range(1, 6)), 5), first_frame=100)
        track = next(iter(ts.tracks.values()))
        assert track.first_frame == 102
        assert ts.frame_range == (100, 104)

    def test_custom_min_hits(self):
        ts = sort_track(constant_stream(set(range(1, 6)), 5),
                        SortSettings(min_hits=1))
        track = next(iter(ts.tracks.values()))
        assert track.first_frame == 1
