import numpy as np
import pytest

from netmodsynth import dsp, graph
from netmodsynth.errors import ArchitectureError


class TestFramesForDuration:
    def test_one_second(self):
        assert graph.frames_for_duration(1.0) == 44

    def test_ten_seconds(self):
        assert graph.frames_for_duration(10.0) == 431

    def test_tiny_duration_floors_at_one(self):
        assert graph.frames_for_duration(0.001) == 1

    def test_non_positive_rejected(self):
        with pytest.raises(ValueError):
            graph.frames_for_duration(0.0)


class TestParamTrack:
    def test_constant(self):
        t = graph.ParamTrack.constant([1] * 8)
        assert t.is_constant
        np.testing.assert_array_equal(t.row(0), t.row(99))

    def test_wrong_width_rejected(self):
        with pytest.raises(ValueError):
            graph.ParamTrack(np.zeros((3, 7)))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            graph.ParamTrack(np.full((1, 8), np.nan))

    def test_final_row_repeats(self):
        values = np.arange(16, dtype=float).reshape(2, 8)
        t = graph.ParamTrack(values)
        with pytest.warns(UserWarning):
            rows = t.rows(5)
        assert rows.shape == (5, 8)
        np.testing.assert_array_equal(rows[1:], np.tile(values[1], (4, 1)))


class TestRenderModulator:
    def test_constant_track_identical_frames(self, small_model):
        track = graph.ParamTrack.constant([3.0] * 8)
        frames = graph.render_modulator(small_model, track, 10)
        assert frames.shape == (10, 2049)
        ref = small_model.decode(np.full(8, 3.0))
        for frame in frames:
            assert np.array_equal(frame, ref)

    def test_automation_rows_decoded_individually(self, small_model, rng):
        values = rng.uniform(0, 3, (5, 8))
        frames = graph.render_modulator(small_model, graph.ParamTrack(values), 5)
        for t in range(5):
            np.testing.assert_allclose(
                frames[t], small_model.decode(values[t]), rtol=1e-6
            )

    def test_single_row_automation_repeats(self, small_model):
        track = graph.ParamTrack(np.ones((1, 8)))
        frames = graph.render_modulator(small_model, track, 5)
        assert all(np.array_equal(frames[0], f) for f in frames[1:])


class TestRenderCarrier:
    def test_zero_feedback_collapses_to_framewise_predict(self, small_model, rng):
        inputs = rng.uniform(0, 2, (6, 2049))
        out = graph.render_carrier(small_model, inputs, feedback=0.0)
        for t in range(6):
            expected = small_model.predict(dsp.normalize_frame(inputs[t]))
            assert np.array_equal(out[t], expected)

    def test_zero_bias_track_equals_absent(self, small_model, rng):
        inputs = rng.uniform(0, 2, (6, 2049))
        zeros = graph.ParamTrack(np.zeros((1, 8)))
        a = graph.render_carrier(small_model, inputs, bias_track=zeros, feedback=0.3)
        b = graph.render_carrier(small_model, inputs, bias_track=None, feedback=0.3)
        assert np.array_equal(a, b)

    def test_first_frame_ignores_feedback(self, small_model, rng):
        inputs = rng.uniform(0, 2, (4, 2049))
        a = graph.render_carrier(small_model, inputs, feedback=0.0)
        b = graph.render_carrier(small_model, inputs, feedback=0.9)
        assert np.array_equal(a[0], b[0])

    def test_feedback_changes_later_frames(self, trained_small_model):
        track = graph.ParamTrack.constant([3.0] * 8)
        frames = graph.render_modulator(trained_small_model, track, 8)
        a = graph.render_carrier(trained_small_model, frames, feedback=0.0)
        b = graph.render_carrier(trained_small_model, frames, feedback=0.5)
        rel = np.linalg.norm(a - b) / np.linalg.norm(a)
        assert rel > 1e-3

    def test_out_of_range_feedback_rejected(self, small_model, rng):
        with pytest.raises(ValueError):
            graph.render_carrier(small_model, rng.uniform(0, 1, (2, 2049)), feedback=1.5)

    def test_output_count_matches_input(self, small_model, rng):
        inputs = rng.uniform(0, 1, (7, 2049))
        assert graph.render_carrier(small_model, inputs).shape == (7, 2049)


class TestPredictiveFeedback:
    def test_zero_rotation_fixed_point(self, small_model, stft_cfg, rng):
        seed = rng.standard_normal(stft_cfg.fft_size)
        frames = graph.render_predictive_feedback(
            small_model, seed, 6, stft_cfg, rotation=0
        )
        for frame in frames[1:]:
            assert np.array_equal(frames[0], frame)

    def test_full_rotation_replaces_buffer(self, small_model, stft_cfg, rng):
        seed = rng.standard_normal(stft_cfg.fft_size)
        states = list(
            graph.iter_predictive_feedback(
                small_model, seed, 4, stft_cfg, rotation=stft_cfg.fft_size
            )
        )
        for (_, _, recon), (next_buf, _, _) in zip(states, states[1:]):
            assert np.array_equal(next_buf, recon)

    def test_buffer_length_invariant(self, small_model, stft_cfg, rng):
        seed = rng.standard_normal(stft_cfg.fft_size)
        for buf, _, _ in graph.iter_predictive_feedback(
            small_model, seed, 5, stft_cfg
        ):
            assert len(buf) == stft_cfg.fft_size

    def test_default_rotation_evolves(self, trained_small_model, stft_cfg):
        track = graph.ParamTrack.constant([2.0] * 8)
        first = graph.render_modulator(trained_small_model, track, 1)[0]
        seed = dsp.griffin_lim(first, stft_cfg, graph.PF_GL_ITERATIONS)
        frames = graph.render_predictive_feedback(
            trained_small_model, seed, 100, stft_cfg
        )
        dists = np.linalg.norm(frames - frames[0], axis=1)
        assert dists.max() > 1e-6

    def test_wrong_seed_length_rejected(self, small_model, stft_cfg):
        with pytest.raises(ValueError):
            graph.render_predictive_feedback(small_model, np.zeros(100), 2, stft_cfg)


def _mk_arch(nodes):
    return graph.SynthArchitecture(nodes)


def _mod(nid="root", parent=None, latent=None):
    return graph.SynthNode(
        id=nid,
        mode=graph.NodeMode.MODULATOR,
        parent=parent,
        latent_track=graph.ParamTrack.constant(latent or [1.0] * 8),
    )


def _car(nid, parent, **kw):
    return graph.SynthNode(id=nid, mode=graph.NodeMode.CARRIER, parent=parent, **kw)


class TestArchitectureValidation:
    def test_single_modulator_ok(self):
        _mk_arch([_mod()])

    def test_two_roots_rejected(self):
        with pytest.raises(ArchitectureError, match="root"):
            _mk_arch([_mod("a"), _mod("b")])

    def test_unknown_parent_rejected(self):
        with pytest.raises(ArchitectureError, match="ghost"):
            _mk_arch([_mod(), _car("c", "ghost")])

    def test_cycle_rejected(self):
        with pytest.raises(ArchitectureError, match="a|b"):
            _mk_arch([_mod(), _car("a", "b"), _car("b", "a")])

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ArchitectureError, match="duplicate"):
            _mk_arch([_mod(), _car("x", "root"), _car("x", "root")])

    def test_predictive_feedback_carries_no_params(self):
        with pytest.raises(ArchitectureError):
            graph.SynthNode(
                id="pf",
                mode=graph.NodeMode.PREDICTIVE_FEEDBACK,
                parent="root",
                feedback=0.5,
            )

    def test_random_edge_sets_match_independent_oracle(self, rng):
        # fuzz parent assignments; compare validate() verdict with a plain
        # reachability check
        for _ in range(60):
            n = int(rng.integers(1, 6))
            ids = [f"n{i}" for i in range(n)]
            nodes = []
            for i, nid in enumerate(ids):
                choices = [None] + ids
                parent = choices[int(rng.integers(0, len(choices)))]
                if parent is None and i > 0 and rng.random() < 0.5:
                    parent = ids[int(rng.integers(0, n))]
                if parent is None:
                    nodes.append(_mod(nid))
                else:
                    nodes.append(_car(nid, parent))
            roots = [x for x in nodes if x.parent is None]
            reachable = set()
            if len(roots) == 1:
                frontier = {roots[0].id}
                while frontier:
                    reachable |= frontier
                    frontier = {
                        x.id
                        for x in nodes
                        if x.parent in reachable and x.id not in reachable
                    }
            valid = len(roots) == 1 and len(reachable) == n
            if valid:
                _mk_arch(nodes)
            else:
                with pytest.raises(ArchitectureError):
                    _mk_arch(nodes)


class TestRenderArchitecture:
    def test_single_modulator_degenerate_tree(self, small_model, stft_cfg):
        arch = _mk_arch([_mod(latent=[2.0] * 8)])
        result = graph.render_architecture(small_model, arch, 0.5)
        n = graph.frames_for_duration(0.5, stft_cfg)
        expected_frames = graph.render_modulator(
            small_model, arch.root.latent_track, n
        )
        expected = dsp.griffin_lim(expected_frames, stft_cfg, 32)
        assert set(result.audio) == {"root"}
        assert np.array_equal(result.audio["root"], expected)

    def test_two_carrier_children(self, small_model):
        arch = _mk_arch(
            [_mod(), _car("a", "root"), _car("b", "root", feedback=0.5)]
        )
        result = graph.render_architecture(small_model, arch, 0.3)
        assert set(result.audio) == {"a", "b"}
        assert len(result.audio["a"]) == len(result.audio["b"])
        assert set(result.frames) == {"root", "a", "b"}

    def test_frame_counts_uniform(self, small_model, stft_cfg):
        arch = _mk_arch([_mod(), _car("a", "root")])
        result = graph.render_architecture(small_model, arch, 0.7)
        n = graph.frames_for_duration(0.7, stft_cfg)
        for frames in result.frames.values():
            assert frames.shape[0] == n

    def test_deterministic(self, small_model):
        arch = _mk_arch([_mod(), _car("a", "root", feedback=0.4)])
        a = graph.render_architecture(small_model, arch, 0.3)
        b = graph.render_architecture(small_model, arch, 0.3)
        for k in a.audio:
            assert np.array_equal(a.audio[k], b.audio[k])

    def test_leaf_postprocessing(self, small_model):
        leaf = _car("a", "root")
        leaf.envelope = dsp.Adsr(0.0, 1.0, 0.0, 1.0, 0.05)
        arch = _mk_arch([_mod(), leaf])
        result = graph.render_architecture(small_model, arch, 0.3)
        assert result.audio["a"][-1] == 0.0

    def test_predictive_feedback_child(self, small_model):
        pf = graph.SynthNode(
            id="pf", mode=graph.NodeMode.PREDICTIVE_FEEDBACK, parent="root"
        )
        arch = _mk_arch([_mod(), pf])
        result = graph.render_architecture(small_model, arch, 0.2)
        assert set(result.audio) == {"pf"}
