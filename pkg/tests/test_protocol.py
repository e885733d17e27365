import logging

import numpy as np
import pytest

from aafv.core.errors import ProtocolError
from aafv.data.datasets import FederatedSplit, SealedLabels, UnlabeledDataset
from aafv.federation.aafv import VotingServer, run_aafv
from aafv.federation.common import evaluate
from aafv.federation.fedavg import average_parameters, run_fedavg
from aafv.federation.local import run_local
from aafv.federation.voting import Vote, local_vote

from conftest import make_setup


class PoisonedLabels(SealedLabels):
    """Ground truth that fails loudly if anything reads it."""

    def reveal(self):
        raise AssertionError("the public pool's ground truth was read")


class RecordingServer(VotingServer):
    def __init__(self):
        self.uploads = []

    def consolidate(self, uploads):
        self.uploads.append([np.array(u, copy=True) for u in uploads])
        return super().consolidate(uploads)


class AbstainingServer(VotingServer):
    def consolidate(self, uploads):
        return np.full(len(uploads[0]), Vote.ABSTAIN, dtype=np.int8)


def pretrained(setup, streams):
    """Independent replay of the pre-training phase."""
    models = []
    for k, client in enumerate(setup.clients):
        learner = client.learner.clone()
        learner.fit(client.data, setup.pretrain_epochs, streams.derive("aafv", "client", k, "pretrain"))
        models.append(learner)
    return models


class TestAAFVInformationFlow:
    def test_protocol_never_reads_public_labels(self, small_parts, streams):
        pool = UnlabeledDataset(
            small_parts.unlabeled.features,
            sealed=PoisonedLabels(np.zeros(small_parts.unlabeled.rows)),
        )
        parts = FederatedSplit(small_parts.test, pool, small_parts.clients)
        setup = make_setup(parts, ["logistic", "perceptron", "svm"], streams, e_com=2, pretrain_epochs=3)
        outcome = run_aafv(setup, streams)
        assert len(outcome.traces) == 2

    def test_server_only_sees_vote_rows(self, setup_factory, streams):
        setup = setup_factory(e_com=3)
        server = RecordingServer()
        run_aafv(setup, streams, server=server)
        assert len(server.uploads) == 3
        for round_uploads in server.uploads:
            assert len(round_uploads) == setup.k
            for upload in round_uploads:
                assert upload.dtype == np.int8
                assert upload.shape == (setup.unlabeled.rows,)
                assert set(np.unique(upload).tolist()) <= {-1, 0, 1}


class TestAAFVRounds:
    def test_zero_rounds_returns_pretrained_models(self, setup_factory, streams):
        setup = setup_factory(e_com=0)
        expected = pretrained(setup, streams)
        outcome = run_aafv(setup, streams)
        assert outcome.traces == []
        for learner, reference in zip(outcome.learners, expected):
            np.testing.assert_array_equal(learner.get_params(), reference.get_params())

    def test_near_noiseless_votes_match_thresholded_predictions(self, setup_factory, streams):
        setup = setup_factory(epsilon=60.0, e_com=1)
        expected = [local_vote(m.predict_proba(setup.unlabeled.features), setup.tau) for m in pretrained(setup, streams)]
        server = RecordingServer()
        run_aafv(setup, streams, server=server)
        for upload, reference in zip(server.uploads[0], expected):
            np.testing.assert_array_equal(upload, reference)

    def test_trace_accounting(self, setup_factory, streams):
        setup = setup_factory(e_com=3)
        sunk = []
        outcome = run_aafv(
            setup, streams, vote_sink=lambda r, votes, global_votes: sunk.append((r, votes, global_votes))
        )
        assert [t.round_index for t in outcome.traces] == [1, 2, 3]
        for trace, (round_index, votes, global_votes) in zip(outcome.traces, sunk):
            assert trace.round_index == round_index
            assert votes.shape == (setup.k, setup.unlabeled.rows)
            assert trace.pseudo_size + trace.global_abstain == setup.unlabeled.rows
            assert trace.pseudo_size == int(np.sum(global_votes != Vote.ABSTAIN))
            assert trace.client_abstain == [int(np.sum(v == Vote.ABSTAIN)) for v in votes]
            assert len(trace.client_accuracy) == setup.k
            assert trace.pseudo_label_accuracy is None

    def test_label_auditor_receives_global_votes(self, setup_factory, streams):
        setup = setup_factory(e_com=2)
        seen = []

        def auditor(global_votes):
            seen.append(global_votes.copy())
            return 0.5

        outcome = run_aafv(setup, streams, label_auditor=auditor)
        assert len(seen) == 2
        assert all(t.pseudo_label_accuracy == 0.5 for t in outcome.traces)

    def test_all_abstain_round_skips_revisit(self, setup_factory, streams, caplog):
        setup = setup_factory(e_com=2)
        expected = pretrained(setup, streams)
        with caplog.at_level(logging.WARNING):
            outcome = run_aafv(setup, streams, server=AbstainingServer())
        assert all(t.revisit_skipped and t.pseudo_size == 0 for t in outcome.traces)
        assert "skipping revisit" in caplog.text
        for learner, reference in zip(outcome.learners, expected):
            np.testing.assert_array_equal(learner.get_params(), reference.get_params())

    def test_same_streams_same_outcome(self, small_parts, streams):
        runs = []
        for _ in range(2):
            setup = make_setup(small_parts, ["logistic", "svm", "mlp"], streams, e_com=2, pretrain_epochs=3)
            runs.append(run_aafv(setup, streams))
        assert runs[0].traces == runs[1].traces
        for a, b in zip(runs[0].learners, runs[1].learners):
            np.testing.assert_array_equal(a.get_params(), b.get_params())

    def test_single_client_rejected(self, setup_factory, streams):
        setup = setup_factory(kinds=("logistic",))
        with pytest.raises(ProtocolError):
            run_aafv(setup, streams)


class TestFedAvg:
    def test_average_parameters(self):
        np.testing.assert_allclose(average_parameters([np.array([1.0, 2.0]), np.array([3.0, 6.0])]), [2.0, 4.0])

    def test_mixed_roster_rejected(self, setup_factory, streams):
        with pytest.raises(ProtocolError):
            run_fedavg(setup_factory(), streams)

    def test_single_client_rejected(self, setup_factory, streams):
        with pytest.raises(ProtocolError):
            run_fedavg(setup_factory(kinds=("logistic",)), streams)

    def test_one_round_is_the_mean_of_clipped_client_updates(self, setup_factory, streams):
        setup = setup_factory(kinds=("logistic",) * 3, e_com=1, epsilon=1e9, clip_bound=0.05)
        start = setup.clients[0].learner.get_params()
        updates = []
        for k, client in enumerate(setup.clients):
            learner = client.learner.clone().set_params(start)
            learner.fit(client.data, setup.local_epochs_per_round, streams.derive("fedavg", "client", k, "round", 1, "train"))
            updates.append(np.clip(learner.get_params(), -0.05, 0.05))
        outcome = run_fedavg(setup, streams)
        np.testing.assert_allclose(outcome.model.get_params(), np.mean(updates, axis=0), atol=1e-6)

    def test_clients_end_with_the_shared_model(self, setup_factory, streams):
        setup = setup_factory(kinds=("svm",) * 3, e_com=3)
        outcome = run_fedavg(setup, streams, tag="fedavg-svm")
        assert [t.round_index for t in outcome.traces] == [1, 2, 3]
        assert outcome.traces[-1].accuracy == evaluate(outcome.model, setup.test)
        for client in setup.clients:
            np.testing.assert_array_equal(client.learner.get_params(), outcome.model.get_params())

    def test_tags_give_independent_noise(self, small_parts, streams):
        finals = []
        for tag in ("fedavg-a", "fedavg-b"):
            setup = make_setup(small_parts, ["logistic"] * 3, streams, e_com=1, local_epochs_per_round=1)
            finals.append(run_fedavg(setup, streams, tag=tag).model.get_params())
        assert not np.array_equal(finals[0], finals[1])


class TestLocal:
    def test_matches_independent_training(self, setup_factory, streams):
        setup = setup_factory()
        expected = []
        for k, client in enumerate(setup.clients):
            learner = client.learner.clone()
            learner.fit(client.data, 4, streams.derive("local", "client", k, "train"))
            expected.append(learner.get_params())
        trained = run_local(setup, 4, streams)
        for learner, params in zip(trained, expected):
            np.testing.assert_array_equal(learner.get_params(), params)

    def test_single_client_allowed(self, setup_factory, streams):
        assert len(run_local(setup_factory(kinds=("mlp",)), 2, streams)) == 1

    def test_parameter_noise(self, small_parts, streams):
        plain = run_local(make_setup(small_parts, ["logistic"] * 3, streams), 2, streams)
        noisy = run_local(make_setup(small_parts, ["logistic"] * 3, streams), 2, streams, param_noise=True)
        for a, b in zip(plain, noisy):
            assert not np.array_equal(a.get_params(), b.get_params())
            assert np.all(np.isfinite(b.get_params()))
